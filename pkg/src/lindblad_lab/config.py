from __future__ import annotations

"""Runtime settings: numerical tolerances and the dimension cap.

The total Hilbert space dimension is capped (default 64, i.e. a
4096 x 4096 superoperator) and can be overridden with the
``LINDBLADLAB_DIM_CAP`` environment variable.
"""

import dataclasses
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Mapping, Optional

from .errors import ConfigError, DimensionCapError

DIM_CAP_ENV = "LINDBLADLAB_DIM_CAP"
DEFAULT_DIM_CAP = 64


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    density: float = 1e-10
    null_space: float = 1e-10
    stationary: float = 1e-8
    commutant: float = 1e-9
    product: float = 1e-8
    closure: float = 1e-8
    projector: float = 1e-9
    cptp: float = 1e-9
    gibbs: float = 1e-9
    positive_definite: float = 1e-10

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    def with_overrides(self, overrides: Mapping[str, float]) -> "Tolerances":
        """Return a copy with the named tolerances replaced.

        Unknown names and non-positive values raise ConfigError with the
        offending field path.
        """
        updates: Dict[str, float] = {}
        for name, raw in overrides.items():
            if name not in self.names():
                available = ", ".join(self.names())
                raise ConfigError(f"Unknown tolerance '{name}'. Available: {available}", field=f"tolerances.{name}")
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"Tolerance must be a number, got {raw!r}", field=f"tolerances.{name}") from None
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"Tolerance must be positive and finite, got {value}", field=f"tolerances.{name}")
            updates[name] = value
        return dataclasses.replace(self, **updates)

    def as_dict(self) -> Dict[str, float]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Settings:
    dim_cap: int = DEFAULT_DIM_CAP
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if isinstance(self.dim_cap, bool) or not isinstance(self.dim_cap, int) or self.dim_cap < 2:
            raise ConfigError(f"Dimension cap must be an integer >= 2, got {self.dim_cap!r}", field="dim_cap")

    @property
    def superop_cap(self) -> int:
        return self.dim_cap**2

    @property
    def max_chain_length(self) -> int:
        return self.dim_cap.bit_length() - 1

    def check_dimension(self, dim: int, what: str = "Hilbert space") -> None:
        if dim > self.dim_cap:
            raise DimensionCapError(
                f"{what} dimension {dim} exceeds the configured cap {self.dim_cap} "
                f"(set {DIM_CAP_ENV} to raise it)"
            )

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if environ is None else environ
        raw = env.get(DIM_CAP_ENV)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"Expected a positive integer, got {raw!r}", field=DIM_CAP_ENV) from None
        return cls(dim_cap=cap)

    def with_tolerances(self, overrides: Mapping[str, float]) -> "Settings":
        return dataclasses.replace(self, tolerances=self.tolerances.with_overrides(overrides))


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings read once from the environment."""
    return Settings.from_env()
