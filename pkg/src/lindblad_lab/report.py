from __future__ import annotations

"""Analysis reports and their JSON schema.

Every report carries ``schema_version``. Fields a scenario does not compute
are null, verdicts are strings from closed enums and every number is
finite, so a report survives json.dumps -> json.loads unchanged.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np

from .errors import ReportSchemaError
from .steady_state import DiagnosticsVerdict, GibbsVerdict, ProductVerdict
from .tensor import ComplexMatrix
from .uniqueness import Verdict

SCHEMA_VERSION = "lindblad-lab/report/1"


class CPTPVerdict(str, Enum):
    CPTP = "cptp"
    NOT_CPTP = "not cptp"


VERDICT_VALUES: Dict[str, frozenset] = {
    "commutant": frozenset(v.value for v in Verdict),
    "bulk": frozenset(v.value for v in Verdict),
    "product_closure": frozenset(v.value for v in Verdict),
    "product": frozenset(v.value for v in ProductVerdict),
    "commutator": frozenset(v.value for v in DiagnosticsVerdict),
    "gibbs": frozenset(v.value for v in GibbsVerdict),
    "cptp": frozenset(v.value for v in CPTPVerdict),
}

REQUIRED_KEYS = (
    "schema_version",
    "scenario",
    "config",
    "stationary_dimension",
    "maximal_support_state",
    "product_residual",
    "verdicts",
    "commutator_residuals",
    "gibbs_residual",
    "block_count",
    "extra",
    "clauses",
    "points",
    "timings",
)

COMMUTATOR_KEYS = ("a", "b", "ab")


def _empty_verdicts() -> Dict[str, Optional[str]]:
    return {key: None for key in VERDICT_VALUES}


@dataclass
class AnalysisReport:
    scenario: str
    config: Dict[str, Any] = field(default_factory=dict)
    stationary_dimension: Optional[int] = None
    maximal_support_state: Optional[ComplexMatrix] = None
    product_residual: Optional[float] = None
    verdicts: Dict[str, Optional[str]] = field(default_factory=_empty_verdicts)
    commutator_residuals: Optional[Dict[str, float]] = None
    gibbs_residual: Optional[float] = None
    block_count: Optional[int] = None
    extra: Dict[str, float] = field(default_factory=dict)
    clauses: Optional[Dict[str, bool]] = None
    points: List["AnalysisReport"] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def set_verdict(self, key: str, value: Optional[Enum]) -> None:
        if key not in VERDICT_VALUES:
            raise KeyError(f"Unknown verdict '{key}'. Available: {', '.join(VERDICT_VALUES)}")
        self.verdicts[key] = None if value is None else str(value.value)

    @property
    def inapplicable(self) -> List[str]:
        """Verdict keys (including those of sweep points) that came out inapplicable."""
        keys = [key for key, value in self.verdicts.items() if value == Verdict.INAPPLICABLE.value]
        for index, point in enumerate(self.points):
            keys.extend(f"points[{index}].{key}" for key in point.inapplicable)
        return keys

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "scenario": self.scenario,
            "config": self.config,
            "stationary_dimension": self.stationary_dimension,
            "maximal_support_state": matrix_to_dict(self.maximal_support_state),
            "product_residual": _float_or_none(self.product_residual),
            "verdicts": dict(self.verdicts),
            "commutator_residuals": (
                None if self.commutator_residuals is None
                else {key: float(self.commutator_residuals[key]) for key in COMMUTATOR_KEYS}
            ),
            "gibbs_residual": _float_or_none(self.gibbs_residual),
            "block_count": self.block_count,
            "extra": {key: float(value) for key, value in self.extra.items()},
            "clauses": None if self.clauses is None else {k: bool(v) for k, v in self.clauses.items()},
            "points": [point.to_dict() for point in self.points],
            "timings": {key: float(value) for key, value in self.timings.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AnalysisReport":
        validate_report(data)
        return cls(
            scenario=data["scenario"],
            config=dict(data["config"]),
            stationary_dimension=data["stationary_dimension"],
            maximal_support_state=matrix_from_dict(data["maximal_support_state"]),
            product_residual=data["product_residual"],
            verdicts=dict(data["verdicts"]),
            commutator_residuals=None if data["commutator_residuals"] is None else dict(data["commutator_residuals"]),
            gibbs_residual=data["gibbs_residual"],
            block_count=data["block_count"],
            extra=dict(data["extra"]),
            clauses=None if data["clauses"] is None else dict(data["clauses"]),
            points=[cls.from_dict(point) for point in data["points"]],
            timings=dict(data["timings"]),
            schema_version=data["schema_version"],
        )

    def to_json(self) -> str:
        data = self.to_dict()
        validate_report(data)
        return json.dumps(data, indent=2, allow_nan=False)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    def summary(self) -> str:
        """Plain-text digest for terminals."""
        lines = [f"scenario: {self.scenario}"]
        if self.stationary_dimension is not None:
            lines.append(f"stationary dimension: {self.stationary_dimension}")
        for key, value in self.verdicts.items():
            if value is not None:
                lines.append(f"{key}: {value}")
        if self.product_residual is not None:
            lines.append(f"product residual: {self.product_residual:.3e}")
        if self.commutator_residuals is not None:
            parts = ", ".join(f"{k}={self.commutator_residuals[k]:.3e}" for k in COMMUTATOR_KEYS)
            lines.append(f"commutator residuals: {parts}")
        if self.gibbs_residual is not None:
            lines.append(f"gibbs residual: {self.gibbs_residual:.3e}")
        if self.block_count is not None:
            lines.append(f"blocks: {self.block_count}")
        for key, value in self.extra.items():
            lines.append(f"{key}: {value:.6g}")
        for name, ok in (self.clauses or {}).items():
            lines.append(f"[{'ok' if ok else 'FAIL'}] {name}")
        for index, point in enumerate(self.points):
            chain = point.config.get("system", {}).get("chain", {})
            status = "ok" if point.clauses and all(point.clauses.values()) else "FAIL"
            lines.append(
                f"point {index}: length={chain.get('length')} beta={chain.get('beta')} "
                f"epsilon={chain.get('epsilon')} [{status}]"
            )
        if self.timings:
            lines.append(f"total time: {sum(self.timings.values()):.3f}s")
        return "\n".join(lines)


def _float_or_none(value: Optional[float]) -> Optional[float]:
    return None if value is None else float(value)


def matrix_to_dict(m: Optional[ComplexMatrix]) -> Optional[Dict[str, Any]]:
    if m is None:
        return None
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_dict(data: Optional[Mapping[str, Any]]) -> Optional[ComplexMatrix]:
    if data is None:
        return None
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data["im"], dtype=float)
    return (re + 1j * im).reshape(data["rows"], data["cols"])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _check_number(value: Any, path: str, optional: bool = True) -> None:
    if value is None and optional:
        return
    if not _is_number(value):
        raise ReportSchemaError(f"{path}: expected a finite number, got {value!r}")


def _check_count(value: Any, path: str) -> None:
    if value is None:
        return
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ReportSchemaError(f"{path}: expected a non-negative integer, got {value!r}")


def _check_number_map(value: Any, path: str) -> None:
    if not isinstance(value, Mapping):
        raise ReportSchemaError(f"{path}: expected an object, got {type(value).__name__}")
    for key, item in value.items():
        _check_number(item, f"{path}.{key}", optional=False)


def _check_matrix(value: Any, path: str) -> None:
    if value is None:
        return
    if not isinstance(value, Mapping) or set(value) != {"rows", "cols", "re", "im"}:
        raise ReportSchemaError(f"{path}: expected an object with rows, cols, re, im")
    _check_count(value["rows"], f"{path}.rows")
    _check_count(value["cols"], f"{path}.cols")
    size = value["rows"] * value["cols"]
    for part in ("re", "im"):
        entries = value[part]
        if not isinstance(entries, list) or len(entries) != size:
            raise ReportSchemaError(f"{path}.{part}: expected a list of {size} numbers")
        for index, item in enumerate(entries):
            _check_number(item, f"{path}.{part}[{index}]", optional=False)


def validate_report(data: Mapping[str, Any], path: str = "report") -> None:
    """Raise ReportSchemaError unless ``data`` is a well-formed report dict."""
    if not isinstance(data, Mapping):
        raise ReportSchemaError(f"{path}: expected an object, got {type(data).__name__}")
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise ReportSchemaError(f"{path}: missing keys {', '.join(missing)}")
    unknown = sorted(set(data) - set(REQUIRED_KEYS))
    if unknown:
        raise ReportSchemaError(f"{path}: unknown keys {', '.join(unknown)}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ReportSchemaError(
            f"{path}.schema_version: expected '{SCHEMA_VERSION}', got {data['schema_version']!r}"
        )
    if not isinstance(data["scenario"], str):
        raise ReportSchemaError(f"{path}.scenario: expected a string")
    if not isinstance(data["config"], Mapping):
        raise ReportSchemaError(f"{path}.config: expected an object")

    _check_count(data["stationary_dimension"], f"{path}.stationary_dimension")
    _check_count(data["block_count"], f"{path}.block_count")
    _check_matrix(data["maximal_support_state"], f"{path}.maximal_support_state")
    _check_number(data["product_residual"], f"{path}.product_residual")
    _check_number(data["gibbs_residual"], f"{path}.gibbs_residual")

    verdicts = data["verdicts"]
    if not isinstance(verdicts, Mapping) or set(verdicts) != set(VERDICT_VALUES):
        raise ReportSchemaError(f"{path}.verdicts: expected keys {', '.join(VERDICT_VALUES)}")
    for key, value in verdicts.items():
        if value is not None and value not in VERDICT_VALUES[key]:
            allowed = ", ".join(sorted(VERDICT_VALUES[key]))
            raise ReportSchemaError(f"{path}.verdicts.{key}: '{value}' is not one of {allowed}")

    residuals = data["commutator_residuals"]
    if residuals is not None:
        if not isinstance(residuals, Mapping) or set(residuals) != set(COMMUTATOR_KEYS):
            raise ReportSchemaError(f"{path}.commutator_residuals: expected keys a, b, ab")
        _check_number_map(residuals, f"{path}.commutator_residuals")

    _check_number_map(data["extra"], f"{path}.extra")
    _check_number_map(data["timings"], f"{path}.timings")

    clauses = data["clauses"]
    if clauses is not None:
        if not isinstance(clauses, Mapping) or not all(isinstance(v, bool) for v in clauses.values()):
            raise ReportSchemaError(f"{path}.clauses: expected an object of booleans")

    if not isinstance(data["points"], list):
        raise ReportSchemaError(f"{path}.points: expected a list")
    for index, point in enumerate(data["points"]):
        validate_report(point, f"{path}.points[{index}]")
