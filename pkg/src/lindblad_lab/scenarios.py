from __future__ import annotations

"""Scenario configs and the pipelines that turn them into reports.

A config names a scenario and one system: either the boundary-driven chain
``{"chain": {"length", "beta", "epsilon"}}`` or explicit matrix files
``{"matrices": {"hamiltonian", "dims", "jumps", ...}}``. Scenarios are
looked up in a ScenarioRegistry and run against the resolved system.
"""

import abc
import asyncio
import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Type

import numpy as np

from . import tensor
from .config import Settings, get_settings
from .errors import ConfigError, NotErgodicError, ValidationError
from .lindblad import (
    HamiltonianDecomposition,
    JumpSet,
    Liouvillian,
    assemble_liouvillian,
    cptp_check,
    decompose_hamiltonian,
    lift_local,
    reset_dissipator_jumps,
)
from .matrix_io import load_matrices, load_matrix
from .report import AnalysisReport, CPTPVerdict
from .spin_chain import ChainModel, boundary_reset_model, reproduce_chain
from .steady_state import (
    commutator_diagnostics,
    gibbs_nogo,
    local_steady_state,
    maximal_support_state,
    mean_ergodic_projector,
    product_factor_check,
    stationary_basis,
)
from .tensor import CompositeDims, ComplexMatrix
from .uniqueness import (
    bulk_uniqueness_verdict,
    commutant_uniqueness,
    ergodic_decomposition,
    product_closure_check,
    stationary_decomposition_residual,
)

logger = logging.getLogger(__name__)

DEFAULT_TIMES = (1.0,)
TOP_LEVEL_KEYS = frozenset(
    {"scenario", "description", "system", "tolerances", "seed", "output", "beta", "times", "sweep", "workers"}
)


class ScenarioKind(str, Enum):
    STEADY_STATE = "steady-state"
    UNIQUENESS = "uniqueness"
    NO_GO = "no-go"
    DECOMPOSE = "decompose"
    CHAIN = "chain"
    SWEEP = "sweep"


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _require_mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(f"expected an object, got {type(value).__name__}", field=path)
    return value


def _reject_unknown(data: Mapping[str, Any], allowed: Iterable[str], path: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError(f"unknown key (allowed: {', '.join(sorted(allowed))})", field=f"{prefix}{unknown[0]}")


def _number(value: Any, path: str, minimum: Optional[float] = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", field=path)
    if minimum is not None and (value <= minimum if strict else value < minimum):
        relation = ">" if strict else ">="
        raise ConfigError(f"must be {relation} {minimum}, got {value}", field=path)
    return float(value)


def _integer(value: Any, path: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=path)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=path)
    return value


def _path(value: Any, path: str, base_dir: Path) -> Path:
    if not isinstance(value, str) or not value:
        raise ConfigError(f"expected a file path, got {value!r}", field=path)
    candidate = Path(value)
    return candidate if candidate.is_absolute() else base_dir / candidate


@dataclass(frozen=True)
class ChainSpec:
    length: int
    beta: float
    epsilon: float
    boundary_coupling: float = 1.0

    @classmethod
    def from_dict(cls, data: Any, path: str = "system.chain") -> "ChainSpec":
        data = _require_mapping(data, path)
        _reject_unknown(data, ("length", "beta", "epsilon", "boundary_coupling"), path)
        for key in ("length", "beta", "epsilon"):
            if key not in data:
                raise ConfigError("missing required key", field=f"{path}.{key}")
        return cls(
            length=_integer(data["length"], f"{path}.length", 2),
            beta=_number(data["beta"], f"{path}.beta", 0.0),
            epsilon=_number(data["epsilon"], f"{path}.epsilon", 0.0, strict=True),
            boundary_coupling=_number(data.get("boundary_coupling", 1.0), f"{path}.boundary_coupling"),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "length": self.length,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "boundary_coupling": self.boundary_coupling,
        }


@dataclass(frozen=True)
class ResetSpec:
    target: Path
    rate: float


@dataclass(frozen=True)
class MatrixSystem:
    """Explicit matrices; ``local`` jumps act on H_A and are lifted."""

    hamiltonian: Path
    dims: Optional[Tuple[int, int]] = None
    jumps: Optional[Path] = None
    lamb_shift: Optional[Path] = None
    local: bool = False
    reset: Optional[ResetSpec] = None

    @classmethod
    def from_dict(cls, data: Any, base_dir: Path, path: str = "system.matrices") -> "MatrixSystem":
        data = _require_mapping(data, path)
        _reject_unknown(data, ("hamiltonian", "dims", "jumps", "lamb_shift", "local", "reset"), path)
        if "hamiltonian" not in data:
            raise ConfigError("missing required key", field=f"{path}.hamiltonian")

        dims = None
        if data.get("dims") is not None:
            raw = data["dims"]
            if not isinstance(raw, list) or len(raw) != 2:
                raise ConfigError("expected [dim_a, dim_b]", field=f"{path}.dims")
            dims = (_integer(raw[0], f"{path}.dims[0]", 1), _integer(raw[1], f"{path}.dims[1]", 1))

        local = data.get("local", False)
        if not isinstance(local, bool):
            raise ConfigError(f"expected true or false, got {local!r}", field=f"{path}.local")

        reset = None
        if data.get("reset") is not None:
            raw = _require_mapping(data["reset"], f"{path}.reset")
            _reject_unknown(raw, ("target", "rate"), f"{path}.reset")
            if "target" not in raw or "rate" not in raw:
                raise ConfigError("needs both 'target' and 'rate'", field=f"{path}.reset")
            reset = ResetSpec(
                target=_path(raw["target"], f"{path}.reset.target", base_dir),
                rate=_number(raw["rate"], f"{path}.reset.rate", 0.0, strict=True),
            )
            if data.get("jumps") is not None and not local:
                raise ConfigError(
                    "reset dissipation is local; explicit jumps must then be local too", field=f"{path}.local"
                )
            local = True

        if local and dims is None:
            raise ConfigError("local dissipation needs 'dims'", field=f"{path}.dims")
        return cls(
            hamiltonian=_path(data["hamiltonian"], f"{path}.hamiltonian", base_dir),
            dims=dims,
            jumps=None if data.get("jumps") is None else _path(data["jumps"], f"{path}.jumps", base_dir),
            lamb_shift=(
                None if data.get("lamb_shift") is None else _path(data["lamb_shift"], f"{path}.lamb_shift", base_dir)
            ),
            local=local,
            reset=reset,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hamiltonian": str(self.hamiltonian),
            "dims": None if self.dims is None else list(self.dims),
            "jumps": None if self.jumps is None else str(self.jumps),
            "lamb_shift": None if self.lamb_shift is None else str(self.lamb_shift),
            "local": self.local,
            "reset": None if self.reset is None else {"target": str(self.reset.target), "rate": self.reset.rate},
        }


@dataclass(frozen=True)
class SweepGrid:
    lengths: Tuple[int, ...]
    betas: Tuple[float, ...]
    epsilons: Tuple[float, ...]

    @classmethod
    def from_dict(cls, data: Any, defaults: Optional[ChainSpec], path: str = "sweep") -> "SweepGrid":
        data = _require_mapping(data, path)
        _reject_unknown(data, ("length", "beta", "epsilon"), path)

        def axis(key: str, parse) -> Tuple:
            if key not in data:
                if defaults is None:
                    raise ConfigError("missing grid axis", field=f"{path}.{key}")
                return (getattr(defaults, key),)
            values = data[key]
            if not isinstance(values, list) or not values:
                raise ConfigError("expected a non-empty list", field=f"{path}.{key}")
            return tuple(parse(v, f"{path}.{key}[{i}]") for i, v in enumerate(values))

        return cls(
            lengths=axis("length", lambda v, p: _integer(v, p, 2)),
            betas=axis("beta", lambda v, p: _number(v, p, 0.0)),
            epsilons=axis("epsilon", lambda v, p: _number(v, p, 0.0, strict=True)),
        )

    def points(self, boundary_coupling: float = 1.0) -> List[ChainSpec]:
        """Grid points in row-major order (length slowest)."""
        return [
            ChainSpec(length, beta, epsilon, boundary_coupling)
            for length, beta, epsilon in itertools.product(self.lengths, self.betas, self.epsilons)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {"length": list(self.lengths), "beta": list(self.betas), "epsilon": list(self.epsilons)}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: ScenarioKind
    chain: Optional[ChainSpec] = None
    matrices: Optional[MatrixSystem] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    output: Optional[Path] = None
    beta: Optional[float] = None
    times: Tuple[float, ...] = DEFAULT_TIMES
    sweep: Optional[SweepGrid] = None
    workers: Optional[int] = None
    description: str = ""

    @classmethod
    def from_dict(
        cls,
        data: Any,
        base_dir: Optional[Path] = None,
        scenario: Optional[str] = None,
        settings: Optional[Settings] = None,
    ) -> "ScenarioConfig":
        """Parse and validate a config dict; errors name the offending field."""
        settings = settings or get_settings()
        base_dir = Path.cwd() if base_dir is None else Path(base_dir)
        data = _require_mapping(data, "config")
        _reject_unknown(data, TOP_LEVEL_KEYS, "")

        name = data.get("scenario", scenario)
        if scenario is not None and data.get("scenario") not in (None, scenario):
            raise ConfigError(
                f"config is for '{data['scenario']}' but '{scenario}' was requested", field="scenario"
            )
        if name is None:
            raise ConfigError("missing required key", field="scenario")
        try:
            kind = ScenarioKind(name)
        except ValueError:
            available = ", ".join(k.value for k in ScenarioKind)
            raise ConfigError(f"unknown scenario '{name}'. Available: {available}", field="scenario") from None

        chain = matrices = None
        if data.get("system") is not None:
            system = _require_mapping(data["system"], "system")
            _reject_unknown(system, ("chain", "matrices"), "system")
            if "chain" in system and "matrices" in system:
                raise ConfigError("give either 'chain' or 'matrices', not both", field="system")
            if "chain" in system:
                chain = ChainSpec.from_dict(system["chain"])
                if chain.length > settings.max_chain_length:
                    raise ConfigError(
                        f"length {chain.length} exceeds the cap {settings.max_chain_length} "
                        f"for dimension cap {settings.dim_cap}",
                        field="system.chain.length",
                    )
            elif "matrices" in system:
                matrices = MatrixSystem.from_dict(system["matrices"], base_dir)
            else:
                raise ConfigError("expected 'chain' or 'matrices'", field="system")

        tolerances = _require_mapping(data.get("tolerances", {}), "tolerances")
        settings.tolerances.with_overrides(tolerances)

        sweep = None
        if kind is ScenarioKind.SWEEP:
            if matrices is not None:
                raise ConfigError("sweeps run over chain parameters only", field="system.matrices")
            if "sweep" not in data:
                raise ConfigError("missing required key for the sweep scenario", field="sweep")
            sweep = SweepGrid.from_dict(data["sweep"], chain)
            for index, length in enumerate(sweep.lengths):
                if length > settings.max_chain_length:
                    raise ConfigError(f"length {length} exceeds the cap {settings.max_chain_length}",
                                      field=f"sweep.length[{index}]")
        elif "sweep" in data:
            raise ConfigError("only the sweep scenario takes a grid", field="sweep")
        elif chain is None and matrices is None:
            raise ConfigError("missing required key", field="system")
        if kind is ScenarioKind.CHAIN and chain is None:
            raise ConfigError("the chain scenario needs a chain system", field="system.chain")

        times = data.get("times", list(DEFAULT_TIMES))
        if not isinstance(times, list) or not times:
            raise ConfigError("expected a non-empty list", field="times")
        description = data.get("description", "")
        if not isinstance(description, str):
            raise ConfigError("expected a string", field="description")
        return cls(
            scenario=kind,
            chain=chain,
            matrices=matrices,
            tolerances={key: float(value) for key, value in tolerances.items()},
            seed=_integer(data.get("seed", 0), "seed", 0),
            output=None if data.get("output") is None else _path(data["output"], "output", base_dir),
            beta=None if data.get("beta") is None else _number(data["beta"], "beta"),
            times=tuple(_number(t, f"times[{i}]", 0.0, strict=True) for i, t in enumerate(times)),
            sweep=sweep,
            workers=None if data.get("workers") is None else _integer(data["workers"], "workers", 1),
            description=description,
        )

    def with_overrides(
        self,
        tolerances: Optional[Mapping[str, float]] = None,
        seed: Optional[int] = None,
        output: Optional[Path] = None,
    ) -> "ScenarioConfig":
        """Apply command-line overrides on top of the file."""
        merged = dict(self.tolerances)
        merged.update(tolerances or {})
        return replace(
            self,
            tolerances=merged,
            seed=self.seed if seed is None else seed,
            output=self.output if output is None else Path(output),
        )

    def settings(self, base: Optional[Settings] = None) -> Settings:
        return (base or get_settings()).with_tolerances(self.tolerances)

    def to_dict(self) -> Dict[str, Any]:
        system: Optional[Dict[str, Any]] = None
        if self.chain is not None:
            system = {"chain": self.chain.to_dict()}
        elif self.matrices is not None:
            system = {"matrices": self.matrices.to_dict()}
        data: Dict[str, Any] = {
            "scenario": self.scenario.value,
            "system": system,
            "tolerances": dict(self.tolerances),
            "seed": self.seed,
            "output": None if self.output is None else str(self.output),
            "beta": self.beta,
            "times": list(self.times),
        }
        if self.sweep is not None:
            data["sweep"] = self.sweep.to_dict()
            data["workers"] = self.workers
        if self.description:
            data["description"] = self.description
        return data


def load_config(path: Path, scenario: Optional[str] = None, settings: Optional[Settings] = None) -> ScenarioConfig:
    """Read a JSON config; matrix paths resolve relative to the file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return ScenarioConfig.from_dict(data, base_dir=path.parent, scenario=scenario, settings=settings)


# ---------------------------------------------------------------------------
# Systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolvedSystem:
    """Hamiltonian, full jump set and, for boundary-local dissipation, the local part."""

    decomposition: HamiltonianDecomposition
    jumps: JumpSet
    settings: Settings = field(repr=False, compare=False)
    local: Optional[JumpSet] = None
    rho_hat_a: Optional[ComplexMatrix] = None
    chain: Optional[ChainModel] = None

    @property
    def dims(self) -> CompositeDims:
        return self.decomposition.dims

    @cached_property
    def liouvillian(self) -> Liouvillian:
        if self.chain is not None:
            return self.chain.liouvillian
        return assemble_liouvillian(self.decomposition, self.jumps, self.settings)

    @cached_property
    def local_target(self) -> Optional[ComplexMatrix]:
        """rho_hat_A if known or derivable from an ergodic local dissipator."""
        if self.rho_hat_a is not None:
            return self.rho_hat_a
        if self.local is None:
            return None
        return local_steady_state(self.local, self.settings)


def _load_jumps(system: MatrixSystem, dim: int, settings: Settings) -> JumpSet:
    jumps = [] if system.jumps is None else load_matrices(system.jumps)
    for index, jump in enumerate(jumps):
        if jump.shape != (dim, dim):
            raise ConfigError(
                f"jump {index} is {jump.shape[0]}x{jump.shape[1]}, expected {dim}x{dim}",
                field="system.matrices.jumps",
            )
    k = None
    if system.lamb_shift is not None:
        k = load_matrix(system.lamb_shift, hermitian=True, tol=settings.tolerances.hermitian)
        if k.shape != (dim, dim):
            raise ConfigError(f"expected a {dim}x{dim} matrix", field="system.matrices.lamb_shift")
    if not jumps and k is None:
        return JumpSet.empty(dim)
    return JumpSet.of(jumps, k if k is not None else np.zeros((dim, dim)))


def resolve_system(config: ScenarioConfig, settings: Optional[Settings] = None) -> ResolvedSystem:
    """Build the operators a config describes."""
    settings = settings or config.settings()
    if config.chain is not None:
        spec = config.chain
        model = boundary_reset_model(spec.length, spec.beta, spec.epsilon, spec.boundary_coupling, settings)
        return ResolvedSystem(
            decomposition=model.decomposition,
            jumps=model.boundary_jumps,
            settings=settings,
            local=model.local_jumps,
            rho_hat_a=np.asarray(model.rho_hat_a),
            chain=model,
        )
    if config.matrices is None:
        raise ConfigError("no system to resolve", field="system")

    system = config.matrices
    h = load_matrix(system.hamiltonian, hermitian=True, tol=settings.tolerances.hermitian)
    dims = CompositeDims(*system.dims) if system.dims is not None else CompositeDims.single(h.shape[0])
    if dims.total != h.shape[0]:
        raise ConfigError(
            f"dims {dims.dim_a}x{dims.dim_b} do not match a {h.shape[0]}-dimensional Hamiltonian",
            field="system.matrices.dims",
        )
    settings.check_dimension(dims.total)
    decomposition = decompose_hamiltonian(h, dims, settings.tolerances.hermitian)

    if not system.local:
        return ResolvedSystem(decomposition, _load_jumps(system, dims.total, settings), settings)

    local = _load_jumps(system, dims.dim_a, settings)
    rho_hat_a = None
    if system.reset is not None:
        rho_hat_a = load_matrix(system.reset.target, hermitian=True, tol=settings.tolerances.hermitian)
        local = local.merged(reset_dissipator_jumps(rho_hat_a, system.reset.rate, settings.tolerances.density))
    return ResolvedSystem(decomposition, lift_local(local, dims), settings, local=local, rho_hat_a=rho_hat_a)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

class Scenario(abc.ABC):
    """One analysis pipeline. Instances are single-use."""

    kind: ScenarioKind

    def __init__(self, config: ScenarioConfig, settings: Settings) -> None:
        self.config = config
        self.settings = settings
        self.report = AnalysisReport(scenario=self.kind.value, config=config.to_dict())
        self.projector: Optional[ComplexMatrix] = None

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.report.timings[name] = self.report.timings.get(name, 0.0) + elapsed
            logger.debug("Stage %s took %.3fs", name, elapsed)

    @cached_property
    def system(self) -> ResolvedSystem:
        with self.stage("assemble"):
            resolved = resolve_system(self.config, self.settings)
            _ = resolved.liouvillian
        return resolved

    @abc.abstractmethod
    def analyse(self) -> None:
        """Fill ``self.report``."""

    def run(self) -> AnalysisReport:
        logger.info("Running scenario %s", self.kind.value)
        self.analyse()
        logger.info("Scenario %s finished in %.3fs", self.kind.value, sum(self.report.timings.values()))
        return self.report

    def record_stationary(self, projector: Optional[ComplexMatrix] = None) -> ComplexMatrix:
        liou = self.system.liouvillian
        with self.stage("stationary"):
            projector = mean_ergodic_projector(liou, self.settings) if projector is None else projector
            state = maximal_support_state(liou, projector, self.settings)
            basis = stationary_basis(liou, settings=self.settings, projector=projector)
        self.projector = projector
        self.report.stationary_dimension = basis.dimension
        self.report.maximal_support_state = state
        return state


class SteadyStateScenario(Scenario):
    kind = ScenarioKind.STEADY_STATE

    def analyse(self) -> None:
        system = self.system
        tols = self.settings.tolerances
        state = self.record_stationary()
        self.report.extra["min_eigenvalue"] = tensor.min_eigenvalue(state)
        self.report.extra["trace_residual"] = system.liouvillian.trace_residual()

        with self.stage("cptp"):
            checks = [cptp_check(system.liouvillian, t, tols.cptp) for t in self.config.times]
        passed = all(check.passed for check in checks)
        self.report.set_verdict("cptp", CPTPVerdict.CPTP if passed else CPTPVerdict.NOT_CPTP)
        self.report.extra["min_choi_eigenvalue"] = min(check.min_choi_eigenvalue for check in checks)

        if not system.dims.is_bipartite or system.local is None:
            return
        try:
            target = system.local_target
        except NotErgodicError as exc:
            logger.warning("Skipping the product check: %s", exc)
            return
        with self.stage("product"):
            check = product_factor_check(state, system.dims, target, tols.product)
            diagnostics = commutator_diagnostics(state, system.decomposition, tols.product, tols.positive_definite)
        self.report.product_residual = check.factorization.residual
        self.report.extra["marginal_residual"] = check.marginal_residual
        self.report.set_verdict("product", check.verdict)
        self.report.set_verdict("commutator", diagnostics.verdict)
        self.report.commutator_residuals = dict(zip(("a", "b", "ab"), diagnostics.residuals))


class UniquenessScenario(Scenario):
    kind = ScenarioKind.UNIQUENESS

    def analyse(self) -> None:
        system = self.system
        self.record_stationary()
        with self.stage("commutant"):
            result = commutant_uniqueness(system.liouvillian, self.settings, self.projector)
        self.report.set_verdict("commutant", result.verdict)
        if system.local is not None:
            with self.stage("bulk"):
                bulk = bulk_uniqueness_verdict(system.decomposition, system.local, self.settings)
            self.report.set_verdict("bulk", bulk.verdict)
            self.report.extra["bulk_basis_dimension"] = bulk.basis_dimension
        with self.stage("product_closure"):
            closure = product_closure_check(system.liouvillian, self.settings)
        self.report.set_verdict("product_closure", closure.verdict)
        self.report.extra["closure_dimension"] = closure.dimension


class NoGoScenario(Scenario):
    kind = ScenarioKind.NO_GO

    def analyse(self) -> None:
        system = self.system
        if system.local is None:
            raise ConfigError("the no-go scenario needs local dissipation", field="system.matrices.local")
        beta = self.config.beta
        if beta is None:
            if self.config.chain is None:
                raise ConfigError("missing required key for the no-go scenario", field="beta")
            beta = self.config.chain.beta
        with self.stage("gibbs"):
            result = gibbs_nogo(system.decomposition, system.local, beta, settings=self.settings)
        self.report.gibbs_residual = result.residual
        self.report.set_verdict("gibbs", result.verdict)
        self.report.extra["beta"] = beta
        self.report.extra["interaction_norm"] = result.interaction_norm


class DecomposeScenario(Scenario):
    kind = ScenarioKind.DECOMPOSE

    def analyse(self) -> None:
        liou = self.system.liouvillian
        self.record_stationary()
        with self.stage("decompose"):
            decomposition = ergodic_decomposition(liou, self.settings, seed=self.config.seed)
            residual = stationary_decomposition_residual(liou, decomposition, self.settings)
        self.report.block_count = decomposition.block_count
        self.report.extra["nullspace_dimension"] = decomposition.nullspace_dim
        self.report.extra["transient_discarded"] = float(decomposition.transient_discarded)
        self.report.extra["decomposition_residual"] = residual


class ChainScenario(Scenario):
    kind = ScenarioKind.CHAIN

    def analyse(self) -> None:
        spec = self.config.chain
        with self.stage("reproduce"):
            result = reproduce_chain(
                spec.length, spec.beta, spec.epsilon, boundary_coupling=spec.boundary_coupling, settings=self.settings
            )
        report = self.report
        report.stationary_dimension = result.stationary_dimension
        report.maximal_support_state = result.maximal_support_state
        report.gibbs_residual = result.gibbs_residual
        report.product_residual = result.product.factorization.residual
        report.commutator_residuals = dict(zip(("a", "b", "ab"), result.diagnostics.residuals))
        report.set_verdict("commutant", result.commutant.verdict)
        report.set_verdict("bulk", result.bulk.verdict)
        report.set_verdict("product_closure", result.closure.verdict)
        report.set_verdict("product", result.product.verdict)
        report.set_verdict("commutator", result.diagnostics.verdict)
        report.clauses = dict(result.clauses)
        report.extra.update(
            stationary_residual=result.stationary_residual,
            max_support_error=result.max_support_error,
            epsilon_deviation=result.epsilon_deviation,
            marginal_residual=result.product.marginal_residual,
            closure_dimension=float(result.closure.dimension),
        )
        for scale, residual in zip(result.interaction.scales, result.interaction.residuals):
            report.extra[f"gibbs_residual_s{scale:g}"] = residual


class SweepScenario(Scenario):
    kind = ScenarioKind.SWEEP

    def analyse(self) -> None:
        boundary_coupling = self.config.chain.boundary_coupling if self.config.chain else 1.0
        points = self.config.sweep.points(boundary_coupling)
        workers = self.config.workers or min(len(points), os.cpu_count() or 1)
        with self.stage("sweep"):
            self.report.points = run_sweep(self.config, points, self.settings, workers)
        passed = sum(1 for point in self.report.points if point.clauses and all(point.clauses.values()))
        self.report.extra["points_passed"] = passed
        self.report.extra["points_total"] = len(points)


class ScenarioRegistry:
    """Maps scenario names to their pipeline classes."""

    def __init__(self) -> None:
        self._constructors: Dict[str, Type[Scenario]] = {}

    def register(self, constructor: Type[Scenario]) -> Type[Scenario]:
        self._constructors[constructor.kind.value] = constructor
        return constructor

    def create(self, name: str, config: ScenarioConfig, settings: Settings) -> Scenario:
        key = name.lower()
        if key not in self._constructors:
            available = ", ".join(self._constructors.keys())
            raise KeyError(f"Unknown scenario '{name}'. Available: {available}")
        return self._constructors[key](config, settings)

    def available(self) -> Iterable[str]:
        return self._constructors.keys()


registry = ScenarioRegistry()
for _scenario in (
    SteadyStateScenario,
    UniquenessScenario,
    NoGoScenario,
    DecomposeScenario,
    ChainScenario,
    SweepScenario,
):
    registry.register(_scenario)


def run_scenario(config: ScenarioConfig, settings: Optional[Settings] = None) -> AnalysisReport:
    """Run the pipeline ``config`` names; deterministic given the config and seed."""
    settings = config.settings(settings)
    return registry.create(config.scenario.value, config, settings).run()


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _point_config(config: ScenarioConfig, spec: ChainSpec) -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioKind.CHAIN,
        chain=spec,
        tolerances=config.tolerances,
        seed=config.seed,
        times=config.times,
    )


def _run_point(config: ScenarioConfig, settings: Settings) -> AnalysisReport:
    return registry.create(ScenarioKind.CHAIN.value, config, settings).run()


async def _run_points(
    configs: Sequence[ScenarioConfig], settings: Settings, workers: int
) -> List[AnalysisReport]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="sweep") as pool:
        tasks = [loop.run_in_executor(pool, _run_point, point, settings) for point in configs]
        return list(await asyncio.gather(*tasks))


def run_sweep(
    config: ScenarioConfig, points: Sequence[ChainSpec], settings: Settings, workers: int = 1
) -> List[AnalysisReport]:
    """Run every grid point on a worker pool; results keep grid order."""
    if workers < 1:
        raise ValidationError(f"workers must be positive, got {workers}")
    configs = [_point_config(config, spec) for spec in points]
    logger.info("Sweeping %d chain points on %d worker(s)", len(configs), workers)
    return asyncio.run(_run_points(configs, settings, workers))
