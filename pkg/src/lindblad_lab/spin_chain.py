from __future__ import annotations

"""Boundary-driven XX chain.

The chain is built in the spin picture: for nearest-neighbour hopping the
Jordan-Wigner strings cancel, so sigma^+_j sigma^-_{j+1} + h.c. is the
fermionic hopping term. Site 1 is the leftmost (slowest) tensor factor and
|1> is the occupied state, so a = sigma^- = |0><1| on every site.

Site 1 is reset at rate epsilon to

    rho_hat_A = (|0><0| + e^{-beta} |1><1|) / (1 + e^{-beta}),

and the unique steady state is the product e^{-beta N} / (1 + e^{-beta})^l.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import tensor
from .config import Settings, get_settings
from .errors import ValidationError
from .lindblad import (
    HamiltonianDecomposition,
    JumpSet,
    Liouvillian,
    assemble_liouvillian,
    decompose_hamiltonian,
    lift_local,
    reset_dissipator_jumps,
)
from .steady_state import (
    CommutatorDiagnostics,
    ProductCheck,
    commutator_diagnostics,
    gibbs_nogo,
    maximal_support_state,
    mean_ergodic_projector,
    product_factor_check,
    stationary_basis,
)
from .tensor import CompositeDims, ComplexMatrix
from .uniqueness import (
    BulkUniquenessResult,
    ClosureResult,
    UniquenessResult,
    Verdict,
    bulk_uniqueness_verdict,
    commutant_uniqueness,
    product_closure_check,
)

logger = logging.getLogger(__name__)

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.conj().T
OCCUPATION = np.diag([0.0, 1.0]).astype(np.complex128)

# a beta > 0 Gibbs state must miss stationarity by at least this much
GIBBS_REJECTION = 1e-3


def _check_length(length: int, minimum: int, settings: Settings) -> None:
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < minimum:
        raise ValidationError(f"Chain length must be an integer >= {minimum}, got {length!r}")
    settings.check_dimension(2**length, f"{length}-site chain")


def site_operator(op: ComplexMatrix, site: int, length: int) -> ComplexMatrix:
    """``op`` on ``site`` (1-based) and the identity elsewhere."""
    if not 1 <= site <= length:
        raise ValidationError(f"site must be in [1, {length}], got {site}")
    factors = [tensor.identity(2)] * length
    factors[site - 1] = op
    return tensor.kron_all(factors)


def lowering_operator(site: int, length: int) -> ComplexMatrix:
    return site_operator(SIGMA_MINUS, site, length)


def xx_chain_hamiltonian(
    length: int, boundary_coupling: float = 1.0, settings: Optional[Settings] = None
) -> ComplexMatrix:
    """sum_j (a_j^dagger a_{j+1} + a_{j+1}^dagger a_j); the 1-2 bond is scaled by ``boundary_coupling``."""
    _check_length(length, 2, settings or get_settings())
    h = np.zeros((2**length, 2**length), dtype=np.complex128)
    for j in range(1, length):
        hop = site_operator(SIGMA_PLUS, j, length) @ site_operator(SIGMA_MINUS, j + 1, length)
        coupling = boundary_coupling if j == 1 else 1.0
        h += coupling * (hop + tensor.dagger(hop))
    return h


def number_operator(length: int) -> ComplexMatrix:
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < 1:
        raise ValidationError(f"length must be a positive integer, got {length!r}")
    counts = np.array([bin(index).count("1") for index in range(2**length)], dtype=float)
    return np.diag(counts).astype(np.complex128)


def site_state(beta: float) -> ComplexMatrix:
    """(|0><0| + e^{-beta}|1><1|) / (1 + e^{-beta})"""
    if not np.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and non-negative, got {beta}")
    weight = np.exp(-beta)
    return np.diag([1.0, weight]).astype(np.complex128) / (1.0 + weight)


def analytic_steady_state(length: int, beta: float) -> ComplexMatrix:
    """e^{-beta N} / (1 + e^{-beta})^length"""
    if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < 1:
        raise ValidationError(f"length must be a positive integer, got {length!r}")
    single = np.real(np.diag(site_state(beta)))
    counts = np.array([bin(index).count("1") for index in range(2**length)])
    return np.diag(single[0] ** (length - counts) * single[1] ** counts).astype(np.complex128)


def block_form(h: ComplexMatrix) -> Dict[str, ComplexMatrix]:
    """Blocks of ``h`` with respect to site-1 occupation, ordered occupied first.

    Returns K11, K10, K01, K00 with h = [[K11, K10], [K01, K00]], K_ij acting
    on the remaining sites.
    """
    half = h.shape[0] // 2
    return {
        "K11": h[half:, half:].copy(),
        "K10": h[half:, :half].copy(),
        "K01": h[:half, half:].copy(),
        "K00": h[:half, :half].copy(),
    }


@dataclass(frozen=True)
class ChainModel:
    length: int
    beta: float
    epsilon: float
    hamiltonian: ComplexMatrix
    number_op: ComplexMatrix
    rho_hat_a: ComplexMatrix
    local_jumps: JumpSet
    boundary_jumps: JumpSet
    boundary_coupling: float = 1.0
    settings: Settings = field(default_factory=get_settings, repr=False, compare=False)

    @property
    def dims(self) -> CompositeDims:
        return CompositeDims(2, 2 ** (self.length - 1))

    @cached_property
    def decomposition(self) -> HamiltonianDecomposition:
        return decompose_hamiltonian(self.hamiltonian, self.dims)

    @cached_property
    def liouvillian(self) -> Liouvillian:
        return assemble_liouvillian(self.decomposition, self.boundary_jumps, self.settings)


def boundary_reset_model(
    length: int,
    beta: float,
    epsilon: float,
    boundary_coupling: float = 1.0,
    settings: Optional[Settings] = None,
) -> ChainModel:
    settings = settings or get_settings()
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    hamiltonian = xx_chain_hamiltonian(length, boundary_coupling, settings)
    rho_hat_a = site_state(beta)
    local = reset_dissipator_jumps(rho_hat_a, epsilon)
    dims = CompositeDims(2, 2 ** (length - 1))
    return ChainModel(
        length=length,
        beta=beta,
        epsilon=epsilon,
        hamiltonian=tensor.freeze(hamiltonian),
        number_op=tensor.freeze(number_operator(length)),
        rho_hat_a=tensor.freeze(rho_hat_a),
        local_jumps=local,
        boundary_jumps=lift_local(local, dims),
        boundary_coupling=boundary_coupling,
        settings=settings,
    )


@dataclass(frozen=True)
class InteractionSweep:
    """Gibbs residuals with the 1-2 hopping scaled by each of ``scales``."""

    beta: float
    scales: Tuple[float, ...]
    residuals: Tuple[float, ...]

    def vanishes_without_coupling(self, tol: float) -> bool:
        return all(r <= tol for s, r in zip(self.scales, self.residuals) if s == 0)

    def is_monotone(self, tol: float) -> bool:
        ordered = [r for _, r in sorted(zip(self.scales, self.residuals))]
        return all(later >= earlier - tol for earlier, later in zip(ordered, ordered[1:]))

    def positive_when_coupled(self, tol: float) -> bool:
        return all(r > tol for s, r in zip(self.scales, self.residuals) if s != 0)


def gibbs_interaction_sweep(
    length: int,
    beta: float,
    epsilon: float,
    scales: Sequence[float] = (0.0, 0.5, 1.0),
    settings: Optional[Settings] = None,
) -> InteractionSweep:
    """Gibbs no-go residual as the site 1-2 hopping is switched on.

    Site 1 is reset to e^{-beta H_A}/Z_A, so at zero coupling rho_beta is
    reset target (x) e^{-beta H_B}/Z_B and stationary.
    """
    settings = settings or get_settings()
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    dims = CompositeDims(2, 2 ** (length - 1))
    residuals = []
    for scale in scales:
        hdec = decompose_hamiltonian(xx_chain_hamiltonian(length, scale, settings), dims)
        local = reset_dissipator_jumps(tensor.thermal_state(hdec.h_a, beta), epsilon)
        residuals.append(gibbs_nogo(hdec, local, beta, settings=settings).residual)
    logger.debug("Interaction sweep l=%d beta=%g: %s", length, beta, residuals)
    return InteractionSweep(beta=beta, scales=tuple(float(s) for s in scales), residuals=tuple(residuals))


@dataclass(frozen=True)
class ChainReproduction:
    length: int
    beta: float
    epsilon: float
    epsilon_alt: float
    stationary_dimension: int
    stationary_residual: float
    max_support_error: float
    commutant: UniquenessResult
    bulk: BulkUniquenessResult
    closure: ClosureResult
    product: ProductCheck
    diagnostics: CommutatorDiagnostics
    epsilon_deviation: float
    gibbs_residual: float
    interaction: InteractionSweep
    maximal_support_state: ComplexMatrix
    clauses: Tuple[Tuple[str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.clauses)

    @property
    def failed_clauses(self) -> Tuple[str, ...]:
        return tuple(name for name, ok in self.clauses if not ok)


def reproduce_chain(
    length: int,
    beta: float,
    epsilon: float,
    epsilon_alt: Optional[float] = None,
    boundary_coupling: float = 1.0,
    settings: Optional[Settings] = None,
) -> ChainReproduction:
    """Check the analytic steady state of the boundary-driven chain end to end.

    Clauses: the analytic state is annihilated by L; it equals the
    maximal-support state; the stationary space is one-dimensional; the
    commutant, bulk commutant and product closure all prove uniqueness; the
    steady state does not depend on epsilon; the Gibbs state is rejected for
    beta > 0 (and is the steady state at beta = 0); the Gibbs residual
    vanishes without the 1-2 hopping and grows with it.
    """
    settings = settings or get_settings()
    tols = settings.tolerances
    if epsilon_alt is None:
        epsilon_alt = 1.0 if epsilon != 1.0 else 0.1
    if epsilon_alt == epsilon:
        raise ValidationError("epsilon_alt must differ from epsilon")

    model = boundary_reset_model(length, beta, epsilon, boundary_coupling, settings)
    liou = model.liouvillian
    analytic = analytic_steady_state(length, beta)
    stationary_residual = tensor.frobenius_norm(liou.apply(analytic))

    projector = mean_ergodic_projector(liou, settings)
    state = maximal_support_state(liou, projector, settings)
    max_support_error = tensor.frobenius_norm(state - analytic)
    dimension = stationary_basis(liou, settings=settings, projector=projector).dimension

    commutant = commutant_uniqueness(liou, settings, projector)
    bulk = bulk_uniqueness_verdict(model.decomposition, model.local_jumps, settings)
    closure = product_closure_check(liou, settings)
    product = product_factor_check(state, model.dims, model.rho_hat_a, tols.product)
    diagnostics = commutator_diagnostics(state, model.decomposition, tols.product, tols.positive_definite)

    alt = boundary_reset_model(length, beta, epsilon_alt, boundary_coupling, settings)
    alt_state = maximal_support_state(alt.liouvillian, settings=settings)
    epsilon_deviation = tensor.frobenius_norm(alt_state - state)

    gibbs = gibbs_nogo(model.decomposition, model.local_jumps, beta, settings=settings)
    if beta == 0:
        gibbs_ok = gibbs.residual <= tols.gibbs
    else:
        gibbs_ok = gibbs.residual > GIBBS_REJECTION
    interaction = gibbs_interaction_sweep(length, beta, epsilon, settings=settings)
    interaction_ok = interaction.vanishes_without_coupling(tols.gibbs) and interaction.is_monotone(tols.gibbs)
    if beta > 0:
        interaction_ok = interaction_ok and interaction.positive_when_coupled(tols.gibbs)

    clauses = (
        ("analytic state is stationary", stationary_residual <= tols.projector),
        ("maximal-support state is analytic", max_support_error <= tols.stationary),
        ("stationary space is one-dimensional", dimension == 1),
        ("commutant uniqueness", commutant.verdict is Verdict.UNIQUE),
        ("bulk uniqueness", bulk.verdict is Verdict.UNIQUE_POSITIVE_DEFINITE),
        ("product closure uniqueness", closure.verdict is Verdict.UNIQUE_SUFFICIENT),
        ("epsilon independence", epsilon_deviation <= tols.stationary),
        ("gibbs state rejected" if beta > 0 else "gibbs state at infinite temperature", gibbs_ok),
        ("gibbs residual grows with coupling", interaction_ok),
    )
    report = ChainReproduction(
        length=length,
        beta=beta,
        epsilon=epsilon,
        epsilon_alt=epsilon_alt,
        stationary_dimension=dimension,
        stationary_residual=stationary_residual,
        max_support_error=max_support_error,
        commutant=commutant,
        bulk=bulk,
        closure=closure,
        product=product,
        diagnostics=diagnostics,
        epsilon_deviation=epsilon_deviation,
        gibbs_residual=gibbs.residual,
        interaction=interaction,
        maximal_support_state=state,
        clauses=clauses,
    )
    if report.passed:
        logger.info("Chain l=%d beta=%g eps=%g: all clauses pass", length, beta, epsilon)
    else:
        logger.warning("Chain l=%d beta=%g eps=%g: failed %s", length, beta, epsilon, ", ".join(report.failed_clauses))
    return report
