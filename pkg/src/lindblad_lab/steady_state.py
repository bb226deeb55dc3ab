from __future__ import annotations

"""Stationary states of a Liouvillian.

The stationary space is the kernel of L. Its projector along ran(L) is the
mean ergodic projector P (the time average of e^{tL}); P(I/d) is the steady
state of maximal support. On top of these sit the product-form check for
boundary-local dissipation, the commutator diagnostics that follow from it
for positive definite states, and the Gibbs no-go residual.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from . import tensor
from .config import Settings, get_settings
from .errors import ExtractionError, NonSemisimpleError, NotErgodicError, ValidationError
from .lindblad import (
    HamiltonianDecomposition,
    JumpSet,
    Liouvillian,
    assemble_liouvillian,
    build_liouvillian,
    lift_local,
)
from .tensor import CompositeDims, ComplexMatrix, MatrixLike, Subsystem

logger = logging.getLogger(__name__)

# smallest singular value of <ker L^dagger, ker L> accepted as semisimple
SEMISIMPLE_GAP = 1e-6


@dataclass(frozen=True)
class StationaryBasis:
    dimension: int
    states: Tuple[ComplexMatrix, ...]
    raw_kernel: ComplexMatrix
    hermitian_basis: Tuple[ComplexMatrix, ...] = ()

    @property
    def is_unique(self) -> bool:
        return self.dimension == 1


@dataclass(frozen=True)
class ProductFactorization:
    rho_a: ComplexMatrix
    rho_b: ComplexMatrix
    residual: float


class ProductVerdict(str, Enum):
    PRODUCT = "product"
    NON_PRODUCT = "non-product"


@dataclass(frozen=True)
class ProductCheck:
    factorization: ProductFactorization
    verdict: ProductVerdict
    marginal_residual: float
    tol: float

    @property
    def matches_target(self) -> bool:
        return self.marginal_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.verdict is ProductVerdict.PRODUCT and self.matches_target


class DiagnosticsVerdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    PRECONDITIONS_UNMET = "preconditions unmet"


@dataclass(frozen=True)
class CommutatorDiagnostics:
    residual_a: float
    residual_b: float
    residual_ab: float
    min_eigenvalue: float
    product_residual: float
    hamiltonian_residual: float
    verdict: DiagnosticsVerdict

    @property
    def residuals(self) -> Tuple[float, float, float]:
        return self.residual_a, self.residual_b, self.residual_ab


class GibbsVerdict(str, Enum):
    STATIONARY = "gibbs stationary"
    NOT_STATIONARY = "not stationary"


@dataclass(frozen=True)
class GibbsNoGoReport:
    beta: float
    residual: float
    verdict: GibbsVerdict
    interaction_norm: float
    interaction_vanishes: bool

    @property
    def consistent(self) -> bool:
        """False only if a beta != 0 Gibbs state is stationary despite H_AB != 0."""
        return not (
            self.verdict is GibbsVerdict.STATIONARY and self.beta != 0 and not self.interaction_vanishes
        )


# ---------------------------------------------------------------------------
# Kernel and projector
# ---------------------------------------------------------------------------

def spectral_projector(matrix: ComplexMatrix, settings: Optional[Settings] = None) -> ComplexMatrix:
    """Projection onto ker(M) along ran(M) for a superoperator ``M``.

    Requires the zero eigenvalue to be semisimple, i.e. ker(M) and ran(M)
    intersect trivially; with bases K of ker(M) and Y of ker(M^dagger) this
    is invertibility of Y^dagger K, and then P = K (Y^dagger K)^{-1} Y^dagger.
    """
    tols = (settings or get_settings()).tolerances
    matrix = np.asarray(matrix)
    right, left = tensor.kernel_pair(matrix, tols.null_space)
    if right.shape[1] == 0:
        raise ExtractionError("Generator has a trivial kernel; the null-space tolerance is too tight")
    if right.shape[1] != left.shape[1]:
        raise NonSemisimpleError(
            f"Left and right kernels differ in dimension ({left.shape[1]} vs {right.shape[1]})"
        )
    overlap = tensor.dagger(left) @ right
    gap = float(scipy.linalg.svdvals(overlap).min())
    if gap < SEMISIMPLE_GAP:
        raise NonSemisimpleError(f"Non-semisimple zero eigenvalue (kernel/range overlap {gap:.2e})")
    projector = right @ np.linalg.solve(overlap, tensor.dagger(left))

    scale = max(1.0, float(np.max(np.abs(matrix))))
    idempotency = float(np.max(np.abs(projector @ projector - projector)))
    annihilation = max(
        float(np.max(np.abs(matrix @ projector))),
        float(np.max(np.abs(projector @ matrix))),
    )
    logger.debug(
        "Projector: rank=%d overlap gap=%.2e |P^2-P|=%.2e |LP|,|PL|=%.2e",
        right.shape[1], gap, idempotency, annihilation,
    )
    if idempotency > tols.projector or annihilation > tols.projector * scale:
        raise NonSemisimpleError(
            f"Projector check failed: |P^2-P|={idempotency:.2e}, |LP|,|PL|={annihilation:.2e}"
        )
    return projector


def mean_ergodic_projector(liou: Liouvillian, settings: Optional[Settings] = None) -> ComplexMatrix:
    return spectral_projector(liou.matrix, settings)


def _normalised_state(m: ComplexMatrix) -> ComplexMatrix:
    m = tensor.hermitian_part(m)
    return m / np.trace(m).real


def maximal_support_state(
    liou: Liouvillian,
    projector: Optional[ComplexMatrix] = None,
    settings: Optional[Settings] = None,
) -> ComplexMatrix:
    """P(I/d): the steady state whose support contains every other one's."""
    settings = settings or get_settings()
    projector = mean_ergodic_projector(liou, settings) if projector is None else projector
    return _maximal_support_from(projector, liou.dim, settings)


def _maximal_support_from(projector: ComplexMatrix, dim: int, settings: Settings) -> ComplexMatrix:
    state = _normalised_state(tensor.apply_superop(projector, tensor.identity(dim) / dim))
    if not tensor.is_density(state, settings.tolerances.stationary):
        raise ExtractionError(
            f"Image of I/d is not a density matrix (min eigenvalue {tensor.min_eigenvalue(state):.2e})"
        )
    return state


def stationary_basis(
    liou: Liouvillian,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
    projector: Optional[ComplexMatrix] = None,
) -> StationaryBasis:
    """Kernel of L together with density-matrix representatives.

    The kernel is closed under X -> X^dagger; its hermitian elements are split
    into positive and negative parts, and the mean ergodic projector maps
    each part to a stationary density matrix. A linearly independent subset
    of those (led by the maximal-support state) is returned.

    A given ``projector`` supplies the kernel as its range; otherwise the
    kernel comes from an SVD cut at ``tol``.
    """
    settings = settings or get_settings()
    tols = settings.tolerances

    if projector is None:
        if tol is not None:
            settings = settings.with_tolerances({"null_space": tol})
        projector = mean_ergodic_projector(liou, settings)
    elif tol is not None:
        raise ValidationError("Pass either tol or projector, not both")
    kernel = tensor.range_basis(projector)
    dimension = kernel.shape[1]
    if dimension == 0:
        raise ExtractionError("Liouvillian kernel is empty; the null-space tolerance is too tight")
    hermitian = tensor.hermitian_span([tensor.devectorize(v) for v in kernel.T], tol=1e-8)
    if len(hermitian) != dimension:
        logger.warning("Hermitian closure has %d elements for a %d-dimensional kernel", len(hermitian), dimension)

    candidates: List[ComplexMatrix] = [_maximal_support_from(projector, liou.dim, settings)]
    for x in hermitian:
        w, v = np.linalg.eigh(x)
        cut = 1e-8 * float(np.max(np.abs(w)))
        for mask in (w > cut, w < -cut):
            if not mask.any():
                continue
            part = (v[:, mask] * np.abs(w[mask])) @ tensor.dagger(v[:, mask])
            candidates.append(_normalised_state(tensor.apply_superop(projector, part)))

    states: List[ComplexMatrix] = []
    accepted = np.zeros((liou.dim**2, 0), dtype=np.complex128)
    for state in candidates:
        if len(states) == dimension:
            break
        if not tensor.is_density(state, tols.stationary):
            continue
        if tensor.frobenius_norm(liou.apply(state)) > tols.stationary:
            continue
        vec = tensor.vectorize(state)
        remainder = vec - accepted @ (tensor.dagger(accepted) @ vec)
        if np.linalg.norm(remainder) <= 1e-6 * np.linalg.norm(vec):
            continue
        accepted = np.column_stack([accepted, remainder / np.linalg.norm(remainder)])
        states.append(state)

    if not states:
        raise ExtractionError("No positive semidefinite stationary representative found")
    logger.debug("Stationary basis: dimension=%d states=%d", dimension, len(states))
    return StationaryBasis(
        dimension=dimension,
        states=tuple(states),
        raw_kernel=kernel,
        hermitian_basis=tuple(hermitian),
    )


# ---------------------------------------------------------------------------
# Product form and its consequences
# ---------------------------------------------------------------------------

def product_factor_check(
    rho_bar: MatrixLike,
    dims: CompositeDims,
    rho_hat_a: MatrixLike,
    tol: float = 1e-8,
) -> ProductCheck:
    """Compare ``rho_bar`` with the product of its marginals and Tr_B rho_bar with rho_hat_a."""
    rho_bar = tensor.as_matrix(rho_bar, "rho_bar")
    rho_hat_a = tensor.as_matrix(rho_hat_a, "rho_hat_a")
    tensor.require_shape(rho_bar, dims.total, "rho_bar")
    tensor.require_shape(rho_hat_a, dims.dim_a, "rho_hat_a")
    rho_a = tensor.partial_trace(rho_bar, dims, Subsystem.A)
    rho_b = tensor.partial_trace(rho_bar, dims, Subsystem.B)
    residual = tensor.frobenius_norm(rho_bar - tensor.kron(rho_a, rho_b))
    verdict = ProductVerdict.PRODUCT if residual <= tol else ProductVerdict.NON_PRODUCT
    return ProductCheck(
        factorization=ProductFactorization(rho_a=rho_a, rho_b=rho_b, residual=residual),
        verdict=verdict,
        marginal_residual=tensor.frobenius_norm(rho_a - rho_hat_a),
        tol=tol,
    )


def commutator_diagnostics(
    rho_bar: MatrixLike,
    hdec: HamiltonianDecomposition,
    tol: float = 1e-8,
    positive_tol: float = 1e-10,
) -> CommutatorDiagnostics:
    """||[rho_A, H_A]||, ||[rho_B, H_B]||, ||[rho_bar, H_AB]|| for a stationary product state.

    They must vanish when rho_bar is positive definite, a product, and
    commutes with H. Unmet preconditions are reported in the verdict.
    """
    rho_bar = tensor.as_matrix(rho_bar, "rho_bar")
    dims = hdec.dims
    tensor.require_shape(rho_bar, dims.total, "rho_bar")
    rho_a = _normalised_state(tensor.partial_trace(rho_bar, dims, Subsystem.A))
    rho_b = _normalised_state(tensor.partial_trace(rho_bar, dims, Subsystem.B))

    residual_a = tensor.frobenius_norm(tensor.commutator(rho_a, hdec.h_a))
    residual_b = tensor.frobenius_norm(tensor.commutator(rho_b, hdec.h_b))
    residual_ab = tensor.frobenius_norm(tensor.commutator(rho_bar, hdec.h_ab))
    min_eig = tensor.min_eigenvalue(rho_bar)
    product_residual = tensor.frobenius_norm(rho_bar - tensor.kron(rho_a, rho_b))
    hamiltonian_residual = tensor.frobenius_norm(tensor.commutator(rho_bar, hdec.h_total))

    if min_eig <= positive_tol:
        logger.warning("Steady state is singular (min eigenvalue %.2e); commutator relations need a positive definite state", min_eig)
        verdict = DiagnosticsVerdict.PRECONDITIONS_UNMET
    elif product_residual > tol or hamiltonian_residual > tol:
        verdict = DiagnosticsVerdict.PRECONDITIONS_UNMET
    elif max(residual_a, residual_b, residual_ab) <= tol:
        verdict = DiagnosticsVerdict.SATISFIED
    else:
        verdict = DiagnosticsVerdict.VIOLATED
    return CommutatorDiagnostics(
        residual_a=residual_a,
        residual_b=residual_b,
        residual_ab=residual_ab,
        min_eigenvalue=min_eig,
        product_residual=product_residual,
        hamiltonian_residual=hamiltonian_residual,
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# Gibbs states
# ---------------------------------------------------------------------------

def gibbs_state(h: MatrixLike, beta: float) -> ComplexMatrix:
    """e^{-beta H} / Z(beta)"""
    if not np.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    return tensor.thermal_state(tensor.as_matrix(h, "h"), beta)


def generalized_gibbs_state(
    h: MatrixLike, beta: float, number_op: Optional[MatrixLike] = None, mu: float = 0.0
) -> ComplexMatrix:
    """e^{-beta (H - mu N)} / Z(beta, mu); needs [H, N] = 0 to be a function of both."""
    h = tensor.as_matrix(h, "h")
    if number_op is None or mu == 0.0:
        return gibbs_state(h, beta)
    return gibbs_state(h - mu * tensor.as_matrix(number_op, "number_op"), beta)


def infinite_temperature_state(number_op: MatrixLike, reduced_potential: float) -> ComplexMatrix:
    """beta -> 0 limit of the grand canonical state with beta*mu held fixed: e^{lambda N}/Z."""
    return gibbs_state(tensor.as_matrix(number_op, "number_op"), -reduced_potential)


def local_steady_state(local: JumpSet, settings: Optional[Settings] = None) -> ComplexMatrix:
    """Unique steady state of D_A on H_A alone; NotErgodicError if not unique."""
    settings = settings or get_settings()
    liou = build_liouvillian(np.zeros((local.dim, local.dim)), local, settings=settings)
    basis = stationary_basis(liou, settings=settings)
    if basis.dimension != 1:
        raise NotErgodicError(f"Local dissipator has a {basis.dimension}-dimensional stationary space")
    return basis.states[0]


def gibbs_nogo(
    hdec: HamiltonianDecomposition,
    local: JumpSet,
    beta: float,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> GibbsNoGoReport:
    """Residual ||L rho_beta|| of the Gibbs state under lifted local dissipation.

    A beta != 0 Gibbs state can only be stationary when H_AB = 0, so the
    report carries the interaction norm alongside the residual.
    """
    settings = settings or get_settings()
    tol = settings.tolerances.gibbs if tol is None else tol
    if not np.isfinite(beta):
        raise ValidationError(f"beta must be finite, got {beta}")
    local_steady_state(local, settings)

    liou = assemble_liouvillian(hdec, lift_local(local, hdec.dims), settings)
    rho_beta = gibbs_state(hdec.h_total, beta)
    residual = tensor.frobenius_norm(liou.apply(rho_beta))
    interaction = hdec.interaction_norm
    scale = max(1.0, tensor.frobenius_norm(hdec.h_total))
    verdict = GibbsVerdict.STATIONARY if residual <= tol else GibbsVerdict.NOT_STATIONARY
    report = GibbsNoGoReport(
        beta=beta,
        residual=residual,
        verdict=verdict,
        interaction_norm=interaction,
        interaction_vanishes=interaction <= settings.tolerances.hermitian * scale,
    )
    logger.info("Gibbs no-go: beta=%g residual=%.3e |H_AB|=%.3e -> %s", beta, residual, interaction, verdict.value)
    return report
