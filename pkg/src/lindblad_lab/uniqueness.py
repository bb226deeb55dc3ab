from __future__ import annotations

"""Algebraic uniqueness tests and the ergodic decomposition.

* commutant of {K + H, L_a, L_a^dagger}: given a positive definite steady
  state, it is trivial exactly when the steady state is unique;
* bulk commutant: for an ergodic boundary dissipator with positive definite
  target, uniqueness holds exactly when no traceless hermitian X_B satisfies
  [H, I (x) X_B] = 0;
* product closure of {H - i/2 sum L^dagger L, L_a}: reaching every operator
  is sufficient (not necessary) for uniqueness;
* ergodic decomposition: the center of ker(L^dagger) splits the space into
  blocks, each carrying its own stationary state.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import tensor
from .config import Settings, get_settings
from .errors import AlgebraClosureError, DimensionMismatchError, NotErgodicError, NumericalError, ValidationError
from .lindblad import HamiltonianDecomposition, JumpSet, Liouvillian
from .steady_state import (
    local_steady_state,
    maximal_support_state,
    spectral_projector,
    stationary_basis,
)
from .tensor import CompositeDims, ComplexMatrix, MatrixLike

logger = logging.getLogger(__name__)

CENTER_GAP = 1e-6
CENTER_ATTEMPTS = 20


class Verdict(str, Enum):
    UNIQUE = "unique"
    UNIQUE_POSITIVE_DEFINITE = "unique & positive definite"
    UNIQUE_SUFFICIENT = "unique (sufficient)"
    NOT_UNIQUE = "not unique"
    INCONCLUSIVE = "inconclusive"
    INAPPLICABLE = "inapplicable"

    @property
    def is_unique(self) -> bool:
        return self in (Verdict.UNIQUE, Verdict.UNIQUE_POSITIVE_DEFINITE, Verdict.UNIQUE_SUFFICIENT)


@dataclass(frozen=True)
class CommutantResult:
    dimension: int
    basis: Tuple[ComplexMatrix, ...]
    generators: Tuple[ComplexMatrix, ...]


@dataclass(frozen=True)
class UniquenessResult:
    verdict: Verdict
    witness: Optional[ComplexMatrix] = None
    commutant_dimension: Optional[int] = None
    detail: str = ""


@dataclass(frozen=True)
class LocalErgodicity:
    is_ergodic: bool
    positive_definite: bool
    state: Optional[ComplexMatrix]
    commutant_dimension: int

    @property
    def usable(self) -> bool:
        return self.is_ergodic and self.positive_definite and self.commutant_dimension == 1


@dataclass(frozen=True)
class BulkUniquenessResult:
    verdict: Verdict
    basis_dimension: int = 0
    witness: Optional[ComplexMatrix] = None
    witness_residual_b: Optional[float] = None
    witness_residual_ab: Optional[float] = None
    local: Optional[LocalErgodicity] = None

    def furthermore_holds(self, tol: float = 1e-9) -> bool:
        """A witness must also commute with H_B and with H_AB."""
        if self.witness is None:
            return True
        return self.witness_residual_b <= tol and self.witness_residual_ab <= tol


@dataclass(frozen=True)
class ClosureResult:
    verdict: Verdict
    dimension: int
    target_dimension: int
    rounds: int


@dataclass(frozen=True)
class ErgodicDecomposition:
    nullspace_dim: int
    is_algebra: bool
    center_projections: Tuple[ComplexMatrix, ...]
    block_states: Tuple[ComplexMatrix, ...]
    transient_discarded: bool
    support: ComplexMatrix

    @property
    def block_count(self) -> int:
        return len(self.center_projections)


# ---------------------------------------------------------------------------
# Commutants
# ---------------------------------------------------------------------------

def _adjoint_closed(generators: Sequence[ComplexMatrix]) -> List[ComplexMatrix]:
    closed: List[ComplexMatrix] = []
    for g in generators:
        closed.append(g)
        if not tensor.is_hermitian(g, 1e-12 * max(1.0, float(np.max(np.abs(g))))):
            closed.append(tensor.dagger(g))
    return closed


def _stacked_kernel(blocks: Sequence[ComplexMatrix], tol: float) -> ComplexMatrix:
    """Common kernel of several superoperators.

    The kernel of the first block is narrowed by each following block in
    turn, so after the first SVD every solve is on the surviving subspace.
    """
    basis = np.eye(blocks[0].shape[1], dtype=np.complex128)
    for block in blocks:
        if basis.shape[1] == 0:
            break
        restricted = block @ basis
        # the block already annihilates the subspace; a relative cut would keep rounding noise
        if float(np.max(np.abs(restricted))) <= tol * max(1.0, float(np.max(np.abs(block)))):
            continue
        basis = basis @ tensor.null_space(restricted, tol)
    return basis


def commutant(generators: Sequence[MatrixLike], settings: Optional[Settings] = None) -> CommutantResult:
    """All X with [G, X] = 0 for every generator G and its adjoint."""
    if not generators:
        raise ValidationError("commutant needs at least one generator")
    tols = (settings or get_settings()).tolerances
    mats = [tensor.as_matrix(g, "generator") for g in generators]
    dim = tensor.require_square(mats[0], "generator")
    for g in mats:
        tensor.require_shape(g, dim, "generator")
    closed = _adjoint_closed(mats)

    kernel = _stacked_kernel([tensor.commutator_superop(g) for g in closed], tols.null_space)
    basis = tuple(tensor.devectorize(v) for v in kernel.T)
    for x in basis:
        worst = max(tensor.frobenius_norm(tensor.commutator(g, x)) for g in closed)
        if worst > tols.commutant * max(1.0, max(tensor.frobenius_norm(g) for g in closed)):
            logger.warning("Commutant element commutes only to %.2e", worst)
    logger.debug("Commutant of %d generators (d=%d): dimension %d", len(closed), dim, len(basis))
    return CommutantResult(dimension=len(basis), basis=basis, generators=tuple(closed))


def _non_scalar_witness(basis: Sequence[ComplexMatrix]) -> Optional[ComplexMatrix]:
    """Traceless hermitian element of a *-closed span, or None if it is scalars only."""
    if not basis:
        return None
    dim = basis[0].shape[0]
    candidates = []
    for x in tensor.hermitian_span(list(basis)):
        candidates.append(x - np.trace(x) / dim * tensor.identity(dim))
    best = max(candidates, key=tensor.frobenius_norm)
    norm = tensor.frobenius_norm(best)
    return best / norm if norm > 1e-8 else None


def commutant_uniqueness(
    liou: Liouvillian,
    settings: Optional[Settings] = None,
    projector: Optional[ComplexMatrix] = None,
) -> UniquenessResult:
    """Uniqueness from the commutant of {K + H, L_a, L_a^dagger}.

    Only applicable when the maximal-support steady state is positive definite.
    A precomputed mean ergodic ``projector`` of ``liou`` is reused.
    """
    settings = settings or get_settings()
    tols = settings.tolerances
    state = maximal_support_state(liou, projector, settings)
    min_eig = tensor.min_eigenvalue(state)
    if min_eig <= tols.positive_definite:
        return UniquenessResult(
            verdict=Verdict.INAPPLICABLE,
            detail=f"maximal-support state is singular (min eigenvalue {min_eig:.2e})",
        )
    generators = [np.asarray(liou.hamiltonian.h_total) + np.asarray(liou.jumps.k), *liou.jumps.jumps]
    result = commutant(generators, settings)
    if result.dimension == 1:
        return UniquenessResult(verdict=Verdict.UNIQUE, commutant_dimension=1)
    return UniquenessResult(
        verdict=Verdict.NOT_UNIQUE,
        witness=_non_scalar_witness(result.basis),
        commutant_dimension=result.dimension,
    )


def local_ergodicity(local: JumpSet, settings: Optional[Settings] = None) -> LocalErgodicity:
    """Ergodicity and positivity of a dissipator on H_A alone."""
    settings = settings or get_settings()
    comm = commutant([local.k, *local.jumps], settings)
    try:
        state = local_steady_state(local, settings)
    except NotErgodicError:
        return LocalErgodicity(False, False, None, comm.dimension)
    positive = tensor.min_eigenvalue(state) > settings.tolerances.positive_definite
    return LocalErgodicity(True, positive, state, comm.dimension)


def bulk_commutant_solver(
    h: MatrixLike, dims: CompositeDims, settings: Optional[Settings] = None
) -> List[ComplexMatrix]:
    """Orthonormal basis of traceless hermitian X_B with [H, I_A (x) X_B] = 0.

    X_B is expanded in a traceless hermitian basis with real coefficients;
    for hermitian H the map is real-linear, so its real and imaginary parts
    are stacked into one real system.
    """
    tols = (settings or get_settings()).tolerances
    h = tensor.as_matrix(h, "h")
    tensor.require_shape(h, dims.total, "Hamiltonian")
    candidates = tensor.traceless_hermitian_basis(dims.dim_b)
    if not candidates:
        return []
    images = np.column_stack(
        [tensor.vectorize(tensor.commutator(h, tensor.embed_b(x, dims))) for x in candidates]
    )
    system = np.vstack([images.real, images.imag])
    # an all-zero map makes the relative kernel cut meaningless
    if float(np.max(np.abs(system))) <= tols.null_space * max(1.0, tensor.frobenius_norm(h)):
        coefficients = np.eye(len(candidates))
    else:
        coefficients = tensor.null_space(system, tols.null_space)
    basis = [sum(c * x for c, x in zip(column, candidates)) for column in coefficients.T]
    logger.debug("Bulk commutant: %d traceless hermitian solutions on H_B (d_B=%d)", len(basis), dims.dim_b)
    return basis


def bulk_uniqueness_verdict(
    hdec: HamiltonianDecomposition, local: JumpSet, settings: Optional[Settings] = None
) -> BulkUniquenessResult:
    """Uniqueness from H alone, for an ergodic boundary dissipator with positive definite target."""
    settings = settings or get_settings()
    if local.dim != hdec.dims.dim_a:
        raise DimensionMismatchError(f"Local jump set acts on dimension {local.dim}, expected {hdec.dims.dim_a}")
    info = local_ergodicity(local, settings)
    if not info.usable:
        logger.info("Bulk uniqueness inapplicable: ergodic=%s positive=%s", info.is_ergodic, info.positive_definite)
        return BulkUniquenessResult(verdict=Verdict.INAPPLICABLE, local=info)

    basis = bulk_commutant_solver(hdec.h_total, hdec.dims, settings)
    if not basis:
        return BulkUniquenessResult(verdict=Verdict.UNIQUE_POSITIVE_DEFINITE, local=info)
    witness = basis[0]
    return BulkUniquenessResult(
        verdict=Verdict.NOT_UNIQUE,
        basis_dimension=len(basis),
        witness=witness,
        witness_residual_b=tensor.frobenius_norm(tensor.commutator(np.asarray(hdec.h_b), witness)),
        witness_residual_ab=tensor.frobenius_norm(
            tensor.commutator(np.asarray(hdec.h_ab), tensor.embed_b(witness, hdec.dims))
        ),
        local=info,
    )


# ---------------------------------------------------------------------------
# Product closure
# ---------------------------------------------------------------------------

def product_closure_check(liou: Liouvillian, settings: Optional[Settings] = None) -> ClosureResult:
    """Grow span{I} under left multiplication by {H - i/2 sum L^dagger L, L_a}.

    The result is the span of all products of the generators. Reaching
    every operator proves uniqueness; falling short proves nothing.
    """
    tol = (settings or get_settings()).tolerances.closure
    dim = liou.dim
    target = dim * dim
    effective = np.asarray(liou.hamiltonian.h_total) + np.asarray(liou.jumps.k)
    generators = [effective - 0.5j * liou.jumps.decay_operator(), *liou.jumps.jumps]

    span = (tensor.vectorize(tensor.identity(dim)) / np.sqrt(dim)).reshape(-1, 1)
    frontier = span
    rounds = 0
    while span.shape[1] < target and frontier.shape[1] > 0 and rounds < 2 * target:
        rounds += 1
        products = np.column_stack(
            [tensor.vectorize(g @ tensor.devectorize(f)) for g in generators for f in frontier.T]
        )
        scale = max(1.0, float(np.max(np.linalg.norm(products, axis=0))))
        for _ in range(2):
            products = products - span @ (tensor.dagger(span) @ products)
        u, s, _ = scipy.linalg.svd(products, full_matrices=False)
        frontier = u[:, s > tol * scale]
        span = np.hstack([span, frontier])
        logger.debug("Product closure round %d: dimension %d", rounds, span.shape[1])

    dimension = min(span.shape[1], target)
    verdict = Verdict.UNIQUE_SUFFICIENT if dimension == target else Verdict.INCONCLUSIVE
    return ClosureResult(verdict=verdict, dimension=dimension, target_dimension=target, rounds=rounds)


# ---------------------------------------------------------------------------
# Ergodic decomposition
# ---------------------------------------------------------------------------

def _restricted_generator(liou: Liouvillian, support: ComplexMatrix) -> ComplexMatrix:
    """Generator compressed to the span of ``support`` columns."""
    rank = support.shape[1]
    columns = []
    for _, _, unit in tensor.matrix_units(rank):
        image = liou.apply(support @ unit @ tensor.dagger(support))
        columns.append(tensor.vectorize(tensor.dagger(support) @ image @ support))
    return np.column_stack(columns)


def _closure_defect(algebra: Sequence[ComplexMatrix], kernel: ComplexMatrix) -> float:
    worst = 0.0
    for x in algebra:
        for candidate in [tensor.dagger(x), *(x @ y for y in algebra)]:
            v = tensor.vectorize(candidate)
            norm = np.linalg.norm(v)
            if norm < 1e-14:
                continue
            remainder = v - kernel @ (tensor.dagger(kernel) @ v)
            worst = max(worst, float(np.linalg.norm(remainder) / norm))
    return worst


def _center_basis(algebra: Sequence[ComplexMatrix], tol: float) -> List[ComplexMatrix]:
    if len(algebra) == 1:
        return list(algebra)
    blocks = [
        np.column_stack([tensor.vectorize(tensor.commutator(x, y)) for x in algebra])
        for y in algebra
    ]
    stacked = np.vstack(blocks)
    scale = max(1.0, max(tensor.frobenius_norm(x) for x in algebra) ** 2)
    if float(np.max(np.abs(stacked))) <= tol * scale:
        return list(algebra)
    coefficients = tensor.null_space(stacked, tol)
    return [sum(c * x for c, x in zip(column, algebra)) for column in coefficients.T]


def _center_projections(
    center: Sequence[ComplexMatrix], count: int, rng: np.random.Generator
) -> List[ComplexMatrix]:
    dim = center[0].shape[0]
    if count == 1:
        return [tensor.identity(dim)]
    hermitian = tensor.hermitian_span(list(center))
    for attempt in range(CENTER_ATTEMPTS):
        element = sum(c * h for c, h in zip(rng.normal(size=len(hermitian)), hermitian))
        w, v = np.linalg.eigh(element)
        spread = max(1.0, float(w[-1] - w[0]))
        cuts = np.flatnonzero(np.diff(w) > CENTER_GAP * spread) + 1
        groups = np.split(np.arange(dim), cuts)
        if len(groups) == count:
            return [v[:, g] @ tensor.dagger(v[:, g]) for g in groups]
        logger.warning("Center element %d separated %d of %d blocks; re-randomising", attempt, len(groups), count)
    raise NumericalError(f"Could not separate {count} center projections")


def ergodic_decomposition(
    liou: Liouvillian, settings: Optional[Settings] = None, seed: int = 0
) -> ErgodicDecomposition:
    """Center/block structure of ker(L^dagger).

    Without a positive definite steady state the generator is first
    restricted to the support of the maximal-support state, which discards
    the transient part.
    """
    settings = settings or get_settings()
    tols = settings.tolerances
    rng = np.random.default_rng(seed)

    state = maximal_support_state(liou, settings=settings)
    support = tensor.support_basis(state, tols.positive_definite)
    transient = support.shape[1] < liou.dim
    if transient:
        logger.info("Discarding transient part: support %d of %d", support.shape[1], liou.dim)
        generator = _restricted_generator(liou, support)
    else:
        support = tensor.identity(liou.dim)
        generator = np.asarray(liou.matrix)
    # the relative kernel cut is meaningless for a generator that vanishes on the support
    if float(np.max(np.abs(generator))) <= tols.null_space * max(1.0, float(np.max(np.abs(liou.matrix)))):
        generator = np.zeros_like(generator)

    kernel = tensor.null_space(tensor.dagger(generator), tols.null_space)
    algebra = [tensor.devectorize(v) for v in kernel.T]
    defect = _closure_defect(algebra, kernel)
    if defect > tols.closure:
        raise AlgebraClosureError(f"ker(L^dagger) is not an algebra (defect {defect:.2e})")

    center = _center_basis(algebra, tols.null_space)
    local_projections = _center_projections(center, len(center), rng)

    projector = spectral_projector(generator, settings)
    block_states = []
    for p in local_projections:
        if tensor.frobenius_norm(tensor.apply_superop(tensor.dagger(generator), p)) > tols.stationary:
            raise NumericalError("Center projection is not invariant under the Heisenberg generator")
        omega = tensor.apply_superop(projector, p / np.trace(p).real)
        omega = tensor.hermitian_part(omega) / np.trace(omega).real
        block_states.append(support @ omega @ tensor.dagger(support))

    projections = tuple(support @ p @ tensor.dagger(support) for p in local_projections)
    logger.info("Ergodic decomposition: dim C=%d, %d block(s), transient=%s", len(algebra), len(projections), transient)
    return ErgodicDecomposition(
        nullspace_dim=len(algebra),
        is_algebra=True,
        center_projections=projections,
        block_states=tuple(block_states),
        transient_discarded=transient,
        support=support @ tensor.dagger(support),
    )


def stationary_decomposition_residual(liou: Liouvillian, decomposition: ErgodicDecomposition,
                                      settings: Optional[Settings] = None) -> float:
    """Worst ||s - sum_j Tr[P_j s] omega_j|| over the stationary states of ``liou``.

    Zero when every block carries a single stationary state (trivial left
    tensor factor).
    """
    worst = 0.0
    for state in stationary_basis(liou, settings=settings).states:
        rebuilt = sum(
            np.trace(p @ state) * omega
            for p, omega in zip(decomposition.center_projections, decomposition.block_states)
        )
        worst = max(worst, tensor.frobenius_norm(state - rebuilt))
    return worst
