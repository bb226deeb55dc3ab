from __future__ import annotations

"""Lindbladian generators with boundary-local dissipation.

The generator is L(rho) = -i[H, rho] + D(rho) with

    D(rho) = -i[K, rho] + sum_a (L_a rho L_a^dagger - 1/2 {L_a^dagger L_a, rho}).

Hamiltonians are split as H = H_A (x) I + H_AB + I (x) H_B with both partial
traces of H_AB equal to zero; the scalar part of H is put on H_A so the split
is unique.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import tensor
from .config import Settings, get_settings
from .errors import DimensionMismatchError, NotDensityMatrixError, NotHermitianError, ValidationError
from .tensor import CompositeDims, ComplexMatrix, MatrixLike, Subsystem

logger = logging.getLogger(__name__)


def _check_hermitian(m: ComplexMatrix, tol: float, name: str) -> None:
    scale = max(1.0, float(np.max(np.abs(m))))
    if not tensor.is_hermitian(m, tol * scale):
        raise NotHermitianError(f"{name} is not hermitian (tol {tol:g})")


@dataclass(frozen=True)
class HamiltonianDecomposition:
    h_total: ComplexMatrix
    h_a: ComplexMatrix
    h_b: ComplexMatrix
    h_ab: ComplexMatrix
    dims: CompositeDims

    def __post_init__(self) -> None:
        for name in ("h_total", "h_a", "h_b", "h_ab"):
            object.__setattr__(self, name, tensor.freeze(getattr(self, name), name))
        tensor.require_shape(self.h_total, self.dims.total, "h_total")
        tensor.require_shape(self.h_a, self.dims.dim_a, "h_a")
        tensor.require_shape(self.h_b, self.dims.dim_b, "h_b")
        tensor.require_shape(self.h_ab, self.dims.total, "h_ab")

    def reassemble(self) -> ComplexMatrix:
        return tensor.embed_a(self.h_a, self.dims) + self.h_ab + tensor.embed_b(self.h_b, self.dims)

    @property
    def interaction_norm(self) -> float:
        return tensor.frobenius_norm(self.h_ab)


@dataclass(frozen=True)
class JumpSet:
    """Lamb-shift operator ``k`` and jump operators ``jumps`` of one dissipator."""

    k: ComplexMatrix
    jumps: Tuple[ComplexMatrix, ...] = ()

    def __post_init__(self) -> None:
        k = tensor.freeze(self.k, "k")
        dim = tensor.require_square(k, "k")
        _check_hermitian(k, 1e-12, "Lamb-shift operator k")
        jumps = tuple(tensor.freeze(j, "jump") for j in self.jumps)
        for index, jump in enumerate(jumps):
            tensor.require_shape(jump, dim, f"jump[{index}]")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "jumps", jumps)

    @classmethod
    def empty(cls, dim: int) -> "JumpSet":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def of(cls, jumps: Sequence[MatrixLike], k: Optional[MatrixLike] = None) -> "JumpSet":
        if not jumps and k is None:
            raise ValidationError("JumpSet.of needs at least one jump or a Lamb-shift operator")
        mats = [tensor.as_matrix(j, "jump") for j in jumps]
        dim = mats[0].shape[0] if mats else tensor.as_matrix(k).shape[0]
        return cls(np.zeros((dim, dim)) if k is None else k, tuple(mats))

    @property
    def dim(self) -> int:
        return self.k.shape[0]

    def __len__(self) -> int:
        return len(self.jumps)

    def __iter__(self) -> Iterator[ComplexMatrix]:
        return iter(self.jumps)

    def decay_operator(self) -> ComplexMatrix:
        """sum_a L_a^dagger L_a"""
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for jump in self.jumps:
            total += tensor.dagger(jump) @ jump
        return total

    def merged(self, other: "JumpSet") -> "JumpSet":
        """Sum of both dissipators on the same space."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Cannot merge jump sets on dimensions {self.dim} and {other.dim}")
        return JumpSet(self.k + other.k, self.jumps + other.jumps)

    def direct_sum(self, other: "JumpSet") -> "JumpSet":
        """Jump set on H_1 (+) H_2 acting blockwise."""
        zeros_self = np.zeros((self.dim, self.dim))
        zeros_other = np.zeros((other.dim, other.dim))
        jumps = [scipy.linalg.block_diag(j, zeros_other) for j in self.jumps]
        jumps += [scipy.linalg.block_diag(zeros_self, j) for j in other.jumps]
        return JumpSet(scipy.linalg.block_diag(self.k, other.k), tuple(jumps))


@dataclass(frozen=True)
class Liouvillian:
    """Superoperator matrix of L together with what it was assembled from."""

    matrix: ComplexMatrix
    dims: CompositeDims
    hamiltonian: HamiltonianDecomposition
    jumps: JumpSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", tensor.freeze(self.matrix, "matrix"))
        tensor.require_shape(self.matrix, self.dims.total**2, "Liouvillian matrix")

    @property
    def dim(self) -> int:
        return self.dims.total

    @property
    def source(self) -> Tuple[HamiltonianDecomposition, JumpSet]:
        return self.hamiltonian, self.jumps

    @cached_property
    def adjoint_matrix(self) -> ComplexMatrix:
        """Generator of the Heisenberg picture, adjoint under Tr[a^dagger b]."""
        return np.ascontiguousarray(tensor.dagger(self.matrix))

    def apply(self, rho: MatrixLike) -> ComplexMatrix:
        rho = tensor.as_matrix(rho, "rho")
        tensor.require_shape(rho, self.dim, "rho")
        return tensor.apply_superop(self.matrix, rho)

    def apply_adjoint(self, x: MatrixLike) -> ComplexMatrix:
        x = tensor.as_matrix(x, "x")
        tensor.require_shape(x, self.dim, "x")
        return tensor.apply_superop(self.adjoint_matrix, x)

    def trace_residual(self) -> float:
        """|| vec(I)^dagger L ||, zero for a trace-preserving generator."""
        return float(np.linalg.norm(tensor.vectorize(tensor.identity(self.dim)).conj() @ self.matrix))

    def hermiticity_residual(self, rng: np.random.Generator, samples: int = 10) -> float:
        """max || L(X^dagger) - L(X)^dagger || over random X."""
        worst = 0.0
        for _ in range(samples):
            x = tensor.random_matrix(self.dim, rng)
            diff = self.apply(tensor.dagger(x)) - tensor.dagger(self.apply(x))
            worst = max(worst, tensor.frobenius_norm(diff))
        return worst


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def decompose_hamiltonian(h: MatrixLike, dims: CompositeDims, tol: float = 1e-12) -> HamiltonianDecomposition:
    """Split ``h`` into H_A, H_B and a doubly traceless interaction H_AB."""
    h = tensor.as_matrix(h, "h")
    tensor.require_shape(h, dims.total, "Hamiltonian")
    _check_hermitian(h, tol, "Hamiltonian")
    scalar = np.trace(h) / dims.total
    h_a = tensor.partial_trace(h, dims, Subsystem.A) / dims.dim_b
    h_b = tensor.partial_trace(h, dims, Subsystem.B) / dims.dim_a - scalar * tensor.identity(dims.dim_b)
    h_ab = h - tensor.embed_a(h_a, dims) - tensor.embed_b(h_b, dims)
    return HamiltonianDecomposition(h_total=h, h_a=h_a, h_b=h_b, h_ab=h_ab, dims=dims)


def lift_local(local: JumpSet, dims: CompositeDims) -> JumpSet:
    """Lift a dissipator on H_A to D_A (x) I_B on the composite space."""
    if local.dim != dims.dim_a:
        raise DimensionMismatchError(f"Local jump set acts on dimension {local.dim}, expected dim_a={dims.dim_a}")
    return JumpSet(
        k=tensor.embed_a(local.k, dims),
        jumps=tuple(tensor.embed_a(jump, dims) for jump in local.jumps),
    )


def reset_dissipator_jumps(rho_hat_a: MatrixLike, rate: float, tol: float = 1e-10) -> JumpSet:
    """Jump operators sqrt(rate) * rho_hat^{1/2} |i><j| for all i, j.

    The induced dissipator is D(X) = rate * (Tr[X] rho_hat - X), which
    replaces the state at ``rate`` by ``rho_hat``.
    """
    rho = tensor.as_matrix(rho_hat_a, "rho_hat_a")
    if not tensor.is_density(rho, tol):
        raise NotDensityMatrixError("rho_hat_a must be a density matrix")
    if not np.isfinite(rate) or rate <= 0:
        raise ValidationError(f"rate must be positive, got {rate}")
    root = np.sqrt(rate) * tensor.psd_sqrt(rho, tol)
    dim = rho.shape[0]
    jumps: List[ComplexMatrix] = []
    for i in range(dim):
        for j in range(dim):
            jump = np.zeros((dim, dim), dtype=np.complex128)
            jump[:, j] = root[:, i]
            jumps.append(jump)
    return JumpSet(k=np.zeros((dim, dim), dtype=np.complex128), jumps=tuple(jumps))


def hamiltonian_superop(h: ComplexMatrix) -> ComplexMatrix:
    """Superoperator of rho -> -i[h, rho]."""
    return -1j * tensor.commutator_superop(h)


def dissipator_superop(jumps: JumpSet) -> ComplexMatrix:
    superop = hamiltonian_superop(jumps.k)
    for jump in jumps.jumps:
        decay = tensor.dagger(jump) @ jump
        superop = superop + tensor.sandwich_superop(jump, tensor.dagger(jump))
        superop = superop - 0.5 * (tensor.left_superop(decay) + tensor.right_superop(decay))
    return superop


def assemble_liouvillian(
    hdec: HamiltonianDecomposition,
    jumps: JumpSet,
    settings: Optional[Settings] = None,
) -> Liouvillian:
    settings = settings or get_settings()
    if jumps.dim != hdec.dims.total:
        raise DimensionMismatchError(f"Jump set acts on dimension {jumps.dim}, Hamiltonian on {hdec.dims.total}")
    settings.check_dimension(hdec.dims.total)
    matrix = hamiltonian_superop(np.asarray(hdec.h_total)) + dissipator_superop(jumps)
    liou = Liouvillian(matrix=matrix, dims=hdec.dims, hamiltonian=hdec, jumps=jumps)
    logger.debug(
        "Assembled Liouvillian: d=%d jumps=%d trace residual=%.2e",
        liou.dim, len(jumps), liou.trace_residual(),
    )
    return liou


def build_liouvillian(
    h: MatrixLike,
    jumps: JumpSet,
    dims: Optional[CompositeDims] = None,
    settings: Optional[Settings] = None,
) -> Liouvillian:
    """Decompose ``h`` (unpartitioned unless ``dims`` given) and assemble."""
    h = tensor.as_matrix(h, "h")
    dims = dims or CompositeDims.single(h.shape[0])
    return assemble_liouvillian(decompose_hamiltonian(h, dims), jumps, settings)


def apply_dissipator(jumps: JumpSet, rho: MatrixLike) -> ComplexMatrix:
    """Evaluate D(rho) directly from the operator formula."""
    rho = tensor.as_matrix(rho, "rho")
    tensor.require_shape(rho, jumps.dim, "rho")
    out = -1j * tensor.commutator(np.asarray(jumps.k), rho)
    for jump in jumps.jumps:
        decay = tensor.dagger(jump) @ jump
        out += jump @ rho @ tensor.dagger(jump) - 0.5 * tensor.anticommutator(decay, rho)
    return out


def evolve(liou: Liouvillian, rho: MatrixLike, t: float) -> ComplexMatrix:
    """e^{tL} rho"""
    rho = tensor.as_matrix(rho, "rho")
    tensor.require_shape(rho, liou.dim, "rho")
    return tensor.apply_superop(tensor.matrix_exp(t * np.asarray(liou.matrix)), rho)


# ---------------------------------------------------------------------------
# Channel checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CPTPReport:
    t: float
    trace_error: float
    min_choi_eigenvalue: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "passed", self.trace_error <= self.tol and self.min_choi_eigenvalue >= -self.tol
        )

    @property
    def violating_eigenvalue(self) -> Optional[float]:
        return None if self.min_choi_eigenvalue >= -self.tol else self.min_choi_eigenvalue


def choi_matrix(channel: ComplexMatrix) -> ComplexMatrix:
    """sum_ij |i><j| (x) E(|i><j|) for a channel given as a superoperator."""
    dim = tensor.devectorize(channel[:, 0]).shape[0]
    choi = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for i, j, unit in tensor.matrix_units(dim):
        choi[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = tensor.apply_superop(channel, unit)
    return choi


def cptp_check(liou: Liouvillian, t: float, tol: float = 1e-9) -> CPTPReport:
    """Check that e^{tL} is completely positive and trace preserving."""
    if not np.isfinite(t) or t <= 0:
        raise ValidationError(f"t must be positive, got {t}")
    channel = tensor.matrix_exp(t * np.asarray(liou.matrix))
    trace_row = tensor.vectorize(tensor.identity(liou.dim)).conj()
    trace_error = float(np.max(np.abs(trace_row @ channel - trace_row)))
    min_eig = tensor.min_eigenvalue(choi_matrix(channel))
    report = CPTPReport(t=t, trace_error=trace_error, min_choi_eigenvalue=min_eig, tol=tol)
    if not report.passed:
        logger.warning("CPTP check failed at t=%g: trace error %.2e, min Choi eigenvalue %.2e", t, trace_error, min_eig)
    return report
