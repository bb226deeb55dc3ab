from __future__ import annotations

"""Dense complex linear algebra over bipartite Hilbert spaces.

Every operator, density matrix and superoperator is a 2-D ``complex128``
numpy array. Vectorization is column stacking throughout, so that
``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``; all superoperator formulas in
the package rely on that single convention.
"""

import functools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .errors import DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
MatrixLike = Union[ComplexMatrix, Sequence[Sequence[complex]]]

DEFAULT_NULL_TOL = 1e-10


class Subsystem(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class CompositeDims:
    """Dimensions of H_A and H_B; the total space is H_A (x) H_B.

    ``dim_b == 1`` describes an unpartitioned system. Bipartite analyses call
    :meth:`require_bipartite`, which insists on both factors being at least 2.
    """

    dim_a: int
    dim_b: int

    def __post_init__(self) -> None:
        for name in ("dim_a", "dim_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @classmethod
    def single(cls, dim: int) -> "CompositeDims":
        return cls(dim, 1)

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def is_bipartite(self) -> bool:
        return self.dim_a >= 2 and self.dim_b >= 2

    def require_bipartite(self) -> None:
        if not self.is_bipartite:
            raise ValidationError(f"Bipartite analysis needs dim_a >= 2 and dim_b >= 2, got {self}")

    def dim_of(self, part: Union[Subsystem, str]) -> int:
        return self.dim_a if Subsystem(part) is Subsystem.A else self.dim_b


# ---------------------------------------------------------------------------
# Construction and predicates
# ---------------------------------------------------------------------------

def as_matrix(m: MatrixLike, name: str = "matrix") -> ComplexMatrix:
    """Return a fresh 2-D complex128 copy of ``m``."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def freeze(m: MatrixLike, name: str = "matrix") -> ComplexMatrix:
    """Like :func:`as_matrix` but the returned array is read-only."""
    arr = as_matrix(m, name)
    arr.setflags(write=False)
    return arr


def require_square(m: ComplexMatrix, name: str = "matrix") -> int:
    rows, cols = m.shape
    if rows != cols:
        raise DimensionMismatchError(f"{name} must be square, got {rows}x{cols}")
    return rows


def require_shape(m: ComplexMatrix, dim: int, name: str = "matrix") -> None:
    if m.shape != (dim, dim):
        raise DimensionMismatchError(f"{name} must be {dim}x{dim}, got {m.shape[0]}x{m.shape[1]}")


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(m).T


def hermitian_part(m: ComplexMatrix) -> ComplexMatrix:
    return (m + dagger(m)) / 2


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b - b @ a


def anticommutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b + b @ a


def frobenius_norm(m: ComplexMatrix) -> float:
    return float(np.linalg.norm(m))


def min_eigenvalue(m: ComplexMatrix) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(m))[0])


def is_hermitian(m: ComplexMatrix, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - dagger(m)), initial=0.0)) <= tol


def is_psd(m: ComplexMatrix, tol: float = 1e-12) -> bool:
    return is_hermitian(m, tol) and min_eigenvalue(m) >= -tol


def is_density(m: ComplexMatrix, tol: float = 1e-10) -> bool:
    return is_psd(m, tol) and abs(np.trace(m) - 1.0) <= tol


# ---------------------------------------------------------------------------
# Tensor products and partial traces
# ---------------------------------------------------------------------------

def kron(a: MatrixLike, b: MatrixLike) -> ComplexMatrix:
    """Kronecker product, (a (x) b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def kron_all(factors: Iterable[MatrixLike]) -> ComplexMatrix:
    factors = list(factors)
    if not factors:
        raise ValidationError("kron_all needs at least one factor")
    return functools.reduce(kron, factors[1:], as_matrix(factors[0]))


def partial_trace(m: MatrixLike, dims: CompositeDims, keep: Union[Subsystem, str] = Subsystem.A) -> ComplexMatrix:
    """Trace out one factor of H_A (x) H_B.

    ``keep=A`` returns Tr_B m (dim_a x dim_a); ``keep=B`` returns Tr_A m.
    """
    m = as_matrix(m)
    require_shape(m, dims.total, "operator on the composite space")
    blocks = m.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if Subsystem(keep) is Subsystem.A:
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


def embed_a(op: ComplexMatrix, dims: CompositeDims) -> ComplexMatrix:
    """op (x) I_B"""
    return np.kron(op, identity(dims.dim_b))


def embed_b(op: ComplexMatrix, dims: CompositeDims) -> ComplexMatrix:
    """I_A (x) op"""
    return np.kron(identity(dims.dim_a), op)


# ---------------------------------------------------------------------------
# Liouville space
# ---------------------------------------------------------------------------

def vectorize(m: MatrixLike) -> npt.NDArray[np.complex128]:
    """Column-stacking vectorization."""
    return as_matrix(m).flatten(order="F")


def devectorize(v: npt.ArrayLike) -> ComplexMatrix:
    v = np.asarray(v, dtype=np.complex128).ravel()
    dim = math.isqrt(v.size)
    if v.size == 0 or dim * dim != v.size:
        raise ValidationError(f"Vector length {v.size} is not a perfect square")
    return np.ascontiguousarray(v.reshape((dim, dim), order="F"))


def left_superop(a: ComplexMatrix) -> ComplexMatrix:
    """Superoperator of X -> a X."""
    return np.kron(identity(a.shape[0]), a)


def right_superop(b: ComplexMatrix) -> ComplexMatrix:
    """Superoperator of X -> X b."""
    return np.kron(b.T, identity(b.shape[0]))


def sandwich_superop(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Superoperator of X -> a X b."""
    return np.kron(b.T, a)


def commutator_superop(g: ComplexMatrix) -> ComplexMatrix:
    """Superoperator of X -> [g, X]."""
    return left_superop(g) - right_superop(g)


def apply_superop(superop: ComplexMatrix, m: ComplexMatrix) -> ComplexMatrix:
    return devectorize(superop @ vectorize(m))


def matrix_units(dim: int) -> Iterator[Tuple[int, int, ComplexMatrix]]:
    """Yield (i, j, |i><j|) in column-stacking order."""
    for j in range(dim):
        for i in range(dim):
            unit = np.zeros((dim, dim), dtype=np.complex128)
            unit[i, j] = 1.0
            yield i, j, unit


# ---------------------------------------------------------------------------
# Kernels, spans, functions of matrices
# ---------------------------------------------------------------------------

def null_space(m: npt.ArrayLike, tol: float = DEFAULT_NULL_TOL) -> ComplexMatrix:
    """Orthonormal basis (as columns) of the numerical kernel of ``m``.

    A right-singular vector belongs to the kernel when its singular value is
    at most ``tol`` times the largest one. An all-zero matrix has the whole
    space as kernel. Real input gives a real basis.
    """
    if tol < 0:
        raise ValidationError(f"tol must be non-negative, got {tol}")
    a = np.asarray(m)
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64, copy=False)
    if a.ndim != 2 or a.size == 0:
        raise ValidationError(f"null_space needs a non-empty 2-D matrix, got shape {a.shape}")
    rows, cols = a.shape
    # vh is always cols x cols: economy SVD for tall input, full SVD for wide input.
    _, s, vh = _svd(a, full_matrices=rows < cols)
    rank = _numerical_rank(s, tol)
    logger.debug("null_space: shape=%s rank=%d kernel=%d", a.shape, rank, cols - rank)
    return np.ascontiguousarray(vh[rank:].conj().T)


def kernel_pair(m: npt.ArrayLike, tol: float = DEFAULT_NULL_TOL) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Orthonormal bases of ker(m) and ker(m^dagger) from a single SVD of square ``m``."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"kernel_pair needs a non-empty square matrix, got shape {a.shape}")
    u, s, vh = _svd(a, full_matrices=True)
    rank = _numerical_rank(s, tol)
    logger.debug("kernel_pair: dim=%d rank=%d", a.shape[0], rank)
    return np.ascontiguousarray(vh[rank:].conj().T), np.ascontiguousarray(u[:, rank:])


def range_basis(projector: npt.ArrayLike) -> ComplexMatrix:
    """Orthonormal columns spanning the range of an (oblique) projector.

    The rank is read off the trace, so a pivoted QR suffices.
    """
    p = np.asarray(projector, dtype=np.complex128)
    rank = int(round(float(np.trace(p).real)))
    if rank < 1:
        return np.zeros((p.shape[0], 0), dtype=np.complex128)
    q, _, _ = scipy.linalg.qr(p, mode="economic", pivoting=True)
    return np.ascontiguousarray(q[:, :rank])


def _svd(a: ComplexMatrix, full_matrices: bool) -> Tuple[ComplexMatrix, npt.NDArray[np.float64], ComplexMatrix]:
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices)
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge on shape %s; retrying with gesvd", a.shape)
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesvd")


def _numerical_rank(s: npt.NDArray[np.float64], tol: float) -> int:
    threshold = tol * (s[0] if s.size else 0.0)
    return int(np.count_nonzero(s > threshold))


def traceless_hermitian_basis(dim: int) -> List[ComplexMatrix]:
    """Hilbert-Schmidt orthonormal basis of the traceless hermitian dim x dim matrices.

    Off-diagonal symmetric and antisymmetric units first, then the
    diagonal generators diag(1, ..., 1, -k, 0, ...) / sqrt(k (k + 1)).
    """
    if dim < 1:
        raise ValidationError(f"dim must be positive, got {dim}")
    basis: List[ComplexMatrix] = []
    for i in range(dim):
        for j in range(i + 1, dim):
            sym = np.zeros((dim, dim), dtype=np.complex128)
            sym[i, j] = sym[j, i] = 1 / np.sqrt(2)
            anti = np.zeros((dim, dim), dtype=np.complex128)
            anti[i, j] = -1j / np.sqrt(2)
            anti[j, i] = 1j / np.sqrt(2)
            basis.extend((sym, anti))
    for k in range(1, dim):
        diag = np.zeros(dim)
        diag[:k] = 1.0
        diag[k] = -k
        basis.append(np.diag(diag / np.sqrt(k * (k + 1))).astype(np.complex128))
    return basis


def hermitian_span(matrices: Sequence[ComplexMatrix], tol: float = DEFAULT_NULL_TOL) -> List[ComplexMatrix]:
    """Real-orthonormal basis of hermitian matrices spanning the hermitian and
    anti-hermitian parts of ``matrices``.

    For a set closed under X -> X^dagger this is a basis of its hermitian
    elements, with as many members as the set's complex dimension.
    """
    if not matrices:
        return []
    dim = matrices[0].shape[0]
    columns = []
    for x in matrices:
        for part in (hermitian_part(x), (x - dagger(x)) / 2j):
            v = vectorize(part)
            columns.append(np.concatenate([v.real, v.imag]))
    basis = scipy.linalg.orth(np.array(columns).T, rcond=tol)
    result = []
    for col in basis.T:
        x = devectorize(col[: dim * dim] + 1j * col[dim * dim:])
        result.append(hermitian_part(x))
    return result


def matrix_exp(m: MatrixLike) -> ComplexMatrix:
    """e^m by Pade scaling and squaring."""
    m = as_matrix(m)
    require_square(m)
    return scipy.linalg.expm(m)


def expm_hermitian(h: ComplexMatrix, scale: float) -> ComplexMatrix:
    """e^{scale * h} for hermitian ``h`` via eigendecomposition."""
    w, v = np.linalg.eigh(hermitian_part(h))
    return (v * np.exp(scale * w)) @ dagger(v)


def thermal_state(h: ComplexMatrix, beta: float) -> ComplexMatrix:
    """e^{-beta h} / Tr e^{-beta h}, computed with a shifted spectrum."""
    w, v = np.linalg.eigh(hermitian_part(h))
    weights = np.exp(-beta * w - np.max(-beta * w))
    weights = weights / weights.sum()
    return (v * weights) @ dagger(v)


def psd_sqrt(m: ComplexMatrix, tol: float = 1e-10) -> ComplexMatrix:
    """Square root of a positive semidefinite matrix.

    Eigenvalues down to ``-tol`` are clamped to zero; anything more negative
    is rejected.
    """
    w, v = np.linalg.eigh(hermitian_part(m))
    if w[0] < -tol:
        raise ValidationError(f"Matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def support_basis(m: ComplexMatrix, tol: float = 1e-10) -> ComplexMatrix:
    """Orthonormal columns spanning the eigenvectors of ``m`` with eigenvalue > tol."""
    w, v = np.linalg.eigh(hermitian_part(m))
    return np.ascontiguousarray(v[:, w > tol])


def hs_inner(a: MatrixLike, b: MatrixLike) -> complex:
    """Hilbert-Schmidt pairing Tr[a^dagger b]."""
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


# ---------------------------------------------------------------------------
# Random instances for property suites
# ---------------------------------------------------------------------------

def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> ComplexMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * hermitian_part(g)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> ComplexMatrix:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_matrix(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
