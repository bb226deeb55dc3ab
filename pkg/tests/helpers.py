from __future__ import annotations

"""Small systems shared by the test modules."""

import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

# Ensure project src is on path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC = PROJECT_ROOT / "src"
sys.path.insert(0, str(SRC))

from lindblad_lab import tensor  # noqa: E402
from lindblad_lab.lindblad import JumpSet, Liouvillian, build_liouvillian, lift_local, reset_dissipator_jumps  # noqa: E402
from lindblad_lab.tensor import CompositeDims  # noqa: E402

GOLDEN = Path(__file__).resolve().parent / "golden"

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)


def ket_bra(i: int, j: int, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def system(
    h: np.ndarray, jumps: Sequence[np.ndarray], dims: Optional[CompositeDims] = None, k: Optional[np.ndarray] = None
) -> Liouvillian:
    dim = h.shape[0]
    jump_set = JumpSet.of(list(jumps), k) if jumps or k is not None else JumpSet.empty(dim)
    return build_liouvillian(h, jump_set, dims)


def amplitude_damping(gamma: float = 1.0, h: Optional[np.ndarray] = None) -> Liouvillian:
    """Qubit decaying to |0>."""
    return system(np.zeros((2, 2)) if h is None else h, [np.sqrt(gamma) * LOWER])


def dephasing(gamma: float = 1.0) -> Liouvillian:
    """Qubit with L = sqrt(gamma) sigma_z and no Hamiltonian; every diagonal state is stationary."""
    return system(np.zeros((2, 2)), [np.sqrt(gamma) * SIGMA_Z])


def random_system(
    dim: int, rng: np.random.Generator, n_jumps: int = 2, dims: Optional[CompositeDims] = None
) -> Liouvillian:
    """Generic Lindbladian; almost surely with a unique, positive definite steady state."""
    h = tensor.random_hermitian(dim, rng)
    jumps = [tensor.random_matrix(dim, rng) / np.sqrt(dim) for _ in range(n_jumps)]
    return system(h, jumps, dims)


def block_system(rng: np.random.Generator, sizes: Sequence[int] = (2, 2)) -> Liouvillian:
    """Direct sum of generic systems; one stationary state per block."""
    first, second = sizes
    h = scipy.linalg.block_diag(tensor.random_hermitian(first, rng), tensor.random_hermitian(second, rng))
    jumps = JumpSet.of([tensor.random_matrix(first, rng)]).direct_sum(JumpSet.of([tensor.random_matrix(second, rng)]))
    return build_liouvillian(h, jumps)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, _ = np.linalg.qr(tensor.random_matrix(dim, rng))
    return q


def random_faithful_state(u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Full-rank state with non-degenerate spectrum, diagonal in the columns of ``u``."""
    p = rng.uniform(0.2, 1.0, size=u.shape[0])
    return (u * (p / p.sum())) @ u.conj().T


def commuting_reset_system(
    rng: np.random.Generator, dims: CompositeDims
) -> Tuple[Liouvillian, np.ndarray, np.ndarray]:
    """Reset on A with H diagonal in a product eigenbasis of rho_hat_A (x) rho_B.

    Returns the Liouvillian, H and the reset target rho_hat_A.
    """
    u_a = random_unitary(dims.dim_a, rng)
    u_b = random_unitary(dims.dim_b, rng)
    rho_hat = random_faithful_state(u_a, rng)
    u = np.kron(u_a, u_b)
    h = (u * rng.normal(size=dims.total)) @ u.conj().T
    local = reset_dissipator_jumps(rho_hat, float(rng.uniform(0.5, 2.0)))
    return build_liouvillian(h, lift_local(local, dims), dims), h, rho_hat
