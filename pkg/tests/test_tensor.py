from __future__ import annotations

"""Unit tests for the tensor and Liouville-space helpers."""

import sys
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose

# Ensure project src is on path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC = PROJECT_ROOT / "src"
sys.path.insert(0, str(SRC))

from lindblad_lab import tensor  # noqa: E402
from lindblad_lab.errors import DimensionMismatchError, ValidationError  # noqa: E402
from lindblad_lab.lindblad import reset_dissipator_jumps, dissipator_superop  # noqa: E402
from lindblad_lab.tensor import CompositeDims, Subsystem  # noqa: E402

from helpers import LOWER, SIGMA_X, SIGMA_Y, SIGMA_Z  # noqa: E402


class CompositeDimsTests(unittest.TestCase):
    def test_total_and_parts(self) -> None:
        dims = CompositeDims(2, 3)
        self.assertEqual(dims.total, 6)
        self.assertEqual(dims.dim_of(Subsystem.B), 3)
        self.assertEqual(dims.dim_of("A"), 2)
        self.assertTrue(dims.is_bipartite)

    def test_single_is_not_bipartite(self) -> None:
        dims = CompositeDims.single(4)
        self.assertFalse(dims.is_bipartite)
        with self.assertRaises(ValidationError):
            dims.require_bipartite()

    def test_rejects_non_positive(self) -> None:
        for bad in (0, -1, 2.5, True):
            with self.subTest(bad=bad), self.assertRaises(ValidationError):
                CompositeDims(bad, 2)


class KronAndPartialTraceTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(7)

    def test_kron_of_identity_and_sigma_x(self) -> None:
        expected = np.zeros((4, 4))
        expected[0, 1] = expected[1, 0] = expected[2, 3] = expected[3, 2] = 1.0
        assert_allclose(tensor.kron(np.eye(2), SIGMA_X), expected)

    def test_partial_traces_of_a_product(self) -> None:
        for dim_a, dim_b in ((2, 3), (3, 2), (2, 2)):
            with self.subTest(dims=(dim_a, dim_b)):
                dims = CompositeDims(dim_a, dim_b)
                a = tensor.random_matrix(dim_a, self.rng)
                b = tensor.random_matrix(dim_b, self.rng)
                ab = tensor.kron(a, b)
                assert_allclose(tensor.partial_trace(ab, dims, Subsystem.A), np.trace(b) * a, atol=1e-12)
                assert_allclose(tensor.partial_trace(ab, dims, Subsystem.B), np.trace(a) * b, atol=1e-12)

    def test_partial_trace_of_bell_state_is_maximally_mixed(self) -> None:
        psi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
        rho = np.outer(psi, psi.conj())
        dims = CompositeDims(2, 2)
        assert_allclose(tensor.partial_trace(rho, dims, "A"), np.eye(2) / 2, atol=1e-15)
        assert_allclose(tensor.partial_trace(rho, dims, "B"), np.eye(2) / 2, atol=1e-15)

    def test_partial_trace_checks_shape(self) -> None:
        with self.assertRaises(DimensionMismatchError):
            tensor.partial_trace(np.eye(5), CompositeDims(2, 2))

    def test_embeddings(self) -> None:
        dims = CompositeDims(2, 3)
        op_b = tensor.random_matrix(3, self.rng)
        assert_allclose(tensor.embed_a(SIGMA_Z, dims), np.kron(SIGMA_Z, np.eye(3)))
        assert_allclose(tensor.embed_b(op_b, dims), np.kron(np.eye(2), op_b))


class VectorizationTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(11)

    def test_column_stacking(self) -> None:
        m = np.array([[1, 2], [3, 4]], dtype=np.complex128)
        assert_allclose(tensor.vectorize(m), [1, 3, 2, 4])

    def test_sandwich_identity(self) -> None:
        for _ in range(5):
            a, x, b = (tensor.random_matrix(2, self.rng) for _ in range(3))
            lhs = tensor.vectorize(a @ x @ b)
            rhs = np.kron(b.T, a) @ tensor.vectorize(x)
            assert_allclose(lhs, rhs, atol=1e-13)
            assert_allclose(tensor.sandwich_superop(a, b) @ tensor.vectorize(x), lhs, atol=1e-13)

    def test_devectorize_inverts_vectorize(self) -> None:
        m = tensor.random_matrix(3, self.rng)
        assert_allclose(tensor.devectorize(tensor.vectorize(m)), m)

    def test_devectorize_rejects_non_square_length(self) -> None:
        with self.assertRaises(ValidationError):
            tensor.devectorize(np.ones(5))

    def test_commutator_superop(self) -> None:
        g = tensor.random_matrix(3, self.rng)
        x = tensor.random_matrix(3, self.rng)
        assert_allclose(tensor.apply_superop(tensor.commutator_superop(g), x), g @ x - x @ g, atol=1e-12)

    def test_matrix_units_follow_column_stacking(self) -> None:
        for index, (i, j, unit) in enumerate(tensor.matrix_units(3)):
            self.assertEqual(index, i + 3 * j)
            self.assertEqual(np.flatnonzero(tensor.vectorize(unit)).tolist(), [index])


class NullSpaceTests(unittest.TestCase):
    def test_zero_matrix_has_full_kernel(self) -> None:
        kernel = tensor.null_space(np.zeros((3, 3)), 1e-10)
        self.assertEqual(kernel.shape, (3, 3))
        assert_allclose(kernel.conj().T @ kernel, np.eye(3), atol=1e-12)

    def test_diagonal(self) -> None:
        kernel = tensor.null_space(np.diag([1.0, 0.0]), 1e-10)
        self.assertEqual(kernel.shape, (2, 1))
        self.assertAlmostEqual(abs(kernel[1, 0]), 1.0, places=12)

    def test_rank_one_matrix(self) -> None:
        rng = np.random.default_rng(3)
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        m = np.outer(u, v.conj())
        kernel = tensor.null_space(m, 1e-10)
        self.assertEqual(kernel.shape[1], 3)
        self.assertLess(np.linalg.norm(m @ kernel), 2e-10 * np.linalg.norm(m, 2))
        assert_allclose(kernel.conj().T @ kernel, np.eye(3), atol=1e-12)

    def test_wide_matrix(self) -> None:
        kernel = tensor.null_space(np.array([[1.0, 1.0, 0.0]]), 1e-10)
        self.assertEqual(kernel.shape, (3, 2))

    def test_reset_dissipator_kernel_is_target(self) -> None:
        rho_hat = np.diag([0.7, 0.3]).astype(np.complex128)
        superop = dissipator_superop(reset_dissipator_jumps(rho_hat, 1.0))
        kernel = tensor.null_space(superop, 1e-10)
        self.assertEqual(kernel.shape[1], 1)
        state = tensor.devectorize(kernel[:, 0])
        assert_allclose(state / np.trace(state), rho_hat, atol=1e-12)

    def test_negative_tolerance_rejected(self) -> None:
        with self.assertRaises(ValidationError):
            tensor.null_space(np.eye(2), -1.0)


class MatrixFunctionTests(unittest.TestCase):
    def test_exp_of_diagonal(self) -> None:
        assert_allclose(tensor.matrix_exp(np.diag([1.0, 2.0])), np.diag([np.e, np.e**2]), rtol=1e-12)

    def test_exp_of_nilpotent(self) -> None:
        assert_allclose(tensor.matrix_exp(LOWER), [[1, 1], [0, 1]], atol=1e-12)

    def test_exp_rejects_non_square(self) -> None:
        with self.assertRaises(DimensionMismatchError):
            tensor.matrix_exp(np.ones((2, 3)))

    def test_expm_hermitian_matches_expm(self) -> None:
        h = tensor.random_hermitian(3, np.random.default_rng(5))
        assert_allclose(tensor.expm_hermitian(h, -0.7), tensor.matrix_exp(-0.7 * h), atol=1e-12)

    def test_thermal_state_is_normalised_at_large_beta(self) -> None:
        rho = tensor.thermal_state(np.diag([0.0, 1.0]), 800.0)
        assert_allclose(rho, np.diag([1.0, 0.0]), atol=1e-15)

    def test_psd_sqrt(self) -> None:
        rho = tensor.random_density(3, np.random.default_rng(2))
        root = tensor.psd_sqrt(rho)
        assert_allclose(root @ root, rho, atol=1e-12)
        with self.assertRaises(ValidationError):
            tensor.psd_sqrt(-np.eye(2))


class PredicateTests(unittest.TestCase):
    def test_density_predicates(self) -> None:
        self.assertTrue(tensor.is_density(np.eye(2) / 2))
        self.assertFalse(tensor.is_density(np.eye(2)))
        self.assertFalse(tensor.is_density(np.diag([1.5, -0.5])))
        self.assertFalse(tensor.is_hermitian(LOWER))
        self.assertTrue(tensor.is_hermitian(SIGMA_Y))

    def test_hs_inner(self) -> None:
        rng = np.random.default_rng(9)
        a = tensor.random_matrix(3, rng)
        b = tensor.random_matrix(3, rng)
        self.assertAlmostEqual(tensor.hs_inner(a, b), np.trace(a.conj().T @ b), places=12)
        with self.assertRaises(DimensionMismatchError):
            tensor.hs_inner(np.eye(2), np.eye(3))

    def test_hermitian_span_of_adjoint_pair(self) -> None:
        span = tensor.hermitian_span([LOWER, LOWER.conj().T])
        self.assertEqual(len(span), 2)
        for x in span:
            self.assertTrue(tensor.is_hermitian(x, 1e-12))
            self.assertAlmostEqual(np.trace(x).real, 0.0, places=12)



class KernelHelperTests(unittest.TestCase):
    def test_real_input_gives_real_basis(self) -> None:
        basis = tensor.null_space(np.array([[1.0, 1.0]]))
        self.assertFalse(np.iscomplexobj(basis))
        assert_allclose(np.abs(basis[:, 0]), [2**-0.5, 2**-0.5], atol=1e-12)

    def test_kernel_pair_of_lowering_operator(self) -> None:
        right, left = tensor.kernel_pair(LOWER)
        self.assertEqual(right.shape, (2, 1))
        self.assertEqual(left.shape, (2, 1))
        assert_allclose(LOWER @ right, 0, atol=1e-12)
        assert_allclose(LOWER.conj().T @ left, 0, atol=1e-12)

    def test_kernel_pair_of_dissipator(self) -> None:
        target = tensor.random_density(2, np.random.default_rng(4))
        superop = dissipator_superop(reset_dissipator_jumps(target, 1.0))
        right, left = tensor.kernel_pair(superop)
        self.assertEqual(right.shape[1], 1)
        assert_allclose(tensor.devectorize(right[:, 0]) / np.trace(tensor.devectorize(right[:, 0])), target, atol=1e-10)
        identity = tensor.devectorize(left[:, 0])
        assert_allclose(identity / identity[0, 0], np.eye(2), atol=1e-10)

    def test_kernel_pair_needs_square(self) -> None:
        with self.assertRaises(ValidationError):
            tensor.kernel_pair(np.ones((2, 3)))

    def test_range_basis_of_oblique_projector(self) -> None:
        projector = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        basis = tensor.range_basis(projector)
        self.assertEqual(basis.shape, (3, 2))
        assert_allclose(basis.conj().T @ basis, np.eye(2), atol=1e-12)
        assert_allclose(projector @ basis, basis, atol=1e-12)
        self.assertEqual(tensor.range_basis(np.zeros((2, 2))).shape, (2, 0))

    def test_traceless_hermitian_basis(self) -> None:
        for dim in (1, 2, 3, 4):
            with self.subTest(dim=dim):
                basis = tensor.traceless_hermitian_basis(dim)
                self.assertEqual(len(basis), dim * dim - 1)
                for x in basis:
                    self.assertTrue(tensor.is_hermitian(x, 1e-15))
                    self.assertAlmostEqual(abs(np.trace(x)), 0.0, places=14)
                if basis:
                    gram = np.array([[tensor.hs_inner(x, y) for y in basis] for x in basis])
                    assert_allclose(gram, np.eye(len(basis)), atol=1e-12)

    def test_pauli_span(self) -> None:
        basis = tensor.traceless_hermitian_basis(2)
        stacked = np.column_stack([tensor.vectorize(x) for x in basis])
        paulis = np.column_stack([tensor.vectorize(p) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
        coefficients = np.linalg.lstsq(stacked, paulis, rcond=None)[0]
        assert_allclose(stacked @ coefficients, paulis, atol=1e-12)


if __name__ == "__main__":
    unittest.main()
