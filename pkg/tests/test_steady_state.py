from __future__ import annotations

"""Tests for stationary states, the product check and the Gibbs residual."""

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
from lindblad_lab.errors import NonSemisimpleError, NotErgodicError  # noqa: E402
from lindblad_lab.lindblad import JumpSet, decompose_hamiltonian, reset_dissipator_jumps  # noqa: E402
from lindblad_lab.steady_state import (  # noqa: E402
    DiagnosticsVerdict,
    GibbsVerdict,
    ProductVerdict,
    commutator_diagnostics,
    generalized_gibbs_state,
    gibbs_nogo,
    gibbs_state,
    infinite_temperature_state,
    local_steady_state,
    maximal_support_state,
    mean_ergodic_projector,
    product_factor_check,
    spectral_projector,
    stationary_basis,
)
from lindblad_lab.tensor import CompositeDims  # noqa: E402

from helpers import (  # noqa: E402
    LOWER,
    SIGMA_X,
    SIGMA_Z,
    amplitude_damping,
    block_system,
    commuting_reset_system,
    dephasing,
    ket_bra,
    random_system,
    system,
)


class ProjectorTests(unittest.TestCase):
    def test_projector_properties(self) -> None:
        rng = np.random.default_rng(31)
        for liou in (amplitude_damping(), dephasing(), random_system(3, rng)):
            with self.subTest(dim=liou.dim):
                p = mean_ergodic_projector(liou)
                matrix = np.asarray(liou.matrix)
                assert_allclose(p @ p, p, atol=1e-9)
                assert_allclose(matrix @ p, 0, atol=1e-9)
                assert_allclose(p @ matrix, 0, atol=1e-9)

    def test_projector_is_the_long_time_limit(self) -> None:
        liou = amplitude_damping(2.0, h=0.3 * SIGMA_X)
        long_time = tensor.matrix_exp(40.0 * np.asarray(liou.matrix))
        assert_allclose(mean_ergodic_projector(liou), long_time, atol=1e-9)

    def test_jordan_block_is_rejected(self) -> None:
        with self.assertRaises(NonSemisimpleError):
            spectral_projector(LOWER)


class StationaryStateTests(unittest.TestCase):
    def test_amplitude_damping_relaxes_to_ground_state(self) -> None:
        liou = amplitude_damping()
        basis = stationary_basis(liou)
        self.assertEqual(basis.dimension, 1)
        self.assertTrue(basis.is_unique)
        assert_allclose(basis.states[0], ket_bra(0, 0, 2), atol=1e-9)
        assert_allclose(maximal_support_state(liou), ket_bra(0, 0, 2), atol=1e-9)

    def test_dephasing_keeps_every_diagonal_state(self) -> None:
        liou = dephasing()
        basis = stationary_basis(liou)
        self.assertEqual(basis.dimension, 2)
        self.assertEqual(len(basis.states), 2)
        for state in basis.states:
            self.assertTrue(tensor.is_density(state, 1e-9))
            assert_allclose(state, np.diag(np.diag(state)), atol=1e-9)
        assert_allclose(maximal_support_state(liou), np.eye(2) / 2, atol=1e-9)

    def test_transient_level_is_emptied(self) -> None:
        liou = system(np.zeros((3, 3)), [ket_bra(0, 2, 3), ket_bra(1, 2, 3)])
        state = maximal_support_state(liou)
        assert_allclose(state, np.diag([0.5, 0.5, 0.0]), atol=1e-9)
        basis = stationary_basis(liou)
        self.assertEqual(basis.dimension, 4)
        for s in basis.states:
            self.assertLess(tensor.frobenius_norm(liou.apply(s)), 1e-8)
            self.assertLess(abs(s[2, 2]), 1e-9)

    def test_random_systems_have_unique_faithful_states(self) -> None:
        rng = np.random.default_rng(33)
        for _ in range(5):
            liou = random_system(3, rng)
            basis = stationary_basis(liou)
            self.assertEqual(basis.dimension, 1)
            state = maximal_support_state(liou)
            self.assertGreater(tensor.min_eigenvalue(state), 1e-8)
            self.assertLess(tensor.frobenius_norm(liou.apply(state)), 1e-8)

    def test_local_steady_state(self) -> None:
        rho_hat = np.diag([0.6, 0.4]).astype(np.complex128)
        assert_allclose(local_steady_state(reset_dissipator_jumps(rho_hat, 1.0)), rho_hat, atol=1e-9)
        with self.assertRaises(NotErgodicError):
            local_steady_state(JumpSet.of([SIGMA_Z]))


class ProductTests(unittest.TestCase):
    def setUp(self) -> None:
        self.dims = CompositeDims(2, 2)
        self.rho_a = np.diag([0.7, 0.3]).astype(np.complex128)
        self.rho_b = np.diag([0.4, 0.6]).astype(np.complex128)

    def test_product_state(self) -> None:
        check = product_factor_check(np.kron(self.rho_a, self.rho_b), self.dims, self.rho_a)
        self.assertIs(check.verdict, ProductVerdict.PRODUCT)
        self.assertTrue(check.passed)
        assert_allclose(check.factorization.rho_b, self.rho_b, atol=1e-12)

    def test_correlated_state(self) -> None:
        psi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
        check = product_factor_check(np.outer(psi, psi.conj()), self.dims, np.eye(2) / 2)
        self.assertIs(check.verdict, ProductVerdict.NON_PRODUCT)
        self.assertGreater(check.factorization.residual, 0.1)
        self.assertTrue(check.matches_target)

    def test_wrong_marginal(self) -> None:
        check = product_factor_check(np.kron(self.rho_a, self.rho_b), self.dims, np.eye(2) / 2)
        self.assertIs(check.verdict, ProductVerdict.PRODUCT)
        self.assertFalse(check.passed)


class CommutatorDiagnosticsTests(unittest.TestCase):
    def test_commuting_product_state_is_satisfied(self) -> None:
        dims = CompositeDims(2, 2)
        h = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z) + 0.5 * np.kron(SIGMA_Z, SIGMA_Z)
        rho = np.kron(np.diag([0.7, 0.3]), np.diag([0.4, 0.6]))
        report = commutator_diagnostics(rho, decompose_hamiltonian(h, dims))
        self.assertIs(report.verdict, DiagnosticsVerdict.SATISFIED)
        self.assertLess(max(report.residuals), 1e-12)

    def test_singular_state_is_flagged(self) -> None:
        dims = CompositeDims(2, 2)
        rho = np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2)
        with self.assertLogs("lindblad_lab.steady_state", level="WARNING"):
            report = commutator_diagnostics(rho, decompose_hamiltonian(np.zeros((4, 4)), dims))
        self.assertIs(report.verdict, DiagnosticsVerdict.PRECONDITIONS_UNMET)

    def test_non_commuting_state_is_not_checked(self) -> None:
        dims = CompositeDims(2, 2)
        h = np.kron(SIGMA_X, np.eye(2))
        rho = np.kron(np.diag([0.7, 0.3]), np.eye(2) / 2)
        report = commutator_diagnostics(rho, decompose_hamiltonian(h, dims))
        self.assertIs(report.verdict, DiagnosticsVerdict.PRECONDITIONS_UNMET)
        self.assertGreater(report.hamiltonian_residual, 0.1)


def _families(rng: np.random.Generator) -> list:
    transient = system(np.zeros((3, 3)), [ket_bra(0, 2, 3), ket_bra(1, 2, 3)])
    liouvillians = [amplitude_damping(), dephasing(), transient]
    liouvillians += [random_system(int(rng.integers(2, 4)), rng) for _ in range(6)]
    liouvillians += [block_system(rng, (2, 2)) for _ in range(3)]
    liouvillians += [block_system(rng, (2, 3)) for _ in range(3)]
    return liouvillians


class StationarySetPropertyTests(unittest.TestCase):
    def test_projector_keeps_trace_and_positivity(self) -> None:
        rng = np.random.default_rng(41)
        for index, liou in enumerate(_families(rng)):
            with self.subTest(system=index):
                p = mean_ergodic_projector(liou)
                trace_row = tensor.vectorize(np.eye(liou.dim)).conj()
                assert_allclose(trace_row @ p, trace_row, atol=1e-9)
                for _ in range(3):
                    image = tensor.apply_superop(p, tensor.random_density(liou.dim, rng))
                    self.assertTrue(tensor.is_density(tensor.hermitian_part(image), 1e-8))
                    self.assertTrue(tensor.is_hermitian(image, 1e-8))

    def test_stationary_states_are_dominated_by_maximal_support_state(self) -> None:
        rng = np.random.default_rng(42)
        for index, liou in enumerate(_families(rng)):
            rho_bar = maximal_support_state(liou)
            for number, state in enumerate(stationary_basis(liou).states):
                with self.subTest(system=index, state=number):
                    self.assertGreaterEqual(tensor.min_eigenvalue(liou.dim * rho_bar - state), -1e-8)

    def test_commuting_stationary_states_are_products(self) -> None:
        rng = np.random.default_rng(43)
        checked = 0
        for trial in range(100):
            dims = CompositeDims(2, 2 + trial % 2)
            liou, h, rho_hat = commuting_reset_system(rng, dims)
            hdec = decompose_hamiltonian(h, dims)
            basis = stationary_basis(liou)
            self.assertEqual(basis.dimension, dims.dim_b)
            for state in basis.states:
                if tensor.frobenius_norm(tensor.commutator(state, h)) > 1e-10:
                    continue
                checked += 1
                with self.subTest(trial=trial, checked=checked):
                    check = product_factor_check(state, dims, rho_hat)
                    self.assertLessEqual(check.factorization.residual, 1e-8)
                    self.assertTrue(check.passed)
                    if tensor.min_eigenvalue(state) > 1e-10:
                        report = commutator_diagnostics(state, hdec)
                        self.assertIs(report.verdict, DiagnosticsVerdict.SATISFIED)
                        self.assertLessEqual(max(report.residuals), 1e-8)
        self.assertGreaterEqual(checked, 100)


class GibbsTests(unittest.TestCase):
    def test_gibbs_state(self) -> None:
        rho = gibbs_state(np.diag([0.0, 1.0]), np.log(2.0))
        assert_allclose(rho, np.diag([2.0, 1.0]) / 3, atol=1e-12)

    def test_generalized_and_infinite_temperature(self) -> None:
        n = np.diag([0.0, 1.0])
        assert_allclose(generalized_gibbs_state(np.zeros((2, 2)), 1.0, n, mu=np.log(3.0)), np.diag([1.0, 3.0]) / 4, atol=1e-12)
        assert_allclose(infinite_temperature_state(n, np.log(3.0)), np.diag([1.0, 3.0]) / 4, atol=1e-12)

    def test_non_interacting_gibbs_state_is_stationary(self) -> None:
        beta = 0.8
        dims = CompositeDims(2, 2)
        h_a = np.diag([0.0, 1.0])
        h = np.kron(h_a, np.eye(2)) + np.kron(np.eye(2), 0.3 * SIGMA_X)
        local = reset_dissipator_jumps(gibbs_state(h_a, beta), 1.5)
        report = gibbs_nogo(decompose_hamiltonian(h, dims), local, beta)
        self.assertIs(report.verdict, GibbsVerdict.STATIONARY)
        self.assertLessEqual(report.residual, 1e-10)
        self.assertTrue(report.interaction_vanishes)
        self.assertTrue(report.consistent)

    def test_interacting_gibbs_state_is_not_stationary(self) -> None:
        beta = 0.8
        dims = CompositeDims(2, 2)
        h = np.kron(np.diag([0.0, 1.0]), np.eye(2)) + np.kron(SIGMA_X, SIGMA_X)
        local = reset_dissipator_jumps(np.diag([0.6, 0.4]), 1.0)
        report = gibbs_nogo(decompose_hamiltonian(h, dims), local, beta)
        self.assertIs(report.verdict, GibbsVerdict.NOT_STATIONARY)
        self.assertGreater(report.residual, 1e-3)
        self.assertFalse(report.interaction_vanishes)
        self.assertTrue(report.consistent)

    def test_random_interacting_systems_reject_the_gibbs_state(self) -> None:
        rng = np.random.default_rng(44)
        beta = 1.0
        for trial in range(100):
            dims = CompositeDims(2, 2 if trial % 2 else 4)
            hdec = decompose_hamiltonian(tensor.random_hermitian(dims.total, rng), dims)
            self.assertGreaterEqual(hdec.interaction_norm, 0.1)
            rate = float(rng.uniform(0.5, 2.0))
            with self.subTest(trial=trial):
                local = reset_dissipator_jumps(tensor.thermal_state(hdec.h_a, beta), rate)
                report = gibbs_nogo(hdec, local, beta)
                self.assertGreater(report.residual, 1e-4)
                self.assertIs(report.verdict, GibbsVerdict.NOT_STATIONARY)

                free = decompose_hamiltonian(hdec.reassemble() - hdec.h_ab, dims)
                self.assertLessEqual(free.interaction_norm, 1e-12)
                local = reset_dissipator_jumps(tensor.thermal_state(free.h_a, beta), rate)
                self.assertLessEqual(gibbs_nogo(free, local, beta).residual, 1e-9)


if __name__ == "__main__":
    unittest.main()
