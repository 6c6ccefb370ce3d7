"""Core state objects, metrics, and the optimal binary measurement."""

import numpy as np
import pytest

from qembound import (
    BinaryPOVM,
    DensityOperator,
    PureState,
    ValidationError,
    fidelity,
    helstrom_povm,
    helstrom_risk,
    matrix_function,
    swap_test_estimate,
    trace_norm,
    von_neumann_entropy,
)
from qembound.linalg import NumericalError, partial_trace

from conftest import random_density, random_hermitian, random_pure_vector

KET0 = DensityOperator(np.diag([1.0, 0.0]).astype(complex))
KET1 = DensityOperator(np.diag([0.0, 1.0]).astype(complex))


def char_poly_singular_values(a):
    """Singular values of `a` via the characteristic polynomial of a a†.

    Coefficients come from the Faddeev-LeVerrier trace recursion and the
    roots from the companion matrix, an eigh-free route.
    """
    m = a @ a.conj().T
    n = m.shape[0]
    coeffs = [1.0]
    mk = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        mk = m @ mk
        c = -np.trace(mk).real / k
        mk += c * np.eye(n)
        coeffs.append(c)
    roots = np.roots(coeffs)
    return np.sqrt(np.clip(roots.real, 0.0, None))


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.array([[1.0, 1.0], [0.0, 0.0]]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([1.5, -0.5]).astype(complex))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([0.7, 0.7]).astype(complex))

    def test_matrix_is_immutable(self):
        rho = DensityOperator.maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 5.0

    def test_pure_state_norm_check(self):
        with pytest.raises(ValidationError):
            PureState(np.array([1.0, 1.0]))
        assert PureState(np.array([1.0, 1.0]) / np.sqrt(2)).density().purity() == pytest.approx(1.0)


class TestTraceNorm:
    def test_zero_matrix(self):
        assert trace_norm(np.zeros((3, 3))) == 0.0

    def test_orthogonal_pure_states(self):
        assert trace_norm(KET0.matrix - KET1.matrix) == pytest.approx(2.0)

    def test_matches_characteristic_polynomial_oracle(self, rng):
        for _ in range(20):
            a = random_hermitian(rng, 4)
            expected = float(np.sum(char_poly_singular_values(a)))
            assert trace_norm(a) == pytest.approx(expected, abs=1e-8)

    def test_norm_axioms(self, rng):
        for _ in range(50):
            a = random_hermitian(rng, 3)
            b = random_hermitian(rng, 3)
            s = rng.standard_normal()
            assert trace_norm(s * a) == pytest.approx(abs(s) * trace_norm(a), abs=1e-9)
            assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(ValidationError):
            trace_norm(rng.standard_normal((3, 3)) + 1j * np.eye(3) * 5)


class TestFidelity:
    def test_self_fidelity_is_one(self, rng):
        rho = random_density(rng, 3)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_supports(self):
        assert fidelity(KET0, KET1) == 0.0

    def test_pure_states_overlap(self, rng):
        for _ in range(10):
            u = random_pure_vector(rng, 3)
            v = random_pure_vector(rng, 3)
            f = fidelity(DensityOperator.from_vector(u), DensityOperator.from_vector(v))
            assert f == pytest.approx(abs(np.vdot(u, v)), abs=1e-9)

    def test_matches_two_by_two_closed_form(self, rng):
        # F = sqrt(Tr[rho sigma] + 2 sqrt(det rho det sigma)) for qubits
        for _ in range(25):
            rho = random_density(rng, 2)
            sigma = random_density(rng, 2)
            closed = np.sqrt(np.real(np.trace(rho.matrix @ sigma.matrix))
                             + 2.0 * np.sqrt(max(np.linalg.det(rho.matrix).real, 0.0)
                                             * max(np.linalg.det(sigma.matrix).real, 0.0)))
            assert fidelity(rho, sigma) == pytest.approx(closed, abs=1e-9)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValidationError):
            fidelity(random_density(rng, 2), random_density(rng, 3))

    def test_fuchs_van_de_graaf(self, rng):
        for _ in range(50):
            rho = random_density(rng, 3)
            sigma = random_density(rng, 3)
            f = fidelity(rho, sigma)
            half_tn = 0.5 * trace_norm(rho.matrix - sigma.matrix)
            assert 1.0 - f <= half_tn + 1e-9
            assert half_tn <= np.sqrt(max(1.0 - f * f, 0.0)) + 1e-9


class TestVonNeumannEntropy:
    def test_pure_state(self, rng):
        assert von_neumann_entropy(DensityOperator.from_vector(random_pure_vector(rng, 4))) \
            == pytest.approx(0.0, abs=1e-9)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(DensityOperator.maximally_mixed(4)) == pytest.approx(2.0)

    def test_purity_formula_for_qubits(self, rng):
        # single-qubit entropy depends on the state only through its purity
        for _ in range(20):
            rho = random_density(rng, 2)
            p = rho.purity()
            lam = (1.0 + np.sqrt(2.0 * p - 1.0)) / 2.0
            expected = -(lam * np.log2(lam) + (1 - lam) * np.log2(1 - lam)) \
                if lam < 1.0 else 0.0
            assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-9)

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            rho = random_density(rng, 3)
            q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
            rotated = DensityOperator(q @ rho.matrix @ q.conj().T)
            assert von_neumann_entropy(rotated) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


class TestMatrixFunction:
    def test_sqrt_identity(self):
        np.testing.assert_allclose(matrix_function(np.eye(3), np.sqrt), np.eye(3), atol=1e-12)

    def test_sqrt_diagonal(self):
        out = matrix_function(np.diag([4.0, 9.0]), np.sqrt)
        np.testing.assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-12)

    def test_exp_log_round_trip(self, rng):
        for _ in range(10):
            a = random_density(rng, 3).matrix * 3.0  # PSD full rank, not unit trace
            logged = matrix_function(a, np.log, domain_floor=1e-12)
            np.testing.assert_allclose(matrix_function(logged, np.exp), a, atol=1e-8)

    def test_domain_error(self):
        with pytest.raises(NumericalError):
            matrix_function(np.diag([1.0, -0.5]), np.sqrt, domain_floor=0.0)


class TestHelstrom:
    def test_orthogonal_pure_states(self):
        povm = helstrom_povm(KET0, KET1)
        np.testing.assert_allclose(povm.pi0, KET0.matrix, atol=1e-12)

    def test_degenerate_tie_goes_to_pi1(self):
        rho = DensityOperator.maximally_mixed(2)
        povm = helstrom_povm(rho, rho)
        np.testing.assert_allclose(povm.pi0, np.zeros((2, 2)), atol=1e-12)
        np.testing.assert_allclose(povm.pi1, np.eye(2), atol=1e-12)

    def test_risk_limits(self):
        assert helstrom_risk(KET0, KET0) == pytest.approx(0.5)
        assert helstrom_risk(KET0, KET1) == pytest.approx(0.0)

    def test_risk_equals_povm_evaluation(self, rng):
        for _ in range(25):
            rho0 = random_density(rng, 3)
            rho1 = random_density(rng, 3)
            povm = helstrom_povm(rho0, rho1)
            direct = 1.0 - 0.5 * np.real(np.trace(povm.pi0 @ rho0.matrix)) \
                - 0.5 * np.real(np.trace(povm.pi1 @ rho1.matrix))
            assert helstrom_risk(rho0, rho1) == pytest.approx(direct, abs=1e-10)

    def test_povm_invariants_on_random_inputs(self, rng):
        for _ in range(25):
            p0 = rng.uniform(0.1, 0.9)
            povm = helstrom_povm(random_density(rng, 4), random_density(rng, 4), p0, 1 - p0)
            assert isinstance(povm, BinaryPOVM)  # constructor enforces the invariants

    def test_risk_below_half_fidelity(self, rng):
        for _ in range(50):
            rho0 = random_density(rng, 3)
            rho1 = random_density(rng, 3)
            assert helstrom_risk(rho0, rho1) <= 0.5 * fidelity(rho0, rho1) + 1e-9

    def test_never_beaten_by_bloch_grid(self, rng):
        # projective measurements along a dense sphere grid never beat the
        # optimal measurement on qubit pairs
        n_grid = 10_000
        idx = np.arange(n_grid) + 0.5
        phi = np.pi * (1.0 + np.sqrt(5.0)) * idx
        z = 1.0 - 2.0 * idx / n_grid
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        axes = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        paulis = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
        projectors = 0.5 * (np.eye(2) + np.einsum("gk,kij->gij", axes, paulis))
        for _ in range(30):
            rho0 = random_density(rng, 2)
            rho1 = random_density(rng, 2)
            p0 = np.real(np.einsum("gij,ji->g", projectors, rho0.matrix))
            p1 = np.real(np.einsum("gij,ji->g", projectors, rho1.matrix))
            grid_risks = 1.0 - 0.5 * p0 - 0.5 * (1.0 - p1)
            best_grid = min(grid_risks.min(), (1.0 - grid_risks).min())
            assert helstrom_risk(rho0, rho1) <= best_grid + 1e-9


class TestSwapTest:
    def test_deterministic_endpoints(self, rng):
        assert swap_test_estimate(1.0, 25, rng) == 1.0
        assert swap_test_estimate(0.0, 25, rng) == 0.0

    def test_zero_shots_rejected(self, rng):
        with pytest.raises(ValidationError):
            swap_test_estimate(0.5, 0, rng)

    def test_variance_matches_bernoulli(self, rng):
        shots = 10_000
        estimates = np.array([swap_test_estimate(0.5, shots, rng) for _ in range(1000)])
        expected_var = 0.25 / shots
        assert abs(estimates.var() - expected_var) <= 0.1 * expected_var
        assert estimates.mean() == pytest.approx(0.5, abs=0.001)


class TestPartialTrace:
    def test_product_state_factorizes(self, rng):
        a = random_density(rng, 2).matrix
        b = random_density(rng, 3).matrix
        joint = np.kron(a, b)
        np.testing.assert_allclose(partial_trace(joint, (2, 3), 0), a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, (2, 3), 1), b, atol=1e-12)

    def test_trace_preserved(self, rng):
        m = random_density(rng, 6).matrix
        reduced = partial_trace(m, (2, 3), 0)
        assert np.trace(reduced).real == pytest.approx(1.0, abs=1e-12)
