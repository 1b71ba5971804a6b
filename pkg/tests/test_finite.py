import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from psistat.errors import InputError
from psistat.finite import (
    DimensionCap,
    DimFactorMismatch,
    DimMismatch,
    HermitianOp,
    basis_state,
    evolve,
    fidelity,
    finite_inner,
    new_finite_state,
    propagator,
    schmidt,
    tensor,
)

R2 = np.sqrt(0.5)
PLUS = new_finite_state([1, 1])


def random_state(rng, dim):
    return new_finite_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOp((a + a.conj().T) / 2)


class TestStates:
    def test_normalization_enforced(self):
        with pytest.raises(InputError):
            from psistat.finite import FiniteState
            FiniteState([1.0, 1.0])
        with pytest.raises(InputError):
            new_finite_state([0, 0])

    def test_hermitian_enforced(self):
        with pytest.raises(InputError):
            HermitianOp([[0, 1], [0, 0]])
        with pytest.raises(InputError):
            HermitianOp([[0, 1, 2]])


class TestInnerAndFidelity:
    def test_examples(self):
        assert finite_inner(basis_state(2, 0), PLUS) == pytest.approx(R2)
        assert fidelity(basis_state(2, 0), PLUS) == pytest.approx(0.5)
        assert fidelity(basis_state(2, 0), basis_state(2, 1)) == 0.0
        a = new_finite_state([1, 1j])
        assert finite_inner(a, a) == pytest.approx(1)
        assert finite_inner(a, PLUS) == pytest.approx((1 - 1j) / 2)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(0)
        a, b = random_state(rng, 5), random_state(rng, 5)
        assert finite_inner(a, b) == pytest.approx(np.conj(finite_inner(b, a)), abs=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2 ** 31), st.integers(1, 12))
    def test_fidelity_bounds(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b = random_state(rng, dim), random_state(rng, dim)
        f = fidelity(a, b)
        assert 0.0 <= f <= 1.0
        assert fidelity(a, a) == pytest.approx(1, abs=1e-14)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch) as info:
            finite_inner(basis_state(2, 0), basis_state(3, 0))
        assert info.value.code == "finite_hilbert.DimMismatch"
        assert info.value.exit_code == 3


class TestEvolve:
    def test_zero_hamiltonian(self):
        s = random_state(np.random.default_rng(1), 4)
        out = evolve(HermitianOp(np.zeros((4, 4))), 3.7, s)
        np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_phase_flip(self):
        # diag(0, 1) for time pi turns |+> into |->
        out = evolve(HermitianOp(np.diag([0.0, 1.0])), np.pi, PLUS)
        np.testing.assert_allclose(out.amplitudes, [R2, -R2], atol=1e-15)

    def test_sign_convention(self):
        out = evolve(HermitianOp(np.diag([0.0, 1.0])), 0.5, basis_state(2, 1))
        assert out.amplitudes[1] == pytest.approx(np.exp(-0.5j))

    def test_against_matrix_exponential(self):
        rng = np.random.default_rng(2)
        h = random_hermitian(rng, 6)
        np.testing.assert_allclose(propagator(h, 0.8), expm(-0.8j * h.matrix), atol=1e-12)

    def test_unitary_semigroup_inverse(self):
        rng = np.random.default_rng(3)
        h, s = random_hermitian(rng, 5), random_state(rng, 5)
        u = propagator(h, 1.3)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-13)
        two_step = evolve(h, 0.5, evolve(h, 0.8, s))
        np.testing.assert_allclose(two_step.amplitudes, evolve(h, 1.3, s).amplitudes, atol=1e-13)
        back = evolve(h, -1.3, evolve(h, 1.3, s))
        np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-13)

    def test_preserves_fidelity(self):
        rng = np.random.default_rng(4)
        h, a, b = random_hermitian(rng, 7), random_state(rng, 7), random_state(rng, 7)
        before = fidelity(a, b)
        assert fidelity(evolve(h, 2.0, a), evolve(h, 2.0, b)) == pytest.approx(before, abs=1e-13)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            evolve(HermitianOp(np.eye(3)), 1.0, PLUS)


class TestTensor:
    def test_index_layout(self):
        out = tensor(basis_state(2, 0), basis_state(2, 1))
        np.testing.assert_array_equal(out.amplitudes, [0, 1, 0, 0])
        out = tensor(basis_state(2, 1), basis_state(3, 2))
        assert np.argmax(np.abs(out.amplitudes)) == 1 * 3 + 2

    def test_three_qubits(self):
        out = tensor(PLUS, PLUS, PLUS)
        assert out.dim == 8
        np.testing.assert_allclose(out.amplitudes, np.full(8, np.sqrt(1 / 8)), atol=1e-15)

    def test_inner_factorizes(self):
        rng = np.random.default_rng(5)
        a, b, c, d = (random_state(rng, k) for k in (2, 3, 2, 3))
        lhs = finite_inner(tensor(a, b), tensor(c, d))
        assert lhs == pytest.approx(finite_inner(a, c) * finite_inner(b, d), abs=1e-15)

    def test_dimension_cap(self):
        qubit = basis_state(2, 0)
        assert tensor(*[qubit] * 12).dim == 4096
        with pytest.raises(DimensionCap):
            tensor(*[qubit] * 13)


class TestSchmidt:
    def test_bell(self):
        r = schmidt(new_finite_state([1, 0, 0, 1]), 2, 2)
        np.testing.assert_allclose(r.coefficients, [R2, R2], atol=1e-15)
        assert r.rank == 2 and not r.separable
        assert r.schmidt_number == pytest.approx(2)

    def test_product(self):
        r = schmidt(tensor(basis_state(2, 0), PLUS), 2, 2)
        assert r.rank == 1 and r.separable
        assert r.schmidt_number == pytest.approx(1)
        assert r.coefficients[0] == pytest.approx(1)

    def test_random_product_states(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            s = tensor(random_state(rng, 3), random_state(rng, 4))
            assert schmidt(s, 3, 4).separable

    def test_coefficients_reconstruct(self):
        rng = np.random.default_rng(7)
        s = random_state(rng, 12)
        r = schmidt(s, 3, 4)
        assert np.sum(r.coefficients ** 2) == pytest.approx(1, abs=1e-14)
        assert np.all(np.diff(r.coefficients) <= 0)
        assert 1 <= r.schmidt_number <= 3
        assert r.rank == 3

    def test_bad_factorization(self):
        with pytest.raises(DimFactorMismatch):
            schmidt(new_finite_state(np.ones(6)), 4, 2)
        with pytest.raises(DimFactorMismatch):
            schmidt(new_finite_state(np.ones(6)), 0, 6)

    def test_to_dict(self):
        d = schmidt(new_finite_state([1, 0, 0, 1]), 2, 2).to_dict()
        assert d["rank"] == 2 and d["separable"] is False
