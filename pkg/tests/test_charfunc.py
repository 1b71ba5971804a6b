import math
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from psistat import (
    CharFunc,
    charfunc_from_density,
    charfunc_via_momentum_convolution,
    density,
    gaussian_min_state,
    make_grid,
    moment_from_charfunc,
    momentum_charfunc_via_coordinate_convolution,
    new_coord_state,
    symmetric_grid,
    to_momentum,
    validate_charfunc,
)
from psistat.charfunc import (
    BadUGrid,
    InsufficientGrid,
    InvalidCharFunc,
    TOutOfRange,
    UnsupportedOrder,
    UOutOfRange,
)
from psistat.io import read_charfunc_csv
from psistat.states import hermite_state, random_hermite_state

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def gaussian(grid):
    return gaussian_min_state(grid, 0.0, 0.0, 0.5)


def quadrature_moment(state, k):
    g = state.grid
    return float(np.sum(g.x ** k * np.abs(state.amplitudes) ** 2) * g.dx)


class TestFromDensity:
    def test_gaussian_closed_form(self, grid, gaussian):
        u = symmetric_grid(0.05, 200)
        f = charfunc_from_density(density(gaussian), u)
        assert np.max(np.abs(f.values - np.exp(-u ** 2 / 4))) < 1e-12
        assert f.at_zero() == pytest.approx(1, abs=1e-12)

    def test_shift_multiplies_phase(self, grid):
        u = symmetric_grid(0.05, 100)
        f0 = charfunc_from_density(density(gaussian_min_state(grid, 0.0, 0.0, 0.5)), u)
        f1 = charfunc_from_density(density(gaussian_min_state(grid, 1.3, 0.0, 0.5)), u)
        assert np.max(np.abs(f1.values - np.exp(1.3j * u) * f0.values)) < 1e-12

    @pytest.mark.parametrize("bad", [
        np.array([0.0, 1.0]),                 # even length
        np.array([-1.0, 0.1, 1.0]),           # no zero
        np.array([-1.0, 0.0, 2.0]),           # asymmetric
        np.array([-3.0, -1.0, 0.0, 1.0, 3.0]),  # non-uniform
    ])
    def test_bad_u_grid(self, gaussian, bad):
        with pytest.raises(BadUGrid):
            charfunc_from_density(density(gaussian), bad)


class TestConvolutionRoutes:
    @pytest.mark.parametrize("seed", range(4))
    def test_momentum_convolution_matches_density(self, grid, seed):
        s = random_hermite_state(grid, np.random.default_rng(seed), order=6)
        u = symmetric_grid(grid.dp, 300)
        a = charfunc_from_density(density(s), u)
        b = charfunc_via_momentum_convolution(to_momentum(s), u)
        assert np.max(np.abs(a.values - b.values)) < 1e-8

    def test_coordinate_convolution_matches_momentum_density(self, grid):
        s = hermite_state(grid, [0.5, 0.5j, 0.5, -0.5])
        t = symmetric_grid(grid.dx, 300)
        a = charfunc_from_density(density(to_momentum(s)), t)
        b = momentum_charfunc_via_coordinate_convolution(s, t)
        assert np.max(np.abs(a.values - b.values)) < 1e-8

    def test_gaussian_momentum_closed_form(self, grid, gaussian):
        t = symmetric_grid(grid.dx, 400)
        f = momentum_charfunc_via_coordinate_convolution(gaussian, t)
        assert np.max(np.abs(f.values - np.exp(-t ** 2 / 4))) < 1e-12

    def test_zero_and_symmetry(self, grid):
        s = random_hermite_state(grid, np.random.default_rng(9))
        u = symmetric_grid(grid.dp, 50)
        f = charfunc_via_momentum_convolution(to_momentum(s), u)
        assert f.at_zero() == pytest.approx(1, abs=1e-12)
        np.testing.assert_allclose(f.values[::-1], np.conj(f.values), atol=1e-12)

    def test_out_of_range(self, grid, gaussian):
        too_far = symmetric_grid(grid.dp, grid.n_points // 2 + 1)
        with pytest.raises(UOutOfRange):
            charfunc_via_momentum_convolution(to_momentum(gaussian), too_far)
        with pytest.raises(TOutOfRange):
            momentum_charfunc_via_coordinate_convolution(
                gaussian, symmetric_grid(grid.dx, grid.n_points // 2 + 1))

    def test_off_grid_arguments(self, grid, gaussian):
        with pytest.raises(BadUGrid):
            charfunc_via_momentum_convolution(to_momentum(gaussian), symmetric_grid(0.7 * grid.dp, 4))


class TestMoments:
    def test_order_zero(self, gaussian):
        f = charfunc_from_density(density(gaussian), symmetric_grid(0.01, 8))
        assert moment_from_charfunc(f, 0) == 1.0

    def test_symmetric_first_moment(self, gaussian):
        f = charfunc_from_density(density(gaussian), symmetric_grid(0.01, 8))
        assert abs(moment_from_charfunc(f, 1)) < 1e-6

    def test_shifted_gaussian(self, grid):
        s = gaussian_min_state(grid, 2.0, 0.0, 0.5)
        f = charfunc_from_density(density(s), symmetric_grid(0.01, 8))
        assert moment_from_charfunc(f, 1) == pytest.approx(2.0, abs=1e-4)
        assert moment_from_charfunc(f, 2) == pytest.approx(4.5, abs=1e-4)
        for k in range(5):
            assert moment_from_charfunc(f, k) == pytest.approx(quadrature_moment(s, k), abs=1e-4)

    @pytest.mark.parametrize("seed", range(3))
    def test_hermite_superpositions(self, grid, seed):
        s = random_hermite_state(grid, np.random.default_rng(seed), order=5)
        f = charfunc_from_density(density(s), symmetric_grid(0.01, 8))
        for k in range(5):
            assert moment_from_charfunc(f, k) == pytest.approx(quadrature_moment(s, k), abs=1e-4)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_stencils_exact_on_polynomials(self, k):
        # the stencils carry no truncation error on neighbouring powers, so
        # f = 1 + 3 (iu)^k / k! + (iu)^(k-1) + (iu)^(k+1) must return 3
        u = symmetric_grid(0.1, 5)
        values = 1 + 3 * (1j * u) ** k / math.factorial(k) + (1j * u) ** (k - 1) + (1j * u) ** (k + 1)
        fake = SimpleNamespace(u_grid=u, values=values, step=0.1)
        assert moment_from_charfunc(fake, k) == pytest.approx(3.0, rel=1e-10)

    def test_errors(self, gaussian):
        f = charfunc_from_density(density(gaussian), symmetric_grid(0.01, 2))
        with pytest.raises(UnsupportedOrder):
            moment_from_charfunc(f, 5)
        with pytest.raises(UnsupportedOrder):
            moment_from_charfunc(f, -1)
        with pytest.raises(InsufficientGrid):
            moment_from_charfunc(f, 2)


class TestValidity:
    def test_gaussian_closed_form_valid(self):
        u = symmetric_grid(0.05, 400)
        v = validate_charfunc(CharFunc(u, np.exp(-u ** 2 / 4)))
        assert v.is_valid
        assert abs(v.normalization_defect) < 1e-7

    @pytest.mark.parametrize("seed", range(5))
    def test_necessity(self, grid, seed):
        s = random_hermite_state(grid, np.random.default_rng(seed), order=8)
        f = charfunc_from_density(density(s), symmetric_grid(grid.dp, grid.n_points // 2))
        assert validate_charfunc(f, grid).is_valid
        assert validate_charfunc(f).is_valid

    def test_counterexample_fixture(self):
        # (1 - 0.75 u^2) exp(-u^2/4) inverts to (1 + 3x^2 - 1.5) exp(-x^2)/sqrt(pi),
        # negative near 0 with P(0) = -0.5/sqrt(pi)
        f = read_charfunc_csv(DATA / "invalid_charfunc.csv")
        u = f.u_grid
        np.testing.assert_allclose(f.values, (1 - 0.75 * u ** 2) * np.exp(-u ** 2 / 4), atol=1e-15)
        brute = np.sum((f.values.real[1:] + f.values.real[:-1]) / 2 * np.diff(u)) / (2 * np.pi)
        assert brute == pytest.approx(-0.5 / np.sqrt(np.pi), abs=1e-12)
        v = validate_charfunc(f)
        assert not v.is_valid
        assert v.min_reconstructed_density == pytest.approx(-0.5 / np.sqrt(np.pi), abs=1e-9)

    def test_cosine_gaussian_is_valid(self):
        # cos(u) exp(-u^2/100) is the characteristic function of an equal
        # mixture of N(+-1, 1/50): a valid counterexample candidate it is not
        u = symmetric_grid(0.05, 1200)
        assert validate_charfunc(CharFunc(u, np.cos(u) * np.exp(-u ** 2 / 100))).is_valid

    def test_insufficient_span_for_grid(self, grid, gaussian):
        f = charfunc_from_density(density(gaussian), symmetric_grid(grid.dp, 100))
        with pytest.raises(InsufficientGrid):
            validate_charfunc(f, grid)

    def test_invariants(self):
        u = symmetric_grid(0.1, 3)
        with pytest.raises(InvalidCharFunc):
            CharFunc(u, 2 * np.ones(7))
        with pytest.raises(InvalidCharFunc):
            CharFunc(u, np.exp(1j * u) * (1 + 0.1j * (u > 0)))
        with pytest.raises(InvalidCharFunc):
            CharFunc(u, 1 + 0.5 * u ** 2)

    def test_boundary_state_still_valid(self):
        g = make_grid(256, 12.0)
        s = new_coord_state(g, np.exp(-(g.x - 1) ** 2) + 0.5 * np.exp(-(g.x + 2) ** 2 * 3))
        f = charfunc_from_density(density(s), symmetric_grid(g.dp, 128))
        assert validate_charfunc(f, g).is_valid
