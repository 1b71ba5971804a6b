"""Characteristic functions built from densities and from psi-function
autocorrelations, moment extraction, and the positivity test for candidate
characteristic functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .grid import CoordState, DensityProfile, Grid, MomentumState

__all__ = [
    "VALIDITY_TOLERANCE",
    "CONVOLUTION_TOLERANCE",
    "CharFunc",
    "CharFuncValidity",
    "BadUGrid",
    "UOutOfRange",
    "TOutOfRange",
    "UnsupportedOrder",
    "InsufficientGrid",
    "InvalidCharFunc",
    "symmetric_grid",
    "charfunc_from_density",
    "charfunc_via_momentum_convolution",
    "momentum_charfunc_via_coordinate_convolution",
    "moment_from_charfunc",
    "validate_charfunc",
]

VALIDITY_TOLERANCE = 1e-7
CONVOLUTION_TOLERANCE = 1e-8
_INVARIANT_TOLERANCE = 1e-9


class _CharFuncError(InputError):
    module = "charfunc"


class BadUGrid(_CharFuncError):
    pass


class UOutOfRange(_CharFuncError):
    pass


class TOutOfRange(_CharFuncError):
    pass


class UnsupportedOrder(_CharFuncError):
    pass


class InsufficientGrid(_CharFuncError):
    pass


class InvalidCharFunc(_CharFuncError):
    pass


def _check_u_grid(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size % 2 == 0 or u.size < 1:
        raise BadUGrid("argument grid must be 1-D with an odd number of points")
    if not np.all(np.isfinite(u)):
        raise BadUGrid("argument grid must be finite")
    mid = u.size // 2
    scale = max(np.max(np.abs(u)), 1.0)
    if abs(u[mid]) > 1e-12 * scale:
        raise BadUGrid("argument grid must contain 0 at its midpoint")
    if np.max(np.abs(u + u[::-1])) > 1e-12 * scale:
        raise BadUGrid("argument grid must be symmetric about 0")
    if u.size > 1:
        steps = np.diff(u)
        if steps[0] <= 0 or np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise BadUGrid("argument grid must be uniform and increasing")
    return u


def symmetric_grid(step: float, k_max: int) -> np.ndarray:
    """``step * (-k_max..k_max)``."""
    return step * np.arange(-k_max, k_max + 1, dtype=float)


@dataclass(frozen=True)
class CharFunc:
    """Sampled characteristic function f(u) = M(exp(iuX)).

    Construction checks f(0) = 1, f(-u) = conj f(u) and |f| <= 1 to 1e-9.
    These are necessary conditions only; :func:`validate_charfunc` checks
    that the inverse transform is a density.
    """

    u_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        u = _check_u_grid(self.u_grid).copy()
        f = np.array(self.values, dtype=complex, copy=True)
        if f.shape != u.shape:
            raise InvalidCharFunc(f"values shape {f.shape} != grid shape {u.shape}")
        tol = _INVARIANT_TOLERANCE
        mid = u.size // 2
        if abs(f[mid] - 1) > tol:
            raise InvalidCharFunc(f"f(0) = {f[mid]!r}, expected 1")
        if np.max(np.abs(f[::-1] - np.conj(f))) > tol:
            raise InvalidCharFunc("f(-u) != conj(f(u))")
        if np.max(np.abs(f)) > 1 + tol:
            raise InvalidCharFunc("|f(u)| exceeds 1")
        u.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "u_grid", u)
        object.__setattr__(self, "values", f)

    @property
    def step(self) -> float:
        return float(self.u_grid[1] - self.u_grid[0]) if self.u_grid.size > 1 else 0.0

    def at_zero(self) -> complex:
        return complex(self.values[self.u_grid.size // 2])


@dataclass(frozen=True)
class CharFuncValidity:
    is_valid: bool
    min_reconstructed_density: float
    normalization_defect: float


def charfunc_from_density(p: DensityProfile, u_grid) -> CharFunc:
    """f(u) = sum_j P(x_j) exp(i x_j u) dx.

    A momentum density yields the momentum characteristic function in the
    variable t.
    """
    u = _check_u_grid(u_grid)
    pts = p.points
    values = np.exp(1j * np.outer(u, pts)) @ p.values * p.step
    # exact symmetry; the two halves are otherwise computed independently
    mid = u.size // 2
    values[:mid] = np.conj(values[::-1][:mid])
    return CharFunc(u, values)


def _grid_shifts(arg: np.ndarray, step: float, limit: int, err) -> np.ndarray:
    k = np.rint(arg / step)
    if np.max(np.abs(arg - k * step)) > 1e-9 * step:
        raise BadUGrid("arguments must be integer multiples of the grid spacing")
    if np.max(np.abs(k)) > limit:
        raise err(f"|argument| exceeds {limit} grid steps")
    return k.astype(int)


def charfunc_via_momentum_convolution(m: MomentumState, u_grid) -> CharFunc:
    """f(u) = sum_p conj(psi~(p+u)) psi~(p) dp for u on multiples of dp.

    Shifts wrap around the (periodic) discrete momentum grid, which makes the
    result identical to :func:`charfunc_from_density` up to rounding.
    """
    u = _check_u_grid(u_grid)
    g = m.grid
    shifts = _grid_shifts(u, g.dp, g.n_points // 2, UOutOfRange)
    a = m.amplitudes
    values = np.array([np.vdot(np.roll(a, -k), a) for k in shifts]) * g.dp
    return CharFunc(u, values)


def momentum_charfunc_via_coordinate_convolution(s: CoordState, t_grid) -> CharFunc:
    """f~(t) = sum_x conj(psi(x-t)) psi(x) dx for t on multiples of dx."""
    t = _check_u_grid(t_grid)
    g = s.grid
    shifts = _grid_shifts(t, g.dx, g.n_points // 2, TOutOfRange)
    a = s.amplitudes
    values = np.array([np.vdot(np.roll(a, k), a) for k in shifts]) * g.dx
    return CharFunc(t, values)


# Central-difference weights for f^(k)(0), fourth-order accurate, with
# offsets -r..r in units of the step.
_STENCILS = {
    1: np.array([1, -8, 0, 8, -1]) / 12.0,
    2: np.array([-1, 16, -30, 16, -1]) / 12.0,
    3: np.array([1, -8, 13, 0, -13, 8, -1]) / 8.0,
    4: np.array([-1, 12, -39, 56, -39, 12, -1]) / 6.0,
}


def moment_from_charfunc(f: CharFunc, k: int) -> float:
    """k-th raw moment from f^(k)(0) = i^k M(x^k), k = 0..4."""
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= 4:
        raise UnsupportedOrder(f"moment order must be 0..4, got {k!r}")
    k = int(k)
    if k == 0:
        return 1.0
    mid = f.u_grid.size // 2
    if mid < k + 1:
        raise InsufficientGrid(f"order {k} needs at least {k + 1} points each side of 0")
    w = _STENCILS[k]
    r = w.size // 2
    window = f.values[mid - r: mid + r + 1]
    deriv = np.dot(w, window) / f.step ** k
    return float((deriv / 1j ** k).real)


def validate_charfunc(f: CharFunc, grid: Grid | None = None,
                      tolerance: float = VALIDITY_TOLERANCE) -> CharFuncValidity:
    """Invert f by rectangle/trapezoid quadrature and test the result.

    Without ``grid`` the density is reconstructed on the 2K points
    ``x_j = (j-K) * pi/u_max`` (K = number of positive arguments), one full
    period of the discrete inverse transform.  With ``grid`` it is evaluated
    on ``grid.x``, which requires ``u_max >= pi/grid.dx``.
    """
    u = f.u_grid
    n_pos = u.size // 2
    if n_pos < 4:
        raise InsufficientGrid("need at least 4 positive arguments to invert")
    u_max = float(u[-1])
    du = f.step
    if grid is None:
        dx = np.pi / u_max
        x = dx * np.arange(-n_pos, n_pos)
    else:
        if u_max < grid.p_max * (1 - 1e-12):
            raise InsufficientGrid(
                f"argument span {2 * u_max:g} below 2*pi/dx = {2 * grid.p_max:g}"
            )
        dx = grid.dx
        x = grid.x
    weights = np.full(u.size, du)
    weights[[0, -1]] *= 0.5
    kernel = np.exp(-1j * np.outer(x, u))
    reconstructed = (kernel @ (weights * f.values)).real / (2 * np.pi)
    if not np.all(np.isfinite(reconstructed)):
        raise NumericalError("reconstructed density is not finite")
    min_density = float(reconstructed.min())
    defect = float(np.sum(reconstructed) * dx - 1)
    ok = min_density >= -tolerance and abs(defect) <= tolerance
    return CharFuncValidity(bool(ok), min_density, defect)
