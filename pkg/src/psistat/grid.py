"""Psi-functions sampled on uniform coordinate and momentum grids.

The coordinate grid is ``x_j = -L/2 + j*dx`` for ``j = 0..N-1`` with
``dx = L/N``.  The dual momentum grid is ``p_m = m*dp`` for
``m = -N/2..N/2-1`` with ``dp = 2*pi/L``.  The discrete transforms carry the
phase factors needed so that

    psi~(p) = 1/sqrt(2 pi) * integral psi(x) exp(-i p x) dx
    psi(x)  = 1/sqrt(2 pi) * integral psi~(p) exp(+i p x) dp

hold with rectangle-rule quadrature on these grids.  With these conventions
Parseval's identity is exact in floating point up to rounding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InputError

__all__ = [
    "NORM_TOLERANCE",
    "BOUNDARY_DENSITY_LIMIT",
    "Grid",
    "CoordState",
    "MomentumState",
    "DensityProfile",
    "PhaseProfile",
    "NonPowerOfTwo",
    "NonPositiveLength",
    "LengthMismatch",
    "ZeroNorm",
    "GridMismatch",
    "NotNormalized",
    "BoundaryMassWarning",
    "make_grid",
    "new_coord_state",
    "new_momentum_state",
    "to_momentum",
    "to_coordinate",
    "density",
    "inner_product",
    "complete_to_state",
    "decompose_density_phase",
    "spectral_derivative",
    "boundary_density",
]

NORM_TOLERANCE = 1e-9
BOUNDARY_DENSITY_LIMIT = 1e-12
AMPLITUDE_FLOOR = 1e-8


class _GridError(InputError):
    module = "grid_state"


class NonPowerOfTwo(_GridError):
    pass


class NonPositiveLength(_GridError):
    pass


class LengthMismatch(_GridError):
    pass


class ZeroNorm(_GridError):
    pass


class GridMismatch(_GridError):
    pass


class NotNormalized(_GridError):
    pass


class BoundaryMassWarning(UserWarning):
    """The state has not decayed at the edge of the domain."""


@dataclass(frozen=True)
class Grid:
    n_points: int
    length: float

    def __post_init__(self):
        n = self.n_points
        if isinstance(n, bool) or int(n) != n or n < 8 or (int(n) & (int(n) - 1)):
            raise NonPowerOfTwo(f"n_points must be a power of two >= 8, got {n!r}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise NonPositiveLength(f"length must be positive, got {self.length!r}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def x_min(self) -> float:
        return -self.length / 2

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def dp(self) -> float:
        return 2 * np.pi / self.length

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def p(self) -> np.ndarray:
        n = self.n_points
        return self.dp * np.arange(-(n // 2), n // 2)

    @property
    def p_max(self) -> float:
        """Largest momentum magnitude the grid resolves (pi/dx)."""
        return np.pi / self.dx


def make_grid(n_points: int, length: float) -> Grid:
    return Grid(n_points, length)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _check_same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatch(f"grids differ: {a} vs {b}")


@dataclass(frozen=True)
class CoordState:
    """psi(x_j) on a coordinate grid, normalized so sum |psi|^2 dx = 1."""

    grid: Grid
    amplitudes: np.ndarray
    norm_tolerance: float = NORM_TOLERANCE

    def __post_init__(self):
        amps = _frozen(self.amplitudes, complex)
        if amps.shape != (self.grid.n_points,):
            raise LengthMismatch(
                f"expected {self.grid.n_points} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)
        norm = float(np.sum(np.abs(amps) ** 2) * self.grid.dx)
        if abs(norm - 1) > self.norm_tolerance:
            raise NotNormalized(f"sum |psi|^2 dx = {norm!r}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def with_phase(self, phase) -> "CoordState":
        """Multiply by exp(i*phase(x)); ``phase`` is an array or callable."""
        s = phase(self.grid.x) if callable(phase) else np.asarray(phase, float)
        return CoordState(self.grid, self.amplitudes * np.exp(1j * s), self.norm_tolerance)


@dataclass(frozen=True)
class MomentumState:
    """psi~(p_m) on the momentum grid dual to ``grid``."""

    grid: Grid
    amplitudes: np.ndarray
    norm_tolerance: float = NORM_TOLERANCE

    def __post_init__(self):
        amps = _frozen(self.amplitudes, complex)
        if amps.shape != (self.grid.n_points,):
            raise LengthMismatch(
                f"expected {self.grid.n_points} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)
        norm = float(np.sum(np.abs(amps) ** 2) * self.grid.dp)
        if abs(norm - 1) > self.norm_tolerance:
            raise NotNormalized(f"sum |psi~|^2 dp = {norm!r}")

    @property
    def p(self) -> np.ndarray:
        return self.grid.p

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dp)


State = Union[CoordState, MomentumState]


@dataclass(frozen=True)
class DensityProfile:
    """Probability density sampled on a grid.

    ``representation`` is ``"x"`` for a coordinate density and ``"p"`` for a
    momentum density; ``points`` and ``step`` resolve accordingly.
    """

    grid: Grid
    values: np.ndarray
    representation: str = "x"
    norm_tolerance: float = NORM_TOLERANCE

    def __post_init__(self):
        if self.representation not in ("x", "p"):
            raise InputError(f"representation must be 'x' or 'p', got {self.representation!r}")
        vals = _frozen(self.values, float)
        if vals.shape != (self.grid.n_points,):
            raise LengthMismatch(f"expected {self.grid.n_points} values, got {vals.shape}")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise InputError("density values must be finite and non-negative")
        total = float(np.sum(vals) * self.step)
        if abs(total - 1) > self.norm_tolerance:
            raise NotNormalized(f"density integrates to {total!r}")
        object.__setattr__(self, "values", vals)

    @property
    def points(self) -> np.ndarray:
        return self.grid.x if self.representation == "x" else self.grid.p

    @property
    def step(self) -> float:
        return self.grid.dx if self.representation == "x" else self.grid.dp


@dataclass(frozen=True)
class PhaseProfile:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values, float)
        if vals.shape != (self.grid.n_points,):
            raise LengthMismatch(f"expected {self.grid.n_points} values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("phase must be finite at every grid point")
        object.__setattr__(self, "values", vals)


def boundary_density(state: CoordState) -> float:
    """Largest |psi|^2 at the two edge points of the grid."""
    a = state.amplitudes
    return float(max(abs(a[0]) ** 2, abs(a[-1]) ** 2))


def new_coord_state(grid: Grid, raw_amplitudes, norm_tolerance: float = NORM_TOLERANCE,
                    warn_boundary: bool = True) -> CoordState:
    """Normalize ``raw_amplitudes`` to unit probability on ``grid``.

    Emits :class:`BoundaryMassWarning` when the normalized density at the
    domain edge exceeds ``BOUNDARY_DENSITY_LIMIT``; the infinite-domain
    integrals are then not well approximated.
    """
    raw = np.asarray(raw_amplitudes, dtype=complex)
    if raw.shape != (grid.n_points,):
        raise LengthMismatch(f"expected {grid.n_points} amplitudes, got shape {raw.shape}")
    norm = float(np.sum(np.abs(raw) ** 2) * grid.dx)
    if not norm > 0 or not np.isfinite(norm):
        raise ZeroNorm("amplitudes have zero (or non-finite) norm")
    state = CoordState(grid, raw / np.sqrt(norm), norm_tolerance)
    if warn_boundary and boundary_density(state) > BOUNDARY_DENSITY_LIMIT:
        warnings.warn(
            f"boundary density {boundary_density(state):.3g} exceeds "
            f"{BOUNDARY_DENSITY_LIMIT:g}; enlarge the domain",
            BoundaryMassWarning,
            stacklevel=2,
        )
    return state


def new_momentum_state(grid: Grid, raw_amplitudes,
                       norm_tolerance: float = NORM_TOLERANCE) -> MomentumState:
    raw = np.asarray(raw_amplitudes, dtype=complex)
    if raw.shape != (grid.n_points,):
        raise LengthMismatch(f"expected {grid.n_points} amplitudes, got shape {raw.shape}")
    norm = float(np.sum(np.abs(raw) ** 2) * grid.dp)
    if not norm > 0 or not np.isfinite(norm):
        raise ZeroNorm("amplitudes have zero (or non-finite) norm")
    return MomentumState(grid, raw / np.sqrt(norm), norm_tolerance)


def _fourier_phase(grid: Grid) -> np.ndarray:
    # exp(-i p_m x_min): the DFT indexes x from 0, the grid starts at x_min.
    return np.exp(-1j * grid.p * grid.x_min)


def to_momentum(state: CoordState) -> MomentumState:
    g = state.grid
    spectrum = np.fft.fftshift(np.fft.fft(state.amplitudes))
    amps = spectrum * _fourier_phase(g) * (g.dx / np.sqrt(2 * np.pi))
    return MomentumState(g, amps, state.norm_tolerance)


def to_coordinate(state: MomentumState) -> CoordState:
    g = state.grid
    shifted = np.fft.ifftshift(state.amplitudes * np.conj(_fourier_phase(g)))
    amps = np.fft.ifft(shifted) * (g.n_points * g.dp / np.sqrt(2 * np.pi))
    return CoordState(g, amps, state.norm_tolerance)


def density(state: State) -> DensityProfile:
    values = np.abs(state.amplitudes) ** 2
    rep = "p" if isinstance(state, MomentumState) else "x"
    return DensityProfile(state.grid, values, rep, state.norm_tolerance)


def inner_product(a: CoordState, b: CoordState) -> complex:
    """<a|b> = sum conj(a_j) b_j dx."""
    _check_same_grid(a.grid, b.grid)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.grid.dx)


def complete_to_state(p: DensityProfile, s: PhaseProfile) -> CoordState:
    """Lift a classical density to the state sqrt(P) exp(iS)."""
    _check_same_grid(p.grid, s.grid)
    if p.representation != "x":
        raise InputError("completion needs a coordinate density")
    return CoordState(p.grid, np.sqrt(p.values) * np.exp(1j * s.values), p.norm_tolerance)


def _unwrap_from_center(raw: np.ndarray, valid: np.ndarray) -> np.ndarray:
    out = np.zeros_like(raw)
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return out
    center = len(raw) // 2
    start = idx[np.argmin(np.abs(idx - center))]
    out[start] = raw[start]
    for direction in (1, -1):
        prev = raw[start]
        j = start + direction
        while 0 <= j < len(raw):
            if valid[j]:
                step = (raw[j] - prev + np.pi) % (2 * np.pi) - np.pi
                prev = prev + step
                out[j] = prev
            j += direction
    return out


def decompose_density_phase(state: CoordState) -> tuple[DensityProfile, PhaseProfile]:
    """Split psi into density |psi|^2 and unwrapped phase S.

    The phase is set to 0 where |psi| < 1e-8 * max|psi|.  Unwrapping starts at
    the above-floor point nearest the grid center and proceeds outward,
    skipping below-floor points.
    """
    amps = state.amplitudes
    mag = np.abs(amps)
    valid = mag >= AMPLITUDE_FLOOR * mag.max()
    phase = _unwrap_from_center(np.angle(amps), valid)
    return density(state), PhaseProfile(state.grid, phase)


def wavenumbers(n: int, dx: float) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(n, d=dx)


def spectral_derivative(values, dx: float, axis: int = -1, order: int = 1) -> np.ndarray:
    """Derivative of periodic samples by multiplication with (ik)^order.

    For odd orders the unpaired Nyquist mode is dropped so real input yields
    real output.
    """
    values = np.asarray(values)
    n = values.shape[axis]
    k = wavenumbers(n, dx)
    factor = (1j * k) ** order
    if order % 2 and n % 2 == 0:
        factor[n // 2] = 0
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(values, axis=axis) * factor.reshape(shape), axis=axis)
    if np.isrealobj(values):
        return out.real
    return out
