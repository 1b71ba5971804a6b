"""Coordinate/momentum moments and the uncertainty relations built on them.

Momentum expectations use the gradient form
``M(p^2) = integral |dpsi/dx|^2 dx`` with spectral derivatives.  The
coordinate-momentum covariance ``integral x S'(x) rho(x) dx`` is evaluated
through the probability current ``rho S' = Im(conj(psi) dpsi/dx)``, which
equals the phase-gradient integrand wherever the phase is defined and stays
smooth across nodes of psi.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NumericalError
from .grid import (
    AMPLITUDE_FLOOR,
    BOUNDARY_DENSITY_LIMIT,
    CoordState,
    Grid,
    boundary_density,
    new_coord_state,
    spectral_derivative,
)

__all__ = [
    "PSD_TOLERANCE",
    "MomentReport",
    "MultiState",
    "MatrixUncertaintyReport",
    "BoundaryMass",
    "DomainTooSmall",
    "NotPositiveDefinite",
    "NegativeEigenvalue",
    "moment_report",
    "heisenberg_check",
    "robertson_check",
    "gaussian_min_state",
    "commutator_residual",
    "new_multi_state",
    "multi_covariances",
    "matrix_uncertainty_check",
    "psd_sqrt",
]

PSD_TOLERANCE = 1e-8


class _UncertaintyError(InputError):
    module = "uncertainty"


class BoundaryMass(_UncertaintyError):
    pass


class DomainTooSmall(_UncertaintyError):
    pass


class NotPositiveDefinite(_UncertaintyError):
    pass


class NegativeEigenvalue(NumericalError):
    module = "uncertainty"


@dataclass(frozen=True)
class MomentReport:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float
    corr_r: float
    factor_k: float
    fisher_x: float
    degenerate_phase: bool = False

    @property
    def product(self) -> float:
        return self.var_x * self.var_p

    def to_dict(self) -> dict:
        return asdict(self)


def _require_decayed(state: CoordState) -> None:
    b = boundary_density(state)
    if b > BOUNDARY_DENSITY_LIMIT:
        raise BoundaryMass(f"boundary density {b:.3g} exceeds {BOUNDARY_DENSITY_LIMIT:g}")


def moment_report(s: CoordState) -> MomentReport:
    _require_decayed(s)
    g = s.grid
    x = g.x
    psi = s.amplitudes
    dpsi = spectral_derivative(psi, g.dx)
    rho = np.abs(psi) ** 2

    mean_x = float(np.sum(x * rho) * g.dx)
    var_x = float(np.sum((x - mean_x) ** 2 * rho) * g.dx)

    current = np.imag(np.conj(psi) * dpsi)  # rho * S'
    mean_p = float(np.sum(current) * g.dx)
    mean_p2 = float(np.sum(np.abs(dpsi) ** 2) * g.dx)
    var_p = mean_p2 - mean_p ** 2

    mag = np.sqrt(rho)
    undefined = mag < AMPLITUDE_FLOOR * mag.max()
    degenerate = float(np.sum(rho[undefined]) * g.dx) > 0.5
    if degenerate:
        cov = 0.0
    else:
        # symmetrized <(x - <x>)(p - <p>)>
        cov = float(np.sum((x - mean_x) * current) * g.dx)

    corr = cov / np.sqrt(var_x * var_p)
    factor_k = 1.0 / np.sqrt(1.0 - corr ** 2) if abs(corr) < 1 else np.inf

    drho = 2 * np.real(np.conj(psi) * dpsi)
    mask = rho > 0
    fisher = float(np.sum(drho[mask] ** 2 / rho[mask]) * g.dx)

    return MomentReport(mean_x, mean_p, var_x, var_p, cov, float(corr), float(factor_k),
                        fisher, degenerate)


def heisenberg_check(r: MomentReport, tolerance: float = PSD_TOLERANCE) -> bool:
    return bool(r.var_x * r.var_p >= 0.25 - tolerance)


def robertson_check(r: MomentReport, tolerance: float = PSD_TOLERANCE) -> bool:
    return bool(r.var_x * r.var_p >= r.factor_k ** 2 / 4 - tolerance)


def gaussian_min_state(grid: Grid, x0: float, p0: float, var_x: float) -> CoordState:
    """Minimum-uncertainty Gaussian with mean x0, mean momentum p0."""
    if not var_x > 0:
        raise InputError(f"var_x must be positive, got {var_x!r}")
    sigma = np.sqrt(var_x)
    if abs(x0) + 6 * sigma > grid.length / 2:
        raise DomainTooSmall(f"x0 +/- 6 sigma does not fit in [-{grid.length / 2}, {grid.length / 2}]")
    sigma_p = 0.5 / sigma
    if abs(p0) + 6 * sigma_p > grid.p_max:
        raise DomainTooSmall(f"p0 +/- 6 sigma_p exceeds the resolved momentum {grid.p_max:g}")
    x = grid.x
    psi = (2 * np.pi * var_x) ** -0.25 * np.exp(-(x - x0) ** 2 / (4 * var_x) + 1j * p0 * x)
    return new_coord_state(grid, psi)


def commutator_residual(s: CoordState) -> float:
    """max |((p x - x p) psi)(x_j) + i psi(x_j)| over the central half of the grid."""
    _require_decayed(s)
    g = s.grid
    x = g.x
    psi = s.amplitudes
    px = -1j * spectral_derivative(x * psi, g.dx)
    xp = x * (-1j * spectral_derivative(psi, g.dx))
    resid = np.abs(px - xp + 1j * psi)
    n = g.n_points
    return float(resid[n // 4: n - n // 4].max())


@dataclass(frozen=True)
class MultiState:
    """psi(x_1, ..., x_d) on a product of uniform grids (d <= 3)."""

    grids: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        grids = tuple(self.grids)
        if not 1 <= len(grids) <= 3:
            raise InputError("MultiState supports 1 to 3 dimensions")
        amps = np.array(self.amplitudes, dtype=complex, copy=True)
        if amps.shape != tuple(g.n_points for g in grids):
            raise InputError(f"amplitude shape {amps.shape} does not match grids")
        norm = float(np.sum(np.abs(amps) ** 2) * self.cell_volume_of(grids))
        if abs(norm - 1) > 1e-9:
            raise InputError(f"MultiState not normalized: {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def cell_volume_of(grids) -> float:
        return float(np.prod([g.dx for g in grids]))

    @property
    def dims(self) -> int:
        return len(self.grids)

    @property
    def cell_volume(self) -> float:
        return self.cell_volume_of(self.grids)

    def coordinates(self) -> list[np.ndarray]:
        return np.meshgrid(*[g.x for g in self.grids], indexing="ij")


def new_multi_state(grids: Sequence[Grid], raw_amplitudes) -> MultiState:
    raw = np.asarray(raw_amplitudes, dtype=complex)
    vol = MultiState.cell_volume_of(grids)
    norm = float(np.sum(np.abs(raw) ** 2) * vol)
    if not norm > 0:
        raise InputError("zero norm")
    return MultiState(tuple(grids), raw / np.sqrt(norm))


def _multi_boundary_density(m: MultiState) -> float:
    rho = np.abs(m.amplitudes) ** 2
    worst = 0.0
    for axis in range(m.dims):
        edges = np.take(rho, [0, -1], axis=axis)
        worst = max(worst, float(edges.max()))
    return worst


def multi_covariances(m: MultiState) -> tuple[np.ndarray, np.ndarray]:
    """Centered coordinate and momentum covariance matrices."""
    b = _multi_boundary_density(m)
    if b > BOUNDARY_DENSITY_LIMIT:
        raise BoundaryMass(f"boundary density {b:.3g} exceeds {BOUNDARY_DENSITY_LIMIT:g}")
    psi = m.amplitudes
    vol = m.cell_volume
    rho = np.abs(psi) ** 2
    coords = m.coordinates()
    grads = [spectral_derivative(psi, g.dx, axis=i) for i, g in enumerate(m.grids)]
    d = m.dims

    mean_x = np.array([np.sum(c * rho) * vol for c in coords])
    mean_p = np.array([np.sum(np.imag(np.conj(psi) * gr)) * vol for gr in grads])
    sigma_x = np.empty((d, d))
    sigma_p = np.empty((d, d))
    for j in range(d):
        for l in range(j, d):
            sx = np.sum(coords[j] * coords[l] * rho) * vol - mean_x[j] * mean_x[l]
            sp = np.sum(np.real(np.conj(grads[j]) * grads[l])) * vol - mean_p[j] * mean_p[l]
            sigma_x[j, l] = sigma_x[l, j] = sx
            sigma_p[j, l] = sigma_p[l, j] = sp
    return sigma_x, sigma_p


@dataclass(frozen=True)
class MatrixUncertaintyReport:
    sigma_x: np.ndarray
    sigma_p: np.ndarray
    deficit: np.ndarray
    min_eigenvalue: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "sigma_x": self.sigma_x.tolist(),
            "sigma_p": self.sigma_p.tolist(),
            "deficit": self.deficit.tolist(),
            "min_eigenvalue": self.min_eigenvalue,
            "satisfied": self.satisfied,
        }


def _require_spd(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotPositiveDefinite(f"{name} must be square")
    if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise NotPositiveDefinite(f"{name} is not symmetric")
    a = (a + a.T) / 2
    if np.linalg.eigvalsh(a).min() <= 0:
        raise NotPositiveDefinite(f"{name} is not positive definite")
    return a


def matrix_uncertainty_check(sigma_x, sigma_p,
                             tolerance: float = PSD_TOLERANCE) -> MatrixUncertaintyReport:
    """Test that sigma_x - inv(sigma_p)/4 is non-negative definite.

    The tolerance is relative to the larger of the deficit norm and the
    norm of sigma_x, so an exactly saturated bound (deficit ~ rounding
    noise) still counts as satisfied.
    """
    sx = _require_spd(sigma_x, "sigma_x")
    sp = _require_spd(sigma_p, "sigma_p")
    deficit = sx - 0.25 * np.linalg.inv(sp)
    deficit = (deficit + deficit.T) / 2
    min_eig = float(np.linalg.eigvalsh(deficit).min())
    scale = max(np.linalg.norm(deficit, 2), np.linalg.norm(sx, 2))
    return MatrixUncertaintyReport(sx, sp, deficit, min_eig, bool(min_eig >= -tolerance * scale))


def psd_sqrt(a) -> np.ndarray:
    """U D^(1/2) U^+ for a Hermitian non-negative matrix.

    Eigenvalues down to -1e-12*||a|| are clipped to zero.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("matrix must be square")
    herm = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    scale = np.abs(vals).max() if vals.size else 0.0
    if vals.size and vals.min() < -1e-12 * scale:
        raise NegativeEigenvalue(f"eigenvalue {vals.min():.3g} below clip threshold")
    root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    return root.real if np.isrealobj(a) else root
