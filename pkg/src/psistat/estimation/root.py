"""Root density estimator: psi expanded in an orthonormal basis, fitted by
maximum likelihood, with closed-form Fisher and covariance matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import BasisSet
from .families import FisherMatrix
from .sampling import EstimationError, Sample

__all__ = [
    "RootModel",
    "FitDiagnostics",
    "SampleOutOfSupport",
    "DegenerateDensity",
    "DidNotConverge",
    "root_fisher",
    "root_covariance",
    "root_log_likelihood",
    "fit_root",
]

MAX_ITERATIONS = 500
LIKELIHOOD_TOLERANCE = 1e-9
MAX_HALVINGS = 60
BOUNDARY_MARGIN = 1e-12
DENSITY_FLOOR = 1e-300
SMOOTHING_STAGES = 9
START_RADIUS = 0.99
RESTARTS_PER_PARAM = 4
RESTART_SEED = 0


class SampleOutOfSupport(EstimationError):
    pass


class DegenerateDensity(EstimationError):
    exit_code = 4


class DidNotConverge(EstimationError):
    exit_code = 4


@dataclass(frozen=True)
class FitDiagnostics:
    log_likelihood: float
    iterations: int
    converged: bool
    history: tuple = field(repr=False, default=())


@dataclass(frozen=True)
class RootModel:
    """Coefficients (c_1..c_{s-1}) of psi; c0 = +sqrt(1 - sum c_j^2)."""

    basis: BasisSet
    coeffs: np.ndarray
    diagnostics: FitDiagnostics | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).ravel()
        if c.size != self.basis.size - 1:
            raise EstimationError(
                f"basis of size {self.basis.size} needs {self.basis.size - 1} coefficients, got {c.size}"
            )
        if not np.all(np.isfinite(c)) or np.dot(c, c) >= 1:
            raise EstimationError("coefficients must satisfy sum c_j^2 < 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def c0(self) -> float:
        return float(np.sqrt(1.0 - np.dot(self.coeffs, self.coeffs)))

    @property
    def full_coeffs(self) -> np.ndarray:
        return np.concatenate([[self.c0], self.coeffs])

    def amplitude(self, x) -> np.ndarray:
        return self.full_coeffs @ self.basis(x)

    def density(self, x) -> np.ndarray:
        return self.amplitude(x) ** 2


def root_fisher(model: RootModel, n: int) -> FisherMatrix:
    """I_ij = 4n (delta_ij + c_i c_j / c0^2)."""
    c = model.coeffs
    mat = 4 * n * (np.eye(c.size) + np.outer(c, c) / model.c0 ** 2)
    return FisherMatrix(mat, n)


def root_covariance(model: RootModel, n: int, extended: bool = False) -> np.ndarray:
    """Sigma_ij = (delta_ij - c_i c_j) / (4n).

    ``extended=True`` returns the s x s matrix including c0.
    """
    c = model.full_coeffs if extended else model.coeffs
    return (np.eye(c.size) - np.outer(c, c)) / (4 * n)


def _log_likelihood(c: np.ndarray, phi: np.ndarray, eps: float = 0.0) -> tuple[float, np.ndarray]:
    """sum ln(psi^2 + eps); eps > 0 is the smoothed objective used for warm starts."""
    c0 = np.sqrt(1.0 - np.dot(c, c))
    psi = c0 * phi[0] + c @ phi[1:]
    p = psi ** 2 + eps
    if p.min() < DENSITY_FLOOR:
        return -np.inf, psi
    return float(np.sum(np.log(p))), psi


def root_log_likelihood(model: RootModel, sample: Sample) -> float:
    """sum_k ln psi(x_k)^2."""
    value, _ = _log_likelihood(model.coeffs, model.basis(sample.values))
    if not np.isfinite(value):
        raise DegenerateDensity("psi(x_k)^2 < 1e-300 at some sample point")
    return value


def _score(c: np.ndarray, psi: np.ndarray, phi: np.ndarray, eps: float = 0.0) -> np.ndarray:
    c0 = np.sqrt(1.0 - np.dot(c, c))
    dpsi = phi[1:] - np.outer(c / c0, phi[0])
    return 2 * (dpsi * (psi / (psi ** 2 + eps))).sum(axis=1)


def _ascend(c, phi, eps, max_iter, history=None):
    """Preconditioned gradient ascent on sum ln(psi^2 + eps) from ``c``.

    Returns (c, loglik, iterations, converged).
    """
    n = phi.shape[1]
    loglik, psi = _log_likelihood(c, phi, eps)
    if not np.isfinite(loglik):
        raise DegenerateDensity("psi(x_k)^2 < 1e-300 at the starting point")
    if history is not None:
        history.append(loglik)
    step = 1.0
    for iterations in range(1, max_iter + 1):
        grad = _score(c, psi, phi, eps)
        direction = (grad - c * np.dot(c, grad)) / (4 * n)
        predicted = float(np.dot(grad, direction))
        alpha = min(1.0, 2 * step)
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            trial = c + alpha * direction
            if np.dot(trial, trial) <= 1 - BOUNDARY_MARGIN:
                trial_ll, trial_psi = _log_likelihood(trial, phi, eps)
                if trial_ll > loglik:
                    accepted = True
                    break
            alpha /= 2
        if not accepted:
            # no representable ascent left: stationary up to rounding
            return c, loglik, iterations, predicted < LIKELIHOOD_TOLERANCE
        gain = trial_ll - loglik
        c, loglik, psi, step = trial, trial_ll, trial_psi, alpha
        if history is not None:
            history.append(loglik)
        if gain < LIKELIHOOD_TOLERANCE:
            return c, loglik, iterations, True
    return c, loglik, max_iter, False


def fit_root(sample: Sample, basis: BasisSet, s: int | None = None) -> RootModel:
    """Maximum-likelihood root model for ``sample``.

    L(c) = sum_k ln psi(x_k)^2 drops to -inf wherever a node of psi crosses a
    sample point, so plain ascent from c = 0 can stall in the wrong cell.  The
    fit therefore first follows the maximizer of the smoothed objective
    sum ln(psi^2 + eps) while eps shrinks geometrically from the mean of
    phi_0(x_k)^2 (where the barriers are washed out) to 1e-8 of it, starting
    from c = 0 (pure phi_0).  For larger s that path can still end in the wrong
    cell, so 4(s-1) further ascents start from fixed pseudo-random points of
    the sphere and the run with the largest L wins.

    The final stage ascends L itself along the gradient preconditioned by the
    closed-form covariance (delta - c c^T)/(4n).  Each step is halved until it
    stays inside the unit ball and increases L; the fit stops when the gain
    drops below 1e-9 or after 500 iterations.  A non-converged fit is returned
    with ``diagnostics.converged = False``; ``diagnostics.history`` holds the
    log-likelihood of every accepted iterate of the final stage.
    """
    if s is None:
        s = basis.size
    if s != basis.size:
        basis = BasisSet(basis.basis_id, s)
    if s < 2:
        raise EstimationError("s must be >= 2")
    x = sample.values
    n = x.size
    if n < 10 * s:
        raise EstimationError(f"need n >= 10*s = {10 * s} sample points, got {n}")
    inside = basis.contains(x)
    if not inside.all():
        bad = x[~inside][0]
        raise SampleOutOfSupport(f"sample point {bad!r} outside basis support {basis.support}")

    phi = basis(x)
    scale = float(np.mean(phi[0] ** 2))
    c = np.zeros(s - 1)
    for eps in scale * np.logspace(0, -8, SMOOTHING_STAGES):
        c, _, _, _ = _ascend(c, phi, eps, MAX_ITERATIONS)
    history: list[float] = []
    best = (*_ascend(c, phi, 0.0, MAX_ITERATIONS, history), history)
    # the restart directions are fixed, so fits stay a pure function of the sample
    rng = np.random.default_rng(RESTART_SEED)
    for _ in range(RESTARTS_PER_PARAM * (s - 1)):
        v = rng.normal(size=s)
        v *= np.sign(v[0]) * START_RADIUS / np.linalg.norm(v)
        trial_history: list[float] = []
        try:
            trial = _ascend(v[1:], phi, 0.0, MAX_ITERATIONS, trial_history)
        except DegenerateDensity:
            continue
        if trial[1] > best[1] + LIKELIHOOD_TOLERANCE:
            best = (*trial, trial_history)
    c, loglik, iterations, converged, history = best
    diag = FitDiagnostics(loglik, iterations, converged, tuple(history))
    return RootModel(basis, c, diag)
