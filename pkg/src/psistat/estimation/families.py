"""Parametric densities P(x|theta), their Fisher information and the
Cramer-Rao bound for biased estimators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..basis import BasisSet
from ..grid import Grid
from .sampling import EstimationError, sample_from_density

__all__ = [
    "FAMILY_IDS",
    "ParametricFamily",
    "FisherMatrix",
    "InadmissibleTheta",
    "NonIntegrableScore",
    "ZeroFisher",
    "gaussian_location",
    "gaussian_location_scale",
    "root_family",
    "make_family",
    "fisher_theta",
    "biased_bound",
]

FAMILY_IDS = ("gaussian_location", "gaussian_location_scale", "root_model")


class InadmissibleTheta(EstimationError):
    pass


class NonIntegrableScore(EstimationError):
    exit_code = 4


class ZeroFisher(EstimationError):
    exit_code = 4


@dataclass(frozen=True)
class FisherMatrix:
    matrix: np.ndarray
    n: int

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise EstimationError("Fisher matrix must be square")
        mat = (mat + mat.T) / 2
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


@dataclass(frozen=True)
class ParametricFamily:
    """A density family evaluated on quadrature nodes.

    ``density(x, theta)`` returns P(x|theta); ``gradient(x, theta)`` returns
    dP/dtheta with shape (param_dim, len(x)).  Root-model families also
    provide the amplitude psi = sqrt(P) and its gradient.
    """

    family_id: str
    param_dim: int
    density: Callable = field(repr=False)
    gradient: Callable = field(repr=False)
    quadrature: Callable = field(repr=False)
    admissible: Callable = field(repr=False)
    sampling_nodes: Callable = field(repr=False)
    amplitude: Callable | None = field(default=None, repr=False)
    amplitude_gradient: Callable | None = field(default=None, repr=False)
    basis: BasisSet | None = None
    params: dict = field(default_factory=dict)

    def check(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.param_dim,) or not np.all(np.isfinite(theta)):
            raise InadmissibleTheta(
                f"{self.family_id} expects {self.param_dim} finite parameters, got {theta!r}"
            )
        reason = self.admissible(theta)
        if reason:
            raise InadmissibleTheta(reason)
        return theta

    def sample(self, theta, n: int, rng: np.random.Generator) -> np.ndarray:
        theta = self.check(theta)
        if self.family_id == "gaussian_location":
            return rng.normal(theta[0], self.params["sigma"], n)
        if self.family_id == "gaussian_location_scale":
            return rng.normal(theta[0], np.sqrt(theta[1]), n)
        x = self.sampling_nodes(theta)
        return sample_from_density(x, self.density(x, theta), n, rng)


def _gaussian_nodes(center: float, sigma: float, grid: Grid | None) -> tuple[np.ndarray, np.ndarray]:
    if grid is None:
        grid = Grid(2048, 24.0 * sigma)
        return center + grid.x, np.full(grid.n_points, grid.dx)
    return grid.x, np.full(grid.n_points, grid.dx)


def gaussian_location(sigma: float = 1.0, grid: Grid | None = None) -> ParametricFamily:
    """N(theta, sigma^2) with known sigma; theta = (mean,)."""
    if not sigma > 0:
        raise EstimationError("sigma must be positive")

    def dens(x, th):
        return np.exp(-(x - th[0]) ** 2 / (2 * sigma ** 2)) / np.sqrt(2 * np.pi * sigma ** 2)

    def grad(x, th):
        return ((x - th[0]) / sigma ** 2 * dens(x, th))[None, :]

    return ParametricFamily(
        "gaussian_location", 1, dens, grad,
        quadrature=lambda th: _gaussian_nodes(th[0], sigma, grid),
        admissible=lambda th: None,
        sampling_nodes=lambda th: _gaussian_nodes(th[0], sigma, grid)[0],
        params={"sigma": float(sigma)},
    )


def gaussian_location_scale(grid: Grid | None = None) -> ParametricFamily:
    """N(mean, variance); theta = (mean, variance)."""

    def dens(x, th):
        mu, v = th
        return np.exp(-(x - mu) ** 2 / (2 * v)) / np.sqrt(2 * np.pi * v)

    def grad(x, th):
        mu, v = th
        p = dens(x, th)
        d_mu = (x - mu) / v * p
        d_v = ((x - mu) ** 2 / (2 * v ** 2) - 1 / (2 * v)) * p
        return np.stack([d_mu, d_v])

    def admissible(th):
        return None if th[1] > 0 else f"variance must be positive, got {th[1]!r}"

    return ParametricFamily(
        "gaussian_location_scale", 2, dens, grad,
        quadrature=lambda th: _gaussian_nodes(th[0], np.sqrt(th[1]), grid),
        admissible=admissible,
        sampling_nodes=lambda th: _gaussian_nodes(th[0], np.sqrt(th[1]), grid)[0],
    )


def root_family(basis: BasisSet) -> ParametricFamily:
    """psi = c0 phi_0 + sum_j c_j phi_j with c0 = sqrt(1 - |c|^2);
    theta = (c_1, ..., c_{s-1})."""
    s = basis.size
    if s < 2:
        raise EstimationError("a root model needs at least two basis functions")

    def c0_of(th):
        return np.sqrt(1.0 - np.dot(th, th))

    def amp(x, th):
        phi = basis(x)
        return c0_of(th) * phi[0] + th @ phi[1:]

    def amp_grad(x, th):
        phi = basis(x)
        return phi[1:] - np.outer(th / c0_of(th), phi[0])

    def dens(x, th):
        return amp(x, th) ** 2

    def grad(x, th):
        return 2 * amp(x, th) * amp_grad(x, th)

    def admissible(th):
        total = float(np.dot(th, th))
        return None if total < 1 else f"sum of squared coefficients {total!r} must be < 1"

    def nodes(th):
        lo, hi = (-1.0, 1.0) if basis.basis_id == "legendre" else (-14.0, 14.0)
        return np.linspace(lo, hi, 16385)

    return ParametricFamily(
        "root_model", s - 1, dens, grad,
        quadrature=lambda th: basis.quadrature(extra=s + 4),
        admissible=admissible,
        sampling_nodes=nodes,
        amplitude=amp,
        amplitude_gradient=amp_grad,
        basis=basis,
    )


def make_family(family_id: str, *, sigma: float = 1.0, basis: BasisSet | None = None,
                grid: Grid | None = None) -> ParametricFamily:
    if family_id == "gaussian_location":
        return gaussian_location(sigma, grid)
    if family_id == "gaussian_location_scale":
        return gaussian_location_scale(grid)
    if family_id == "root_model":
        if basis is None:
            raise EstimationError("root_model family needs a basis")
        return root_family(basis)
    raise EstimationError(f"unknown family {family_id!r}; expected one of {FAMILY_IDS}")


def fisher_theta(f: ParametricFamily, theta, n: int, form: str = "score") -> FisherMatrix:
    """n * integral d_j lnP d_k lnP P dx by quadrature.

    ``form="amplitude"`` (root models only) uses 4n * integral d_j psi d_k psi dx
    instead.
    """
    theta = f.check(theta)
    if n < 1:
        raise EstimationError("n must be >= 1")
    x, w = f.quadrature(theta)
    if form == "amplitude":
        if f.amplitude_gradient is None:
            raise EstimationError(f"{f.family_id} has no amplitude form")
        g = f.amplitude_gradient(x, theta)
        return FisherMatrix(4 * n * (g * w) @ g.T, n)
    if form != "score":
        raise EstimationError(f"unknown form {form!r}")
    p = f.density(x, theta)
    dp = f.gradient(x, theta)
    zero = p <= 1e-300
    if np.any(np.abs(dp[:, zero]) > 0):
        raise NonIntegrableScore("density vanishes where its parameter gradient does not")
    keep = ~zero
    scaled = dp[:, keep] / p[keep]
    mat = n * (scaled * (p[keep] * w[keep])) @ scaled.T
    return FisherMatrix(mat, n)


def biased_bound(f: ParametricFamily, theta, bias_derivative: float, n: int = 1) -> float:
    """Lower bound (1 + b'(theta))^2 / I_theta on the mean squared error."""
    if f.param_dim != 1:
        raise EstimationError("biased bound is defined for a scalar parameter")
    info = float(fisher_theta(f, theta, n).matrix[0, 0])
    if not info > 0:
        raise ZeroFisher("Fisher information is zero")
    return (1.0 + bias_derivative) ** 2 / info
