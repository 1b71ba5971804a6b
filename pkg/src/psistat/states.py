"""Constructors for commonly used test states."""

from __future__ import annotations

import numpy as np

from .basis import hermite_functions
from .grid import CoordState, Grid, new_coord_state

__all__ = ["hermite_state", "random_hermite_coefficients", "random_hermite_state",
           "chirped_gaussian"]


def hermite_state(grid: Grid, coeffs) -> CoordState:
    """sum_k coeffs[k] h_k(x), normalized."""
    coeffs = np.asarray(coeffs, dtype=complex)
    return new_coord_state(grid, coeffs @ hermite_functions(coeffs.size, grid.x))


def random_hermite_coefficients(rng: np.random.Generator, order: int) -> np.ndarray:
    """Complex Gaussian coefficients for h_0..h_{order-1}, unit norm."""
    c = rng.normal(size=order) + 1j * rng.normal(size=order)
    return c / np.linalg.norm(c)


def random_hermite_state(grid: Grid, rng: np.random.Generator, order: int = 8) -> CoordState:
    return hermite_state(grid, random_hermite_coefficients(rng, order))


def chirped_gaussian(grid: Grid, var: float, beta: float, x0: float = 0.0) -> CoordState:
    """psi ~ exp(-(1 + i beta)(x - x0)^2 / (4 var)).

    Coordinate variance ``var``, momentum variance (1 + beta^2)/(4 var) and
    covariance -beta/2.
    """
    x = grid.x - x0
    return new_coord_state(grid, np.exp(-(1 + 1j * beta) * x ** 2 / (4 * var)))
