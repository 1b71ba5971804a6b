"""Orthonormal function sets used for Hermite superposition states and the
root density estimator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = ["BasisSet", "hermite_functions", "legendre_functions", "make_basis"]


def hermite_functions(n: int, x) -> np.ndarray:
    """Normalized Hermite functions h_0..h_{n-1} at ``x``, shape (n, len(x)).

    h_k(x) = (2^k k! sqrt(pi))^(-1/2) H_k(x) exp(-x^2/2), evaluated with the
    three-term recurrence to stay finite for large k.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n,) + x.shape)
    if n == 0:
        return out
    out[0] = np.pi ** -0.25 * np.exp(-x ** 2 / 2)
    if n > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out


def legendre_functions(n: int, x) -> np.ndarray:
    """Orthonormal Legendre functions sqrt((2k+1)/2) P_k(x) on [-1, 1].

    Zero outside the support.
    """
    x = np.asarray(x, dtype=float)
    p = np.empty((n,) + x.shape)
    if n == 0:
        return p
    p[0] = 1.0
    if n > 1:
        p[1] = x
    for k in range(1, n - 1):
        p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1)
    p *= np.sqrt((2 * np.arange(n) + 1) / 2.0).reshape((n,) + (1,) * x.ndim)
    p[:, np.abs(x) > 1] = 0.0
    return p


@dataclass(frozen=True)
class BasisSet:
    basis_id: str
    size: int

    def __post_init__(self):
        if self.basis_id not in ("hermite", "legendre"):
            raise InputError(f"unknown basis {self.basis_id!r}")
        if self.size < 1:
            raise InputError("basis size must be >= 1")

    @property
    def support(self) -> tuple[float, float]:
        return (-1.0, 1.0) if self.basis_id == "legendre" else (-np.inf, np.inf)

    def __call__(self, x) -> np.ndarray:
        if self.basis_id == "hermite":
            return hermite_functions(self.size, x)
        return legendre_functions(self.size, x)

    def contains(self, x) -> np.ndarray:
        lo, hi = self.support
        x = np.asarray(x, dtype=float)
        return (x >= lo) & (x <= hi)

    def quadrature(self, extra: int = 4) -> tuple[np.ndarray, np.ndarray]:
        """Gauss nodes and weights integrating products of two basis functions
        exactly (plain measure dx)."""
        m = self.size + extra
        if self.basis_id == "legendre":
            return np.polynomial.legendre.leggauss(m)
        nodes, weights = np.polynomial.hermite.hermgauss(m)
        # Hermite functions carry exp(-x^2/2) each; move the Gauss weight
        # exp(-x^2) back onto the integrand.
        return nodes, weights * np.exp(nodes ** 2)

    def gram(self) -> np.ndarray:
        x, w = self.quadrature()
        phi = self(x)
        return (phi * w) @ phi.T


def make_basis(basis_id: str, size: int) -> BasisSet:
    return BasisSet(basis_id, size)
