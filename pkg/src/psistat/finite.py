"""Finite-dimensional state vectors: scalar products, fidelity, unitary
evolution, tensor products and Schmidt decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InputError

__all__ = [
    "MAX_REGISTER_DIM",
    "SCHMIDT_TOLERANCE",
    "FiniteState",
    "HermitianOp",
    "SchmidtReport",
    "DimMismatch",
    "DimFactorMismatch",
    "DimensionCap",
    "new_finite_state",
    "basis_state",
    "finite_inner",
    "fidelity",
    "propagator",
    "evolve",
    "tensor",
    "schmidt",
]

MAX_REGISTER_DIM = 2 ** 12
SCHMIDT_TOLERANCE = 1e-10


class _FiniteError(InputError):
    module = "finite_hilbert"


class DimMismatch(_FiniteError):
    pass


class DimFactorMismatch(_FiniteError):
    pass


class DimensionCap(_FiniteError):
    pass


@dataclass(frozen=True)
class FiniteState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex, copy=True).ravel()
        if amps.size < 1:
            raise _FiniteError("state needs at least one amplitude")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1) > 1e-12:
            raise _FiniteError(f"state not normalized: sum |c|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_pairs(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.amplitudes]


def new_finite_state(raw) -> FiniteState:
    raw = np.asarray(raw, dtype=complex).ravel()
    norm = np.linalg.norm(raw)
    if not norm > 0:
        raise _FiniteError("zero vector cannot be normalized")
    return FiniteState(raw / norm)


def basis_state(dim: int, index: int) -> FiniteState:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1
    return FiniteState(amps)


@dataclass(frozen=True)
class HermitianOp:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise _FiniteError("operator must be a square matrix")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > 1e-12:
            raise _FiniteError("operator is not Hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _same_dim(a: FiniteState, b: FiniteState) -> None:
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


def finite_inner(a: FiniteState, b: FiniteState) -> complex:
    _same_dim(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FiniteState, b: FiniteState) -> float:
    """|<a|b>|^2, clipped into [0, 1] against rounding."""
    return float(min(1.0, abs(finite_inner(a, b)) ** 2))


def propagator(h: HermitianOp, t: float) -> np.ndarray:
    """exp(-iHt) from the eigendecomposition H = U diag(E) U^+."""
    energies, vecs = np.linalg.eigh(h.matrix)
    return (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T


def evolve(h: HermitianOp, t: float, s: FiniteState) -> FiniteState:
    """Solve i d(psi)/dt = H psi for time t."""
    if h.dim != s.dim:
        raise DimMismatch(f"operator dim {h.dim} != state dim {s.dim}")
    return FiniteState(propagator(h, t) @ s.amplitudes)


def tensor(*states: FiniteState) -> FiniteState:
    """Kronecker product, row-major: index (j, k) -> j*dim(b) + k."""
    if not states:
        raise _FiniteError("tensor needs at least one state")
    dim = int(np.prod([s.dim for s in states]))
    if dim > MAX_REGISTER_DIM:
        raise DimensionCap(f"register dimension {dim} exceeds {MAX_REGISTER_DIM}")
    return FiniteState(reduce(np.kron, [s.amplitudes for s in states]))


@dataclass(frozen=True)
class SchmidtReport:
    coefficients: np.ndarray
    rank: int
    schmidt_number: float
    separable: bool

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients.tolist(),
            "rank": self.rank,
            "schmidt_number": self.schmidt_number,
            "separable": self.separable,
        }


def schmidt(s: FiniteState, dim_a: int, dim_b: int) -> SchmidtReport:
    if dim_a < 1 or dim_b < 1 or dim_a * dim_b != s.dim:
        raise DimFactorMismatch(f"{dim_a} x {dim_b} does not factor dimension {s.dim}")
    sv = np.linalg.svd(s.amplitudes.reshape(dim_a, dim_b), compute_uv=False)
    rank = int(np.sum(sv > SCHMIDT_TOLERANCE * sv[0]))
    weights = sv ** 2
    weights = weights / weights.sum()
    k = float(1.0 / np.sum(weights ** 2))
    return SchmidtReport(sv, rank, k, rank == 1)
