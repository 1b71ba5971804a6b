"""Drawing samples from grid densities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..grid import CoordState

__all__ = ["Sample", "EstimationError", "rng_for", "grid_cdf", "sample_from_state",
           "sample_from_density"]


class EstimationError(InputError):
    module = "estimation"


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """PCG64 stream ``index`` spawned from ``seed``.

    Streams depend only on (seed, index), never on execution order.  Plain
    ``seed ^ index`` is avoided: for small seeds it maps every seed below
    2**k onto the same set of 2**k streams.
    """
    seq = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    source_seed: int | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).ravel()
        if vals.size < 1:
            raise EstimationError("a sample needs at least one value")
        if not np.all(np.isfinite(vals)):
            raise EstimationError("sample values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


def grid_cdf(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Trapezoid cumulative of ``p`` at the nodes ``x``, scaled to end at 1."""
    inc = 0.5 * (p[1:] + p[:-1]) * np.diff(x)
    cdf = np.concatenate([[0.0], np.cumsum(inc)])
    return cdf / cdf[-1]


def _invert_cdf(x: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cdf, u, side="right") - 1
    idx = np.clip(idx, 0, len(x) - 2)
    lo, hi = cdf[idx], cdf[idx + 1]
    width = hi - lo
    frac = np.divide(u - lo, width, out=np.zeros_like(u), where=width > 0)
    return x[idx] + frac * (x[idx + 1] - x[idx])


def sample_from_density(x, p, n: int, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return _invert_cdf(x, grid_cdf(x, p), rng.random(n))


def sample_from_state(s: CoordState, n: int, seed: int) -> Sample:
    """Inverse-CDF draws from |psi|^2 using the piecewise-linear cumulative."""
    if n < 1:
        raise EstimationError("n must be >= 1")
    rho = np.abs(s.amplitudes) ** 2
    values = sample_from_density(s.grid.x, rho, int(n), rng_for(seed))
    return Sample(values, int(seed))
