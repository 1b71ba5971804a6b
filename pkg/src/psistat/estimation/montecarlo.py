"""Monte Carlo verification of the matrix Cramer-Rao inequality."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .families import FisherMatrix, ParametricFamily, fisher_theta
from .sampling import EstimationError, rng_for

__all__ = [
    "ESTIMATOR_IDS",
    "CRReport",
    "BiasedEstimatorForUnbiasedBound",
    "statistical_tolerance",
    "cramer_rao_experiment",
]

ESTIMATOR_IDS = ("sample_mean", "sample_variance", "custom")
MIN_REPLICATIONS = 100


class BiasedEstimatorForUnbiasedBound(EstimationError):
    pass


@dataclass(frozen=True)
class CRReport:
    fisher: FisherMatrix
    empirical_cov: np.ndarray
    deficit_min_eigenvalue: float
    replications: int
    satisfied: bool
    statistical_tolerance: float
    mean_estimate: np.ndarray

    def to_dict(self) -> dict:
        return {
            "fisher": self.fisher.matrix.tolist(),
            "n": self.fisher.n,
            "empirical_cov": self.empirical_cov.tolist(),
            "deficit_min_eigenvalue": self.deficit_min_eigenvalue,
            "replications": self.replications,
            "satisfied": self.satisfied,
            "statistical_tolerance": self.statistical_tolerance,
            "mean_estimate": self.mean_estimate.tolist(),
        }


def _sample_mean(x: np.ndarray) -> np.ndarray:
    return np.array([x.mean()])


def _mean_and_variance(x: np.ndarray) -> np.ndarray:
    return np.array([x.mean(), x.var(ddof=1)])


# estimator id -> (family it is unbiased for, estimator)
_BUILTIN = {
    "sample_mean": ("gaussian_location", _sample_mean),
    "sample_variance": ("gaussian_location_scale", _mean_and_variance),
}


def statistical_tolerance(fisher: FisherMatrix, replications: int) -> float:
    """4/sqrt(replications) times the spectral norm of the inverse Fisher matrix."""
    return 4.0 / np.sqrt(replications) * float(np.linalg.norm(fisher.inverse(), 2))


def cramer_rao_experiment(f: ParametricFamily, theta, estimator_id: str, n: int,
                          replications: int, seed: int,
                          estimator: Callable[[np.ndarray], np.ndarray] | None = None,
                          workers: int = 1) -> CRReport:
    """Compare the empirical covariance of an unbiased estimator with I^-1.

    Replication r draws its sample from stream r spawned from ``seed``, so
    the report does not depend on ``workers``.
    ``sample_variance`` estimates (mean, variance) of the location-scale
    family; ``custom`` takes ``estimator``, a map from a sample to a
    ``param_dim`` vector assumed unbiased.
    """
    theta = f.check(theta)
    if replications < MIN_REPLICATIONS:
        raise EstimationError(f"need at least {MIN_REPLICATIONS} replications, got {replications}")
    if n < 2:
        raise EstimationError("n must be >= 2")
    if estimator_id == "custom":
        if estimator is None:
            raise EstimationError("custom estimator requires a callable")
        est = estimator
    elif estimator_id in _BUILTIN:
        family_id, est = _BUILTIN[estimator_id]
        if f.family_id != family_id:
            raise BiasedEstimatorForUnbiasedBound(
                f"{estimator_id} is not an unbiased estimator of the {f.family_id} parameters"
            )
    else:
        raise EstimationError(f"unknown estimator {estimator_id!r}; expected one of {ESTIMATOR_IDS}")

    def replicate(r: int) -> np.ndarray:
        x = f.sample(theta, n, rng_for(seed, r))
        out = np.atleast_1d(np.asarray(est(x), dtype=float))
        if out.shape != (f.param_dim,):
            raise EstimationError(f"estimator returned shape {out.shape}, expected ({f.param_dim},)")
        return out

    estimates = np.empty((replications, f.param_dim))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, value in enumerate(pool.map(replicate, range(replications))):
                estimates[r] = value
    else:
        for r in range(replications):
            estimates[r] = replicate(r)

    fisher = fisher_theta(f, theta, n)
    emp = np.atleast_2d(np.cov(estimates, rowvar=False, ddof=1))
    deficit = emp - fisher.inverse()
    min_eig = float(np.linalg.eigvalsh((deficit + deficit.T) / 2).min())
    tol = statistical_tolerance(fisher, replications)
    return CRReport(fisher, emp, min_eig, replications, bool(min_eig >= -tol), tol,
                    estimates.mean(axis=0))
