"""Seeded Monte Carlo coincidence counts and correlation estimates.

Trials are drawn in fixed-size chunks; chunk ``k`` uses its own PCG64
substream seeded with ``seed XOR (GOLDEN * k mod 2**64)``. Because the chunk
layout depends only on ``n``, counts are the same for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .correlate import InputError, JointDistribution

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
CHUNK = 1 << 16


@dataclass(frozen=True)
class TrialCounts:
    n11: int
    n22: int
    n12: int
    n21: int

    def __post_init__(self):
        if min(self.n11, self.n22, self.n12, self.n21) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n11 + self.n22 + self.n12 + self.n21

    def __add__(self, other: "TrialCounts") -> "TrialCounts":
        return TrialCounts(self.n11 + other.n11, self.n22 + other.n22,
                           self.n12 + other.n12, self.n21 + other.n21)


@dataclass(frozen=True)
class EstimateWithError:
    c_hat: float
    std_err: float
    n: int


def substream(seed: int, k: int) -> np.random.Generator:
    if not 0 <= seed <= MASK64:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed ^ ((GOLDEN * k) & MASK64)))


def _cdf(jd: JointDistribution) -> np.ndarray:
    cdf = np.cumsum(np.clip(jd.as_tuple(), 0.0, 1.0))
    cdf[-1] = 1.0
    return cdf


def _draw_chunk(cdf: np.ndarray, size: int, seed: int, k: int) -> np.ndarray:
    u = substream(seed, k).random(size)
    # inverse CDF over the fixed order (11, 22, 12, 21)
    idx = np.searchsorted(cdf, u, side="right")
    return np.bincount(idx, minlength=4)[:4]


def sample_outcomes(jd: JointDistribution, n: int, seed: int, workers: int = 1) -> TrialCounts:
    """Count outcomes of ``n`` independent trials drawn from ``jd``."""
    if n < 1:
        raise InputError(f"trial count must be positive, got {n}")
    cdf = _cdf(jd)
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]
    jobs = [(cdf, size, seed, k) for k, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _draw_chunk(*job), jobs))
    else:
        parts = [_draw_chunk(*job) for job in jobs]
    n11, n22, n12, n21 = (int(x) for x in np.sum(parts, axis=0))
    return TrialCounts(n11, n22, n12, n21)


def estimate_correlation(tc: TrialCounts) -> EstimateWithError:
    n = tc.total
    if n < 1:
        raise InputError("no trials to estimate from")
    c_hat = (tc.n11 + tc.n22 - tc.n12 - tc.n21) / n
    return EstimateWithError(c_hat, math.sqrt(max(0.0, 1.0 - c_hat * c_hat) / n), n)
