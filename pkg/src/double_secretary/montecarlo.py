"""Seeded simulation of threshold rules far beyond enumeration range.

Trials are split into fixed-size blocks.  Block ``k`` draws from
``PCG64(SeedSequence(seed, spawn_key=(k,)))``, so the success count depends on
``(n, t, trials, seed)`` only and never on how many workers run the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument
from .exactmath import check_size, success_prob_p, threshold_r

RNG_ID = "numpy.random.PCG64/SeedSequence(seed, spawn_key=(block,))"
_BLOCK_ELEMENTS = 2**20
_MAX_BLOCK = 1 << 16


def block_size(n: int) -> int:
    """Trials per block; a fixed function of ``n`` so the partition is stable."""
    return max(1, min(_MAX_BLOCK, _BLOCK_ELEMENTS // (2 * n)))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_orderings(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` uniform orderings, one Fisher-Yates shuffle per row.

    Shuffling the rank multiset directly is the same as shuffling ``2n``
    labelled cards and then dropping the labels.
    """
    check_size(n)
    dtype = np.int16 if n < 2**15 else np.int32
    ranks = np.tile(np.repeat(np.arange(1, n + 1, dtype=dtype), 2), (size, 1))
    return rng.permuted(ranks, axis=1, out=ranks)


def sample_ordering(n: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(v) for v in sample_orderings(n, 1, rng)[0])


def policy_wins(ranks: np.ndarray, t: int) -> np.ndarray:
    """Success flag of the threshold-``t`` rule for each row of ``ranks``."""
    size, L = ranks.shape
    n = L // 2
    rows = np.arange(size)[:, None]
    # stable sort puts the earlier copy of each rank first
    order = np.argsort(ranks, axis=1, kind="stable")
    first_seen = np.zeros(ranks.shape, dtype=bool)
    first_seen[rows, order[:, 0::2]] = True
    distinct = np.cumsum(first_seen, axis=1, dtype=np.int32)
    best_before = np.empty(ranks.shape, dtype=ranks.dtype)
    best_before[:, 0] = n + 1
    np.minimum.accumulate(ranks[:, :-1], axis=1, out=best_before[:, 1:])
    fire = (ranks == best_before) & (distinct >= t)
    fired = fire.any(axis=1)
    stop = np.where(fired, fire.argmax(axis=1), L - 1)
    return ranks[np.arange(size), stop] == 1


@dataclass(frozen=True)
class SimEstimate:
    n: int
    threshold: int
    trials: int
    successes: int
    seed: int
    rng: str = RNG_ID

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def std_err(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)


def _run_block(n: int, t: int, seed: int, block: int, size: int) -> int:
    ranks = sample_orderings(n, size, block_rng(seed, block))
    return int(policy_wins(ranks, t).sum())


def estimate(n: int, t: int, trials: int, seed: int, workers: int = 1) -> SimEstimate:
    """Estimate the success probability of the threshold-``t`` rule."""
    check_size(n)
    if not 1 <= t <= n:
        raise InvalidArgument(f"threshold must lie in 1..{n}, got {t}")
    if trials < 1:
        raise InvalidArgument(f"trials must be >= 1, got {trials}")
    bs = block_size(n)
    sizes = [bs] * (trials // bs) + ([trials % bs] if trials % bs else [])
    jobs = [(n, t, seed, k, s) for k, s in enumerate(sizes)]
    if workers <= 1:
        wins = sum(_run_block(*job) for job in jobs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            wins = sum(pool.map(lambda job: _run_block(*job), jobs))
    return SimEstimate(n, t, trials, wins, seed)


@dataclass(frozen=True)
class SweepRow:
    estimate: SimEstimate
    exact: Fraction

    @property
    def delta(self) -> float:
        return self.estimate.p_hat - float(self.exact)

    @property
    def z(self) -> float:
        se = self.estimate.std_err
        if se == 0:
            return 0.0 if self.delta == 0 else math.copysign(math.inf, self.delta)
        return self.delta / se


def sweep(n_list, trials: int, seed: int, workers: int = 1) -> list[SweepRow]:
    """Estimate the optimal rule at each ``n`` and compare with the closed form."""
    return [SweepRow(estimate(n, threshold_r(n), trials, seed, workers), success_prob_p(n))
            for n in n_list]
