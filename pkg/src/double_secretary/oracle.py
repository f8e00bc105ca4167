"""Exhaustive ground truth over all ``(2n)! / 2^n`` applicant orderings.

Two evaluation routes are provided.  The per-ordering functions
(:func:`enumerate_orderings`, :func:`derive_trace`, :func:`run_policy`) follow
the definitions literally and are meant for small ``n`` and for checking the
vectorised engine, which processes whole prefix partitions as numpy arrays and
returns integer counts only, so partition results merge exactly by addition.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .chain import ChainState, transitions
from .errors import EnumerationLimitError, InvalidArgument
from .exactmath import check_size, csp_threshold_a, lemma_A, lemma_B, threshold_r

DEFAULT_CAP = 6
LARGE_CAP = 7
HISTORY_CAP = 4
CSP_CAP = 8
ENV_CAP = "DSP_MAX_ENUM_N"


def enumeration_cap(allow_large: bool = False) -> int:
    """Largest ``n`` the oracle will enumerate.

    ``DSP_MAX_ENUM_N`` replaces the default; ``allow_large`` raises the cap to
    at least 7.
    """
    cap = DEFAULT_CAP
    env = os.environ.get(ENV_CAP)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise InvalidArgument(f"{ENV_CAP} must be an integer, got {env!r}") from None
    if allow_large:
        cap = max(cap, LARGE_CAP)
    return cap


def _check_cap(n: int, cap: int) -> int:
    check_size(n)
    if n > cap:
        raise EnumerationLimitError(
            f"n={n} exceeds the enumeration cap {cap}; "
            f"pass allow_large or set {ENV_CAP}")
    return n


def n_orderings(n: int) -> int:
    return factorial(2 * n) // 2**n


def check_ordering(o: Sequence[int]) -> tuple[int, ...]:
    o = tuple(o)
    if not o or len(o) % 2:
        raise InvalidArgument("an ordering has an even, positive length")
    n = len(o) // 2
    if sorted(o) != [v for v in range(1, n + 1) for _ in (0, 1)]:
        raise InvalidArgument(f"{o} is not a permutation of 1,1,...,{n},{n}")
    return o


def _next_permutation(a: list[int]) -> bool:
    # in-place lexicographic successor; duplicates are never revisited
    k = len(a) - 2
    while k >= 0 and a[k] >= a[k + 1]:
        k -= 1
    if k < 0:
        return False
    l = len(a) - 1
    while a[l] <= a[k]:
        l -= 1
    a[k], a[l] = a[l], a[k]
    a[k + 1:] = reversed(a[k + 1:])
    return True


def enumerate_orderings(n: int, allow_large: bool = False) -> Iterator[tuple[int, ...]]:
    """Yield every ordering of ``1,1,...,n,n`` once, in lexicographic order."""
    _check_cap(n, enumeration_cap(allow_large))
    a = [v for v in range(1, n + 1) for _ in (0, 1)]
    yield tuple(a)
    while _next_permutation(a):
        yield tuple(a)


@dataclass(frozen=True)
class ObservableTrace:
    x: tuple[int, ...]  # relative rank among distinct values seen
    d: tuple[int, ...]  # number of distinct ranks seen
    s: tuple[int, ...]  # times the current best rank has appeared


def derive_trace(o: Sequence[int]) -> ObservableTrace:
    """Observable quantities after each interview of ``o`` (a full ordering or a prefix)."""
    counts: dict[int, int] = {}
    xs, ds, ss = [], [], []
    best = None
    for r in o:
        counts[r] = counts.get(r, 0) + 1
        if best is None or r < best:
            best = r
        xs.append(sum(1 for v in counts if v <= r))
        ds.append(len(counts))
        ss.append(counts[best])
    return ObservableTrace(tuple(xs), tuple(ds), tuple(ss))


@dataclass(frozen=True)
class ThresholdPolicy:
    """Stop at the first applicant with ``X = 1``, ``S = 2`` and ``D >= threshold``."""

    threshold: int

    def fires(self, x: int, d: int, s: int) -> bool:
        return x == 1 and s == 2 and d >= self.threshold


@dataclass(frozen=True)
class PolicyOutcome:
    stop_index: int  # 1-based
    success: bool


def _as_policy(t) -> ThresholdPolicy:
    return t if isinstance(t, ThresholdPolicy) else ThresholdPolicy(int(t))


def run_policy(o: Sequence[int], t) -> PolicyOutcome:
    """Play a threshold rule on one ordering; an unfired rule takes the last applicant."""
    o = check_ordering(o)
    policy = _as_policy(t)
    n = len(o) // 2
    if not 1 <= policy.threshold <= n:
        raise InvalidArgument(f"threshold must lie in 1..{n}, got {policy.threshold}")
    tr = derive_trace(o)
    stop = len(o)
    for j, (x, d, s) in enumerate(zip(tr.x, tr.d, tr.s), start=1):
        if policy.fires(x, d, s):
            stop = j
            break
    return PolicyOutcome(stop, o[stop - 1] == 1)


# -- vectorised engine ------------------------------------------------------

def _multiset_perms(counts: tuple[int, ...], cache: dict) -> np.ndarray:
    hit = cache.get(counts)
    if hit is not None:
        return hit
    if not any(counts):
        out = np.zeros((1, 0), dtype=np.int8)
    else:
        parts = []
        for v, c in enumerate(counts):
            if c:
                rest = _multiset_perms(counts[:v] + (c - 1,) + counts[v + 1:], cache)
                head = np.full((rest.shape[0], 1), v + 1, dtype=np.int8)
                parts.append(np.hstack([head, rest]))
        out = np.vstack(parts)
    cache[counts] = out
    return out


def _default_prefix_len(n: int) -> int:
    return max(0, n - 4)


def prefixes(n: int, length: int) -> list[tuple[int, ...]]:
    """Distinct ordering prefixes of the given length, lexicographically."""
    out = []
    for p in itertools.product(range(1, n + 1), repeat=length):
        if all(p.count(v) <= 2 for v in set(p)):
            out.append(p)
    return out


def ordering_blocks(n: int, prefix_len: int | None = None,
                    allow_large: bool = False) -> Iterator[np.ndarray]:
    """All orderings as int8 arrays, one array per fixed prefix.

    Concatenating the blocks gives the lexicographic enumeration.
    """
    _check_cap(n, enumeration_cap(allow_large))
    return _blocks(n, prefix_len)


def _blocks(n: int, prefix_len: int | None = None) -> Iterator[np.ndarray]:
    if prefix_len is None:
        prefix_len = _default_prefix_len(n)
    cache: dict = {}
    for p in prefixes(n, prefix_len):
        counts = tuple(2 - p.count(v) for v in range(1, n + 1))
        rest = _multiset_perms(counts, cache)
        head = np.broadcast_to(np.array(p, dtype=np.int8), (rest.shape[0], len(p)))
        yield np.hstack([head, rest])


def block_arrays(block: np.ndarray, n: int) -> dict[str, np.ndarray]:
    """Stepwise observables for every row of a block.

    Returns ``d`` and ``s`` (distinct count, duplicate status) and ``epoch``
    (``X = 1`` and ``S = 2``), each shaped like ``block``.
    """
    rows = np.arange(block.shape[0])
    seen = np.zeros((block.shape[0], n + 2), dtype=bool)
    cnt = np.zeros((block.shape[0], n + 2), dtype=np.int8)
    runmin = np.full(block.shape[0], n + 1, dtype=np.int8)
    d = np.zeros(block.shape[0], dtype=np.int8)
    D = np.empty(block.shape, dtype=np.int8)
    S = np.empty(block.shape, dtype=np.int8)
    E = np.empty(block.shape, dtype=bool)
    for j in range(block.shape[1]):
        r = block[:, j]
        d += ~seen[rows, r]
        seen[rows, r] = True
        cnt[rows, r] += 1
        E[:, j] = r == runmin
        np.minimum(runmin, r, out=runmin)
        D[:, j] = d
        S[:, j] = cnt[rows, runmin]
    return {"d": D, "s": S, "epoch": E}


def _block_policy_counts(block: np.ndarray, n: int) -> np.ndarray:
    arr = block_arrays(block, n)
    rows = np.arange(block.shape[0])
    wins = np.zeros(n + 1, dtype=np.int64)
    last_win = block[:, -1] == 1
    for t in range(1, n + 1):
        mask = arr["epoch"] & (arr["d"] >= t)
        fired = mask.any(axis=1)
        first = mask.argmax(axis=1)
        win = np.where(fired, block[rows, first] == 1, last_win)
        wins[t] = int(win.sum())
    return wins


def _map_blocks(func, blocks: Iterable[np.ndarray], workers: int):
    if workers <= 1:
        return [func(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, blocks))


@lru_cache(maxsize=16)
def _policy_counts(n: int, cap: int, workers: int) -> tuple[int, tuple[int, ...]]:
    _check_cap(n, cap)
    parts = _map_blocks(lambda b: (b.shape[0], _block_policy_counts(b, n)),
                        _blocks(n), workers)
    total = sum(p[0] for p in parts)
    wins = sum((p[1] for p in parts), np.zeros(n + 1, dtype=np.int64))
    return total, tuple(int(w) for w in wins[1:])


def policy_success_counts(n: int, allow_large: bool = False,
                          workers: int = 1) -> tuple[int, tuple[int, ...]]:
    """``(total orderings, wins for t = 1..n)`` over the full enumeration."""
    cap = enumeration_cap(allow_large)
    _check_cap(n, cap)
    return _policy_counts(n, cap, max(1, int(workers)))


def exact_policy_prob(n: int, t, allow_large: bool = False, workers: int = 1) -> Fraction:
    """Exact success probability of a threshold rule by full enumeration."""
    policy = _as_policy(t)
    check_size(n)
    if not 1 <= policy.threshold <= n:
        raise InvalidArgument(f"threshold must lie in 1..{n}, got {policy.threshold}")
    total, wins = policy_success_counts(n, allow_large, workers)
    return Fraction(wins[policy.threshold - 1], total)


@dataclass(frozen=True)
class ThresholdScan:
    n: int
    table: dict[int, Fraction]
    maximizers: frozenset[int]

    @property
    def best(self) -> int:
        return min(self.maximizers)


def best_threshold(n: int, allow_large: bool = False, workers: int = 1) -> ThresholdScan:
    total, wins = policy_success_counts(n, allow_large, workers)
    table = {t: Fraction(w, total) for t, w in enumerate(wins, start=1)}
    top = max(table.values())
    return ThresholdScan(n, table, frozenset(t for t, p in table.items() if p == top))


@dataclass
class ConditionalReport:
    n: int
    # state -> (P(next epoch wins) by counting, closed form)
    next_epoch: dict[ChainState, tuple[Fraction, Fraction]]
    # (j, i) -> P(rank 1 | decision epoch with D = i)
    forced_stop: dict[tuple[int, int], Fraction]
    # state -> empirical next-state distribution
    kernel: dict[ChainState, dict[ChainState, Fraction]]
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def conditional_prob_check(n: int, allow_large: bool = False) -> ConditionalReport:
    """Count conditional probabilities over all orderings and compare exactly.

    For every reachable state at ``j < 2n`` this checks P(next epoch presents
    the best | state) against the closed forms, the forced-stop win rate
    ``i/n``, and the empirical one-step transition frequencies against the
    kernel.
    """
    _check_cap(n, enumeration_cap(allow_large))
    L = 2 * n
    # keys: state (j, d, s) -> [count, next-epoch wins]
    state_counts: dict[tuple[int, int, int], list[int]] = defaultdict(lambda: [0, 0])
    epoch_counts: dict[tuple[int, int], list[int]] = defaultdict(lambda: [0, 0])
    trans_counts: dict[tuple, int] = defaultdict(int)
    for block in _blocks(n):
        arr = block_arrays(block, n)
        D, S, E = arr["d"].astype(np.int64), arr["s"].astype(np.int64), arr["epoch"]
        is_one = block == 1
        # nxt[:, j]: does the first epoch after column j present rank 1
        nxt = np.empty(block.shape, dtype=bool)
        nxt[:, L - 1] = False
        nxt[:, L - 2] = is_one[:, L - 1]
        for j in range(L - 3, -1, -1):
            nxt[:, j] = np.where(E[:, j + 1], is_one[:, j + 1], nxt[:, j + 1])
        for j in range(L - 1):
            key = D[:, j] * 3 + S[:, j]
            tot = np.bincount(key, minlength=3 * (n + 1))
            win = np.bincount(key, weights=nxt[:, j], minlength=3 * (n + 1))
            for k in np.nonzero(tot)[0]:
                c = state_counts[(j + 1, int(k) // 3, int(k) % 3)]
                c[0] += int(tot[k])
                c[1] += int(win[k])
            tkey = key * (3 * (n + 1)) + D[:, j + 1] * 3 + S[:, j + 1]
            tt = np.bincount(tkey)
            for k in np.nonzero(tt)[0]:
                src, dst = divmod(int(k), 3 * (n + 1))
                trans_counts[(j + 1, src // 3, src % 3, dst // 3, dst % 3)] += int(tt[k])
        for j in range(L):
            ep = E[:, j]
            if not ep.any():
                continue
            tot = np.bincount(D[ep, j], minlength=n + 1)
            win = np.bincount(D[ep, j], weights=is_one[ep, j], minlength=n + 1)
            for i in np.nonzero(tot)[0]:
                c = epoch_counts[(j + 1, int(i))]
                c[0] += int(tot[i])
                c[1] += int(win[i])

    rep = ConditionalReport(n, {}, {}, {})
    for (j, i, m), (tot, win) in sorted(state_counts.items()):
        s = ChainState(j, i, m)
        closed = lemma_A(n, i) if m == 1 else lemma_B(n, i)
        got = Fraction(win, tot)
        rep.next_epoch[s] = (got, closed)
        if got != closed:
            rep.mismatches.append(f"next-epoch win at {s}: counted {got}, closed form {closed}")
    for (j, i), (tot, win) in sorted(epoch_counts.items()):
        got = Fraction(win, tot)
        rep.forced_stop[(j, i)] = got
        if got != Fraction(i, n):
            rep.mismatches.append(f"forced stop at j={j}, D={i}: {got} != {i}/{n}")
    outgoing: dict[ChainState, int] = defaultdict(int)
    for (j, i, m, _, _), c in trans_counts.items():
        outgoing[ChainState(j, i, m)] += c
    for (j, i, m, i2, m2), c in sorted(trans_counts.items()):
        rep.kernel.setdefault(ChainState(j, i, m), {})[ChainState(j + 1, i2, m2)] = \
            Fraction(c, outgoing[ChainState(j, i, m)])
    for s, emp in rep.kernel.items():
        row = transitions(n, s).as_dict()
        if emp != row:
            rep.mismatches.append(f"kernel row {s}: counted {emp}, kernel {row}")
    if set(rep.kernel) != set(rep.next_epoch):
        rep.mismatches.append("reachable state sets disagree")
    return rep


def _dense_pattern(prefix: Sequence[int]) -> tuple[int, ...]:
    order = {v: k for k, v in enumerate(sorted(set(prefix)), start=1)}
    return tuple(order[v] for v in prefix)


def history_dp_optimal(n: int, information: str = "trace",
                       allow_large: bool = False) -> Fraction:
    """Best success probability over *all* stopping rules, by backward induction
    on the tree of observable histories.

    ``information="trace"`` observes ``(X, D, S)`` at each step;
    ``"pattern"`` observes the complete relative order of the applicants seen
    (ties included), which is everything the interviewer could know.
    """
    _check_cap(n, HISTORY_CAP + 1 if allow_large else HISTORY_CAP)
    if information not in ("trace", "pattern"):
        raise InvalidArgument(f"unknown information model {information!r}")
    L = 2 * n
    wins: list[dict] = [defaultdict(int) for _ in range(L + 1)]
    parent: list[dict] = [{} for _ in range(L + 1)]
    for o in enumerate_orderings(n, allow_large=True):
        if information == "trace":
            tr = derive_trace(o)
            obs = list(zip(tr.x, tr.d, tr.s))
            keys = [tuple(obs[:j]) for j in range(1, L + 1)]
        else:
            keys = [_dense_pattern(o[:j]) for j in range(1, L + 1)]
        prev = ()
        for j, k in enumerate(keys, start=1):
            wins[j][k] += o[j - 1] == 1
            parent[j][k] = prev
            prev = k
    # value x count, kept in integers: U(h) = max(W(h), sum of children's U)
    child_sum: dict = defaultdict(int)
    for j in range(L, 0, -1):
        below = child_sum
        child_sum = defaultdict(int)
        for k, w in wins[j].items():
            u = w if j == L else max(w, below[k])
            child_sum[parent[j][k]] += u
    return Fraction(child_sum[()], n_orderings(n))


def csp_oracle(n: int) -> Fraction:
    """Classical secretary cutoff rule evaluated over all ``n!`` orderings."""
    _check_cap(n, CSP_CAP)
    a = csp_threshold_a(n)
    wins = 0
    for p in itertools.permutations(range(1, n + 1)):
        pick = p[-1]
        low = n + 1
        for j, r in enumerate(p, start=1):
            if r < low:
                low = r
                if j >= a:
                    pick = r
                    break
        wins += pick == 1
    return Fraction(wins, factorial(n))


@dataclass(frozen=True)
class InclusionReport:
    n: int
    total: int
    csp_wins: int
    tau_wins: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def csp_rule_on_doubles(o: Sequence[int]) -> PolicyOutcome:
    """The classical cutoff rule applied to the first appearances of each rank."""
    o = check_ordering(o)
    n = len(o) // 2
    a = csp_threshold_a(n)
    tr = derive_trace(o)
    firsts = [j for j in range(len(o)) if tr.d[j] > (tr.d[j - 1] if j else 0)]
    pick = firsts[-1]
    for newnum, j in enumerate(firsts, start=1):
        if newnum >= a and tr.x[j] == 1:
            pick = j
            break
    return PolicyOutcome(pick + 1, o[pick] == 1)


def csp_inclusion_check(n: int) -> InclusionReport:
    """Compare the transplanted classical rule with the optimal rule, ordering by ordering.

    ``violations`` counts orderings the classical rule wins and the optimal
    rule loses. It is nonzero from n = 3 on, e.g. (2, 3, 2, 1, 1, 3).
    """
    _check_cap(n, min(5, enumeration_cap()))
    r = threshold_r(n)
    total = csp = tau = bad = 0
    for o in enumerate_orderings(n):
        total += 1
        c = csp_rule_on_doubles(o).success
        t = run_policy(o, r).success
        csp += c
        tau += t
        bad += c and not t
    return InclusionReport(n, total, csp, tau, bad)
