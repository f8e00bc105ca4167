"""The observable Markov chain (interviews, distinct ranks, duplicate status).

State ``(j, i, m)``: after ``j`` interviews, ``i`` distinct ranks have been seen
and the relatively best rank has appeared ``m`` times.  The only moments at
which a sensible rule stops are *decision epochs*: the step ``(i, 1) -> (i, 2)``
where the arriving applicant is the second copy of the current best.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

from .errors import InvalidArgument, TerminalStateError
from .exactmath import check_size, lemma_A, lemma_B, threshold_r


class ChainState(NamedTuple):
    j: int
    i: int
    m: int


def is_valid(n: int, s: ChainState) -> bool:
    j, i, m = s
    if not (1 <= j <= 2 * n and 1 <= i <= n and m in (1, 2)):
        return False
    if not (j + 1) // 2 <= i <= j:
        return False
    if m == 1:
        return j <= 2 * i - 1
    return j >= i + 1


def valid_states(n: int, j: int) -> list[ChainState]:
    """All valid states after ``j`` interviews."""
    check_size(n)
    out = []
    for i in range((j + 1) // 2, min(j, n) + 1):
        for m in (1, 2):
            s = ChainState(j, i, m)
            if is_valid(n, s):
                out.append(s)
    return out


def is_epoch(src: ChainState, dst: ChainState) -> bool:
    """True when the step ``src -> dst`` presents a rule-eligible applicant."""
    return src.m == 1 and dst.m == 2 and dst.i == src.i


@dataclass(frozen=True)
class TransitionRow:
    source: ChainState
    targets: tuple[tuple[ChainState, Fraction], ...]

    def total(self) -> Fraction:
        return sum((p for _, p in self.targets), Fraction(0))

    def as_dict(self) -> dict[ChainState, Fraction]:
        return dict(self.targets)


def transitions(n: int, s: ChainState, include_zero: bool = False) -> TransitionRow:
    """One-step kernel out of state ``s``.

    Zero-probability entries are dropped unless ``include_zero``; some of them
    (e.g. ``(i,1) -> (i,1)`` at ``j = 2i - 1``) name states that cannot exist.
    """
    check_size(n)
    s = ChainState(*s)
    if not is_valid(n, s):
        raise InvalidArgument(f"{s} is not a valid state for n={n}")
    j, i, m = s
    if j == 2 * n:
        raise TerminalStateError(f"no transition out of the final interview {s}")
    left = 2 * n - j
    fresh = Fraction(2 * (n - i), left)
    if m == 1:
        targets = [
            (ChainState(j + 1, i, 2), Fraction(1, left)),
            (ChainState(j + 1, i, 1), Fraction(2 * i - j - 1, left)),
            (ChainState(j + 1, i + 1, 1), fresh),
        ]
    else:
        targets = [
            (ChainState(j + 1, i, 2), Fraction(2 * i - j, left)),
            (ChainState(j + 1, i + 1, 1), fresh / (i + 1)),
            (ChainState(j + 1, i + 1, 2), fresh * i / (i + 1)),
        ]
    if not include_zero:
        targets = [(t, p) for t, p in targets if p]
    return TransitionRow(s, tuple(targets))


def stop_value(n: int, i: int) -> Fraction:
    """Win probability of stopping on a decision epoch with ``i`` distinct ranks.

    The current best is the overall best iff none of the ``n - i`` unseen ranks
    beats it, which telescopes to ``i / n``.
    """
    check_size(n)
    if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= n:
        raise InvalidArgument(f"index must satisfy 1 <= i <= {n}, got {i!r}")
    return Fraction(i, n)


def reachable_states(n: int) -> dict[int, set[ChainState]]:
    """States reachable with positive probability, keyed by interview count."""
    check_size(n)
    layers = {1: {ChainState(1, 1, 1)}}
    for j in range(1, 2 * n):
        layers[j + 1] = {t for s in layers[j] for t, _ in transitions(n, s).targets}
    return layers


@dataclass
class DpSolution:
    n: int
    value_at_start: Fraction
    stop_region: frozenset[int]
    # continuation value: optimal win probability from a state, not stopping there
    value_table: dict[ChainState, Fraction]
    # (j, i) -> (stop value, continuation value) at every reachable decision epoch
    epochs: dict[tuple[int, int], tuple[Fraction, Fraction]] = field(default_factory=dict)


def dp_solve(n: int) -> DpSolution:
    """Backward induction over the chain with exact rationals.

    An unfired rule takes applicant ``2n``; from ``(2n, n, 2)`` not entered by
    an epoch that applicant is a repeated non-best rank, so the terminal
    continuation value is zero.
    """
    check_size(n)
    layers = reachable_states(n)
    cont: dict[ChainState, Fraction] = {ChainState(2 * n, n, 2): Fraction(0)}
    epochs: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
    for j in range(2 * n - 1, 0, -1):
        for s in layers[j]:
            v = Fraction(0)
            for t, p in transitions(n, s).targets:
                if is_epoch(s, t):
                    stop = stop_value(n, t.i)
                    epochs[(t.j, t.i)] = (stop, cont[t])
                    v += p * max(stop, cont[t])
                else:
                    v += p * cont[t]
            cont[s] = v
    by_i: dict[int, list[bool]] = {}
    for (_, i), (stop, c) in epochs.items():
        by_i.setdefault(i, []).append(stop >= c)
    region = frozenset(i for i, flags in by_i.items() if all(flags))
    return DpSolution(n, cont[ChainState(1, 1, 1)], region, cont, epochs)


@dataclass
class RegionReport:
    n: int
    threshold: int
    stop_region: frozenset[int]
    disagreements: list[tuple[int, int, Fraction, Fraction]]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def __bool__(self) -> bool:
        return self.ok


def ola_region_check(n: int, solution: DpSolution | None = None) -> RegionReport:
    """Compare the DP stopping decisions with the rule ``stop iff i >= r_n``."""
    sol = solution if solution is not None else dp_solve(n)
    r = threshold_r(n)
    bad = [(j, i, stop, c) for (j, i), (stop, c) in sorted(sol.epochs.items())
           if (stop >= c) != (i >= r)]
    return RegionReport(n, r, sol.stop_region, bad)


def policy_value(n: int, t: int) -> Fraction:
    """Exact win probability of the threshold-``t`` rule, evaluated on the kernel."""
    check_size(n)
    if not 1 <= t <= n:
        raise InvalidArgument(f"threshold must lie in 1..{n}, got {t}")
    layers = reachable_states(n)
    g: dict[ChainState, Fraction] = {ChainState(2 * n, n, 2): Fraction(0)}
    for j in range(2 * n - 1, 0, -1):
        for s in layers[j]:
            v = Fraction(0)
            for nxt, p in transitions(n, s).targets:
                fires = is_epoch(s, nxt) and nxt.i >= t
                v += p * (stop_value(n, nxt.i) if fires else g[nxt])
            g[s] = v
    return g[ChainState(1, 1, 1)]


def next_epoch_values(n: int) -> dict[ChainState, Fraction]:
    """P(the next decision epoch presents the best applicant | state).

    Built by backward recursion over every valid state using only the kernel
    and :func:`stop_value`; ``m = 1`` entries are the A values and ``m = 2``
    entries the B values of the closed-form lemma.
    """
    check_size(n)
    g: dict[ChainState, Fraction] = {ChainState(2 * n, n, 2): Fraction(0)}
    for j in range(2 * n - 1, 0, -1):
        for s in valid_states(n, j):
            v = Fraction(0)
            for t, p in transitions(n, s).targets:
                v += p * (stop_value(n, t.i) if is_epoch(s, t) else g[t])
            g[s] = v
    return g


def lemma_recursion_check(n: int) -> bool:
    """Recursion values are constant in ``j`` and equal the closed forms."""
    for s, v in next_epoch_values(n).items():
        expected = lemma_A(n, s.i) if s.m == 1 else lemma_B(n, s.i)
        if v != expected:
            return False
    return True


def iter_all_states(n: int) -> Iterator[ChainState]:
    for j in range(1, 2 * n + 1):
        yield from valid_states(n, j)
