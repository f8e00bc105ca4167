"""Closed-form quantities for the double secretary problem.

Everything here returns exact :class:`fractions.Fraction` values unless the
name says otherwise.  Threshold searches compare rationals exactly; at small
``n`` the defining inequalities hold with equality (``alpha(2, 1) == 5``) and a
float comparison would pick the wrong cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from scipy import optimize, special

from .errors import InvalidArgument, NumericFailure

# Above this size the threshold searches may use a float comparison, falling
# back to rationals whenever the float margin is too thin to trust.
EXACT_BOUND = 10**4
_FLOAT_MARGIN = 1e-9

E_MINUS_5 = math.exp(-5.0)


def check_size(n) -> int:
    """Validate a problem size (number of distinct qualities)."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise InvalidArgument(f"problem size must be an integer, got {n!r}")
    if n < 1:
        raise InvalidArgument(f"problem size must be >= 1, got {n}")
    return n


def _check_index(n: int, i) -> int:
    check_size(n)
    if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= n:
        raise InvalidArgument(f"index must satisfy 1 <= i <= {n}, got {i!r}")
    return i


def _split_sum(a: int, b: int) -> tuple[int, int]:
    # unreduced p/q of sum_{j=a}^{b-1} 1/j by binary splitting
    if b - a == 1:
        return 1, a
    if b - a <= 8:
        p, q = 0, 1
        for j in range(a, b):
            p, q = p * j + q, q * j
        return p, q
    mid = (a + b) // 2
    p1, q1 = _split_sum(a, mid)
    p2, q2 = _split_sum(mid, b)
    return p1 * q2 + p2 * q1, q1 * q2


def harmonic_tail(a: int, b: int) -> Fraction:
    """Exact ``sum_{j=a}^{b} 1/j``; the empty sum (``a > b``) is zero."""
    if isinstance(a, bool) or not isinstance(a, int) or a < 1:
        raise InvalidArgument(f"lower index must be an integer >= 1, got {a!r}")
    if a > b:
        return Fraction(0)
    return Fraction(*_split_sum(a, b + 1))


def _tail_float(i: int, n: int) -> float:
    # sum_{k=i}^{n-1} 1/k
    return float(special.digamma(n) - special.digamma(i))


def alpha(n: int, i: int) -> Fraction:
    """``2n/i + sum_{j=i+1}^{n} 1/(j-1)``, strictly decreasing in ``i``."""
    _check_index(n, i)
    return Fraction(2 * n, i) + harmonic_tail(i, n - 1)


def csp_tail(n: int, i: int) -> Fraction:
    """The classical cutoff statistic ``sum_{j=i+1}^{n} 1/(j-1)``."""
    _check_index(n, i)
    return harmonic_tail(i, n - 1)


def _first_true(n: int, pred) -> int:
    # smallest i in 1..n with pred(i), for pred monotone False..True and pred(n)
    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _alpha_le_5(n: int, i: int, exact_below: int) -> bool:
    if n > exact_below:
        approx = 2 * n / i + _tail_float(i, n)
        if abs(approx - 5.0) > _FLOAT_MARGIN:
            return approx <= 5.0
    return alpha(n, i) <= 5


def _csp_le_1(n: int, i: int, exact_below: int) -> bool:
    if n > exact_below:
        approx = _tail_float(i, n)
        if abs(approx - 1.0) > _FLOAT_MARGIN:
            return approx <= 1.0
    return csp_tail(n, i) <= 1


@lru_cache(maxsize=4096)
def threshold_r(n: int, exact_below: int = EXACT_BOUND) -> int:
    """Optimal cutoff on the number of distinct ranks: min{i : alpha(i) <= 5}."""
    check_size(n)
    return _first_true(n, lambda i: _alpha_le_5(n, i, exact_below))


@lru_cache(maxsize=4096)
def csp_threshold_a(n: int, exact_below: int = EXACT_BOUND) -> int:
    """Classical secretary cutoff a_n = min{i : sum_{j=i+1}^n 1/(j-1) <= 1}."""
    check_size(n)
    return _first_true(n, lambda i: _csp_le_1(n, i, exact_below))


def threshold_table(n_max: int) -> Iterator[tuple[int, int, int]]:
    """Yield ``(n, r_n, a_n)`` for ``n = 1..n_max`` with exact comparisons.

    The tail sums are updated incrementally as ``n`` grows, so the whole table
    costs O(n_max) rational operations instead of one search per row.
    """
    check_size(n_max)
    r, tail_r = 1, Fraction(0)  # tail_* = sum_{k=cut}^{n-1} 1/k
    a, tail_a = 1, Fraction(0)
    for n in range(1, n_max + 1):
        if n > 1:
            tail_r += Fraction(1, n - 1)
            tail_a += Fraction(1, n - 1)
        while Fraction(2 * n, r) + tail_r > 5:
            tail_r -= Fraction(1, r)
            r += 1
        while r > 1 and Fraction(2 * n, r - 1) + tail_r + Fraction(1, r - 1) <= 5:
            r -= 1
            tail_r += Fraction(1, r)
        while tail_a > 1:
            tail_a -= Fraction(1, a)
            a += 1
        while a > 1 and tail_a + Fraction(1, a - 1) <= 1:
            a -= 1
            tail_a += Fraction(1, a)
        yield n, r, a


def tails(n: int) -> list[Fraction]:
    """``[sum_{k=i}^{n-1} 1/k for i in 1..n]`` built by one backward pass."""
    check_size(n)
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for i in range(n - 1, 0, -1):
        acc += Fraction(1, i)
        out[i - 1] = acc
    return out


def alpha_table(n: int) -> list[Fraction]:
    """``alpha(n, i)`` for every ``i = 1..n`` (index ``i - 1``)."""
    return [Fraction(2 * n, i) + t for i, t in enumerate(tails(n), start=1)]


def lemma_A(n: int, i: int) -> Fraction:
    """Win probability of stopping at the next decision epoch, best seen once.

    Equals ``(2n + i) / (3n)`` independently of how many applicants have been
    interviewed.
    """
    _check_index(n, i)
    return Fraction(2 * n + i, 3 * n)


def lemma_B(n: int, i: int) -> Fraction:
    """Win probability of stopping at the next decision epoch, best seen twice."""
    _check_index(n, i)
    return Fraction(2 * (n - i), 3 * n) + Fraction(i, 3 * n) * harmonic_tail(i, n - 1)


def lemma_B_table(n: int) -> list[Fraction]:
    return [Fraction(2 * (n - i), 3 * n) + Fraction(i, 3 * n) * t
            for i, t in enumerate(tails(n), start=1)]


def _race_sum(n: int, r: int) -> Fraction:
    # sum_{i=1}^{r-1} prod_{j=i}^{r-1} 2(n-j)/(2(n-j)+1), Horner form
    num, den = 0, 1
    for j in range(1, r):
        a = 2 * (n - j)
        num, den = a * (den + num), (a + 1) * den
    return Fraction(num, den)


@lru_cache(maxsize=1024)
def prob_duplicate_pending(n: int) -> Fraction:
    """P(best rank seen only once when the r_n-th distinct rank first appears)."""
    r = threshold_r(check_size(n))
    return (1 + _race_sum(n, r)) / r


@lru_cache(maxsize=1024)
def success_prob_p(n: int) -> Fraction:
    """Maximal probability of hiring one of the two best of the ``2n`` applicants."""
    r = threshold_r(check_size(n))
    s = _race_sum(n, r)
    return ((1 - r + s) * (3 - harmonic_tail(r, n - 1)) + 2 * n + r) / (3 * n)


@lru_cache(maxsize=1024)
def csp_prob_q(n: int) -> Fraction:
    """Optimal success probability of the classical problem with ``n`` applicants.

    With cutoff ``a_n = 1`` the first applicant is taken and wins with
    probability ``1/n``; the usual ``(a-1)/n * sum`` expression would give 0.
    """
    a = csp_threshold_a(check_size(n))
    if a == 1:
        return Fraction(1, n)
    return Fraction(a - 1, n) * harmonic_tail(a - 1, n - 1)


def limit_objective(x: float) -> float:
    """``x * exp(-2/x)``, increasing on ``(0, inf)``."""
    return x * math.exp(-2.0 / x)


def _p_limit_at(r: float) -> float:
    return r + 4.0 / (3.0 * r) * ((1.0 - r) ** 1.5 - (1.0 - r) ** 2)


@dataclass(frozen=True)
class LimitSolution:
    r: float
    p_limit: float
    tolerance: float
    iterations: int
    residual: float


def limit_r(tolerance: float = 1e-12) -> LimitSolution:
    """Solve ``x exp(-2/x) = exp(-5)`` by bisection on ``[exp(-5), 1]``.

    The bracket's slope is below 1, so an abscissa tolerance of ``tolerance``
    also bounds the residual; the residual is checked regardless.
    """
    if not 0 < tolerance < 1e-6:
        raise InvalidArgument(f"tolerance must lie in (0, 1e-6), got {tolerance!r}")

    def g(x):
        return limit_objective(x) - E_MINUS_5

    root, info = optimize.bisect(g, E_MINUS_5, 1.0, xtol=tolerance, maxiter=200,
                                 full_output=True, disp=False)
    residual = abs(g(root))
    if not info.converged or residual > tolerance:
        raise NumericFailure(
            f"bisection stopped after {info.iterations} iterations "
            f"with residual {residual:.3e} > {tolerance:.3e}")
    return LimitSolution(r=root, p_limit=_p_limit_at(root), tolerance=tolerance,
                         iterations=info.iterations, residual=residual)


def limit_p(r: float | None = None, tolerance: float = 1e-12) -> float:
    """Limiting success probability, evaluated at ``r`` or at the solved root."""
    if r is None:
        r = limit_r(tolerance).r
    return _p_limit_at(r)
