"""Acceptance checks, one test per criterion.

Each test runs every sub-check before asserting, so a failure message lists
all problems for that criterion. A one-line verdict per criterion is printed
in the terminal summary.
"""
import time
from collections import defaultdict
from fractions import Fraction

import pytest

from double_secretary import chain, exactmath as em, montecarlo as mc, oracle

criterion = pytest.mark.criterion


def verdict(number, problems):
    print(f"\ncriterion {number}: {'FAIL' if problems else 'PASS'}")
    for p in problems:
        print("  ", p)
    assert not problems, "\n".join(problems)


@criterion(1, "threshold table")
def test_criterion_01_threshold_table():
    t0 = time.perf_counter()
    want_r = {1: 1, 2: 1, 3: 2, 4: 2, 5: 3, 6: 3, 7: 4, 8: 4, 9: 5}
    want_a = {1: 1, 2: 1, 3: 2, 4: 2, 5: 3, 6: 3, 7: 3, 8: 4, 9: 4}
    em.threshold_r.cache_clear()
    em.csp_threshold_a.cache_clear()
    got = {n: (em.threshold_r(n), em.csp_threshold_a(n)) for n in range(1, 10)}
    elapsed = time.perf_counter() - t0
    problems = [f"n={n}: got (r, a)={got[n]}, want {(want_r[n], want_a[n])}"
                for n in got if got[n] != (want_r[n], want_a[n])]
    table = {n: (r, a) for n, r, a in em.threshold_table(9)}
    if table != got:
        problems.append(f"threshold_table disagrees: {table}")
    if elapsed >= 1:
        problems.append(f"runtime {elapsed:.3f}s >= 1s")
    verdict(1, problems)


@criterion(2, "exact small-n values")
def test_criterion_02_small_n():
    problems = []
    checks = [
        ("p_2", em.success_prob_p(2), Fraction(5, 6)),
        ("q_2", em.csp_prob_q(2), Fraction(1, 2)),
        ("p_1", em.success_prob_p(1), Fraction(1)),
        ("q_1", em.csp_prob_q(1), Fraction(1)),
    ]
    for name, got, want in checks:
        if not isinstance(got, Fraction) or got != want:
            problems.append(f"{name} = {got!r}, want {want}")
    verdict(2, problems)


@criterion(3, "triple agreement")
def test_criterion_03_triple_agreement():
    problems = []
    oracle._policy_counts.cache_clear()
    for n in range(1, 7):
        t0 = time.perf_counter()
        enum = oracle.exact_policy_prob(n, em.threshold_r(n))
        elapsed = time.perf_counter() - t0
        dp = chain.dp_solve(n).value_at_start
        closed = em.success_prob_p(n)
        if not (enum == dp == closed):
            problems.append(f"n={n}: enumeration {enum}, dp {dp}, closed form {closed}")
        if n == 6:
            print(f"\nn=6 enumeration of {oracle.n_orderings(6):,} orderings: {elapsed:.1f}s")
            if elapsed >= 60:
                problems.append(f"n=6 enumeration took {elapsed:.1f}s >= 60s")
    verdict(3, problems)


@criterion(4, "optimality at desk scale")
def test_criterion_04_optimality():
    problems = []
    for n in range(1, 7):
        scan = oracle.best_threshold(n)
        if em.threshold_r(n) not in scan.maximizers:
            problems.append(f"n={n}: r_n={em.threshold_r(n)} not in maximizers {sorted(scan.maximizers)}")
    for n in range(1, 5):
        got = oracle.history_dp_optimal(n)
        if got != em.success_prob_p(n):
            problems.append(f"n={n}: history-dependent optimum {got} != p_n {em.success_prob_p(n)}")
    verdict(4, problems)


@criterion(5, "next-epoch probabilities")
def test_criterion_05_next_epoch():
    problems = []
    for n in range(1, 6):
        rep = oracle.conditional_prob_check(n)
        by_im = defaultdict(set)
        for s, (got, _) in rep.next_epoch.items():
            by_im[(s.i, s.m)].add(got)
        for (i, m), vals in sorted(by_im.items()):
            if m == 1:
                closed = Fraction(2 * n + i, 3 * n)
            else:
                closed = (Fraction(2 * (n - i), 3 * n)
                          + Fraction(i, 3 * n) * sum((Fraction(1, l - 1) for l in range(i + 1, n + 1)),
                                                     Fraction(0)))
            if vals != {closed}:
                problems.append(f"n={n} (i={i}, m={m}): counted {sorted(vals)}, closed form {closed}")
    for n in range(1, 21):
        if not chain.lemma_recursion_check(n):
            problems.append(f"n={n}: recursion does not reproduce the closed forms")
    verdict(5, problems)


@criterion(6, "transition kernel")
def test_criterion_06_kernel():
    problems = []
    for n in range(1, 101):
        for j in range(1, 2 * n):
            for s in chain.valid_states(n, j):
                row = chain.transitions(n, s, include_zero=True)
                if row.total() != 1:
                    problems.append(f"n={n} {s}: row sums to {row.total()}")
    for n in range(1, 6):
        rep = oracle.conditional_prob_check(n)
        expected = {s for j in range(1, 2 * n) for s in chain.valid_states(n, j)}
        if set(rep.kernel) != expected:
            problems.append(f"n={n}: counted rows cover {len(rep.kernel)} of {len(expected)} states")
        for s, emp in rep.kernel.items():
            if emp != chain.transitions(n, s).as_dict():
                problems.append(f"n={n} {s}: counted {emp}")
    verdict(6, problems)


@criterion(7, "limits")
def test_criterion_07_limits():
    problems = []
    t0 = time.perf_counter()
    sol = em.limit_r()
    p = em.limit_p()
    if abs(sol.r - 0.470927) > 5e-6:
        problems.append(f"limit_r = {sol.r}")
    if abs(p - 0.767974) > 5e-6:
        problems.append(f"limit_p = {p}")
    ratio = em.threshold_r(10000) / 10000
    if abs(ratio - sol.r) > 1e-3:
        problems.append(f"r_10000/10000 = {ratio}")
    p5000 = float(em.success_prob_p(5000))
    if abs(p5000 - p) > 2e-3:
        problems.append(f"p_5000 = {p5000}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 10:
        problems.append(f"runtime {elapsed:.1f}s >= 10s")
    verdict(7, problems)


@criterion(8, "dominance")
def test_criterion_08_dominance():
    problems = []
    for n in range(2, 201):
        if not em.success_prob_p(n) > em.csp_prob_q(n):
            problems.append(f"n={n}: p_n <= q_n")
        if n >= 9 and not em.threshold_r(n) > em.csp_threshold_a(n):
            problems.append(f"n={n}: r_n <= a_n")
    print(f"\np_n > q_n (n=2..200) and r_n > a_n (n=9..200): {'FAIL' if problems else 'ok'}")
    for n in range(1, 6):
        rep = oracle.csp_inclusion_check(n)
        if not rep.ok:
            problems.append(
                f"n={n}: inclusion fails on {rep.violations} of {rep.total} orderings "
                f"(classical rule wins {rep.csp_wins}, optimal rule wins {rep.tau_wins})")
    # smallest witness: both rules see new ranks 2, 3, 1; the optimal rule
    # stops on the repeated 2 at position 3, the classical rule takes the 1
    o = (2, 3, 2, 1, 1, 3)
    if oracle.csp_rule_on_doubles(o).success and not oracle.run_policy(o, em.threshold_r(3)).success:
        problems.append(f"witness {o}: classical rule wins, optimal rule loses")
    verdict(8, problems)


@criterion(9, "Monte Carlo consistency")
def test_criterion_09_monte_carlo():
    problems = []
    n, trials, seed = 100, 10**6, 2024
    r = em.threshold_r(n)
    t0 = time.perf_counter()
    est = mc.estimate(n, r, trials, seed=seed, workers=1)
    again = mc.estimate(n, r, trials, seed=seed, workers=4)
    elapsed = time.perf_counter() - t0
    exact = float(em.success_prob_p(n))
    print(f"\np_hat={est.p_hat:.6f} exact={exact:.6f} std_err={est.std_err:.2e} ({elapsed:.1f}s)")
    if abs(est.p_hat - exact) > 5 * est.std_err:
        problems.append(f"|p_hat - p| = {abs(est.p_hat - exact):.3g} > 5 std_err")
    if est.successes != again.successes:
        problems.append(f"workers=1 gave {est.successes}, workers=4 gave {again.successes}")
    counts = {mc.estimate(n, r, 20_000, seed=7, workers=w).successes for w in (1, 2, 3, 8)}
    if len(counts) != 1:
        problems.append(f"worker count changes success counts: {counts}")
    if elapsed >= 30:
        problems.append(f"runtime {elapsed:.1f}s >= 30s")
    verdict(9, problems)


@criterion(10, "look-ahead equivalence")
def test_criterion_10_ola_equivalence():
    problems = []
    for n in range(1, 501):
        for i, (a, b) in enumerate(zip(em.alpha_table(n), em.lemma_B_table(n)), start=1):
            if (Fraction(i, n) >= b) != (a <= 5):
                problems.append(f"n={n} i={i}: i/n >= B_i is {Fraction(i, n) >= b}, alpha <= 5 is {a <= 5}")
    verdict(10, problems)
