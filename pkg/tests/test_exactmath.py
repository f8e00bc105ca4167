import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from double_secretary import exactmath as em
from double_secretary.errors import InvalidArgument, NumericFailure


# -- harmonic tails ---------------------------------------------------------

def test_harmonic_tail_empty_sum():
    assert em.harmonic_tail(2, 1) == 0


def test_harmonic_tail_small():
    assert em.harmonic_tail(1, 2) == Fraction(3, 2)
    # 1/4 + ... + 1/9, summed term by term outside the package
    assert em.harmonic_tail(4, 9) == Fraction(2509, 2520)


@given(st.integers(1, 80), st.integers(0, 120))
def test_harmonic_tail_matches_termwise_sum(a, b):
    expected = sum((Fraction(1, j) for j in range(a, b + 1)), Fraction(0))
    assert em.harmonic_tail(a, b) == expected


@pytest.mark.parametrize("a", [0, -3, 1.5])
def test_harmonic_tail_rejects_bad_lower_index(a):
    with pytest.raises(InvalidArgument):
        em.harmonic_tail(a, 5)


# -- alpha and the two cutoffs ----------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 7, 50])
def test_alpha_at_last_index_is_two(n):
    assert em.alpha(n, n) == 2


def test_alpha_boundary_equality_at_n2():
    assert em.alpha(2, 1) == 5


def test_alpha_straddles_five_at_n9():
    assert em.alpha(9, 4) > 5
    assert em.alpha(9, 5) <= 5


@pytest.mark.parametrize("n,i", [(3, 0), (3, 4), (0, 1), (2, True)])
def test_alpha_domain(n, i):
    with pytest.raises(InvalidArgument):
        em.alpha(n, i)


@pytest.mark.parametrize("n,r", [(2, 1), (3, 2), (7, 4), (9, 5)])
def test_threshold_r_known(n, r):
    assert em.threshold_r(n) == r


@pytest.mark.parametrize("n,a", [(1, 1), (2, 1), (7, 3), (9, 4)])
def test_csp_threshold_known(n, a):
    assert em.csp_threshold_a(n) == a


def test_pairing_pattern_up_to_8():
    for i in range(1, 5):
        for n in (2 * i - 1, 2 * i):
            assert em.threshold_r(n) == i
            assert em.csp_threshold_a(n) == (3 if n == 7 else i)


def test_threshold_table_matches_searches():
    for n, r, a in em.threshold_table(300):
        assert r == em.threshold_r(n)
        assert a == em.csp_threshold_a(n)


@pytest.mark.parametrize("n", [1, 2, 3, 9, 57, 300, 2500, 10000])
def test_float_fast_path_agrees(n):
    assert em.threshold_r(n, exact_below=0) == em.threshold_r(n)
    assert em.csp_threshold_a(n, exact_below=0) == em.csp_threshold_a(n)


def test_check_size():
    assert em.check_size(3) == 3
    for bad in (0, -1, 2.0, "3", True):
        with pytest.raises(InvalidArgument):
            em.check_size(bad)


# -- next-epoch win probabilities -------------------------------------------

@pytest.mark.parametrize("n", [1, 4, 13])
def test_lemma_base_cases(n):
    assert em.lemma_A(n, n) == 1
    assert em.lemma_B(n, n) == 0


def test_lemma_small_values():
    assert em.lemma_A(2, 1) == Fraction(5, 6)
    assert em.lemma_A(3, 1) == Fraction(7, 9)
    assert em.lemma_B(2, 1) == Fraction(1, 2)


def test_lemma_B_table_matches_pointwise():
    for n in (1, 5, 31):
        assert em.lemma_B_table(n) == [em.lemma_B(n, i) for i in range(1, n + 1)]
        assert em.alpha_table(n) == [em.alpha(n, i) for i in range(1, n + 1)]


def test_lemma_values_are_probabilities():
    for n in range(1, 60):
        for i in range(1, n + 1):
            a, b = em.lemma_A(n, i), em.lemma_B(n, i)
            assert 0 < a <= 1
            assert 0 <= b <= 1


# -- optimal success probability --------------------------------------------

def test_prob_duplicate_pending_trivial():
    assert em.prob_duplicate_pending(1) == 1
    assert em.prob_duplicate_pending(2) == 1
    assert 0 < em.prob_duplicate_pending(4) < 1


def test_success_prob_decomposes_over_duplicate_status():
    for n in range(1, 120):
        r = em.threshold_r(n)
        q1 = em.prob_duplicate_pending(n)
        assert em.success_prob_p(n) == em.lemma_A(n, r) * q1 + em.lemma_B(n, r) * (1 - q1)


# frozen from a standalone brute force over all orderings (not this package)
@pytest.mark.parametrize("n,p", [
    (1, Fraction(1)), (2, Fraction(5, 6)), (3, Fraction(5, 6)),
    (4, Fraction(407, 504)), (5, Fraction(761, 945)),
])
def test_success_prob_small(n, p):
    assert em.success_prob_p(n) == p


# frozen from a standalone n! enumeration of the classical cutoff rule
@pytest.mark.parametrize("n,q", [
    (1, Fraction(1)), (2, Fraction(1, 2)), (3, Fraction(1, 2)), (4, Fraction(11, 24)),
    (5, Fraction(13, 30)), (6, Fraction(77, 180)), (7, Fraction(29, 70)),
])
def test_csp_prob_small(n, q):
    assert em.csp_prob_q(n) == q


def test_invariants_over_sizes():
    prev_r = 0
    for n, r, a in em.threshold_table(1000):
        assert r >= prev_r
        prev_r = r
        if 9 <= n <= 200:
            assert r > a
        if n >= 10:
            assert n / math.e < a < (n - 0.5) / math.e + 1.5
    for n in range(2, 201):
        assert em.success_prob_p(n) > em.csp_prob_q(n)


def test_alpha_strictly_decreasing():
    for n in range(1, 501):
        vals = em.alpha_table(n)
        assert all(x > y for x, y in zip(vals, vals[1:]))


# -- limits -----------------------------------------------------------------

def test_limit_r_value_and_residual():
    sol = em.limit_r(1e-12)
    assert abs(sol.r - 0.470927) < 5e-7
    assert abs(em.limit_objective(sol.r) - math.exp(-5)) <= 1e-12
    assert sol.residual <= sol.tolerance
    assert 0 < sol.iterations <= 200
    assert sol.p_limit == em.limit_p(sol.r)


def test_limit_r_against_large_n():
    assert abs(em.threshold_r(10000) / 10000 - em.limit_r().r) <= 1e-3


@pytest.mark.parametrize("tol", [0, -1e-9, 1e-6, 0.1])
def test_limit_r_tolerance_domain(tol):
    with pytest.raises(InvalidArgument):
        em.limit_r(tol)


def test_limit_r_unreachable_tolerance():
    with pytest.raises(NumericFailure):
        em.limit_r(1e-300)


def test_limit_p():
    assert abs(em.limit_p() - 0.767974) < 5e-7
    assert em.limit_p(1.0) == 1.0
    assert abs(float(em.success_prob_p(5000)) - em.limit_p()) <= 2e-3
