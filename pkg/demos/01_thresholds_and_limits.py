"""
Cutoffs and their limits
========================

Two cutoff sequences: ``r_n`` for the doubled problem and ``a_n`` for the
classical one. Both grow linearly in n, with different slopes.
"""

import math

from double_secretary import exactmath as em

# the small table; the two columns agree everywhere below 10 except at n = 7
for n, r, a in em.threshold_table(12):
    print(f"n={n:2d}  r_n={r:2d}  a_n={a:2d}")

# %%
# alpha(n, i) is strictly decreasing in i, and r_n is where it first drops
# to 5 or below
n = 9
for i, a in enumerate(em.alpha_table(n), start=1):
    print(i, a, float(a), "<- r_n" if i == em.threshold_r(n) else "")

# %%
# r_n / n settles near the root of  2/r - ln r = 5
sol = em.limit_r()
print("limit r =", sol.r, "after", sol.iterations, "bisection steps")
for n in (10, 100, 1000, 10**4, 10**6):
    print(n, em.threshold_r(n) / n, em.csp_threshold_a(n) / n)
print("1/e =", 1 / math.e)

# %%
# and the success probability approaches its own limit
print("limit p =", sol.p_limit)
for n in (10, 100, 1000, 5000):
    print(n, float(em.success_prob_p(n)))
