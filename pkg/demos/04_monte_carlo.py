"""
Simulation
==========

Shuffle the ranks, run the threshold rule, count wins. Seeds fix the result
no matter how many threads do the work.
"""

from double_secretary import montecarlo as mc
from double_secretary import exactmath as em

n = 100
r = em.threshold_r(n)
est = mc.estimate(n, r, 200_000, seed=1)
exact = float(em.success_prob_p(n))
print(est.p_hat, "+/-", est.std_err, "exact", exact)

# %%
# same seed, different worker counts, same count
print([mc.estimate(n, r, 50_000, seed=9, workers=w).successes for w in (1, 2, 4)])

# %%
# a sweep compares against the closed form
for row in mc.sweep([5, 20, 100, 500], 50_000, seed=3):
    print(row.estimate.n, round(row.estimate.p_hat, 4), round(float(row.exact), 4), round(row.z, 2))

# %%
# the vectorised evaluator on a handful of explicit orderings
ranks = mc.sample_orderings(4, 5, mc.block_rng(0, 0))
print(ranks)
print(mc.policy_wins(ranks, em.threshold_r(4)))
