"""
Three ways to get p_n
=====================

The optimal success probability computed by a closed form, by backward
induction on the Markov chain, and by counting every ordering.
"""

from double_secretary import chain, oracle
from double_secretary import exactmath as em

for n in range(1, 6):
    closed = em.success_prob_p(n)
    dp = chain.dp_solve(n).value_at_start
    enum = oracle.exact_policy_prob(n, em.threshold_r(n))
    print(n, closed, dp, enum, closed == dp == enum)

# %%
# the doubled problem is easier than the classical one
for n in (2, 5, 10, 50):
    p, q = em.success_prob_p(n), em.csp_prob_q(n)
    print(f"n={n:3d}  p={float(p):.6f}  q={float(q):.6f}  p-q={float(p - q):.6f}")

# %%
# every threshold at n = 5, by enumeration; only t = r_5 = 3 is best
scan = oracle.best_threshold(5)
for t, v in scan.table.items():
    print(t, v, float(v))
print("maximizers:", scan.maximizers)

# %%
# no history-dependent rule beats the threshold rule on small boards
for n in range(1, 5):
    print(n, oracle.history_dp_optimal(n), em.success_prob_p(n))

# %%
# the classical rule, run on the first appearance of each rank, wins with
# probability q_n, but its wins are not a subset of the optimal rule's wins
for n in range(1, 6):
    rep = oracle.csp_inclusion_check(n)
    print(n, rep.csp_wins, rep.tau_wins, rep.total, "classical-only wins:", rep.violations)
