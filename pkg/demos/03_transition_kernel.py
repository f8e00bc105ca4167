"""
The observable chain
====================

State (j, i, m): interviews so far, distinct ranks seen, and how many copies
of the current best have appeared. Stopping is only worth it at an epoch,
when the second copy of the current best shows up.
"""

from double_secretary import chain, oracle
from double_secretary.chain import ChainState

n = 3
for j in range(1, 2 * n):
    for s in chain.valid_states(n, j):
        row = chain.transitions(n, s)
        print(s, {(t.i, t.m): str(p) for t, p in row.targets})

# %%
# counted frequencies over all 90 orderings reproduce these rows exactly
rep = oracle.conditional_prob_check(n)
print("mismatches:", rep.mismatches)

# %%
# next-epoch win chances do not depend on j
for s, (counted, closed) in sorted(rep.next_epoch.items()):
    print(s, counted, closed)

# %%
# backward induction stops from D = r_n on
sol = chain.dp_solve(7)
print("stop region:", sorted(sol.stop_region), "value:", sol.value_at_start)
print("t=3:", chain.policy_value(7, 3), " t=4:", chain.policy_value(7, 4))
print(chain.ola_region_check(7))
