# %% [markdown]
# # Low-complexity scheme against the optimum and the baselines
#
# The heuristic prices each state with nothing cached, picks the cache
# contents once with Ext-Greedy, and re-splits time.  The baselines
# split time by a fixed rule and send every request separately, without
# multicast or best-channel uploads.

# %%
from cachemec.baselines import solve_baseline
from cachemec.dual import solve_optimal
from cachemec.heuristic import solve_suboptimal
from cachemec.scenario import reference_scenario, state_space

print(" T [s]   optimal     subopt      b1          b2          b3          b4")
for T in (0.04, 0.06, 0.08, 0.10, 0.12):
    s = reference_scenario(deadline=T)
    space = state_space(s)
    opt = solve_optimal(s, space=space)
    sub = solve_suboptimal(s, space=space)
    base = [solve_baseline(i, s, sub.caching, space=space).average_energy for i in (1, 2, 3, 4)]
    print(f"{T:5.2f}  " + "  ".join(f"{e:.4e}" for e in [opt.average_energy, sub.average_energy] + base))

# %% [markdown]
# The same comparison when popularity gets more skewed.

# %%
print(" gamma  optimal     subopt")
for g in (0.4, 0.8, 1.2):
    s = reference_scenario(gamma=g)
    space = state_space(s)
    print(f"{g:5.1f}  {solve_optimal(s, space=space).average_energy:.4e}  "
          f"{solve_suboptimal(s, space=space).average_energy:.4e}")
