# %% [markdown]
# # The optimal scheme via the dual
#
# Pricing every state's deadline splits the problem into a knapsack over
# caching decisions and closed-form durations.  Subgradient steps on the
# prices close the gap between the dual bound and the best feasible policy;
# a brute-force search over all caching vectors confirms the answer.

# %%
from cachemec.dual import solve_optimal
from cachemec.oracle import solve_bruteforce
from cachemec.scenario import reference_scenario, state_space

s = reference_scenario()
space = state_space(s)
r = solve_optimal(s, space=space, keep_trace=True)
print("iterations", r.iterations, "converged", r.converged)
print("caching", r.caching, "energy %.9e J, dual bound %.9e J, gap %.2e" % (
    r.average_energy, r.dual_value, r.duality_gap_rel))

# %%
for it, g, res, k in r.trace[:: max(1, len(r.trace) // 10)]:
    print(f"{it:5d}  g={g:.6e}  residual={res:.3e}  cached={k}")

# %%
ref = solve_bruteforce(s, space=space)
print("brute force caching", ref.caching, "energy %.9e J" % ref.average_energy)
print("local-search cross-check of the durations: %.1e relative" % ref.metadata["crosscheck_max_rel"])
