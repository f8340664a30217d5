# %% [markdown]
# # Scenario and system states
#
# A scenario fixes K mobiles, a catalog of N tasks, the channel law and the
# task popularity.  Every quantity downstream is an exact expectation over
# the joint (requested task, channel) state of all mobiles, so the first step
# is to enumerate that state space.

# %%
import numpy as np

from cachemec.scenario import reference_scenario, requesters, state_space, zipf_pmf

s = reference_scenario(num_mobiles=2, num_tasks=3, gamma=0.8, cache_size=5e4, deadline=0.08)
print("tasks (upload bits, cycles, result bits):")
for n, t in enumerate(s.tasks, 1):
    print(f"  {n}: {t.upload_bits:.0f} {t.cycles:.0f} {t.result_bits:.0f}")

# %% [markdown]
# The two-point channel law does not sum to one as given, so it is
# normalized and the scenario remembers that it was.

# %%
print("channel pmf:", np.round(s.channel_pmf[0], 4), "normalized:", s.pmf_normalized)
print("Zipf popularity at gamma=0.8:", np.round(zipf_pmf(3, 0.8), 4))

# %%
space = state_space(s)
print(len(space), "states, total probability", space.prob.sum())

# %% [markdown]
# For each task the base station needs the number of requesters, the best
# requester channel (one upload suffices) and the worst (one multicast
# download must reach everyone).

# %%
for i in np.argsort(-space.prob)[:5]:
    st = space.state(i)
    info = [requesters(st, n) for n in range(s.num_tasks)]
    print(f"x={tuple(x + 1 for x in st.tasks)} h={st.channels} p={st.probability:.4f} ->",
          [(k, b, w) for k, b, w in info if k])
