# %% [markdown]
# # Transfer durations
#
# For a fixed price on the deadline, each transfer's duration has a closed
# form through the Lambert W function.  Given a caching vector, one price per
# state is then tuned by bisection so that the state's transfers exactly fill
# the window T.

# %%
import numpy as np

from cachemec.energy import StateAllocation, state_energy
from cachemec.numerics import lambert_w0
from cachemec.scenario import SystemState, reference_scenario
from cachemec.time_alloc import deadline_tight_alloc, transfer_duration

s = reference_scenario()
print("W(1) =", lambert_w0(1.0), " W(-1/e) =", lambert_w0(-np.exp(-1)))

# %% [markdown]
# Higher prices shorten the transfer; at zero price it takes the whole window.

# %%
for lam in (0.0, 1e-6, 1e-5, 1e-4, 1e-3):
    t = transfer_duration(5e4, 1.5e-6, 1.0, lam, s)
    print(f"lam={lam:8.1e}  t={t * 1e3:8.4f} ms")

# %% [markdown]
# Two mobiles asking for different tasks: four transfers share 80 ms.
# The deadline-tight split beats the equal split.

# %%
state = SystemState((0, 1), (5e-7, 1.5e-6), 0.05)
c = [0, 0, 0]
alloc, lam = deadline_tight_alloc(c, state, s)
equal = np.array([s.deadline / 4] * 2 + [0.0])
print("price", lam)
print("upload ms  ", np.round(alloc.t_up * 1e3, 3))
print("download ms", np.round(alloc.t_down * 1e3, 3))
print("used", alloc.used_time(c), "of", s.deadline)
print("energy tight %.6e J, equal split %.6e J" % (state_energy(c, alloc, state, s),
                                                     state_energy(c, StateAllocation(equal, equal), state, s)))
