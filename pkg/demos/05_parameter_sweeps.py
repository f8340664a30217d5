# %% [markdown]
# # Larger systems through the sweep harness
#
# The same machinery the command line uses.  Varying the number of mobiles
# or tasks is quick; the 4-mobile, 12-task setting (331,776 states) takes a
# few seconds per point.  Set FULL=True to run it.

# %%
from cachemec.cli import SweepSpec, rows_to_csv, sweep

FULL = False
methods = ("suboptimal", "baseline1", "baseline2", "baseline3", "baseline4")

# %%
base = {"K": 2, "N": 9, "T_s": 0.08, "C_bits": 1.5e5, "zipf_gamma": 0.8}
print(rows_to_csv(sweep(SweepSpec("K", (1, 2, 3), base, methods))))

# %%
base = {"K": 3, "N": 8, "T_s": 0.08, "C_bits": 3.5e5, "zipf_gamma": 0.8}
print(rows_to_csv(sweep(SweepSpec("N", (4, 6, 8), base, methods))))

# %%
if FULL:
    base = {"K": 4, "N": 12, "T_s": 0.08, "C_bits": 2.4e5, "zipf_gamma": 0.8}
    print(rows_to_csv(sweep(SweepSpec("C", (0.0, 1.2e5, 2.4e5), base, methods))))
