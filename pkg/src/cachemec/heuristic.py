"""Low-complexity suboptimal scheme: three one-shot steps, no iteration.

1. Deadline-tight durations without caching give a price field lam0.
2. The caching knapsack is built from the first-step values at lam0 and
   solved approximately (Ext-Greedy).
3. Durations are re-solved deadline-tight for the chosen caching vector.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .energy import average_energy
from .knapsack import KnapsackInstance, build_instance, solve_exact_dp, solve_ext_greedy
from .report import SolveReport
from .scenario import DEFAULT_STATE_CAP, Scenario, StateSpace, state_space
from .time_alloc import deadline_tight_allocations, priced_tables


def solve_nocache_multipliers(s: Scenario, space: Optional[StateSpace] = None,
                              cap: int = DEFAULT_STATE_CAP):
    """Prices and durations when nothing is cached.

    Returns ``(lam0, t_up, t_down, converged)`` indexed like ``space``.
    """
    if space is None:
        space = state_space(s, cap)
    t_up, t_down, lam0, ok = deadline_tight_allocations(np.zeros(s.num_tasks, dtype=np.int64), space)
    return lam0, t_up, t_down, ok


def caching_instance(lam0: np.ndarray, space: StateSpace) -> tuple[KnapsackInstance, np.ndarray]:
    """Knapsack over the tasks with positive value at ``lam0``.

    Returns the reduced instance and the task indices it covers.  Tasks that
    are never requested have zero value and stay uncached.
    """
    _, _, e1, _ = priced_tables(space, lam0)
    full = build_instance(e1, space.scenario)
    keep = np.flatnonzero(full.values > 0)
    return KnapsackInstance(full.values[keep], full.weights[keep], full.capacity), keep


def solve_suboptimal(s: Scenario, use_dp: bool = False, dual_value: Optional[float] = None,
                     space: Optional[StateSpace] = None, cap: int = DEFAULT_STATE_CAP) -> SolveReport:
    """Run the three steps once.  ``use_dp`` swaps Ext-Greedy for the exact DP.

    ``dual_value`` is an optional lower bound (from the dual method) to report
    alongside the energy.
    """
    if space is None:
        space = state_space(s, cap)
    lam0, _, _, ok0 = solve_nocache_multipliers(s, space)
    inst, keep = caching_instance(lam0, space)
    chosen = solve_exact_dp(inst) if use_dp else solve_ext_greedy(inst)
    c = np.zeros(s.num_tasks, dtype=np.int64)
    c[keep] = chosen
    t_up, t_down, lam, ok = deadline_tight_allocations(c, space)
    energy = average_energy(c, t_up, t_down, space)
    return SolveReport("suboptimal", c, t_up, t_down, energy, dual_value=dual_value,
                       converged=bool(ok.all() and ok0.all()), multipliers=lam,
                       metadata={"pmf_normalized": s.pmf_normalized,
                                 "knapsack": "dp" if use_dp else "ext_greedy",
                                 "nocache_multipliers": lam0})
