"""Optimal joint caching and time allocation by the dual (subgradient) method.

The per-state deadline constraints are priced with multipliers lam(state).
For fixed prices the relaxed problem splits into a knapsack over caching
decisions and independent closed-form transfer durations, which gives the dual
function g(lam) and a subgradient (time used minus T) for every state.
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from .energy import average_energy
from .knapsack import TIE_TOL, build_instance, solve_exact_dp
from .report import SolveReport
from .scenario import DEFAULT_STATE_CAP, Scenario, StateSpace, SystemState, state_space
from .time_alloc import deadline_tight_allocations, priced_tables

log = logging.getLogger(__name__)

DEFAULT_STEP_M = 10.0
DEFAULT_MAX_ITER = 20000


def dual_function(lam, space: StateSpace, prev_c=None):
    """Evaluate g(lam).

    Returns ``(g, c_tilde, tables)`` where ``tables = (f_up, f_down, e1, e2)``
    from :func:`priced_tables`.  If ``prev_c`` does as well as the fresh
    knapsack optimum (within the tie tolerance) it is kept, which stops the
    caching vector from flipping between equally good choices.
    """
    s = space.scenario
    lam = np.asarray(lam, dtype=float)
    tables = priced_tables(space, lam)
    _, _, e1, e2 = tables
    inst = build_instance(e1, s)
    c = solve_exact_dp(inst)
    if prev_c is not None and inst.feasible(prev_c) and inst.value(prev_c) >= inst.value(c) - TIE_TOL:
        c = np.asarray(prev_c, dtype=np.int64)
    g = float(e2.sum() + ((1 - c)[None, :] * e1).sum() - s.deadline * lam.sum())
    return g, c, tables


def subgradients(c, tables, deadline: float) -> np.ndarray:
    """Per-state time used by the relaxed solution minus the deadline."""
    f_up, f_down = tables[0], tables[1]
    return ((1 - np.asarray(c))[None, :] * f_up + f_down).sum(axis=1) - deadline


def subgradient(state: SystemState, lam_state: float, c_tilde, s: Scenario) -> float:
    space = StateSpace.from_states(s, [state])
    tables = priced_tables(space, np.array([lam_state]))
    return float(subgradients(c_tilde, tables, s.deadline)[0])


def stopping_residual(sub: np.ndarray, lam: np.ndarray) -> float:
    """max |s| over priced states, one-sided max(s, 0) where lam == 0."""
    r = np.where(lam > 0, np.abs(sub), np.maximum(sub, 0.0))
    return float(r.max(initial=0.0))


def auto_step_scale(space: StateSpace) -> float:
    _, _, lam0, _ = deadline_tight_allocations(np.zeros(space.scenario.num_tasks, dtype=np.int64), space)
    top = float(lam0.max(initial=0.0))
    return top / space.scenario.deadline if top > 0 else 1.0


def solve_optimal(s: Scenario, step_m: float = DEFAULT_STEP_M, eps: Optional[float] = None,
                  max_iter: int = DEFAULT_MAX_ITER, step_scale="auto",
                  space: Optional[StateSpace] = None, cap: int = DEFAULT_STATE_CAP,
                  keep_trace: bool = False) -> SolveReport:
    """Subgradient ascent on the dual, then primal recovery from the caching vectors it visited.

    Step ``t`` (from 1) uses ``step_scale * (1 + m) / (t + m)``.  Subgradients
    are in seconds while multipliers are prices of order 1e-6, so the
    ``"auto"`` scale is the largest no-caching deadline-tight price divided by
    T; pass ``step_scale=1.0`` for the unscaled rule.

    Recovery fixes a caching vector and re-solves every state's durations
    deadline-tight, so the returned policy is always feasible.  Near a dual
    optimum where two caching vectors tie, the iterates alternate between them
    and the last one need not be the better; every distinct vector seen is
    therefore recovered and the cheapest kept.  The reported
    dual value is the best g seen, including g at the recovered policy's own
    prices.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if space is None:
        space = state_space(s, cap)
    T = s.deadline
    eps = 1e-4 * T if eps is None else eps
    if step_scale == "auto":
        step_scale = auto_step_scale(space)
    lam = np.zeros(len(space))
    best_g = -np.inf
    c = None
    converged = False
    residual = np.inf
    trace = []
    visited = {}
    it = 0
    for it in range(1, max_iter + 1):
        g, c, tables = dual_function(lam, space, prev_c=c)
        visited[tuple(int(v) for v in c)] = it
        sub = subgradients(c, tables, T)
        residual = stopping_residual(sub, lam)
        best_g = max(best_g, g)
        if keep_trace:
            trace.append((it, g, residual, int(c.sum())))
        if residual < eps:
            converged = True
            break
        alpha = step_scale * (1.0 + step_m) / (it + step_m)
        lam = np.maximum(lam + alpha * sub, 0.0)
    if not converged:
        log.info("subgradient stopped after %d iterations, residual %.3g", it, residual)

    # recover from the last caching vector and any other the iterates produced
    last = tuple(int(v) for v in c)
    recovered = None
    for key in sorted(visited, key=lambda k: (k != last, k)):
        cand = np.array(key, dtype=np.int64)
        t_up, t_down, lam_rec, ok = deadline_tight_allocations(cand, space)
        energy = average_energy(cand, t_up, t_down, space)
        if recovered is None or energy < recovered[0]:
            recovered = (energy, cand, t_up, t_down, lam_rec, ok)
    energy, c, t_up, t_down, lam_rec, ok = recovered
    g_rec, _, _ = dual_function(lam_rec, space)
    best_g = max(best_g, g_rec)
    return SolveReport("optimal", c, t_up, t_down, energy, dual_value=best_g, iterations=it,
                       converged=converged, subgradient_max_residual=residual, multipliers=lam,
                       trace=trace, metadata={"pmf_normalized": s.pmf_normalized,
                                              "step_scale": float(step_scale),
                                              "recovery_converged": bool(ok.all()),
                                              "cachings_visited": len(visited),
                                              "dual_at_recovery": g_rec})
