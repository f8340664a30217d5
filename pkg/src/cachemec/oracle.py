"""Brute-force reference solver for small instances.

Every cache-feasible caching vector is tried with optimal per-state durations.
A sample of states is re-optimized by a derivative-free local search that never
touches the Lambert-W closed form, as an independent check on those durations.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from .energy import average_energy, cache_load, exec_energy_per_task, transfer_energy
from .report import SolveReport
from .scenario import DEFAULT_STATE_CAP, Scenario, StateSpace, state_space
from .time_alloc import deadline_tight_allocations

MAX_TASKS = 15
RESTARTS = 20
SWEEPS = 500
SHRINK = 0.5
SAMPLE_STATES = 8


class TooManyTasks(ValueError):
    pass


def feasible_cachings(s: Scenario):
    """All binary vectors that fit in the cache, in lexicographic order."""
    for bits in itertools.product((0, 1), repeat=s.num_tasks):
        c = np.array(bits, dtype=np.int64)
        if cache_load(c, s) <= s.cache_size:
            yield c


def local_search_durations(bits, gains, deadline: float, s: Scenario, rng: np.random.Generator,
                           restarts: int = RESTARTS, sweeps: int = SWEEPS, shrink: float = SHRINK):
    """Minimize sum_i (t_i/g_i) g(L_i/t_i) over sum t_i <= T by pairwise time transfers.

    Energies decrease in every duration, so the whole window is always shared
    out; each move shifts ``delta`` seconds from one transfer to another and
    ``delta`` shrinks whenever a full sweep finds no improving move.
    """
    bits = np.asarray(bits, dtype=float)
    gains = np.asarray(gains, dtype=float)
    m = bits.size
    if m == 0:
        return np.zeros(0), 0.0
    if m == 1:
        t = np.array([deadline])
        return t, float(transfer_energy(t, bits, gains, s).sum())
    best_t, best_e = None, np.inf
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    for _ in range(restarts):
        t = rng.dirichlet(np.ones(m)) * deadline
        e = transfer_energy(t, bits, gains, s)
        delta = deadline / 4
        for _ in range(sweeps):
            moved = False
            for i, j in pairs:
                if t[j] - delta <= 0 or t[i] + delta > deadline:
                    continue
                ei = transfer_energy(t[i] + delta, bits[i], gains[i], s)
                ej = transfer_energy(t[j] - delta, bits[j], gains[j], s)
                if ei + ej < e[i] + e[j]:
                    t[i] += delta
                    t[j] -= delta
                    e[i], e[j] = ei, ej
                    moved = True
            if not moved:
                delta *= shrink
                if delta < deadline * 1e-15:
                    break
        total = float(e.sum())
        if total < best_e:
            best_t, best_e = t.copy(), total
    return best_t, best_e


def _state_transfers(c, space: StateSpace, i: int):
    s = space.scenario
    bits, gains = [], []
    for n in np.flatnonzero(space.active[i]):
        if c[n] == 0:
            bits.append(s.upload_bits[n])
            gains.append(space.best[i, n])
        bits.append(s.result_bits[n])
        gains.append(space.worst[i, n])
    return bits, gains


def crosscheck_states(c, t_up, t_down, space: StateSpace, sample: int = SAMPLE_STATES, seed: int = 0):
    """Largest relative excess of the closed-form transmission energy over local search."""
    s = space.scenario
    rng = np.random.default_rng(seed)
    counts = np.array([len(_state_transfers(c, space, i)[0]) for i in range(len(space))])
    candidates = np.flatnonzero(counts >= 2)
    if candidates.size == 0:
        return 0.0
    picks = rng.choice(candidates, size=min(sample, candidates.size), replace=False)
    worst = 0.0
    for i in np.sort(picks):
        bits, gains = _state_transfers(c, space, i)
        _, e_ls = local_search_durations(bits, gains, s.deadline, s, rng)
        act = space.active[i]
        up = act & (np.asarray(c) == 0)
        e_cf = (transfer_energy(t_up[i][up], s.upload_bits[up], space.best[i][up], s).sum()
                + transfer_energy(t_down[i][act], s.result_bits[act], space.worst[i][act], s).sum())
        worst = max(worst, (e_cf - e_ls) / e_ls)
    return float(worst)


def solve_bruteforce(s: Scenario, space: Optional[StateSpace] = None, cap: int = DEFAULT_STATE_CAP,
                     crosscheck: bool = True) -> SolveReport:
    if s.num_tasks > MAX_TASKS:
        raise TooManyTasks(f"brute force handles at most {MAX_TASKS} tasks, got {s.num_tasks}")
    if space is None:
        space = state_space(s, cap)
    best = None
    for c in feasible_cachings(s):
        t_up, t_down, lam, ok = deadline_tight_allocations(c, space)
        e = average_energy(c, t_up, t_down, space)
        if best is None or e < best[0]:
            best = (e, c, t_up, t_down, lam, bool(ok.all()))
    e, c, t_up, t_down, lam, ok = best
    meta = {"pmf_normalized": s.pmf_normalized, "recovery_converged": ok,
            "cachings_tried": sum(1 for _ in feasible_cachings(s))}
    if crosscheck:
        meta["crosscheck_max_rel"] = crosscheck_states(c, t_up, t_down, space)
    return SolveReport("oracle", c, t_up, t_down, e, multipliers=lam, metadata=meta)
