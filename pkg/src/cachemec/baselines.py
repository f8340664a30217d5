"""Reference schemes without multicast or multi-user diversity.

Each state's window T is split by a fixed rule: equally over transmission
slots (ids 1 and 3) or in proportion to bits (ids 2 and 4).  Ids 1 and 2 use
a supplied caching vector (the suboptimal scheme's by default); 3 and 4 cache
nothing.

Two readings are offered.  ``"per_request"`` (default) treats every
(mobile, task) request as its own transfer: each uncached request uploads
over its own channel and every request gets a unicast download at its own
channel, so durations are (states, mobiles).  ``"per_task"`` applies the same
split over active tasks with multicast downloads and best-channel uploads,
giving (states, tasks) durations.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .energy import average_energy, check_caching, exec_energy_per_task, transfer_energy
from .report import SolveReport
from .scenario import DEFAULT_STATE_CAP, Scenario, StateSpace, state_space

BASELINE_IDS = (1, 2, 3, 4)
READINGS = ("per_request", "per_task")


def _split(equal: bool, uncached, up_bits, down_bits, live, T: float):
    """Durations for one transfer table; rows are states, ``live`` marks entries that transmit."""
    if equal:
        w_up = np.where(live, uncached, 0.0)
        w_down = np.where(live, 1.0, 0.0)
    else:
        w_up = np.where(live, uncached * up_bits, 0.0)
        w_down = np.where(live, down_bits, 0.0)
    total = (w_up + w_down).sum(axis=1, keepdims=True)
    scale = np.divide(T, total, out=np.zeros_like(total), where=total > 0)
    return w_up * scale, w_down * scale


def _per_request(equal: bool, c, space: StateSpace):
    s = space.scenario
    x = space.tasks
    uncached = (1 - c[x]).astype(float)
    live = np.ones(x.shape, dtype=bool)
    t_up, t_down = _split(equal, uncached, s.upload_bits[x], s.result_bits[x], live, s.deadline)
    gains = space.channels
    e_up = np.where(uncached > 0, transfer_energy(np.where(uncached > 0, t_up, 1.0), s.upload_bits[x], gains, s), 0.0)
    e_down = transfer_energy(t_down, s.result_bits[x], gains, s)
    # the server runs each distinct uncached task once
    e_exec = (space.active * (1 - c)[None, :] * exec_energy_per_task(s)[None, :]).sum(axis=1)
    per_state = e_up.sum(axis=1) + e_down.sum(axis=1) + e_exec
    return t_up, t_down, float(np.dot(space.prob, per_state))


def _per_task(equal: bool, c, space: StateSpace):
    s = space.scenario
    uncached = np.broadcast_to((1 - c)[None, :].astype(float), space.active.shape)
    t_up, t_down = _split(equal, uncached, s.upload_bits[None, :], s.result_bits[None, :],
                          space.active, s.deadline)
    return t_up, t_down, average_energy(c, t_up, t_down, space)


def solve_baseline(baseline_id: int, s: Scenario, c_dagger=None, reading: str = "per_request",
                   space: Optional[StateSpace] = None, cap: int = DEFAULT_STATE_CAP) -> SolveReport:
    """Average energy of baseline ``baseline_id``.

    For ids 1 and 2 ``c_dagger`` is the caching vector to use; when omitted the
    suboptimal scheme is run to obtain it.  Ids 3 and 4 ignore it.
    """
    if baseline_id not in BASELINE_IDS:
        raise ValueError(f"baseline id must be one of {BASELINE_IDS}, got {baseline_id!r}")
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}, got {reading!r}")
    if space is None:
        space = state_space(s, cap)
    if baseline_id in (1, 2):
        if c_dagger is None:
            from .heuristic import solve_suboptimal
            c_dagger = solve_suboptimal(s, space=space).caching
        c = check_caching(c_dagger, s)
    else:
        c = np.zeros(s.num_tasks, dtype=np.int64)
    equal = baseline_id in (1, 3)
    solver = _per_request if reading == "per_request" else _per_task
    t_up, t_down, energy = solver(equal, c, space)
    return SolveReport(f"baseline{baseline_id}", c, t_up, t_down, energy,
                       per_mobile=reading == "per_request",
                       metadata={"pmf_normalized": s.pmf_normalized, "reading": reading,
                                 "split": "equal" if equal else "proportional"})
