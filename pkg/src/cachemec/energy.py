"""Transmission, execution and expected energies.

All array functions broadcast.  A zero duration with bits still to send has
infinite energy, so optimizers steer away from it naturally.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario, StateSpace, SystemState, requesters

LN2 = float(np.log(2.0))


@dataclass
class StateAllocation:
    """Uploading/downloading durations for every task at one state."""
    t_up: np.ndarray
    t_down: np.ndarray

    def used_time(self, c) -> float:
        return float(np.sum((1 - np.asarray(c)) * self.t_up + self.t_down))


def check_caching(c, s: Scenario) -> np.ndarray:
    """Validate a caching vector: binary entries and cached results fit in C."""
    c = np.asarray(c)
    if c.shape != (s.num_tasks,):
        raise ValueError(f"caching vector must have {s.num_tasks} entries")
    if not np.all((c == 0) | (c == 1)):
        raise ValueError("caching entries must be 0 or 1")
    c = c.astype(np.int64)
    if cache_load(c, s) > s.cache_size:
        raise ValueError("cached results exceed the cache size")
    return c


def cache_load(c, s: Scenario) -> float:
    return float(np.dot(np.asarray(c, dtype=float), s.result_bits))


def rate_power(rate, s: Scenario):
    """Minimum power (times channel gain) to carry ``rate`` bit/s: n0 (2^(rate/B) - 1)."""
    return s.noise_power * np.expm1(LN2 * np.asarray(rate, dtype=float) / s.bandwidth)


def transfer_energy(t, bits, gain, s: Scenario):
    """(t / gain) * g(bits / t), with +inf at t = 0."""
    t = np.asarray(t, dtype=float)
    bits = np.asarray(bits, dtype=float)
    gain = np.asarray(gain, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        e = t / gain * s.noise_power * np.expm1(LN2 * bits / (s.bandwidth * t))
    e = np.where(t > 0, e, np.inf)
    e = np.where(bits > 0, e, 0.0)
    return e if e.ndim else float(e)


def exec_energy_per_task(s: Scenario) -> np.ndarray:
    """mu L_e F_b^2 for every task, charged when the task is requested and uncached."""
    return s.mu * s.cycles * s.cpu_freq ** 2


def upload_energy(t: float, n: int, state: SystemState, s: Scenario) -> float:
    count, best, _ = requesters(state, n)
    if count == 0:
        return 0.0
    return transfer_energy(t, s.tasks[n].upload_bits, best, s)


def download_energy(t: float, n: int, state: SystemState, s: Scenario) -> float:
    count, _, worst = requesters(state, n)
    if count == 0:
        return 0.0
    return transfer_energy(t, s.tasks[n].result_bits, worst, s)


def exec_energy(n: int, state: SystemState, s: Scenario) -> float:
    count, _, _ = requesters(state, n)
    return float(exec_energy_per_task(s)[n]) if count else 0.0


def task_energy(c_n: int, t_up: float, t_down: float, n: int, state: SystemState, s: Scenario) -> float:
    e = download_energy(t_down, n, state, s)
    if not c_n:
        e += upload_energy(t_up, n, state, s) + exec_energy(n, state, s)
    return e


def state_energy(c, alloc: StateAllocation, state: SystemState, s: Scenario) -> float:
    return sum(task_energy(int(c[n]), alloc.t_up[n], alloc.t_down[n], n, state, s)
               for n in range(s.num_tasks))


# -- vectorized over a whole state space ------------------------------------

def task_energies(c, t_up, t_down, space: StateSpace) -> np.ndarray:
    """(S, N) array of per-task energies for per-state durations ``t_up``/``t_down``."""
    s = space.scenario
    act = space.active
    c = np.asarray(c)[None, :]
    with np.errstate(invalid="ignore"):
        e_u = np.where(act, transfer_energy(np.where(act, t_up, 1.0), s.upload_bits, np.where(act, space.best, 1.0), s), 0.0)
        e_d = np.where(act, transfer_energy(np.where(act, t_down, 1.0), s.result_bits, np.where(act, space.worst, 1.0), s), 0.0)
    e_e = np.where(act, exec_energy_per_task(s)[None, :], 0.0)
    # cached tasks skip upload and execution; keep inf out of 0*inf
    return np.where(c == 1, 0.0, e_u + e_e) + e_d


def state_energies(c, t_up, t_down, space: StateSpace) -> np.ndarray:
    return task_energies(c, t_up, t_down, space).sum(axis=1)


def average_energy(c, t_up, t_down, space: StateSpace) -> float:
    """Exact expectation of the total energy over every enumerated state."""
    t_up = np.asarray(t_up, dtype=float)
    t_down = np.asarray(t_down, dtype=float)
    want = (len(space), space.scenario.num_tasks)
    if t_up.shape != want or t_down.shape != want:
        raise ValueError(f"policy must give durations for all {want[0]} states and {want[1]} tasks; "
                         f"got {t_up.shape} and {t_down.shape}")
    return float(np.dot(space.prob, state_energies(c, t_up, t_down, space)))
