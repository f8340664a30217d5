"""Solver output and policy feasibility checks shared by every method."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .energy import cache_load
from .scenario import Scenario

GAP_EPS = 1e-300


@dataclass
class SolveReport:
    """A policy with its average energy and solver diagnostics.

    ``t_up``/``t_down`` are (states, tasks) for the proposed schemes.  The
    baselines schedule each requesting mobile separately, so their arrays are
    (states, mobiles) and ``per_mobile`` is set.
    """

    method: str
    caching: np.ndarray
    t_up: np.ndarray
    t_down: np.ndarray
    average_energy: float
    dual_value: Optional[float] = None
    iterations: int = 0
    converged: bool = True
    subgradient_max_residual: Optional[float] = None
    multipliers: Optional[np.ndarray] = None
    per_mobile: bool = False
    trace: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def duality_gap_rel(self) -> Optional[float]:
        if self.dual_value is None:
            return None
        return (self.average_energy - self.dual_value) / max(self.average_energy, GAP_EPS)

    @property
    def num_cached(self) -> int:
        return int(np.sum(self.caching))


def used_time_per_state(report: SolveReport, space) -> np.ndarray:
    if report.per_mobile:
        c_req = np.asarray(report.caching)[space.tasks]      # (S, K)
        return ((1 - c_req) * report.t_up + report.t_down).sum(axis=1)
    c = np.asarray(report.caching)[None, :]
    return ((1 - c) * report.t_up + report.t_down).sum(axis=1)


def feasibility_violations(report: SolveReport, space, rtol: float = 1e-9) -> list[str]:
    """Human-readable list of violated constraints (empty when feasible)."""
    s: Scenario = space.scenario
    T = s.deadline
    out = []
    c = np.asarray(report.caching)
    if c.shape != (s.num_tasks,) or not np.all((c == 0) | (c == 1)):
        out.append("caching vector is not binary of length N")
    elif cache_load(c, s) > s.cache_size:
        out.append(f"cache load {cache_load(c, s):g} exceeds C={s.cache_size:g}")
    for name in ("t_up", "t_down"):
        t = np.asarray(getattr(report, name))
        if t.shape[0] != len(space):
            out.append(f"{name} covers {t.shape[0]} of {len(space)} states")
            continue
        if np.any(t < 0) or np.any(t > T):
            out.append(f"{name} has durations outside [0, T]")
    if not out:
        used = used_time_per_state(report, space)
        worst = float(used.max(initial=0.0))
        if worst > T * (1 + rtol):
            out.append(f"deadline exceeded: max used time {worst!r} > T={T!r}")
    return out
