"""Problem instances, probability laws and exact enumeration of the system-state space.

A system state is one joint realization of every mobile's requested task and
channel power.  Tasks are indexed from 0 inside the library; scenario files use
1-based task numbers only implicitly through list order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

DEFAULT_STATE_CAP = 10**7

# Numerical settings used throughout the experiments.
DEFAULT_BANDWIDTH = 10e6
DEFAULT_NOISE = 1e-9
DEFAULT_MU = 1e-30
DEFAULT_CPU_FREQ = 6e9
DEFAULT_CHANNELS = (5e-7, 1.5e-6)
DEFAULT_CHANNEL_PMF = (0.7015, 0.2581)

PMF_SUM_TOL = 1e-12
PMF_NORMALIZE_WINDOW = (0.9, 1.1)


class ScenarioError(ValueError):
    """Invalid scenario definition."""


class StateCapExceeded(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"state enumeration needs {required} states, above the cap of {cap}")
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class TaskSpec:
    upload_bits: float
    cycles: float
    result_bits: float

    def __post_init__(self):
        for name in ("upload_bits", "cycles", "result_bits"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"task {name} must be positive, got {getattr(self, name)!r}")


def zipf_pmf(num_tasks: int, gamma: float) -> np.ndarray:
    """Zipf popularity: entry n (1-based) proportional to n**-gamma."""
    if num_tasks < 1:
        raise ScenarioError("num_tasks must be >= 1")
    if gamma < 0:
        raise ScenarioError("zipf exponent must be nonnegative")
    w = np.arange(1, num_tasks + 1, dtype=float) ** (-float(gamma))
    return w / w.sum()


def linear_catalog(num_tasks: int) -> tuple[TaskSpec, ...]:
    """Parametric task catalog: sizes grow linearly with the task number."""
    return tuple(
        TaskSpec(upload_bits=4e4 * n + 1e4, cycles=4e4 * n + 1e4, result_bits=2e4 * n + 1e4)
        for n in range(1, num_tasks + 1)
    )


def _check_pmf(values, length: int, what: str) -> tuple[tuple[float, ...], bool]:
    """Validate one pmf; returns (pmf, was_normalized)."""
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ScenarioError(f"{what} must have {length} entries, got shape {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{what} entries must be finite and nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) <= PMF_SUM_TOL:
        return tuple(float(v) for v in arr), False
    lo, hi = PMF_NORMALIZE_WINDOW
    if not lo <= total <= hi:
        raise ScenarioError(f"{what} sums to {total:.6g}, outside the normalizable window [{lo}, {hi}]")
    return tuple(float(v) for v in arr / total), True


def _per_mobile(pmf, num_mobiles: int, length: int, what: str):
    """Accept a single pmf (shared by every mobile) or one pmf per mobile."""
    arr = np.asarray(pmf, dtype=float)
    if arr.ndim == 1:
        rows = [pmf] * num_mobiles
    elif arr.ndim == 2 and arr.shape[0] == num_mobiles:
        rows = list(pmf)
    else:
        raise ScenarioError(f"{what} must be one vector or {num_mobiles} vectors")
    checked = [_check_pmf(r, length, what) for r in rows]
    return tuple(c[0] for c in checked), any(c[1] for c in checked)


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance.

    ``channel_pmf`` and ``task_pmf`` hold one probability vector per mobile.
    ``zipf_gamma`` is kept only as a label when the task law came from a Zipf
    exponent.
    """

    num_mobiles: int
    tasks: tuple[TaskSpec, ...]
    channel_states: tuple[float, ...]
    channel_pmf: tuple[tuple[float, ...], ...]
    task_pmf: tuple[tuple[float, ...], ...]
    bandwidth: float = DEFAULT_BANDWIDTH
    noise_power: float = DEFAULT_NOISE
    mu: float = DEFAULT_MU
    cpu_freq: float = DEFAULT_CPU_FREQ
    deadline: float = 0.08
    cache_size: float = 0.0
    zipf_gamma: Optional[float] = None
    pmf_normalized: bool = False

    def __post_init__(self):
        if self.num_mobiles < 1:
            raise ScenarioError("need at least one mobile")
        if len(self.tasks) < 1:
            raise ScenarioError("need at least one task")
        hs = np.asarray(self.channel_states, dtype=float)
        if hs.ndim != 1 or hs.size == 0 or np.any(hs <= 0):
            raise ScenarioError("channel states must be a non-empty list of positive values")
        if np.unique(hs).size != hs.size:
            raise ScenarioError("channel states must be distinct")
        if not self.deadline > 0:
            raise ScenarioError("deadline T must be positive")
        if not self.cache_size >= 0:
            raise ScenarioError("cache size C must be nonnegative")
        for name in ("bandwidth", "noise_power", "cpu_freq"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"{name} must be positive")
        if self.mu < 0:
            raise ScenarioError("mu must be nonnegative")
        for what, pmfs, length in (("channel_pmf", self.channel_pmf, hs.size),
                                   ("task_pmf", self.task_pmf, len(self.tasks))):
            if len(pmfs) != self.num_mobiles:
                raise ScenarioError(f"{what} needs one vector per mobile")
            for row in pmfs:
                if len(row) != length or abs(sum(row) - 1.0) > PMF_SUM_TOL or min(row) < 0:
                    raise ScenarioError(f"{what} rows must be length-{length} pmfs summing to 1")

    @classmethod
    def build(cls, num_mobiles: int, tasks: Sequence[TaskSpec], channel_states: Sequence[float],
              channel_pmf, task_pmf=None, zipf_gamma: Optional[float] = None, **constants) -> "Scenario":
        """Construct with pmf normalization and per-mobile broadcasting."""
        tasks = tuple(tasks)
        if (task_pmf is None) == (zipf_gamma is None):
            raise ScenarioError("give exactly one of task_pmf or zipf_gamma")
        if task_pmf is None:
            task_pmf = zipf_pmf(len(tasks), zipf_gamma)
        cp, cn = _per_mobile(channel_pmf, num_mobiles, len(channel_states), "channel_pmf")
        tp, tn = _per_mobile(task_pmf, num_mobiles, len(tasks), "task_pmf")
        return cls(num_mobiles=num_mobiles, tasks=tasks,
                   channel_states=tuple(float(h) for h in channel_states),
                   channel_pmf=cp, task_pmf=tp, zipf_gamma=zipf_gamma,
                   pmf_normalized=cn or tn, **constants)

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @property
    def upload_bits(self) -> np.ndarray:
        return np.array([t.upload_bits for t in self.tasks])

    @property
    def cycles(self) -> np.ndarray:
        return np.array([t.cycles for t in self.tasks])

    @property
    def result_bits(self) -> np.ndarray:
        return np.array([t.result_bits for t in self.tasks])

    @property
    def num_states(self) -> int:
        return (self.num_tasks * len(self.channel_states)) ** self.num_mobiles


def reference_scenario(num_mobiles: int = 2, num_tasks: int = 3, gamma: float = 0.8,
                   cache_size: float = 5e4, deadline: float = 0.08) -> Scenario:
    """Scenario with the experimental constants, catalog and two-state channel law."""
    return Scenario.build(num_mobiles, linear_catalog(num_tasks), DEFAULT_CHANNELS,
                          DEFAULT_CHANNEL_PMF, zipf_gamma=gamma, deadline=deadline,
                          cache_size=cache_size)


# -- scenario files ---------------------------------------------------------

_FILE_CONSTANTS = {"B_hz": "bandwidth", "n0_w": "noise_power", "mu": "mu",
                   "F_b": "cpu_freq", "T_s": "deadline", "C_bits": "cache_size"}


def scenario_from_dict(doc: dict, parametric_catalog: bool = False) -> Scenario:
    """Build a scenario from the JSON document layout.

    With ``parametric_catalog`` the task catalog and channel law are synthesized from
    ``N`` (and ``K``) alone; explicit fields in ``doc`` still override constants.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    try:
        K = int(doc["K"])
    except KeyError:
        raise ScenarioError("missing field 'K'") from None
    constants = {attr: float(doc[key]) for key, attr in _FILE_CONSTANTS.items() if key in doc}
    if parametric_catalog or "tasks" not in doc:
        if "N" not in doc:
            raise ScenarioError("need 'tasks' or 'N' (with the parametric catalog)")
        tasks = linear_catalog(int(doc["N"]))
        channels = doc.get("channel_states", DEFAULT_CHANNELS)
        channel_pmf = doc.get("channel_pmf", DEFAULT_CHANNEL_PMF)
    else:
        try:
            tasks = tuple(TaskSpec(float(t["L_u"]), float(t["L_e"]), float(t["L_d"])) for t in doc["tasks"])
            channels = doc["channel_states"]
            channel_pmf = doc["channel_pmf"]
        except KeyError as exc:
            raise ScenarioError(f"missing field {exc.args[0]!r}") from None
    gamma = doc.get("zipf_gamma")
    task_pmf = doc.get("task_pmf")
    if gamma is None and task_pmf is None:
        raise ScenarioError("need 'zipf_gamma' or 'task_pmf'")
    if gamma is not None and task_pmf is not None:
        raise ScenarioError("give only one of 'zipf_gamma' and 'task_pmf'")
    return Scenario.build(K, tasks, channels, channel_pmf, task_pmf=task_pmf,
                          zipf_gamma=None if gamma is None else float(gamma), **constants)


def load_scenario(path, parametric_catalog: bool = False) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno - 1 < len(text.splitlines()) else ""
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from None
    return scenario_from_dict(doc, parametric_catalog=parametric_catalog)


def scenario_to_dict(s: Scenario) -> dict:
    doc = {"K": s.num_mobiles, "B_hz": s.bandwidth, "n0_w": s.noise_power, "mu": s.mu,
           "F_b": s.cpu_freq, "T_s": s.deadline, "C_bits": s.cache_size,
           "tasks": [{"L_u": t.upload_bits, "L_e": t.cycles, "L_d": t.result_bits} for t in s.tasks],
           "channel_states": list(s.channel_states),
           "channel_pmf": [list(r) for r in s.channel_pmf]}
    if s.zipf_gamma is not None:
        doc["zipf_gamma"] = s.zipf_gamma
    else:
        doc["task_pmf"] = [list(r) for r in s.task_pmf]
    return doc


# -- system states ----------------------------------------------------------

@dataclass(frozen=True)
class SystemState:
    tasks: tuple[int, ...]
    channels: tuple[float, ...]
    probability: float


def requesters(state: SystemState, n: int) -> tuple[int, Optional[float], Optional[float]]:
    """Number of mobiles requesting task ``n`` with their best and worst channel.

    The channels are ``None`` when nobody requests the task.
    """
    hs = [h for x, h in zip(state.tasks, state.channels) if x == n]
    if not hs:
        return 0, None, None
    return len(hs), max(hs), min(hs)


def _check_cap(s: Scenario, cap: int):
    if s.num_states > cap:
        raise StateCapExceeded(s.num_states, cap)


@dataclass
class StateSpace:
    """All system states of a scenario as flat arrays.

    Row ``i`` is one state.  ``counts[i, n]`` is the number of requesters of task
    ``n``; ``best``/``worst`` hold the largest/smallest requester channel and are
    NaN where ``counts`` is zero (always read them through ``active``).
    """

    scenario: Scenario
    tasks: np.ndarray       # (S, K) int, 0-based
    channels: np.ndarray    # (S, K) float
    prob: np.ndarray        # (S,)
    counts: np.ndarray = field(init=False)
    best: np.ndarray = field(init=False)
    worst: np.ndarray = field(init=False)

    def __post_init__(self):
        S, K = self.tasks.shape
        N = self.scenario.num_tasks
        onehot = self.tasks[:, :, None] == np.arange(N)[None, None, :]    # (S, K, N)
        self.counts = onehot.sum(axis=1)
        h = self.channels[:, :, None]
        with np.errstate(invalid="ignore"):
            self.best = np.where(onehot, h, -np.inf).max(axis=1)
            self.worst = np.where(onehot, h, np.inf).min(axis=1)
        self.best[self.counts == 0] = np.nan
        self.worst[self.counts == 0] = np.nan

    @property
    def active(self) -> np.ndarray:
        return self.counts > 0

    def __len__(self):
        return self.prob.size

    def state(self, i: int) -> SystemState:
        return SystemState(tuple(int(v) for v in self.tasks[i]),
                           tuple(float(v) for v in self.channels[i]), float(self.prob[i]))

    @classmethod
    def from_states(cls, s: Scenario, states: Sequence[SystemState]) -> "StateSpace":
        tasks = np.array([st.tasks for st in states], dtype=np.int64).reshape(len(states), s.num_mobiles)
        chans = np.array([st.channels for st in states], dtype=float).reshape(len(states), s.num_mobiles)
        prob = np.array([st.probability for st in states], dtype=float)
        return cls(s, tasks, chans, prob)


def state_space(s: Scenario, cap: int = DEFAULT_STATE_CAP) -> StateSpace:
    """Enumerate every (x, h) with its product probability, x-major lexicographic order."""
    _check_cap(s, cap)
    K, N, M = s.num_mobiles, s.num_tasks, len(s.channel_states)
    # mixed-radix digits: x_1..x_K (base N) then h_1..h_K (base M), first digit most significant
    idx = np.arange(s.num_states, dtype=np.int64)
    h_idx = np.empty((idx.size, K), dtype=np.int64)
    x_idx = np.empty((idx.size, K), dtype=np.int64)
    rest = idx
    for k in range(K - 1, -1, -1):
        rest, h_idx[:, k] = np.divmod(rest, M)
    for k in range(K - 1, -1, -1):
        rest, x_idx[:, k] = np.divmod(rest, N)
    tp = np.asarray(s.task_pmf)
    cp = np.asarray(s.channel_pmf)
    ks = np.arange(K)
    prob = np.prod(tp[ks, x_idx], axis=1) * np.prod(cp[ks, h_idx], axis=1)
    channels = np.asarray(s.channel_states)[h_idx]
    return StateSpace(s, x_idx, channels, prob)


def enumerate_states(s: Scenario, cap: int = DEFAULT_STATE_CAP) -> list[SystemState]:
    space = state_space(s, cap)
    return [space.state(i) for i in range(len(space))]

