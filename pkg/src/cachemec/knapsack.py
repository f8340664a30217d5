"""0/1 knapsack for the caching decision: exact DP and the Ext-Greedy 1/2-approximation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

TIE_TOL = 1e-12
DEFAULT_TABLE_CAP = 5 * 10**7


class TableCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class KnapsackInstance:
    values: np.ndarray      # nonnegative, one per task
    weights: np.ndarray     # positive integers (bits)
    capacity: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights)
        if v.shape != w.shape or v.ndim != 1:
            raise ValueError("values and weights must be 1-D and the same length")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("values must be finite and nonnegative")
        if np.any(w <= 0) or np.any(w != np.round(w)):
            raise ValueError("weights must be positive integers")
        if self.capacity < 0:
            raise ValueError("capacity must be nonnegative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w.astype(np.int64))

    def __len__(self):
        return self.values.size

    def value(self, c) -> float:
        return float(np.dot(np.asarray(c, dtype=float), self.values))

    def weight(self, c) -> int:
        return int(np.dot(np.asarray(c, dtype=np.int64), self.weights))

    def feasible(self, c) -> bool:
        return self.weight(c) <= self.capacity


def build_instance(e1_table: np.ndarray, scenario) -> KnapsackInstance:
    """Item values are the column sums of e1 over all states; weights are result sizes."""
    values = np.asarray(e1_table, dtype=float).sum(axis=0)
    return KnapsackInstance(values, np.round(scenario.result_bits).astype(np.int64), scenario.cache_size)


def solve_exact_dp(inst: KnapsackInstance, table_cap: int = DEFAULT_TABLE_CAP) -> np.ndarray:
    """Optimal 0/1 selection; among (near-)ties, the lexicographically smallest vector.

    Weights and capacity are divided by their common gcd first.  The table
    is filled from the last item backwards so the reconstruction can walk
    items in order and leave an item out whenever that costs nothing.
    """
    n = len(inst)
    c = np.zeros(n, dtype=np.int64)
    cap = int(math.floor(inst.capacity + 1e-9))
    if n == 0 or cap <= 0:
        return c
    g = reduce(math.gcd, [int(w) for w in inst.weights] + [cap])
    w = (inst.weights // g).astype(np.int64)
    cap //= g
    cap = min(cap, int(w.sum()))
    if (n + 1) * (cap + 1) > table_cap:
        raise TableCapExceeded(f"DP table of {(n + 1) * (cap + 1)} cells exceeds cap {table_cap}; "
                               "use solve_ext_greedy instead")
    best = np.zeros((n + 1, cap + 1))
    for i in range(n - 1, -1, -1):
        nxt = best[i + 1]
        row = nxt.copy()
        wi = int(w[i])
        if wi <= cap:
            take = np.full(cap + 1, -np.inf)
            take[wi:] = nxt[:cap + 1 - wi] + inst.values[i]
            row = np.maximum(row, take)
        best[i] = row
    room = cap
    for i in range(n):
        wi = int(w[i])
        if wi <= room and best[i + 1][room - wi] + inst.values[i] > best[i + 1][room] + TIE_TOL:
            c[i] = 1
            room -= wi
    return c


def solve_ext_greedy(inst: KnapsackInstance) -> np.ndarray:
    """Greedy by value density, then keep the better of that packing and the best single item.

    Zero-value items are never selected.
    """
    n = len(inst)
    c = np.zeros(n, dtype=np.int64)
    if n == 0 or inst.capacity <= 0:
        return c
    v, w = inst.values, inst.weights
    order = np.lexsort((np.arange(n), -(v / w)))
    room = inst.capacity
    for i in order:
        if v[i] > 0 and w[i] <= room:
            c[i] = 1
            room -= w[i]
    fits = np.flatnonzero((w <= inst.capacity) & (v > 0))
    if fits.size:
        j = fits[np.argmax(v[fits])]
        if v[j] > inst.value(c) + TIE_TOL:
            c = np.zeros(n, dtype=np.int64)
            c[j] = 1
    return c

