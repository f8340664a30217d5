"""Closed-form transfer durations for a given deadline price, and deadline-tight
allocations for a fixed caching vector.

For one transfer of ``L`` bits over channel ``y`` in a state of probability
``p``, minimizing ``p (t/y) g(L/t) + lam t`` over ``0 <= t <= T`` gives

    t = L ln2 / (B (W((lam y / p - n0) / (n0 e)) + 1)),   clipped to [0, T].

With q = lam y / (p n0) the Lambert argument is (q - 1)/e, so the denominator
is evaluated through :func:`lambert_w0_plus_one` to stay accurate as lam -> 0.
"""
from __future__ import annotations

import numpy as np

from .energy import LN2, StateAllocation, exec_energy_per_task, transfer_energy
from .numerics import _shifted_residual, bisect_decreasing_batch, lambert_w0_plus_one
from .scenario import Scenario, StateSpace, SystemState, requesters

DEADLINE_RTOL = 1e-9


def transfer_duration(bits, gain, prob, lam, s: Scenario):
    """Optimal duration of one active transfer at price ``lam`` (arrays broadcast).

    A zero-probability state carries no energy weight, so it gets duration 0.
    """
    bits, gain, prob, lam = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (bits, gain, prob, lam)))
    weightless = prob <= 0
    q = np.where(weightless, 0.0, lam * gain) / (np.where(weightless, 1.0, prob) * s.noise_power)
    wp1 = lambert_w0_plus_one(q.ravel()).reshape(q.shape)
    with np.errstate(divide="ignore"):
        t = bits * LN2 / (s.bandwidth * wp1)
    t = np.where(weightless, 0.0, np.clip(t, 0.0, s.deadline))
    return t if t.ndim else float(t)


def price_for_duration(t, bits, gain, prob, s: Scenario):
    """Inverse of :func:`transfer_duration` on the unclipped branch (t < T)."""
    v = LN2 * np.asarray(bits, dtype=float) / (s.bandwidth * np.asarray(t, dtype=float))
    return prob * s.noise_power / gain * _shifted_residual(np.atleast_1d(v)).reshape(np.shape(v))


def f_alloc(p: float, bits: float, gain: float, lam: float, s: Scenario, count: int) -> float:
    """Duration for one task/direction; zero when nobody requests the task."""
    if count == 0:
        return 0.0
    return transfer_duration(bits, gain, p, lam, s)


def priced_alloc(c: int, n: int, state: SystemState, lam: float, s: Scenario) -> tuple[float, float]:
    count, best, worst = requesters(state, n)
    if count == 0:
        return 0.0, 0.0
    task = s.tasks[n]
    t_u = (1 - c) * transfer_duration(task.upload_bits, best, state.probability, lam, s)
    t_d = transfer_duration(task.result_bits, worst, state.probability, lam, s)
    return float(t_u), float(t_d)


def priced_costs(n: int, state: SystemState, lam: float, s: Scenario) -> tuple[float, float]:
    """(e1, e2): priced cost of the upload+execute part and of the download part.

    The minimized per-task Lagrangian is ``(1 - c) e1 + e2``.
    """
    count, best, worst = requesters(state, n)
    if count == 0:
        return 0.0, 0.0
    task, p = s.tasks[n], state.probability
    if p <= 0:
        return 0.0, 0.0
    f_u = transfer_duration(task.upload_bits, best, p, lam, s)
    f_d = transfer_duration(task.result_bits, worst, p, lam, s)
    e1 = p * (transfer_energy(f_u, task.upload_bits, best, s) + exec_energy_per_task(s)[n]) + lam * f_u
    e2 = p * transfer_energy(f_d, task.result_bits, worst, s) + lam * f_d
    return float(e1), float(e2)


def priced_tables(space: StateSpace, lam: np.ndarray):
    """Priced durations and costs for every (state, task) at once.

    Returns ``(f_up, f_down, e1, e2)``, each (S, N); all zero where the task
    is not requested.  ``f_up`` is the duration an uncached upload would use.
    """
    s = space.scenario
    act = space.active
    si, ni = np.nonzero(act)
    p = space.prob[si]
    lam_e = np.asarray(lam, dtype=float)[si]
    lu, ld = s.upload_bits[ni], s.result_bits[ni]
    hu, hd = space.best[si, ni], space.worst[si, ni]
    fu = transfer_duration(lu, hu, p, lam_e, s)
    fd = transfer_duration(ld, hd, p, lam_e, s)
    with np.errstate(invalid="ignore"):
        e1v = np.where(p > 0, p * (transfer_energy(fu, lu, hu, s) + exec_energy_per_task(s)[ni]), 0.0) + lam_e * fu
        e2v = np.where(p > 0, p * transfer_energy(fd, ld, hd, s), 0.0) + lam_e * fd
    shape = act.shape
    out = []
    for v in (fu, fd, e1v, e2v):
        a = np.zeros(shape)
        a[si, ni] = v
        out.append(a)
    return tuple(out)


def _transfer_table(c, act, best, worst, s: Scenario):
    """Pad every state's active transfers into (S, 2N) bits/gain arrays.

    Slot n is the upload of task n (only when uncached), slot N + n its download.
    Valid entries are packed to the left and all-empty columns dropped.
    """
    up = act & (np.asarray(c)[None, :] == 0)
    mask = np.concatenate([up, act], axis=1)
    bits = np.concatenate([np.broadcast_to(s.upload_bits, act.shape), np.broadcast_to(s.result_bits, act.shape)], axis=1)
    gain = np.concatenate([best, worst], axis=1)
    order = np.argsort(~mask, axis=1, kind="stable")
    mask = np.take_along_axis(mask, order, axis=1)
    bits = np.take_along_axis(bits, order, axis=1)
    gain = np.take_along_axis(gain, order, axis=1)
    width = max(int(mask.sum(axis=1).max(initial=0)), 1)
    mask, bits, gain = mask[:, :width], bits[:, :width], gain[:, :width]
    bits = np.where(mask, bits, 0.0)
    gain = np.where(mask, gain, 1.0)
    return mask, bits, gain


def _normalized_prices(c, act, best, worst, s: Scenario, rtol: float, max_iter: int):
    """Deadline-tight price per unit probability (lam / p) for each row."""
    T = s.deadline
    mask, bits, gain = _transfer_table(c, act, best, worst, s)
    m = mask.sum(axis=1)
    mu = np.zeros(m.size)
    converged = np.ones(m.size, dtype=bool)
    busy = np.flatnonzero(m >= 2)
    if busy.size == 0:
        return mu, converged
    mk, bk, gk = mask[busy], bits[busy], gain[busy]
    share = T / m[busy]
    guess = np.where(mk, price_for_duration(share[:, None], np.where(mk, bk, 1.0), gk, 1.0, s), np.nan)
    lo = np.nanmin(guess, axis=1)
    hi = np.nanmax(guess, axis=1)
    # lo == hi: every transfer reaches T/m at the same price
    hi = np.where(lo >= hi, lo * (1 + 1e-12), hi)

    def usage(mu_live, idx):
        mm = mk[idx]
        t = np.zeros(mm.shape)
        t[mm] = transfer_duration(bk[idx][mm], gk[idx][mm], 1.0,
                                  np.broadcast_to(mu_live[:, None], mm.shape)[mm], s)
        return t.sum(axis=1)

    root, ok = bisect_decreasing_batch(usage, np.full(busy.size, T), lo, hi, rtol * T,
                                       max_iter=max_iter, geometric=True)
    mu[busy] = root
    converged[busy] = ok
    return mu, converged


def deadline_tight_allocations(c, space: StateSpace, rtol: float = DEADLINE_RTOL, max_iter: int = 200):
    """Optimal durations for every state given caching ``c``.

    Each state gets its own price lam >= 0: zero if running every transfer for
    the full window already fits (at most one transfer), otherwise the root of
    ``sum of durations == T`` found by geometric bisection.  Durations depend on
    lam / p only, so the search runs once per distinct (requested tasks, best
    and worst channels) pattern.

    Returns ``(t_up, t_down, lam, converged)`` with (S, N), (S, N), (S,), (S,).
    """
    s = space.scenario
    c = np.asarray(c)
    act = space.active
    key = np.concatenate([np.where(act, space.best, 0.0), np.where(act, space.worst, 0.0)], axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    N = s.num_tasks
    u_act = uniq[:, :N] > 0
    u_best = np.where(u_act, uniq[:, :N], np.nan)
    u_worst = np.where(u_act, uniq[:, N:], np.nan)
    mu, ok = _normalized_prices(c, u_act, u_best, u_worst, s, rtol, max_iter)

    t_up = np.zeros(u_act.shape)
    t_down = np.zeros(u_act.shape)
    ui, ni = np.nonzero(u_act)
    t_up[ui, ni] = transfer_duration(s.upload_bits[ni], u_best[ui, ni], 1.0, mu[ui], s)
    t_down[ui, ni] = transfer_duration(s.result_bits[ni], u_worst[ui, ni], 1.0, mu[ui], s)
    t_up *= (1 - c)[None, :]
    return t_up[inverse], t_down[inverse], mu[inverse] * space.prob, ok[inverse]


def deadline_tight_alloc(c, state: SystemState, s: Scenario) -> tuple[StateAllocation, float]:
    """Single-state version of :func:`deadline_tight_allocations`."""
    space = StateSpace.from_states(s, [state])
    t_up, t_down, lam, _ = deadline_tight_allocations(c, space)
    return StateAllocation(t_up[0], t_down[0]), float(lam[0])


def used_time(c, t_up, t_down) -> np.ndarray:
    """Per-state total busy time ``sum((1 - c) t_up + t_down)``."""
    return ((1 - np.asarray(c))[None, :] * t_up + t_down).sum(axis=1)
