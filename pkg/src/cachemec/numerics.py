"""Principal-branch Lambert W and monotone bisection, vectorized over numpy arrays."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

INV_E = float(np.exp(-1.0))
_BRANCH_CLAMP = 1e-15
_MAX_HALLEY = 50
# cubic convergence: a step this small leaves the update at rounding level
_STEP_RTOL = 1e-12


class LambertDomainError(ValueError):
    pass


class BracketError(RuntimeError):
    pass


def _shifted_residual(s: np.ndarray) -> np.ndarray:
    """(s - 1) e^s + 1, summed as a series for small s to avoid cancellation."""
    out = s * np.exp(s) - np.expm1(s)
    small = s < 0.05
    if small.any():
        ss = s[small]
        acc = np.zeros_like(ss)
        term = ss.copy()            # s**k / k!
        for k in range(2, 12):
            term = term * ss / k
            acc += (k - 1) * term
        out[small] = acc
    return out


def _halley_offset(q: np.ndarray) -> np.ndarray:
    """Solve (s - 1) e^s + 1 = q for s >= 0, i.e. s = 1 + W((q - 1)/e).

    Working with the offset q = 1 + e*x keeps full relative precision in W + 1
    close to the branch point, where x itself has already cancelled.
    """
    p = np.sqrt(2.0 * q)
    s = p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    s = np.maximum(s, 0.0)
    live = q > 0
    for _ in range(_MAX_HALLEY):
        if not live.any():
            break
        sl, ql = s[live], q[live]
        es = np.exp(sl)
        F = _shifted_residual(sl) - ql
        F1 = sl * es
        F2 = (sl + 1.0) * es
        step = 2.0 * F * F1 / (2.0 * F1 * F1 - F * F2)
        s[live] = sl - step
        done = np.abs(step) <= _STEP_RTOL * np.maximum(sl, 1e-300)
        idx = np.flatnonzero(live)
        live[idx[done]] = False
    s[q == 0] = 0.0
    return s


def _halley_direct(x: np.ndarray) -> np.ndarray:
    """Solve w e^w = x directly; used away from the branch point (x >= -0.25)."""
    w = np.log1p(x)
    big = x > 3.0
    if big.any():
        l1 = np.log(x[big])
        l2 = np.log(l1)
        w[big] = l1 - l2 + l2 / l1
    live = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_HALLEY):
        if not live.any():
            break
        wl, xl = w[live], x[live]
        ew = np.exp(wl)
        F = wl * ew - xl
        w1 = wl + 1.0
        step = F / (ew * w1 - (wl + 2.0) * F / (2.0 * w1))
        w[live] = wl - step
        done = np.abs(step) <= _STEP_RTOL * (1.0 + np.abs(wl))
        idx = np.flatnonzero(live)
        live[idx[done]] = False
    return w


def lambert_w0(x):
    """Principal branch W0 for real x >= -1/e.

    Inputs within 1e-15 below -1/e are clamped to the branch point, where the
    result is exactly -1.  Scalars in, scalar out.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).copy()
    if np.any(np.isnan(arr)) or np.any(arr < -INV_E - _BRANCH_CLAMP):
        raise LambertDomainError("lambert_w0 is real only for x >= -1/e")
    arr = np.maximum(arr, -INV_E)
    out = np.empty_like(arr)
    near = arr < -0.25
    if near.any():
        q = np.maximum(np.e * arr[near] + 1.0, 0.0)
        out[near] = _halley_offset(q) - 1.0
    far = ~near
    if far.any():
        out[far] = _halley_direct(arr[far])
    out[arr == -INV_E] = -1.0
    out[np.isposinf(arr)] = np.inf
    return float(out[0]) if scalar else out


def lambert_w0_plus_one(q):
    """1 + W0((q - 1)/e) for q >= 0, accurate in relative terms as q -> 0."""
    arr = np.atleast_1d(np.asarray(q, dtype=float)).copy()
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise LambertDomainError("offset must be nonnegative")
    out = np.empty_like(arr)
    near = arr < 0.32
    if near.any():
        out[near] = _halley_offset(arr[near])
    far = ~near
    if far.any():
        out[far] = _halley_direct((arr[far] - 1.0) / np.e) + 1.0
    return out if np.ndim(q) else float(out[0])


@dataclass(frozen=True)
class BisectionSpec:
    lower: float
    upper: float
    tol: Optional[float] = None     # absolute residual; default 1e-9 * |target|
    max_iter: int = 200

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("bisection needs lower < upper")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class BisectionResult:
    root: float
    value: float
    converged: bool
    iterations: int


def bisect_decreasing(f: Callable[[float], float], target: float, spec: BisectionSpec,
                      max_doublings: int = 60) -> BisectionResult:
    """Find lam with f(lam) == target for a non-increasing f.

    The upper end is doubled (up to ``max_doublings`` times) until
    f(upper) <= target.  Stops once the residual is within tolerance; after
    ``max_iter`` steps the midpoint is returned with ``converged=False``.
    """
    tol = spec.tol if spec.tol is not None else 1e-9 * max(abs(target), 1e-300)
    lo, hi = spec.lower, spec.upper
    f_lo = f(lo)
    if f_lo < target - tol:
        raise BracketError(f"f(lower)={f_lo!r} is already below target {target!r}")
    if abs(f_lo - target) <= tol:
        return BisectionResult(lo, f_lo, True, 0)
    f_hi = f(hi)
    width = hi - lo
    for _ in range(max_doublings):
        if f_hi <= target:
            break
        lo, f_lo = hi, f_hi
        width *= 2.0
        hi = lo + width
        f_hi = f(hi)
    else:
        raise BracketError(f"no crossing of target {target!r} below upper bound {hi!r}")
    if abs(f_hi - target) <= tol:
        return BisectionResult(hi, f_hi, True, 0)
    mid, f_mid = hi, f_hi
    for it in range(1, spec.max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid - target) <= tol:
            return BisectionResult(mid, f_mid, True, it)
        if f_mid > target:
            lo = mid
        else:
            hi = mid
    return BisectionResult(mid, f_mid, False, spec.max_iter)


def bisect_decreasing_batch(f: Callable[[np.ndarray, np.ndarray], np.ndarray], target: np.ndarray,
                            lower: np.ndarray, upper: np.ndarray, tol: np.ndarray,
                            max_iter: int = 200, geometric: bool = False):
    """Elementwise bisection for many independent non-increasing functions.

    ``f(lam, idx)`` evaluates the functions selected by integer array ``idx``
    at ``lam``.  Brackets must already satisfy f(lower) >= target >= f(upper).
    With ``geometric`` the split point is the geometric mean (positive
    brackets spanning many decades).  Returns ``(root, converged)``; entries
    that never reach the tolerance return their upper end, where
    f <= target.
    """
    lo = np.array(lower, dtype=float)
    hi = np.array(upper, dtype=float)
    target = np.asarray(target, dtype=float)
    tol = np.broadcast_to(np.asarray(tol, dtype=float), lo.shape)
    root = hi.copy()
    converged = np.zeros(lo.shape, dtype=bool)
    live = np.arange(lo.size)
    for _ in range(max_iter):
        if live.size == 0:
            break
        a, b = lo[live], hi[live]
        mid = np.sqrt(a * b) if geometric else 0.5 * (a + b)
        val = f(mid, live)
        err = val - target[live]
        ok = np.abs(err) <= tol[live]
        root[live[ok]] = mid[ok]
        converged[live[ok]] = True
        above = err > 0
        lo[live[above]] = mid[above]
        hi[live[~above]] = mid[~above]
        stuck = (mid == a) | (mid == b)
        live = live[~ok & ~stuck]
    root[~converged] = hi[~converged]
    return root, converged
