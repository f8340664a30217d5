"""Derivative-free reference minimizer for a single transfer's priced energy.

Works in long double and never touches the Lambert-W closed form.
"""
import numpy as np

LD = np.longdouble
INV_PHI = (np.sqrt(LD(5)) - 1) / 2


def priced_energy(t, p, bits, gain, lam, bandwidth, noise):
    t = np.asarray(t, dtype=LD)
    return (LD(p) * (t / LD(gain)) * LD(noise) * np.expm1(np.log(LD(2)) * LD(bits) / (LD(bandwidth) * t))
            + LD(lam) * t)


def golden_duration(p, bits, gain, lam, deadline, bandwidth, noise, iters=130):
    """Minimizer of p (t/gain) g(bits/t) + lam t over (0, deadline], elementwise."""
    p, bits, gain, lam = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (p, bits, gain, lam)))
    f = lambda t: priced_energy(t, p, bits, gain, lam, bandwidth, noise)
    a = np.full(p.shape, LD(1e-12))
    b = np.full(p.shape, LD(deadline))
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c, d = np.where(left, b - INV_PHI * (b - a), d), np.where(left, c, a + INV_PHI * (b - a))
        fc, fd = f(c), f(d)
    return ((a + b) / 2).astype(float)
