"""Independent reference implementations used only by the tests.

Trajectories are stepped pulse by pulse in exact rationals, and phase
integrals use scipy's adaptive quadrature on the full branch positions.
Nothing here imports the package's trajectory or quadrature code.
"""
from fractions import Fraction

import numpy as np
from scipy.integrate import quad


def step_branch(pulses, branch, r0, v0, g, hbar, mass):
    """Return [(t_l, r, v_before, v_after)] at each pulse for one branch, in floats.

    Positions are propagated exactly in rationals between pulses.
    """
    F = Fraction
    r = [F(x) for x in r0]
    v = [F(x) for x in v0]
    gg = [F(x) for x in g]
    t_prev = F(0)
    out = []
    for p in pulses:
        t = F(p.time)
        dt = t - t_prev
        r = [ri + vi * dt - gi * dt * dt / 2 for ri, vi, gi in zip(r, v, gg)]
        v = [vi - gi * dt for vi, gi in zip(v, gg)]
        before = [float(x) for x in v]
        v = [vi + F(x) for vi, x in zip(v, hbar * p.k_branch[branch - 1] / mass)]
        out.append((float(t), np.array([float(x) for x in r]), np.array(before),
                    np.array([float(x) for x in v])))
        t_prev = t
    return out


def position(pulses, branch, r0, v0, g, hbar, mass, t):
    """Branch position and velocity at time t (kicks at t included)."""
    r, v, t_prev = np.array(r0, float), np.array(v0, float), 0.0
    for p in pulses:
        if p.time > t:
            break
        dt = p.time - t_prev
        r = r + v * dt - 0.5 * g * dt**2
        v = v - g * dt + hbar * p.k_branch[branch - 1] / mass
        t_prev = p.time
    dt = t - t_prev
    return r + v * dt - 0.5 * g * dt**2, v - g * dt


def lam(pulses, branch, t):
    val = -1
    for p in pulses:
        if p.time <= t:
            val += 2 * p.transitions[branch - 1]
    return val


def phase_terms(seq, species, ic, pert):
    """Smooth perturbation phases by scipy quad between pulse times."""
    const = seq.constants
    g, c2, hbar, m = const.g, const.c**2, const.hbar, seq.mass
    Om = species.omega
    pulses = seq.pulses

    def h(t):
        out = np.zeros(5)
        for b, sign in ((1, 1.0), (2, -1.0)):
            r, v = position(pulses, b, ic.r0, ic.v0, g, hbar, m, t)
            lm = lam(pulses, b, t)
            cpl = lm * hbar * Om / (2 * c2)
            H = np.array([
                -cpl * (v @ v) / 2,
                cpl * (1 + species.alpha) * (g @ r),
                cpl * (pert.a_state @ r),
                0.5 * m * r @ pert.gamma @ r,
                -m * pert.omega_rot @ np.cross(r, v),
            ])
            out -= sign * H / hbar
        return out

    breaks = sorted(set([0.0, seq.total_time] + [p.time for p in pulses]))
    total = np.zeros(5)
    for a, b in zip(breaks[:-1], breaks[1:]):
        mid = lambda t, i: h(t)[i]
        for i in range(5):
            total[i] += quad(mid, a, b, args=(i,), epsabs=0, epsrel=1e-12, limit=200)[0]
    keys = ("kinetic_coupling", "gravitational_coupling", "state_dependent_acceleration",
            "gravity_gradient", "rotation")
    return dict(zip(keys, total))


def clock_phase_by_proper_time(omega, r0, v0, v2, g, c, T, alpha=0.0):
    """-Omega(tau - T) style integral of the clock phase along free fall, with <v^2> spread."""
    def integrand(t):
        r = r0 + v0 * t - 0.5 * g * t**2
        v = v0 - g * t
        v2t = v2 - v0 @ v0 + v @ v
        return (1 + alpha) * (g @ r) / c**2 - v2t / (2 * c**2)
    inner = quad(integrand, 0, T, epsabs=0, epsrel=1e-13)[0]
    return -omega * inner
