"""Unperturbed branch trajectories, internal-state functions and light delays.

Each branch position is split as ``r(t) = R(t) + d(t)``: ``R`` is the common
free fall from the initial state and ``d`` the piecewise-linear displacement
produced by the recoil kicks. Keeping ``d`` separate lets the phase engine
form branch differences without cancelling two large positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .model import InitialState, PulseSequence


def _check_branch(branch: int):
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")


def free_fall(ic: InitialState, g: np.ndarray, t):
    """Common trajectory ``R(t)`` and velocity; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)[..., None]
    R = ic.r0 + ic.v0 * t - 0.5 * g * t**2
    V = ic.v0 - g * t
    return R, V


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    d_start: np.ndarray
    u: np.ndarray
    lam: int


def recoil_segments(seq: PulseSequence, branch: int) -> List[Segment]:
    """Half-open segments [t_start, t_end) with the recoil state valid inside.

    Kicks apply at the pulse time itself. A pulse at ``total_time`` produces no
    segment; its kick only shows up in values evaluated at ``t = T``.
    """
    _check_branch(branch)
    b = branch - 1
    times = seq.times
    bounds = sorted(set([0.0, seq.total_time] + list(times)))
    segs = []
    d = np.zeros(3)
    u = np.zeros(3)
    lam = -1
    t_prev = 0.0
    ip = 0
    for a, e in zip(bounds[:-1], bounds[1:]):
        d = d + u * (a - t_prev)
        t_prev = a
        while ip < len(seq.pulses) and seq.pulses[ip].time <= a:
            p = seq.pulses[ip]
            u = u + seq.constants.hbar * p.k_branch[b] / seq.mass
            lam += 2 * p.transitions[b]
            ip += 1
        segs.append(Segment(a, e, d.copy(), u.copy(), lam))
    return segs


def recoil_state(seq: PulseSequence, branch: int, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Recoil displacement and velocity at time ``t`` (kicks at ``t`` included)."""
    _check_branch(branch)
    b = branch - 1
    d = np.zeros(3)
    u = np.zeros(3)
    t_prev = 0.0
    for p in seq.pulses:
        if p.time > t:
            break
        d = d + u * (p.time - t_prev)
        t_prev = p.time
        u = u + seq.constants.hbar * p.k_branch[b] / seq.mass
    d = d + u * (t - t_prev)
    return d, u


def evaluate_trajectory(seq: PulseSequence, ic: InitialState, branch: int, t: float):
    """Position and velocity of ``branch`` at time ``t`` in [0, T]."""
    _check_branch(branch)
    if not 0.0 <= t <= seq.total_time:
        raise ValueError(f"t={t} outside [0, {seq.total_time}]")
    R, V = free_fall(ic, seq.constants.g, t)
    d, u = recoil_state(seq, branch, t)
    return R + d, V + u


@dataclass(frozen=True)
class BranchTrajectory:
    branch: int
    segments: Tuple[Tuple[float, np.ndarray, np.ndarray], ...]  # (t_start, r_start, v_start)


def branch_trajectory(seq: PulseSequence, ic: InitialState, branch: int) -> BranchTrajectory:
    segs = []
    for s in recoil_segments(seq, branch):
        R, V = free_fall(ic, seq.constants.g, s.t_start)
        segs.append((s.t_start, R + s.d_start, V + s.u))
    return BranchTrajectory(branch, tuple(segs))


@dataclass(frozen=True)
class LambdaFunction:
    """Step function: +1 while the unperturbed branch is excited, -1 in ground.

    ``steps`` holds (time, value) pairs with exact rational times; the value
    holds from that time on. Integrals are summed exactly.
    """

    branch: int
    steps: Tuple[Tuple[Fraction, int], ...]

    def __call__(self, t: float) -> int:
        val = None
        for time, v in self.steps:
            if time <= t:
                val = v
        if val is None:
            raise ValueError("lambda is undefined before the first pulse")
        return val

    def integral(self, t0: float, t1: float) -> float:
        t0, t1 = Fraction(t0), Fraction(t1)
        total = Fraction(0)
        for i, (time, v) in enumerate(self.steps):
            a = max(time, t0)
            b = min(self.steps[i + 1][0], t1) if i + 1 < len(self.steps) else t1
            if b > a:
                total += v * (b - a)
        return float(total)


def lambda_of(seq: PulseSequence, branch: int) -> LambdaFunction:
    _check_branch(branch)
    b = branch - 1
    lam = -1
    steps = []
    for p in seq.pulses:
        lam += 2 * p.transitions[b]
        if lam not in (-1, 1):
            raise ValueError(f"pulse at t={p.time} drives an impossible transition on branch {branch}")
        if not steps or steps[-1][1] != lam:
            steps.append((p.exact_time, lam))
    return LambdaFunction(branch, tuple(steps))


def time_delays(seq: PulseSequence, ic: InitialState) -> np.ndarray:
    """Light travel times ``k.r(t_l) / (c|k|)`` from a laser at the origin.

    Returns an array of shape (n_pulses, 2), evaluated on the unperturbed
    trajectories. All zeros when no pulse transfers momentum.
    """
    out = np.zeros((len(seq.pulses), 2))
    k_hat = seq.k_hat()
    if k_hat is None:
        return out
    c = seq.constants.c
    for i, p in enumerate(seq.pulses):
        for b in (1, 2):
            r, _ = evaluate_trajectory(seq, ic, b, p.time)
            out[i, b - 1] = float(k_hat @ r) / c
    return out


def closure_check(seq: PulseSequence, ic: InitialState):
    """(r1 - r2, v1 - v2) at the end of the sequence, all kicks applied."""
    d1, u1 = recoil_state(seq, 1, seq.total_time)
    d2, u2 = recoil_state(seq, 2, seq.total_time)
    return d1 - d2, u1 - u2
