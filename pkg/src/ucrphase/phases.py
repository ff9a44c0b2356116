"""Interferometer phases: closed forms, perturbative quadrature and signal.

Sign convention: the phase difference between branches is
``-(1/hbar) * integral (H1 - H2) dt`` evaluated along the unperturbed
classical trajectories, with branch 1 the one that is excited after the
first pi/2 pulse.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Optional

import numpy as np

from .model import (DEFAULT_CONSTANTS, NO_PERTURBATION, Geometry, InitialState,
                    PerturbationSpec, PhysicalConstants, PulseSequence, Species)
from .quadrature import integrate_checked
from .trajectories import free_fall, lambda_of, recoil_segments, recoil_state


@dataclass(frozen=True)
class PhaseBreakdown:
    """One entry per perturbation-table row, plus laser and wave-packet phases (rad).

    ``internal_energy`` already contains the laser-frequency part of the
    unperturbed phase, so it vanishes on resonance instead of being the
    difference of two numbers of order ``Omega*T``.
    """

    internal_energy: float = 0.0
    kinetic_coupling: float = 0.0
    gravitational_coupling: float = 0.0
    finite_speed_of_light: float = 0.0
    state_dependent_acceleration: float = 0.0
    gravity_gradient: float = 0.0
    rotation: float = 0.0
    laser_phase_phi0: float = 0.0
    wavepacket: float = 0.0

    @property
    def total(self) -> float:
        return float(sum(getattr(self, f.name) for f in fields(self)))

    def as_dict(self) -> dict:
        d = {f.name: float(getattr(self, f.name)) for f in fields(self)}
        d["total"] = self.total
        return d


@dataclass(frozen=True)
class Signal:
    phase: float
    contrast: float
    intensity: float


def signal(phase: float, contrast: float = 1.0) -> Signal:
    if not 0.0 <= contrast <= 1.0:
        raise ValueError(f"contrast must lie in [0, 1], got {contrast}")
    return Signal(float(phase), float(contrast), 0.5 * (1.0 + contrast * np.cos(phase)))


def proper_time_deficit(g, T: float, const: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """``g^2 T^3 / (3 c^2)``; ``g`` may be a scalar or a vector."""
    if T < 0:
        raise ValueError("T must be non-negative")
    g2 = float(np.dot(g, g)) if np.ndim(g) else float(g) ** 2
    return g2 * T**3 / (3.0 * const.c**2)


def clock_phase(species: Species, ic: InitialState, T: float,
                const: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Closed-form phase of a freely falling Ramsey clock driven on resonance."""
    c2 = const.c**2
    g = const.g
    dtau = proper_time_deficit(g, T, const)
    # braces multiplied through by T so that T = 0 is allowed
    braces_T = ((1.0 + 0.5 * species.alpha) * (g @ (2 * ic.r0 + ic.v0 * T) * T / c2 - dtau)
                - g @ ic.r0 * T / c2 - ic.v2_moment * T / (2 * c2))
    return float(-species.omega * braces_T)


class TableRow(enum.Enum):
    INTERNAL_ENERGY = "internal_energy"
    KINETIC = "kinetic_coupling"
    GRAVITATIONAL = "gravitational_coupling"
    FINITE_SPEED_OF_LIGHT = "finite_speed_of_light"
    STATE_DEPENDENT_ACCELERATION = "state_dependent_acceleration"
    GRAVITY_GRADIENT = "gravity_gradient"
    ROTATION = "rotation"


def midpoint_final_position(species: Species, ic: InitialState, T: float,
                            const: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    vr = species.recoil_velocity(const)
    return ic.r0 + ic.v0 * T + 0.5 * vr * T - 0.5 * const.g * T**2


def table_row(row: TableRow, species: Species, ic: InitialState, T: float,
              pert: Optional[PerturbationSpec] = None,
              const: PhysicalConstants = DEFAULT_CONSTANTS,
              geometry: Geometry = Geometry.BUTTERFLY) -> float:
    """Closed-form butterfly phase of a single perturbation-table row."""
    if geometry is not Geometry.BUTTERFLY:
        raise ValueError(f"table rows are derived for the butterfly geometry, not {geometry.value}")
    row = TableRow(row)
    pert = NO_PERTURBATION if pert is None else pert
    g, c2, Om = const.g, const.c**2, species.omega
    k = species.wavevector(const)
    vr = species.recoil_velocity(const)
    if row is TableRow.INTERNAL_ENERGY:
        return 0.0
    if row is TableRow.KINETIC:
        return Om * T**3 * (g @ g) / (32 * c2)
    if row is TableRow.GRAVITATIONAL:
        return (1 + species.alpha) * Om * T**3 * (g @ g) / (32 * c2)
    if row is TableRow.FINITE_SPEED_OF_LIGHT:
        kn = np.linalg.norm(k)
        if not pert.finite_speed_of_light or kn == 0:
            return 0.0
        wk = species.omega_k(const)
        gk = (k @ g) / kn
        rT = midpoint_final_position(species, ic, T, const)
        return float(-3 * wk * T**3 * gk**2 / (32 * c2) + wk * (vr @ (ic.r0 + rT)) / (2 * c2))
    if row is TableRow.STATE_DEPENDENT_ACCELERATION:
        return float(Om * T**3 * (g @ pert.a_state) / (32 * c2))
    if row is TableRow.GRAVITY_GRADIENT:
        return float(k @ pert.gamma @ (ic.v0 + 0.5 * vr - 0.5 * g * T) * T**3 / 32)
    if row is TableRow.ROTATION:
        return float(g @ np.cross(pert.omega_rot, k) * T**3 / 16)
    raise ValueError(row)


def butterfly_phase_closed_form(species: Species, ic: InitialState, T: float,
                                pert: Optional[PerturbationSpec] = None,
                                finite_speed_of_light: bool = True,
                                const: PhysicalConstants = DEFAULT_CONSTANTS) -> PhaseBreakdown:
    """Butterfly phase from the table rows.

    Without ``pert`` this is the UCR term plus the light-propagation terms.
    With ``pert`` the acceleration, gradient and rotation rows are added and
    ``pert.finite_speed_of_light`` takes over the light-propagation switch.
    """
    if pert is None:
        pert = PerturbationSpec(finite_speed_of_light=finite_speed_of_light)
    vals = {r.value: table_row(r, species, ic, T, pert, const) for r in TableRow}
    return PhaseBreakdown(**vals)


def _exact_laser_phase(seq: PulseSequence, ic: InitialState) -> float:
    """Sum of ``k.r`` at the pulses, branch 1 minus branch 2, in exact rationals.

    Pulse times enter through ``Pulse.exact_time``. For closed symmetric
    sequences the sum then cancels identically instead of leaving rounding of
    order ``|k| |r| eps``.
    """
    F = Fraction
    g = [F(x) for x in seq.constants.g]
    r0 = [F(x) for x in ic.r0]
    v0 = [F(x) for x in ic.v0]
    total = F(0)
    for b, sign in ((0, 1), (1, -1)):
        d = [F(0)] * 3
        u = [F(0)] * 3
        t_prev = F(0)
        for p in seq.pulses:
            t = p.exact_time
            d = [di + ui * (t - t_prev) for di, ui in zip(d, u)]
            t_prev = t
            k = [F(x) for x in p.k_branch[b]]
            if any(k):
                r = [r0i + v0i * t - gi * t * t / 2 + di for r0i, v0i, gi, di in zip(r0, v0, g, d)]
                total += sign * sum(ki * ri for ki, ri in zip(k, r))
            kick = seq.constants.hbar * p.k_branch[b] / seq.mass
            u = [ui + F(x) for ui, x in zip(u, kick)]
    return float(total)


def _internal_energy(seq: PulseSequence, omega: float) -> float:
    """Constant internal-energy coupling plus the laser frequency ramp.

    Equals ``-Omega*T*n + sum_l (s1_l - s2_l)(Omega - omega_l) t_l`` where ``n``
    counts the net transitions of branch 1 minus branch 2 (zero when both
    branches end in the same internal state).
    """
    n = sum(p.transitions[0] - p.transitions[1] for p in seq.pulses)
    val = -omega * seq.total_time * n
    for p in seq.pulses:
        ds = p.transitions[0] - p.transitions[1]
        if ds:
            val += ds * (omega - p.omega_l) * p.time
    return float(val)


def _finite_speed_of_light(seq: PulseSequence, ic: InitialState, omega: float) -> float:
    """Discrete pulse sums, first order in the light delays.

    Each pulse contributes ``dt * (k.v - omega_l)`` for the laser phase and
    ``(Omega/2) * jump(lambda) * dt`` because the internal state flips ``dt``
    late. The velocity is taken on the side of the pulse that lies inside the
    sequence (after the kick for the first pulse, before it for the last) and
    as the mean of both sides for interior pulses.
    """
    k_hat = seq.k_hat()
    if k_hat is None:
        return 0.0
    c = seq.constants.c
    g = seq.constants.g
    n = len(seq.pulses)
    total = 0.0
    for b, sign in ((1, 1.0), (2, -1.0)):
        for i, p in enumerate(seq.pulses):
            s = p.transitions[b - 1]
            if s == 0:
                continue
            R, V = free_fall(ic, g, p.time)
            d, u_after = recoil_state(seq, b, p.time)
            u_before = u_after - seq.constants.hbar * p.k_branch[b - 1] / seq.mass
            if i == 0:
                u = u_after
            elif i == n - 1:
                u = u_before
            else:
                u = 0.5 * (u_before + u_after)
            dt = float(k_hat @ (R + d)) / c
            total += sign * dt * (float(p.k_branch[b - 1] @ (V + u)) + s * (omega - p.omega_l))
    return total


QUADRATURE_TERMS = ("kinetic_coupling", "gravitational_coupling", "state_dependent_acceleration",
                    "gravity_gradient", "rotation")


def phase_quadrature(seq: PulseSequence, species: Species, ic: InitialState,
                     pert: Optional[PerturbationSpec] = None, *,
                     include_wavepacket: bool = False, order: int = 32, rtol: float = 1e-10,
                     max_order: int = 64, return_scale: bool = False):
    """Perturbative phase by quadrature of the branch Hamiltonian difference.

    Smooth terms are integrated with piecewise Gauss-Legendre rules split at
    the pulse times; pulse-localized terms are summed exactly. Raises
    QuadratureError if a term fails the order-doubling check.
    """
    pert = NO_PERTURBATION if pert is None else pert
    const = seq.constants
    c2 = const.c**2
    g = const.g
    Om = species.omega
    m_over_hbar = seq.mass / const.hbar
    seg1 = recoil_segments(seq, 1)
    seg2 = recoil_segments(seq, 2)
    breaks = [s.t_start for s in seg1] + [seg1[-1].t_end]
    a = pert.a_state
    gam = pert.gamma
    w = pert.omega_rot
    coupling = Om / (2 * c2)

    def integrand(t, i):
        s1, s2 = seg1[i], seg2[i]
        R, V = free_fall(ic, g, t)
        d1 = s1.d_start + np.outer(t - s1.t_start, s1.u)
        d2 = s2.d_start + np.outer(t - s2.t_start, s2.u)
        r1, r2 = R + d1, R + d2
        v1, v2 = V + s1.u, V + s2.u
        l1, l2 = s1.lam, s2.lam
        kin = 0.5 * coupling * (l1 * np.einsum("ij,ij->i", v1, v1) - l2 * np.einsum("ij,ij->i", v2, v2))
        grav = -coupling * (1 + species.alpha) * (l1 * (r1 @ g) - l2 * (r2 @ g))
        acc = -coupling * (l1 * (r1 @ a) - l2 * (r2 @ a))
        D = d1 - d2
        gg = -0.5 * m_over_hbar * np.einsum("ij,ij->i", D @ gam, 2 * R + d1 + d2)
        lxv = (np.cross(R, s1.u - s2.u) + np.cross(D, V)
               + np.cross(d1, np.broadcast_to(s1.u, d1.shape))
               - np.cross(d2, np.broadcast_to(s2.u, d2.shape)))
        rot = m_over_hbar * (lxv @ w)
        return np.vstack([kin, grav, acc, gg, rot])

    vals, scale = integrate_checked(integrand, breaks, QUADRATURE_TERMS, order=order, rtol=rtol,
                                    max_order=max_order)
    parts = dict(zip(QUADRATURE_TERMS, (float(v) for v in vals)))
    parts["internal_energy"] = _internal_energy(seq, Om)
    parts["laser_phase_phi0"] = _exact_laser_phase(seq, ic)
    if pert.finite_speed_of_light:
        parts["finite_speed_of_light"] = _finite_speed_of_light(seq, ic, Om)
    if include_wavepacket:
        parts["wavepacket"] = wavepacket_phase(seq, species, ic)
    out = PhaseBreakdown(**parts)
    if return_scale:
        return out, dict(zip(QUADRATURE_TERMS, (float(s) for s in scale)))
    return out


def wavepacket_phase(seq: PulseSequence, species: Species, ic: InitialState) -> float:
    """Wave-packet deformation phase from the momentum-dependent coupling.

    Only the kinetic term depends on the internal state, so the loop integral
    reduces to ``Omega * var(v0) / (4 c^2) * integral (lambda1 - lambda2) dt``.
    """
    T = seq.total_time
    lam_diff = lambda_of(seq, 1).integral(0.0, T) - lambda_of(seq, 2).integral(0.0, T)
    return float(species.omega * ic.velocity_variance * lam_diff / (4 * seq.constants.c**2))
