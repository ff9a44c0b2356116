"""Domain types, physical constants and pulse-sequence constructors.

Conventions: SI units throughout, angles in radians. The gravity vector ``g``
enters the potential as ``m g.r``, so a free particle follows
``r(t) = r0 + v0 t - g t^2 / 2``. With the default ``g = (0, 0, 9.81)`` atoms
fall towards -z.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi


def _vec3(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {np.shape(x)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PhysicalConstants:
    c: float = 2.998e8
    hbar: float = 1.054571817e-34
    amu: float = 1.66053906660e-27
    g: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 9.81]))

    def __post_init__(self):
        for name in ("c", "hbar", "amu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "g", _vec3(self.g, "g"))

    @property
    def g_norm(self) -> float:
        return float(np.linalg.norm(self.g))


DEFAULT_CONSTANTS = PhysicalConstants()


class Transition(enum.Enum):
    RECOILLESS = "recoilless"
    SINGLE_PHOTON = "single_photon"
    RAMAN_EFFECTIVE = "raman"


@dataclass(frozen=True, eq=False)
class Species:
    """Atomic species driven on its clock transition.

    ``mass`` is the mean mass of the two internal states; the mass defect
    ``hbar*omega/c^2`` is not folded in, it enters through the perturbation.
    ``k_eff`` is only read for ``Transition.RAMAN_EFFECTIVE``.
    """

    name: str
    mass: float
    omega: float
    alpha: float = 0.0
    transition: Transition = Transition.RECOILLESS
    k_direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    k_eff: Optional[float] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not isinstance(self.transition, Transition):
            object.__setattr__(self, "transition", Transition(self.transition))
        kd = _vec3(self.k_direction, "k_direction")
        n = np.linalg.norm(kd)
        if n == 0:
            raise ValueError("k_direction must be nonzero")
        object.__setattr__(self, "k_direction", _frozen(kd / n))
        if self.transition is Transition.RAMAN_EFFECTIVE:
            if self.k_eff is None or not self.k_eff > 0:
                raise ValueError("Raman-effective transition needs a positive k_eff")

    def k_magnitude(self, const: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
        if self.transition is Transition.RECOILLESS:
            return 0.0
        if self.transition is Transition.SINGLE_PHOTON:
            return self.omega / const.c
        return float(self.k_eff)

    def wavevector(self, const: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
        return _frozen(self.k_magnitude(const) * self.k_direction)

    def omega_k(self, const: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
        """Light frequency ``c|k|`` associated with the momentum transfer."""
        return const.c * self.k_magnitude(const)

    def recoil_velocity(self, const: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
        return _frozen(const.hbar * self.wavevector(const) / self.mass)

    def with_alpha(self, alpha: float) -> "Species":
        return Species(self.name, self.mass, self.omega, alpha, self.transition,
                       self.k_direction, self.k_eff)


class PulseKind(enum.Enum):
    BEAM_SPLITTER = "pi/2"
    MIRROR = "pi"


class Geometry(enum.Enum):
    RAMSEY_CLOCK = "ramsey"
    BUTTERFLY = "butterfly"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Pulse:
    """Instantaneous light pulse.

    ``transitions[s]`` is +1 for a ground-to-excited transition on branch
    ``s + 1``, -1 for excited-to-ground and 0 if that branch is left alone.
    The signed wavevector and laser frequency seen by branch ``s + 1`` are
    ``transitions[s]`` times the species wavevector and ``omega_l``.
    ``exact_time`` is the rational pulse time behind the float ``time``
    (``T/4`` rather than the rounded ``0.25*T``); it defaults to ``time``.
    """

    time: float
    kind: PulseKind
    k_branch: Tuple[np.ndarray, np.ndarray]
    omega_l: float
    transitions: Tuple[int, int]
    exact_time: Optional[Fraction] = None

    def __post_init__(self):
        if not self.time >= 0:
            raise ValueError("pulse time must be non-negative")
        if self.exact_time is None:
            object.__setattr__(self, "exact_time", Fraction(self.time))
        elif float(self.exact_time) != self.time:
            raise ValueError("exact_time does not round to time")
        if len(self.k_branch) != 2 or len(self.transitions) != 2:
            raise ValueError("a pulse carries data for exactly two branches")
        for s in self.transitions:
            if s not in (-1, 0, 1):
                raise ValueError("transition signs must be -1, 0 or +1")
        object.__setattr__(self, "k_branch",
                           tuple(_vec3(k, "k_branch") for k in self.k_branch))
        object.__setattr__(self, "transitions", tuple(int(s) for s in self.transitions))

    def omega_branch(self, branch: int) -> float:
        return self.transitions[branch - 1] * self.omega_l


@dataclass(frozen=True, eq=False)
class PulseSequence:
    """Ordered pulses plus what is needed to propagate the branches.

    ``mass`` and ``constants`` fix the recoil velocity ``hbar k / m`` and the
    gravity vector used by the trajectory code.
    """

    pulses: Tuple[Pulse, ...]
    total_time: float
    geometry_tag: Geometry
    mass: float
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if not pulses:
            raise ValueError("empty pulse sequence")
        times = [p.time for p in pulses]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("pulse times must be strictly increasing")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")
        if times[-1] > self.total_time:
            raise ValueError("pulse after total_time")
        object.__setattr__(self, "pulses", pulses)

    @property
    def times(self) -> np.ndarray:
        return np.array([p.time for p in self.pulses])

    def k_hat(self) -> Optional[np.ndarray]:
        """Common propagation direction, or None if no pulse transfers momentum."""
        for p in self.pulses:
            for k in p.k_branch:
                n = np.linalg.norm(k)
                if n > 0:
                    return k / n
        return None

    def k_magnitude(self) -> float:
        return max(float(np.linalg.norm(k)) for p in self.pulses for k in p.k_branch)

    def final_states(self) -> Tuple[int, int]:
        """lambda after the last pulse for both branches (atom enters in ground)."""
        out = []
        for b in (0, 1):
            lam = -1
            for p in self.pulses:
                lam += 2 * p.transitions[b]
            out.append(lam)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class InitialState:
    """Classical launch conditions and the velocity second moment ``<v0^2>``.

    ``v2_moment`` defaults to ``|v0|^2`` (a point particle).
    """

    r0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v2_moment: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "r0", _vec3(self.r0, "r0"))
        object.__setattr__(self, "v0", _vec3(self.v0, "v0"))
        v2 = float(self.v0 @ self.v0)
        if self.v2_moment is None:
            object.__setattr__(self, "v2_moment", v2)
        elif self.v2_moment < v2 * (1 - 1e-12) - 1e-300:
            raise ValueError("v2_moment must be >= |v0|^2 (velocity variance is non-negative)")
        else:
            object.__setattr__(self, "v2_moment", float(self.v2_moment))

    @property
    def velocity_variance(self) -> float:
        return max(self.v2_moment - float(self.v0 @ self.v0), 0.0)


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    a_state: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gamma: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    omega_rot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    finite_speed_of_light: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a_state", _vec3(self.a_state, "a_state"))
        object.__setattr__(self, "omega_rot", _vec3(self.omega_rot, "omega_rot"))
        gam = np.array(self.gamma, dtype=float)
        if gam.shape != (3, 3):
            raise ValueError("gamma must be a 3x3 matrix")
        scale = max(float(np.max(np.abs(gam))), 1e-300)
        if np.max(np.abs(gam - gam.T)) > 1e-12 * scale:
            raise ValueError("gamma must be symmetric")
        object.__setattr__(self, "gamma", _frozen(gam))
        object.__setattr__(self, "finite_speed_of_light", bool(self.finite_speed_of_light))


NO_PERTURBATION = PerturbationSpec()


def _check_T(T: float):
    if not (np.isfinite(T) and T > 0):
        raise ValueError(f"T must be positive, got {T}")


def _pulse(species, const, time, kind, transitions) -> Pulse:
    k = species.wavevector(const)
    exact = Fraction(time)
    return Pulse(float(exact), kind, tuple(s * k for s in transitions), species.omega, transitions,
                 exact)


def make_ramsey(species: Species, T: float,
                const: PhysicalConstants = DEFAULT_CONSTANTS) -> PulseSequence:
    """Two pi/2 pulses at 0 and T; recoil is neglected for clocks."""
    _check_T(T)
    zero = np.zeros(3)
    pulses = (
        Pulse(0.0, PulseKind.BEAM_SPLITTER, (zero, zero), species.omega, (1, 0)),
        Pulse(float(T), PulseKind.BEAM_SPLITTER, (zero, zero), species.omega, (0, 1)),
    )
    return PulseSequence(pulses, float(T), Geometry.RAMSEY_CLOCK, species.mass, const)


# branch-1 / branch-2 transition signs of the pi/2 - pi - pi - pi/2 sequence
BUTTERFLY_TRANSITIONS = ((1, 0), (-1, 1), (1, -1), (0, 1))


def make_butterfly(species: Species, T: float,
                   const: PhysicalConstants = DEFAULT_CONSTANTS) -> PulseSequence:
    """Figure-eight sequence: pi/2 at 0, pi at T/4 and 3T/4, pi/2 at T."""
    _check_T(T)
    T = float(T)
    TF = Fraction(T)
    times = (Fraction(0), TF / 4, 3 * TF / 4, TF)
    kinds = (PulseKind.BEAM_SPLITTER, PulseKind.MIRROR, PulseKind.MIRROR, PulseKind.BEAM_SPLITTER)
    pulses = tuple(_pulse(species, const, t, kind, tr)
                   for t, kind, tr in zip(times, kinds, BUTTERFLY_TRANSITIONS))
    return PulseSequence(pulses, T, Geometry.BUTTERFLY, species.mass, const)


def make_mach_zehnder(species: Species, T: float,
                      const: PhysicalConstants = DEFAULT_CONSTANTS) -> PulseSequence:
    """pi/2 - pi - pi/2 with an internal transition on both branches at every pulse after the first."""
    _check_T(T)
    T = float(T)
    TF = Fraction(T)
    spec = ((Fraction(0), PulseKind.BEAM_SPLITTER, (1, 0)),
            (TF / 2, PulseKind.MIRROR, (-1, 1)),
            (TF, PulseKind.BEAM_SPLITTER, (1, -1)))
    pulses = tuple(_pulse(species, const, t, kind, tr) for t, kind, tr in spec)
    return PulseSequence(pulses, T, Geometry.CUSTOM, species.mass, const)


def make_custom(species: Species, T: float, times: Sequence[float],
                transitions: Sequence[Tuple[int, int]],
                kinds: Optional[Sequence[PulseKind]] = None,
                const: PhysicalConstants = DEFAULT_CONSTANTS) -> PulseSequence:
    _check_T(T)
    if len(times) != len(transitions):
        raise ValueError("times and transitions differ in length")
    if kinds is None:
        kinds = [PulseKind.MIRROR if 0 not in tr else PulseKind.BEAM_SPLITTER for tr in transitions]
    pulses = tuple(_pulse(species, const, t, kind, tuple(tr))
                   for t, kind, tr in zip(times, kinds, transitions))
    return PulseSequence(pulses, float(T), Geometry.CUSTOM, species.mass, const)


# Isotope masses in u; clock frequencies rounded as in the projections (Hz).
ISOTOPES = {
    "Yb174": (173.9388621, 522e12),
    "Yb176": (175.9425717, 522e12),
    "Sr87": (86.9088775, 430e12),
    "Sr88": (87.9056121, 430e12),
}


def make_species(name: str, transition: Transition = Transition.RECOILLESS, alpha: float = 0.0,
                 k_direction=(0.0, 0.0, 1.0), k_eff: Optional[float] = None,
                 const: PhysicalConstants = DEFAULT_CONSTANTS) -> Species:
    """Species from the built-in isotope table (``Yb174``, ``Yb176``, ``Sr87``, ``Sr88``)."""
    try:
        mass_u, freq = ISOTOPES[name]
    except KeyError:
        raise ValueError(f"unknown isotope {name!r}; known: {sorted(ISOTOPES)}") from None
    return Species(name, mass_u * const.amu, TWO_PI * freq, alpha, transition,
                   np.array(k_direction, dtype=float), k_eff)
