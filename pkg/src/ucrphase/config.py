"""Run configuration: a flat ``key = value`` file with optional sections.

Grammar
-------
* one ``key = value`` per line; ``#`` starts a comment
* ``[prefix]`` opens a section, later keys are read as ``prefix.key``
* vectors are three numbers separated by commas or spaces
* booleans are ``true``/``false`` (also ``yes``/``no``, ``1``/``0``)

Keys (SI units unless the key name says otherwise)
--------------------------------------------------
constants.c, constants.hbar, constants.amu        positive floats
constants.g                                       gravity vector, m/s^2
species.N.preset                                  Yb174 | Yb176 | Sr87 | Sr88 (N = 1 or 2)
species.N.name                                    label
species.N.mass_u | species.N.mass_kg              mass in atomic units or kg
species.N.omega_hz | species.N.omega_rad_s        transition frequency; Hz is multiplied by 2 pi
species.N.alpha                                   violation parameter
species.N.transition                              recoilless | single_photon | raman
species.N.k_eff                                   1/m, raman only
species.N.k_direction                             vector, normalised on read
sequence.T                                        s, required
sequence.geometry                                 ramsey | butterfly (informational)
initial.N.r0, initial.N.v0                        vectors, default zero
initial.N.v2_moment                               <v0^2> in m^2/s^2, default |v0|^2
perturbation.a                                    state-dependent acceleration, m/s^2
perturbation.gamma                                9 numbers, row-major, 1/s^2
perturbation.gamma_diag                           3 numbers, 1/s^2
perturbation.omega_rot                            vector, rad/s
perturbation.finite_speed_of_light                bool, default false
scan.parameter                                    any numeric scalar key of this file
scan.min, scan.max, scan.steps, scan.spacing      spacing: linear | log
sensitivity.n_atoms, sensitivity.n_reps           counts per species and shot / repetitions
sensitivity.cycle_time                            s
sensitivity.noise_convention                      quadrature | single
budget.epsilon                                    target epsilon
budget.gamma_zz                                   1/s^2, default 3.1e-6
budget.delta_a                                    differential acceleration (vector or z-value)
signal.contrast                                   0..1, default 1
signal.t_min, signal.t_max, signal.steps          T grid for signal traces
output.path, output.format                        csv | json
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .model import (DEFAULT_CONSTANTS, TWO_PI, ISOTOPES, InitialState, PerturbationSpec,
                    PhysicalConstants, Species, Transition)
from .ucr import DEFAULT_GAMMA_ZZ, NOISE_CONVENTIONS, SensitivityInput


class ConfigError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# scalar keys and their range constraint
_SCALAR = {
    "constants.c": "pos", "constants.hbar": "pos", "constants.amu": "pos",
    "sequence.T": "pos",
    "scan.min": "any", "scan.max": "any", "scan.steps": "count",
    "sensitivity.n_atoms": "pos", "sensitivity.n_reps": "pos", "sensitivity.cycle_time": "pos",
    "budget.epsilon": "pos", "budget.gamma_zz": "any",
    "signal.contrast": "unit", "signal.t_min": "nonneg", "signal.t_max": "pos",
    "signal.steps": "count",
}
_VECTOR = {"constants.g": 3, "perturbation.a": 3, "perturbation.gamma": 9,
           "perturbation.gamma_diag": 3, "perturbation.omega_rot": 3}
_CHOICE = {
    "sequence.geometry": ("ramsey", "butterfly"),
    "scan.spacing": ("linear", "log"),
    "sensitivity.noise_convention": NOISE_CONVENTIONS,
    "output.format": ("csv", "json"),
}
_TEXT = {"scan.parameter", "output.path", "budget.delta_a"}
_BOOL = {"perturbation.finite_speed_of_light"}
_SPECIES_SCALAR = {"mass_u": "pos", "mass_kg": "pos", "omega_hz": "pos", "omega_rad_s": "pos",
                   "alpha": "any", "k_eff": "pos"}
_INITIAL_SCALAR = {"v2_moment": "nonneg"}

_INDEXED = re.compile(r"^(species|initial)\.([12])\.(\w+)$")
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class Entry:
    value: str
    line: int


def read_entries(text: str) -> Dict[str, Entry]:
    """Split the text into ``{dotted key: Entry}`` without interpreting values."""
    out: Dict[str, Entry] = {}
    prefix = ""
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", line=n)
            prefix = line[1:-1].strip() + "."
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=n)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=n)
        key = prefix + key
        if key in out:
            raise ConfigError(f"duplicate key (first set on line {out[key].line})", key, n)
        out[key] = Entry(value, n)
    return out


def _kind(key: str) -> Tuple[str, object]:
    if key in _SCALAR:
        return "scalar", _SCALAR[key]
    if key in _VECTOR:
        return "vector", _VECTOR[key]
    if key in _CHOICE:
        return "choice", _CHOICE[key]
    if key in _TEXT:
        return "text", None
    if key in _BOOL:
        return "bool", None
    m = _INDEXED.match(key)
    if m:
        group, _, leaf = m.groups()
        if group == "species":
            if leaf in _SPECIES_SCALAR:
                return "scalar", _SPECIES_SCALAR[leaf]
            if leaf == "k_direction":
                return "vector", 3
            if leaf == "transition":
                return "choice", tuple(t.value for t in Transition)
            if leaf == "preset":
                return "choice", tuple(ISOTOPES)
            if leaf == "name":
                return "text", None
        else:
            if leaf in _INITIAL_SCALAR:
                return "scalar", _INITIAL_SCALAR[leaf]
            if leaf in ("r0", "v0"):
                return "vector", 3
    raise KeyError(key)


def is_scalar_key(key: str) -> bool:
    try:
        return _kind(key)[0] == "scalar"
    except KeyError:
        return False


def _float(key: str, e: Entry) -> float:
    try:
        v = float(e.value)
    except ValueError:
        raise ConfigError(f"not a number: {e.value!r}", key, e.line) from None
    if not np.isfinite(v):
        raise ConfigError(f"not a finite number: {e.value!r}", key, e.line)
    return v


def _convert(key: str, e: Entry):
    kind, arg = _kind(key)
    if kind == "scalar":
        v = _float(key, e)
        if arg == "pos" and not v > 0:
            raise ConfigError(f"must be positive, got {v}", key, e.line)
        if arg == "nonneg" and v < 0:
            raise ConfigError(f"must be non-negative, got {v}", key, e.line)
        if arg == "unit" and not 0 <= v <= 1:
            raise ConfigError(f"must lie in [0, 1], got {v}", key, e.line)
        if arg == "count":
            if v != int(v) or v < 1:
                raise ConfigError(f"must be a positive integer, got {e.value!r}", key, e.line)
            return int(v)
        return v
    if kind == "vector":
        parts = [p for p in re.split(r"[,\s]+", e.value.strip("()[] ")) if p]
        if len(parts) != arg:
            raise ConfigError(f"expected {arg} numbers, got {len(parts)}", key, e.line)
        return np.array([_float(key, Entry(p, e.line)) for p in parts])
    if kind == "choice":
        if e.value not in arg:
            raise ConfigError(f"must be one of {', '.join(arg)}; got {e.value!r}", key, e.line)
        return e.value
    if kind == "bool":
        low = e.value.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"not a boolean: {e.value!r}", key, e.line)
    return e.value


@dataclass(frozen=True)
class ScanAxis:
    parameter: str
    values: np.ndarray


@dataclass(frozen=True)
class SignalGrid:
    contrast: float = 1.0
    t_min: float = 0.0
    t_max: float = 3.0
    steps: int = 301

    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.steps)


@dataclass(frozen=True, eq=False)
class RunConfig:
    constants: PhysicalConstants
    species: Tuple[Species, ...]
    initial: Tuple[InitialState, ...]
    T: float
    geometry: Optional[str] = None
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    scan: Optional[ScanAxis] = None
    sensitivity: Optional[SensitivityInput] = None
    noise_convention: str = "quadrature"
    budget_epsilon: Optional[float] = None
    gamma_zz: float = DEFAULT_GAMMA_ZZ
    delta_a: Optional[np.ndarray] = None
    signal: SignalGrid = field(default_factory=SignalGrid)
    output_path: Optional[str] = None
    output_format: str = "csv"
    entries: Dict[str, Entry] = field(default_factory=dict)

    def echo(self):
        """``key = value`` lines of the source, sorted by key."""
        return [f"{k} = {self.entries[k].value}" for k in sorted(self.entries)]


def _pick(vals: dict, entries, prefix: str, a: str, b: str):
    ka, kb = prefix + a, prefix + b
    if ka in vals and kb in vals:
        raise ConfigError(f"conflicts with {kb!r} (line {entries[kb].line})", ka, entries[ka].line)
    return ka if ka in vals else (kb if kb in vals else None)


def _species(n: int, vals: dict, entries, const: PhysicalConstants) -> Optional[Species]:
    p = f"species.{n}."
    if not any(k.startswith(p) for k in vals):
        return None
    preset = vals.get(p + "preset")
    mass = omega = None
    if preset is not None:
        mass_u, freq = ISOTOPES[preset]
        mass, omega = mass_u * const.amu, TWO_PI * freq
    km = _pick(vals, entries, p, "mass_u", "mass_kg")
    if km is not None:
        mass = vals[km] * (const.amu if km.endswith("_u") else 1.0)
    kw = _pick(vals, entries, p, "omega_hz", "omega_rad_s")
    if kw is not None:
        omega = vals[kw] * (TWO_PI if kw.endswith("_hz") else 1.0)
    if mass is None:
        raise ConfigError("missing mass (set preset, mass_u or mass_kg)", p + "mass_u")
    if omega is None:
        raise ConfigError("missing frequency (set preset, omega_hz or omega_rad_s)", p + "omega_hz")
    kwargs = dict(alpha=vals.get(p + "alpha", 0.0),
                  transition=Transition(vals.get(p + "transition", "recoilless")),
                  k_eff=vals.get(p + "k_eff"))
    if p + "k_direction" in vals:
        kwargs["k_direction"] = vals[p + "k_direction"]
    name = vals.get(p + "name", preset or f"species{n}")
    try:
        return Species(name, mass, omega, **kwargs)
    except ValueError as exc:
        key = p + ("k_eff" if "k_eff" in str(exc) else "k_direction" if "k_direction" in str(exc)
                   else "transition")
        raise ConfigError(str(exc), key, entries[key].line if key in entries else None) from None


def _initial(n: int, vals: dict, entries) -> InitialState:
    p = f"initial.{n}."
    try:
        return InitialState(vals.get(p + "r0", np.zeros(3)), vals.get(p + "v0", np.zeros(3)),
                            vals.get(p + "v2_moment"))
    except ValueError as exc:
        key = p + "v2_moment"
        raise ConfigError(str(exc), key, entries[key].line if key in entries else None) from None


def config_from_entries(entries: Dict[str, Entry]) -> RunConfig:
    vals = {}
    for key, e in entries.items():
        try:
            vals[key] = _convert(key, e)
        except KeyError:
            raise ConfigError("unknown key", key, e.line) from None

    def line(key):
        return entries[key].line if key in entries else None

    const = PhysicalConstants(
        vals.get("constants.c", DEFAULT_CONSTANTS.c),
        vals.get("constants.hbar", DEFAULT_CONSTANTS.hbar),
        vals.get("constants.amu", DEFAULT_CONSTANTS.amu),
        vals.get("constants.g", DEFAULT_CONSTANTS.g),
    )
    species = [s for s in (_species(n, vals, entries, const) for n in (1, 2)) if s is not None]
    if not species or _species(1, vals, entries, const) is None:
        raise ConfigError("missing required species.1 definition", "species.1.preset")
    if "sequence.T" not in vals:
        raise ConfigError("missing required key", "sequence.T")
    for n in (1, 2):
        if n > len(species) and any(k.startswith(f"initial.{n}.") for k in vals):
            key = min(k for k in vals if k.startswith(f"initial.{n}."))
            raise ConfigError(f"initial state given for undefined species {n}", key, line(key))
    initial = tuple(_initial(n, vals, entries) for n in range(1, len(species) + 1))

    if "perturbation.gamma" in vals and "perturbation.gamma_diag" in vals:
        raise ConfigError("set either gamma or gamma_diag", "perturbation.gamma_diag",
                          line("perturbation.gamma_diag"))
    if "perturbation.gamma" in vals:
        gamma = vals["perturbation.gamma"].reshape(3, 3)
    else:
        gamma = np.diag(vals.get("perturbation.gamma_diag", np.zeros(3)))
    try:
        pert = PerturbationSpec(vals.get("perturbation.a", np.zeros(3)), gamma,
                                vals.get("perturbation.omega_rot", np.zeros(3)),
                                vals.get("perturbation.finite_speed_of_light", False))
    except ValueError as exc:
        raise ConfigError(str(exc), "perturbation.gamma", line("perturbation.gamma")) from None

    scan = None
    scan_keys = [k for k in vals if k.startswith("scan.")]
    if scan_keys:
        for k in ("scan.parameter", "scan.min", "scan.max", "scan.steps"):
            if k not in vals:
                raise ConfigError("missing required scan key", k)
        par = vals["scan.parameter"]
        if not is_scalar_key(par) or par.startswith("scan."):
            raise ConfigError(f"{par!r} is not a numeric scalar key", "scan.parameter",
                              line("scan.parameter"))
        lo, hi, steps = vals["scan.min"], vals["scan.max"], vals["scan.steps"]
        if vals.get("scan.spacing", "linear") == "log":
            if not (lo > 0 and hi > 0):
                raise ConfigError("log spacing needs positive bounds", "scan.min", line("scan.min"))
            values = np.geomspace(lo, hi, steps)
        else:
            values = np.linspace(lo, hi, steps)
        scan = ScanAxis(par, values)

    sens = None
    if any(k.startswith("sensitivity.") for k in vals):
        for k in ("sensitivity.n_atoms", "sensitivity.n_reps", "sensitivity.cycle_time"):
            if k not in vals:
                raise ConfigError("missing required sensitivity key", k)
        sens = SensitivityInput(vals["sensitivity.n_atoms"], vals["sensitivity.n_reps"],
                                vals["sequence.T"], vals["sensitivity.cycle_time"])

    sig = SignalGrid(vals.get("signal.contrast", 1.0), vals.get("signal.t_min", 0.0),
                     vals.get("signal.t_max", 3.0), vals.get("signal.steps", 301))
    if sig.t_max <= sig.t_min:
        raise ConfigError("t_max must exceed t_min", "signal.t_max", line("signal.t_max"))

    da = None
    if "budget.delta_a" in entries:
        e = entries["budget.delta_a"]
        parts = [p for p in re.split(r"[,\s]+", e.value) if p]
        if len(parts) == 1:
            da = np.array([0.0, 0.0, _float("budget.delta_a", e)])
        else:
            da = _convert("perturbation.a", e)

    return RunConfig(
        constants=const, species=tuple(species), initial=initial, T=vals["sequence.T"],
        geometry=vals.get("sequence.geometry"), perturbation=pert, scan=scan, sensitivity=sens,
        noise_convention=vals.get("sensitivity.noise_convention", "quadrature"),
        budget_epsilon=vals.get("budget.epsilon"),
        gamma_zz=vals.get("budget.gamma_zz", DEFAULT_GAMMA_ZZ), delta_a=da, signal=sig,
        output_path=vals.get("output.path"), output_format=vals.get("output.format", "csv"),
        entries=dict(entries))


def parse_config(text: str) -> RunConfig:
    return config_from_entries(read_entries(text))


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_override(cfg: RunConfig, key: str, value: float) -> RunConfig:
    """Copy of ``cfg`` with one scalar key replaced (used by parameter scans)."""
    entries = dict(cfg.entries)
    line = entries[key].line if key in entries else 0
    entries[key] = Entry(repr(float(value)), line)
    return config_from_entries(entries)
