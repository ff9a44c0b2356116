"""Recompute the frozen numbers in tests/reference_values.py without ucrphase.

Proper-time integrals use scipy quad along free fall; everything else is
evaluated directly from constants. Exits 1 if any value drifts beyond 1e-12.
"""
import sys
from pathlib import Path

import numpy as np
from scipy.integrate import quad

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from tests import reference_values as ref  # noqa: E402

c, hbar, amu, g = 2.998e8, 1.054571817e-34, 1.66053906660e-27, 9.81
T = 3.0
OM = {"Yb": 2 * np.pi * 522e12, "Sr": 2 * np.pi * 430e12}
MASS = {"Yb174": 173.9388621 * amu, "Yb176": 175.9425717 * amu,
        "Sr87": 86.9088775 * amu, "Sr88": 87.9056121 * amu}


def proper_time_deficit(T):
    # tau - T along r = -g t^2 / 2 from rest, to first order in 1/c^2
    f = lambda t: -(g * t) ** 2 / (2 * c**2) - g**2 * t**2 / (2 * c**2)
    return -quad(f, 0, T, epsabs=0, epsrel=1e-13)[0]


def compute():
    dtau = proper_time_deficit(T)
    om = OM["Yb"]
    k = om / c
    vr = hbar * k / MASS["Yb174"]
    coeff = {n: w * 3 / 32 * dtau for n, w in OM.items()}
    sigma = {n: np.sqrt(2 / 1e7) / np.sqrt(2e6) / coeff[n] for n in OM}
    out = {
        "DTAU_G981_T3": dtau,
        "YB_CLOCK_PHASE_T3": om * dtau,
        "K_YB": k,
        "YB_BUTTERFLY_RECOILLESS_T3": 3 / 16 * om * dtau,
        "YB_KINETIC_ROW_T3": om * T**3 * g**2 / (32 * c**2),
        "YB_WAVEPACKET_T3_VAR1E6": om * T / (2 * c**2) * 1e-6,
        "VR_YB174": vr,
        "DT2_RECOILLESS": -g * (T / 4) ** 2 / 2 / c,
        "DT2_BRANCH1_RECOIL": (vr * T / 4 - g * (T / 4) ** 2 / 2) / c,
        "SIGMA_YB": sigma["Yb"],
        "SIGMA_SR": sigma["Sr"],
        "CAMPAIGN_DAYS": 2e6 * 6 / 86400,
        "FOUNTAIN_DALPHA_1E7": 1e-7 / 2 * dtau / T,
        "G_DR0_1MM": g * 1e-3 / c**2,
        "BUTTERFLY_DALPHA_1E7": 3 / 32 * dtau / T * 1e-7,
        "DV0_GG_LIMIT": 1e-7 * g**2 / (3.1e-6 * c),
        "DA_LIMIT": 1e-7 * g,
    }
    for label, (a, b), n in (("YB", ("Yb174", "Yb176"), "Yb"), ("SR", ("Sr87", "Sr88"), "Sr")):
        kk = OM[n] / c
        vbar = (hbar * kk / MASS[a] + hbar * kk / MASS[b]) / 2
        out[f"{label}_COLOCATION"] = (g**2 * T**3 * 1e-7 / (32 * vbar),
                                      g**2 * T**2 * 1e-7 / (16 * vbar))
    return out


def main():
    bad = 0
    for name, value in compute().items():
        frozen = getattr(ref, name)
        err = float(np.max(np.abs(np.subtract(value, frozen)) / np.abs(frozen)))
        ok = err <= 1e-12
        bad += not ok
        print(f"{'ok ' if ok else 'BAD'} {name:28s} rel {err:.1e}")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
