"""Print the shot-noise sensitivity and constraint budget for the Yb and Sr pairs.

Usage: python scripts/reproduce_projections.py [--epsilon 1e-7] [--T 3]
"""
import argparse

from ucrphase import (InitialState, SensitivityInput, SpeciesPair, Transition,
                      constraint_budget, make_species, shot_noise_sensitivity)

PAIRS = {"Yb": ("Yb174", "Yb176"), "Sr": ("Sr87", "Sr88")}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=1e-7)
    ap.add_argument("--T", type=float, default=3.0)
    ap.add_argument("--n-atoms", type=float, default=1e7)
    ap.add_argument("--n-reps", type=float, default=2e6)
    ap.add_argument("--cycle", type=float, default=6.0)
    ap.add_argument("--convention", choices=("quadrature", "single"), default="quadrature")
    args = ap.parse_args()

    inp = SensitivityInput(args.n_atoms, args.n_reps, args.T, args.cycle)
    for label, (a, b) in PAIRS.items():
        print(f"== {label}: {a} / {b}, T = {args.T:g} s")
        recoilless = SpeciesPair(make_species(a), make_species(b), InitialState(), InitialState())
        s = shot_noise_sensitivity(recoilless, inp, args.convention)
        print(f"  sigma(delta alpha)   {s.sigma_delta_alpha:.3e}   "
              f"({s.duration_days:.1f} days, {args.convention} noise)")
        photon = SpeciesPair(make_species(a, Transition.SINGLE_PHOTON),
                             make_species(b, Transition.SINGLE_PHOTON),
                             InitialState(), InitialState())
        rep = constraint_budget(photon, args.epsilon, args.T)
        for c in rep.constraints:
            ref = "" if c.reference_value is None else f"   (ref {c.reference_value:.2g})"
            print(f"  {c.name:28s} {c.limit:.3e} {c.units}{ref}")
        for note in rep.notes:
            print(f"  note: {note}")


if __name__ == "__main__":
    main()
