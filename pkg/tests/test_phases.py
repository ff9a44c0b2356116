import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ucrphase import (DEFAULT_CONSTANTS, Geometry, InitialState, PerturbationSpec,
                      PhysicalConstants, QuadratureError, Species, TableRow, Transition,
                      butterfly_phase_closed_form, clock_phase, make_butterfly, make_custom,
                      make_mach_zehnder, make_ramsey, make_species, phase_quadrature,
                      proper_time_deficit, signal, table_row, wavepacket_phase)
from ucrphase.model import ISOTOPES

from . import oracles
from .reference_values import (DTAU_G981_T3, YB_BUTTERFLY_RECOILLESS_T3, YB_CLOCK_PHASE_T3,
                               YB_KINETIC_ROW_T3, YB_WAVEPACKET_T3_VAR1E6)

C = DEFAULT_CONSTANTS
vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3)


def random_pert(rng, fsl=True):
    G = rng.normal(size=(3, 3)) * 1e-6
    return PerturbationSpec(rng.normal(size=3) * 1e-3, G + G.T, rng.normal(size=3) * 1e-4, fsl)


# proper time

def test_proper_time_deficit():
    assert proper_time_deficit(9.81, 3.0) == pytest.approx(DTAU_G981_T3, rel=1e-15)
    assert proper_time_deficit(C.g, 3.0) == pytest.approx(DTAU_G981_T3, rel=1e-15)
    assert proper_time_deficit(0.0, 7.0) == 0.0
    assert proper_time_deficit(9.81, 2.4) / proper_time_deficit(9.81, 1.2) == pytest.approx(8, rel=1e-15)
    with pytest.raises(ValueError):
        proper_time_deficit(9.81, -1.0)


# clock

def test_clock_phase_yb(yb):
    assert clock_phase(yb, InitialState(), 3.0) == pytest.approx(YB_CLOCK_PHASE_T3, rel=1e-13)


def test_clock_phase_flat_space(yb):
    flat = PhysicalConstants(g=[0, 0, 0])
    assert clock_phase(yb, InitialState([0, 0, 5], [0, 0, 0]), 3.0, flat) == 0.0


def test_clock_alpha_derivative(yb, rng):
    ic = InitialState(rng.normal(size=3), rng.normal(size=3))
    T = 2.0
    slope = clock_phase(yb.with_alpha(1.0), ic, T) - clock_phase(yb.with_alpha(0.0), ic, T)
    g = C.g
    expect = -yb.omega * T * (g @ (2 * ic.r0 + ic.v0 * T) / C.c**2 - proper_time_deficit(g, T) / T) / 2
    assert slope == pytest.approx(expect, rel=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_clock_phase_against_proper_time_integral(seed):
    rng = np.random.default_rng(seed)
    sp = make_species("Sr88", alpha=rng.uniform(-0.5, 0.5))
    v0 = rng.uniform(-3, 3, 3)
    ic = InitialState(rng.uniform(-2, 2, 3), v0, v0 @ v0 + 0.3)
    T = rng.uniform(0.5, 5)
    ref = oracles.clock_phase_by_proper_time(sp.omega, ic.r0, ic.v0, ic.v2_moment, C.g, C.c, T,
                                             sp.alpha)
    assert clock_phase(sp, ic, T) == pytest.approx(ref, rel=1e-11)


def test_clock_identity_split(yb):
    ic = InitialState([0, 0, 1], [0.1, 0, 4], 17.0)
    q = phase_quadrature(make_ramsey(yb, 2.5), yb, ic)
    wp = wavepacket_phase(make_ramsey(yb, 2.5), yb, ic)
    assert q.total + wp == pytest.approx(clock_phase(yb, ic, 2.5), rel=1e-13)
    assert q.internal_energy == 0.0


# butterfly closed form

def test_butterfly_recoilless_yb(yb):
    bf = butterfly_phase_closed_form(yb, InitialState(), 3.0)
    assert bf.total == pytest.approx(YB_BUTTERFLY_RECOILLESS_T3, rel=1e-13)
    assert bf.finite_speed_of_light == 0.0


def test_butterfly_alpha_factor(yb):
    base = butterfly_phase_closed_form(yb, InitialState(), 3.0).total
    assert butterfly_phase_closed_form(yb.with_alpha(0.1), InitialState(), 3.0).total == \
        pytest.approx(1.05 * base, rel=1e-14)


def test_butterfly_no_gravity(yb):
    flat = PhysicalConstants(g=[0, 0, 0])
    assert butterfly_phase_closed_form(yb, InitialState([1, 2, 3], [4, 5, 6]), 3.0,
                                       const=flat).total == 0.0


@settings(max_examples=50, deadline=None)
@given(r0=vec, v0=vec, spread=st.floats(0, 10))
def test_recoilless_butterfly_ignores_initial_conditions(r0, v0, spread):
    sp = make_species("Yb174", alpha=0.2)
    ref = butterfly_phase_closed_form(sp, InitialState(), 3.0).total
    ic = InitialState(r0, v0, float(np.dot(v0, v0)) + spread)
    assert butterfly_phase_closed_form(sp, ic, 3.0).total == ref
    q = phase_quadrature(make_butterfly(sp, 3.0), sp, ic, include_wavepacket=True)
    assert q.total == pytest.approx(ref, rel=1e-12)


# table rows

def test_kinetic_row_yb(yb):
    assert table_row(TableRow.KINETIC, yb, InitialState(), 3.0) == \
        pytest.approx(YB_KINETIC_ROW_T3, rel=1e-13)


def test_row_nulls(yb):
    pert = PerturbationSpec(a_state=[1e-3, 2e-3, 0], omega_rot=[1e-4, 2e-4, 3e-4])
    assert table_row(TableRow.ROTATION, yb, InitialState(), 3.0, pert) == 0.0
    assert table_row(TableRow.STATE_DEPENDENT_ACCELERATION, yb, InitialState(), 3.0, pert) == 0.0
    assert table_row(TableRow.INTERNAL_ENERGY, yb, InitialState(), 3.0, pert) == 0.0


def test_row_by_name(yb):
    assert table_row("gravitational_coupling", yb.with_alpha(1.0), InitialState(), 3.0) == \
        pytest.approx(2 * YB_KINETIC_ROW_T3, rel=1e-13)


def test_row_rejects_other_geometries(yb):
    with pytest.raises(ValueError):
        table_row(TableRow.KINETIC, yb, InitialState(), 3.0, geometry=Geometry.RAMSEY_CLOCK)


def test_fsl_row_switch(yb_photon):
    on = table_row(TableRow.FINITE_SPEED_OF_LIGHT, yb_photon, InitialState(), 3.0,
                   PerturbationSpec(finite_speed_of_light=True))
    off = table_row(TableRow.FINITE_SPEED_OF_LIGHT, yb_photon, InitialState(), 3.0)
    assert on != 0.0 and off == 0.0


# quadrature

def test_quadrature_recoilless_butterfly(yb):
    q = phase_quadrature(make_butterfly(yb, 3.0), yb, InitialState())
    assert q.total == pytest.approx(YB_BUTTERFLY_RECOILLESS_T3, rel=1e-12)
    assert q.kinetic_coupling == pytest.approx(YB_KINETIC_ROW_T3, rel=1e-12)


def test_quadrature_ramsey_matches_clock_without_wavepacket(yb):
    ic = InitialState([0, 0, 2], [0, 0, 3], 10.0)
    seq = make_ramsey(yb, 3.0)
    q = phase_quadrature(seq, yb, ic)
    assert q.wavepacket == 0.0
    assert q.total == pytest.approx(clock_phase(yb, ic, 3.0) - wavepacket_phase(seq, yb, ic),
                                    rel=1e-12)


def test_vanishing_frequency_gives_vanishing_phase():
    sp = Species("test", 1e-25, 1e-30)
    q = phase_quadrature(make_butterfly(sp, 3.0), sp, InitialState([0, 0, 1], [0, 0, 1]))
    assert abs(q.total) < 1e-40


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("transition", [Transition.RECOILLESS, Transition.SINGLE_PHOTON])
def test_quadrature_against_scipy(seed, transition):
    rng = np.random.default_rng(seed)
    sp = make_species("Sr87", transition, alpha=0.3, k_direction=rng.normal(size=3))
    ic = InitialState(rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3))
    pert = random_pert(rng, fsl=False)
    T = rng.uniform(0.5, 4)
    seq = make_butterfly(sp, T)
    q, scale = phase_quadrature(seq, sp, ic, pert, return_scale=True)
    ref = oracles.phase_terms(seq, sp, ic, pert)
    for name, val in ref.items():
        assert getattr(q, name) == pytest.approx(val, rel=1e-8, abs=1e-12 * scale[name])


@pytest.mark.parametrize("transition", [Transition.SINGLE_PHOTON, Transition.RAMAN_EFFECTIVE])
def test_quadrature_matches_rows_with_perturbations(transition, rng):
    sp = make_species("Yb176", transition, alpha=-0.4, k_direction=(0.2, -0.3, 1.0), k_eff=1.5e7)
    ic = InitialState(rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3))
    pert = random_pert(rng)
    T = 2.2
    q = phase_quadrature(make_butterfly(sp, T), sp, ic, pert)
    for row in TableRow:
        expect = table_row(row, sp, ic, T, pert)
        got = getattr(q, row.value)
        assert got == pytest.approx(expect, rel=1e-9, abs=1e-15)
    assert q.laser_phase_phi0 == 0.0


def test_mach_zehnder_laser_phase(yb_photon):
    # both branches are driven at the last pulse, so k.r(T) enters for each of them:
    # k [r(0) - r1(T/2) - r2(T/2) + r1(T) + r2(T)] = k (-3 g T^2 / 4 + v_r T / 2)
    T = 1.0
    q = phase_quadrature(make_mach_zehnder(yb_photon, T), yb_photon, InitialState())
    k = yb_photon.k_magnitude()
    vr = yb_photon.recoil_velocity()[2]
    assert q.laser_phase_phi0 == pytest.approx(k * (-0.75 * 9.81 * T**2 + 0.5 * vr * T), rel=1e-12)


def test_detuned_laser_enters_internal_energy(yb):
    seq = make_ramsey(yb, 2.0)
    det = 1e3
    pulses = tuple(type(p)(p.time, p.kind, p.k_branch, p.omega_l - det, p.transitions)
                   for p in seq.pulses)
    detuned = type(seq)(pulses, seq.total_time, seq.geometry_tag, seq.mass, seq.constants)
    d = phase_quadrature(detuned, yb, InitialState()).internal_energy
    # Ramsey fringe phase (omega_l - Omega) T
    assert d == pytest.approx(-det * 2.0, rel=1e-12)


def test_quadrature_failure_reports_term(yb_photon, rng):
    seq = make_butterfly(yb_photon, 3.0)
    ic = InitialState(rng.normal(size=3), rng.normal(size=3))
    with pytest.raises(QuadratureError) as err:
        phase_quadrature(seq, yb_photon, ic, random_pert(rng), rtol=1e-300)
    assert err.value.term in ("kinetic_coupling", "gravitational_coupling",
                              "state_dependent_acceleration", "gravity_gradient", "rotation")


def test_custom_sequence_runs(yb_photon):
    seq = make_custom(yb_photon, 1.0, [0.0, 0.3, 1.0], [(1, 0), (-1, 1), (0, 1)])
    q = phase_quadrature(seq, yb_photon, InitialState(), PerturbationSpec(finite_speed_of_light=True))
    assert np.isfinite(q.total)


# properties

def test_t_cubed_scaling(yb):
    Ts = np.geomspace(0.1, 10, 15)
    phis = [phase_quadrature(make_butterfly(yb, T), yb, InitialState()).total for T in Ts]
    slope = np.polyfit(np.log(Ts), np.log(np.abs(phis)), 1)[0]
    assert abs(slope - 3.0) < 1e-3


@pytest.mark.parametrize("make", [make_ramsey, make_butterfly])
def test_linear_in_alpha(make, rng):
    sp = make_species("Sr88")
    ic = InitialState(rng.normal(size=3), rng.normal(size=3))
    vals = [phase_quadrature(make(sp, 3.0), sp.with_alpha(a), ic).total for a in (-1.0, 0.0, 1.0)]
    assert abs(vals[0] - 2 * vals[1] + vals[2]) <= 1e-13 * max(map(abs, vals))
    if make is make_ramsey:
        cf = [clock_phase(sp.with_alpha(a), ic, 3.0) for a in (-1.0, 0.0, 1.0)]
        assert abs(cf[0] - 2 * cf[1] + cf[2]) <= 1e-14 * max(map(abs, cf))


def test_phase_grows_with_proper_time_deficit(yb):
    phis = [butterfly_phase_closed_form(yb, InitialState(), 3.0,
                                        const=PhysicalConstants(g=[0, 0, g])).total
            for g in (1.0, 5.0, 9.81)]
    assert phis[0] < phis[1] < phis[2]


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(sorted(ISOTOPES)), T=st.floats(0.1, 10), r0=vec, v0=vec,
       transition=st.sampled_from([Transition.RECOILLESS, Transition.SINGLE_PHOTON]))
def test_butterfly_phi0_and_wavepacket_vanish(name, T, r0, v0, transition):
    sp = make_species(name, transition)
    seq = make_butterfly(sp, T)
    ic = InitialState(r0, v0, float(np.dot(v0, v0)) + 1.0)
    q = phase_quadrature(seq, sp, ic, include_wavepacket=True)
    assert q.laser_phase_phi0 == 0.0
    assert q.wavepacket == 0.0


# wave packets and signal

def test_wavepacket_examples(yb):
    seq = make_ramsey(yb, 3.0)
    assert wavepacket_phase(seq, yb, InitialState(v0=[0, 0, 2])) == 0.0
    ic = InitialState(v0=[0, 0, 0], v2_moment=1e-6)
    assert wavepacket_phase(seq, yb, ic) == pytest.approx(YB_WAVEPACKET_T3_VAR1E6, rel=1e-13)
    assert wavepacket_phase(make_butterfly(yb, 3.0), yb, ic) == 0.0


@pytest.mark.parametrize("phase,contrast,expect", [(0, 1, 1.0), (np.pi, 1, 0.0), (np.pi / 2, 0.5, 0.5)])
def test_signal_examples(phase, contrast, expect):
    assert signal(phase, contrast).intensity == pytest.approx(expect, abs=1e-15)


@pytest.mark.parametrize("contrast", [-0.1, 1.1])
def test_signal_contrast_range(contrast):
    with pytest.raises(ValueError):
        signal(0.0, contrast)


def test_breakdown_total_is_sum(yb_photon, rng):
    q = phase_quadrature(make_butterfly(yb_photon, 2.0), yb_photon,
                         InitialState(rng.normal(size=3), rng.normal(size=3)), random_pert(rng))
    d = q.as_dict()
    assert d.pop("total") == sum(d.values())
