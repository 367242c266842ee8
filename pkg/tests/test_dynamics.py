import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dipolephase.core import BeamParams, ConvergenceError, DomainError, ElectricDipoleLine, Side, SolenoidLine
from dipolephase.dynamics import (
    CouplingKind,
    CouplingSpec,
    ForceSource,
    OdeConfig,
    coupling_for_strength,
    delta_vy,
    delta_vy_quadrature,
    electric_coupling,
    integrate_trajectory,
    lag_displacement,
    lag_displacement_quadrature,
    lag_from_trajectory,
    magnetic_coupling,
    relative_displacement,
    trajectory_relative_displacement,
)
from dipolephase.forces import ForceModel
from dipolephase.oracle import QuadratureConfig, fit_convergence_order, integrate

C = 137.036
UNIT = BeamParams(1.0, 1.0, 1.0, 1.0)
TIGHT_ODE = OdeConfig(local_error_tol=1e-12)


def energy_lag(g, beam, side):
    """Exact lag of a charge moving in 1D through U = 2 g x / (x^2 + y^2).

    Energy conservation gives v(y) directly, so the lag is
    -int (v0 / v - 1) dy with no time integration at all.
    """
    x = side.x_position(beam.slit_half_sep_d)
    k = 4.0 * g * x / (beam.mass_m * beam.speed_v0**2)

    def f(y):
        u = k / (x * x + y * y)
        return -np.expm1(-0.5 * np.log1p(-u))

    res = integrate(f, -math.inf, math.inf, QuadratureConfig(1e-16, 1e-13), scale=beam.slit_half_sep_d)
    assert res.converged
    return res.value


def unit_magnetic():
    return magnetic_coupling(UNIT, SolenoidLine(4.0 * math.pi, 1.0, C))


def unit_electric():
    return electric_coupling(UNIT, ElectricDipoleLine(1.0, 0.5))


def test_velocity_change_values():
    assert delta_vy(unit_electric(), UNIT, Side.PLUS, 0.0) == -2.0
    assert delta_vy(unit_magnetic(), UNIT, Side.PLUS, 0.0) == pytest.approx(2.0 / C, rel=1e-14)
    assert 2.0 / C == pytest.approx(0.0145947, abs=1e-7)
    assert abs(delta_vy(unit_electric(), UNIT, Side.PLUS, 1e12)) < 1e-20
    assert delta_vy(CouplingSpec(CouplingKind.ELECTRIC, 0.0), UNIT, Side.PLUS, 0.0) == 0.0


def test_lag_values():
    assert lag_displacement(unit_electric(), UNIT, Side.PLUS) == pytest.approx(-2 * math.pi, rel=1e-15)
    assert lag_displacement(unit_magnetic(), UNIT, Side.PLUS) == pytest.approx(2 * math.pi / C, rel=1e-14)
    assert 2 * math.pi / C == pytest.approx(0.0458506, abs=1e-7)
    assert relative_displacement(unit_electric(), UNIT) == pytest.approx(-4 * math.pi, rel=1e-15)
    assert relative_displacement(unit_magnetic(), UNIT) == pytest.approx(0.0917012, abs=1e-7)
    assert relative_displacement(CouplingSpec(CouplingKind.MAGNETIC, 0.0), UNIT) == 0.0


@given(st.floats(-10, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_minus_side_is_exact_negation(g, m, v0, d):
    beam = BeamParams(1.0, m, v0, d)
    cp = CouplingSpec(CouplingKind.ELECTRIC, g)
    assert lag_displacement(cp, beam, Side.MINUS) == -lag_displacement(cp, beam, Side.PLUS)


@given(st.floats(0.05, 20.0))
def test_closed_form_lag_independent_of_d(d):
    beam = BeamParams(1.0, 1.0, 1.0, d)
    assert relative_displacement(electric_coupling(beam, ElectricDipoleLine(1.0, 0.5)), beam) == \
        relative_displacement(unit_electric(), UNIT)


def test_force_free_coupling_is_zero():
    cp = magnetic_coupling(UNIT, SolenoidLine(4 * math.pi, 1.0, C), force_model=ForceModel.NONE)
    assert cp.g == 0.0
    assert cp.strength(UNIT) == 0.0


def test_strength_round_trip():
    for kind in CouplingKind:
        cp = coupling_for_strength(kind, 1e-3, BeamParams(2.0, 3.0, 0.5, 4.0))
        assert cp.strength(BeamParams(2.0, 3.0, 0.5, 4.0)) == pytest.approx(1e-3, rel=1e-15)
    assert coupling_for_strength(CouplingKind.MAGNETIC, 1e-3, UNIT).g < 0


@pytest.mark.parametrize("cp", [unit_electric(), unit_magnetic()], ids=["electric", "magnetic"])
def test_velocity_change_quadrature(cp):
    for y in (-50.0, -1.0, 0.0, 0.3, 2.0, 400.0):
        val, err = delta_vy_quadrature(cp, UNIT, Side.PLUS, y)
        ref = delta_vy(cp, UNIT, Side.PLUS, y)
        assert abs(val - ref) <= max(err, 1e-8 * abs(ref))
        assert abs(val - ref) <= 1e-8 * abs(ref)


@pytest.mark.parametrize("cp", [unit_electric(), unit_magnetic()], ids=["electric", "magnetic"])
def test_lag_quadrature(cp):
    for side in Side:
        val, err = lag_displacement_quadrature(cp, UNIT, side)
        ref = lag_displacement(cp, UNIT, side)
        assert abs(val - ref) <= 1e-8 * abs(ref)
        assert abs(val - ref) <= err + 4 * np.finfo(float).eps * abs(ref)


def test_lag_quadrature_zero_coupling():
    assert lag_displacement_quadrature(CouplingSpec(CouplingKind.ELECTRIC, 0.0), UNIT, Side.PLUS) == (0.0, 0.0)


def test_straight_line_without_coupling():
    traj = integrate_trajectory(CouplingSpec(CouplingKind.ELECTRIC, 0.0), UNIT, Side.PLUS)
    assert np.all(traj.y_offset == 0.0)
    assert np.all(traj.x == 1.0)
    assert lag_from_trajectory(traj, UNIT) == 0.0


def test_weak_coupling_trajectory_matches_closed_form():
    cp = coupling_for_strength(CouplingKind.ELECTRIC, 1e-4, UNIT)
    plus = lag_from_trajectory(integrate_trajectory(cp, UNIT, Side.PLUS), UNIT)
    assert plus == pytest.approx(lag_displacement(cp, UNIT, Side.PLUS), rel=1e-3)
    dY, p, m = trajectory_relative_displacement(cp, UNIT)
    assert dY == p - m
    assert dY == pytest.approx(relative_displacement(cp, UNIT), rel=1e-3)


@pytest.mark.parametrize("strength", [0.3, 0.1, 0.01])
def test_trajectory_matches_energy_oracle(strength):
    # agreement far beyond the first-order closed form (which is off by ~12% * strength)
    for side in Side:
        cp = coupling_for_strength(CouplingKind.ELECTRIC, strength, UNIT)
        ode = lag_from_trajectory(integrate_trajectory(cp, UNIT, side, TIGHT_ODE), UNIT)
        exact = energy_lag(cp.g, UNIT, side)
        assert ode == pytest.approx(exact, rel=1e-6 * strength + 1e-9)


def test_window_truncation_shrinks_with_window():
    cp = coupling_for_strength(CouplingKind.ELECTRIC, 0.3, UNIT)
    exact = energy_lag(cp.g, UNIT, Side.PLUS)
    errs = []
    for w in (1e2, 1e3):
        traj = integrate_trajectory(cp, UNIT, Side.PLUS, OdeConfig(-w, w, local_error_tol=1e-12))
        errs.append(abs(lag_from_trajectory(traj, UNIT) - exact))
    assert errs[1] < errs[0] / 50


def test_second_order_lag_coefficient():
    # per-beam relative deviation from the first-order lag is (3/2) g / (m v0^2 d) = 1.5 S / (4 pi)
    rel = []
    for s in (1e-2, 1e-3, 1e-4):
        cp = coupling_for_strength(CouplingKind.ELECTRIC, s, UNIT)
        ode = lag_from_trajectory(integrate_trajectory(cp, UNIT, Side.PLUS, TIGHT_ODE), UNIT)
        ref = lag_displacement(cp, UNIT, Side.PLUS)
        rel.append((s, (ode - ref) / ref))
    for s, r in rel:
        assert r == pytest.approx(1.5 * s / (4 * math.pi), rel=2e-2)
    assert fit_convergence_order(rel) == pytest.approx(1.0, abs=0.02)


def test_relative_lag_error_is_second_order():
    # even orders cancel between the two beams: Delta Y deviates by (15/4)(S/4pi)^2
    rel = []
    for s in (1e-2, 1e-3, 1e-4):
        cp = coupling_for_strength(CouplingKind.ELECTRIC, s, UNIT)
        dY, _, _ = trajectory_relative_displacement(cp, UNIT, TIGHT_ODE)
        ref = relative_displacement(cp, UNIT)
        rel.append((s, abs(dY - ref) / abs(ref)))
    assert rel[0][1] == pytest.approx(3.75 * (1e-2 / (4 * math.pi)) ** 2, rel=1e-2)
    assert rel[1][1] == pytest.approx(3.75 * (1e-3 / (4 * math.pi)) ** 2, rel=5e-2)
    assert fit_convergence_order(rel) == pytest.approx(2.0, abs=0.1)


def test_magnetic_trajectory_mirrors_electric():
    s = 1e-3
    el = trajectory_relative_displacement(coupling_for_strength(CouplingKind.ELECTRIC, s, UNIT), UNIT)[0]
    mag = trajectory_relative_displacement(coupling_for_strength(CouplingKind.MAGNETIC, s, UNIT), UNIT)[0]
    assert mag == pytest.approx(-el, rel=1e-9)


def test_full_quadrature_force_differs_at_second_order():
    diffs = []
    for s in (1e-2, 1e-3):
        cp = coupling_for_strength(CouplingKind.ELECTRIC, s, UNIT)
        a = lag_from_trajectory(integrate_trajectory(cp, UNIT, Side.PLUS), UNIT)
        b = lag_from_trajectory(integrate_trajectory(cp, UNIT, Side.PLUS, None, ForceSource.FULL_QUADRATURE_XY),
                                UNIT)
        diffs.append(abs(b - a))
    assert 80 < diffs[0] / diffs[1] < 120


def test_trajectory_bookkeeping():
    cp = coupling_for_strength(CouplingKind.ELECTRIC, 1e-2, UNIT)
    traj = integrate_trajectory(cp, UNIT, Side.MINUS)
    assert traj.y_start == -1e3 and traj.y_end == 1e3
    assert np.all(np.diff(traj.t) > 0)
    assert traj.steps == len(traj.t) - 1
    assert traj.x[0] == -1.0
    assert traj.meta["side"] == "MINUS"
    assert traj.max_local_error <= 1.0


def test_turned_back_charge_raises():
    strong = CouplingSpec(CouplingKind.ELECTRIC, 1.0)
    with pytest.raises(DomainError):
        integrate_trajectory(strong, UNIT, Side.PLUS)


def test_step_budget_raises():
    cp = coupling_for_strength(CouplingKind.ELECTRIC, 1e-2, UNIT)
    with pytest.raises(ConvergenceError):
        integrate_trajectory(cp, UNIT, Side.PLUS, OdeConfig(max_steps=5))


def test_ode_config_validation():
    with pytest.raises(DomainError):
        OdeConfig(local_error_tol=0.0)
    with pytest.raises(DomainError):
        OdeConfig(y_start=1.0)
    with pytest.raises(DomainError):
        OdeConfig(y_end=-1.0)
    assert OdeConfig().window(2.0) == (-2e3, 2e3)


def test_trajectory_is_deterministic():
    cp = coupling_for_strength(CouplingKind.ELECTRIC, 1e-2, UNIT)
    a = integrate_trajectory(cp, UNIT, Side.PLUS)
    b = integrate_trajectory(cp, UNIT, Side.PLUS)
    assert np.array_equal(a.y_offset, b.y_offset)
    assert lag_from_trajectory(a, UNIT) == lag_from_trajectory(b, UNIT)
