"""Acceptance checks shared by ``dipolephase verify`` and the test suite.

Each check returns a :class:`CheckResult` carrying the worst measured value
against its expected value and tolerance.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import RunConfig
from .core import BeamParams, ElectricDipoleLine, SolenoidLine, Side
from .dynamics import (
    CouplingKind,
    coupling_for_strength,
    delta_vy,
    delta_vy_quadrature,
    electric_coupling,
    lag_displacement,
    lag_displacement_quadrature,
    magnetic_coupling,
    relative_displacement,
    trajectory_relative_displacement,
)
from .fields import potential_dipole_line_approx, potential_dipole_line_exact
from .forces import (
    ForceModel,
    force_electric_quadrature,
    force_electric_y,
    force_magnetic_quadrature,
    force_magnetic_y,
)
from .oracle import QuadratureConfig, fit_convergence_order
from .phase import (
    phase_flux,
    phase_semiclassical,
    phase_wkb_electric,
    phase_wkb_extrapolated,
    phase_wkb_magnetic,
)
from .report import sweep_table

__all__ = ["CheckResult", "CHECKS", "run_checks", "log_polar_grid"]

_EPS = np.finfo(float).eps
STRENGTHS = (1e-2, 1e-3, 1e-4)
D_VALUES = (0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    runtime: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.key} {self.title}: measured={self.measured:.6g} "
                f"expected={self.expected:.6g} tol={self.tolerance:.3g} ({self.runtime:.2f}s) {self.detail}")


def log_polar_grid(n_r: int = 10, n_theta: int = 10, r_min: float = 0.1, r_max: float = 100.0):
    pts = []
    for r in np.logspace(math.log10(r_min), math.log10(r_max), n_r):
        for k in range(n_theta):
            th = 2.0 * math.pi * (k + 0.5) / n_theta
            pts.append((r * math.cos(th), r * math.sin(th)))
    return pts


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def check_force_quadrature(cfg: RunConfig) -> CheckResult:
    """Criterion 1: closed-form y-forces vs quadrature on a log-polar grid."""
    beam, c = cfg.beam, cfg.constants.c
    e, p, mu, v0 = beam.charge_e, cfg.line.moment_p, cfg.solenoid.moment_mu, beam.speed_v0
    quad = QuadratureConfig(abs_tol=1e-10, rel_tol=1e-8, max_subdivisions=cfg.quad.max_subdivisions)

    def run():
        worst = 0.0
        for x, y in log_polar_grid():
            for closed, (force, _) in (
                (force_electric_y(e, p, x, y), force_electric_quadrature(e, p, x, y, quad)),
                (force_magnetic_y(e, mu, v0, c, x, y), force_magnetic_quadrature(e, mu, v0, c, x, y, quad)),
            ):
                allowed = max(1e-10, 1e-8 * abs(closed))
                worst = max(worst, abs(force.y - closed) / allowed)
        return worst

    worst, dt = _timed(run)
    return CheckResult("AC1", "force closed forms vs quadrature", worst <= 1.0 and dt < 10.0,
                       worst, 0.0, 1.0, dt, "max |quad-closed|/max(1e-10,1e-8|F|); runtime < 10 s")


def check_lag_chain(cfg: RunConfig) -> CheckResult:
    """Criterion 2: velocity-change and lag closed forms vs time quadrature."""
    beam = cfg.beam
    couplings = (electric_coupling(beam, cfg.line),
                 magnetic_coupling(beam, cfg.solenoid, cfg.constants))

    def run():
        worst = 0.0
        for cp in couplings:
            if cp.g == 0.0:
                continue
            d = beam.slit_half_sep_d
            for y_e in (-5 * d, -d, 0.0, 0.5 * d, 3 * d):
                dv, _ = delta_vy_quadrature(cp, beam, Side.PLUS, y_e, cfg.quad)
                ref = delta_vy(cp, beam, Side.PLUS, y_e)
                worst = max(worst, abs(dv - ref) / abs(ref))
            plus, _ = lag_displacement_quadrature(cp, beam, Side.PLUS, cfg.quad)
            minus, _ = lag_displacement_quadrature(cp, beam, Side.MINUS, cfg.quad)
            ref_plus = lag_displacement(cp, beam, Side.PLUS)
            ref_Y = relative_displacement(cp, beam)
            worst = max(worst, abs(plus - ref_plus) / abs(ref_plus), abs((plus - minus) - ref_Y) / abs(ref_Y))
        return worst

    worst, dt = _timed(run)
    return CheckResult("AC2", "lag chain closed forms vs time quadrature", worst <= 1e-8 and dt < 5.0,
                       worst, 0.0, 1e-8, dt, "max relative deviation; runtime < 5 s")


def trajectory_errors(cfg: RunConfig, strengths=STRENGTHS):
    """Relative |Delta Y(ODE) - Delta Y(closed)| for each strength (electric coupling)."""
    out = []
    for s in strengths:
        cp = coupling_for_strength(CouplingKind.ELECTRIC, s, cfg.beam)
        dY, _, _ = trajectory_relative_displacement(cp, cfg.beam, cfg.ode, cfg.force_source)
        ref = relative_displacement(cp, cfg.beam)
        out.append(abs(dY - ref) / abs(ref))
    return out


def check_ode_convergence(cfg: RunConfig) -> CheckResult:
    """Criterion 3: rel. error <= 10 * strength and fitted log-log order 1.0 +/- 0.2."""
    errs, dt = _timed(lambda: trajectory_errors(cfg))
    bounded = all(e <= 10 * s for e, s in zip(errs, STRENGTHS))
    safe = [max(e, 1e-300) for e in errs]
    order = fit_convergence_order(list(zip(STRENGTHS, safe)))
    passed = bounded and abs(order - 1.0) <= 0.2 and dt < 60.0
    detail = "rel errors " + ", ".join(f"{e:.3g}@{s:g}" for e, s in zip(errs, STRENGTHS))
    detail += f"; within 10*strength: {bounded}; runtime < 60 s"
    return CheckResult("AC3", "ODE perturbative convergence order", passed, order, 1.0, 0.2, dt, detail)


def check_d_independence(cfg: RunConfig) -> CheckResult:
    """Criterion 4: closed-form Delta Y identical across d; trajectory within 0.5%."""
    base = cfg.beam

    def run():
        g = coupling_for_strength(CouplingKind.ELECTRIC, 1e-4, base)
        closed, traj = [], []
        for d in D_VALUES:
            beam = BeamParams(base.charge_e, base.mass_m, base.speed_v0, d)
            closed.append(relative_displacement(electric_coupling(beam, cfg.line), beam))
            traj.append(trajectory_relative_displacement(g, beam, cfg.ode, cfg.force_source)[0])
        closed_spread = (max(closed) - min(closed)) / abs(closed[0]) if closed[0] else max(map(abs, closed))
        traj_spread = (max(traj) - min(traj)) / abs(np.mean(traj))
        return closed_spread, traj_spread

    (closed_spread, traj_spread), dt = _timed(run)
    passed = closed_spread <= 1e-12 and traj_spread < 5e-3
    return CheckResult("AC4", "d-independence of Delta Y", passed, traj_spread, 0.0, 5e-3, dt,
                       f"closed-form spread {closed_spread:.3g} (tol 1e-12); trajectory spread shown")


def check_wkb_agreement(cfg: RunConfig) -> CheckResult:
    """Criterion 5: extrapolated WKB phases vs the semiclassical closed forms."""
    beam, line, sol, consts = cfg.beam, cfg.line, cfg.solenoid, cfg.constants

    def run():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            el, _ = phase_wkb_extrapolated(lambda w: phase_wkb_electric(beam, line, w, consts.hbar),
                                           beam.slit_half_sep_d, cfg=cfg.wkb)
        mag, _ = phase_wkb_extrapolated(lambda w: phase_wkb_magnetic(beam, sol, w, consts),
                                        beam.slit_half_sep_d, cfg=cfg.wkb)
        ref_el = -4.0 * math.pi * beam.charge_e * line.moment_p / (beam.speed_v0 * consts.hbar)
        ref_mag = phase_flux(beam.charge_e, sol.b0, sol.area, consts.c, consts.hbar)
        return max(abs(el - ref_el) / abs(ref_el), abs(mag - ref_mag) / abs(ref_mag))

    worst, dt = _timed(run)
    return CheckResult("AC5", "WKB vs semiclassical phase", worst <= 1e-6 and dt < 10.0,
                       worst, 0.0, 1e-6, dt, "max relative deviation; runtime < 10 s")


_PARAM_SETS = [
    (1.0, 4 * math.pi, 1.0, 137.036, 1.0, 1.0),
    (1.0, 1.0, 2.0, 137.036, 1.0, 1.0),
    (-1.0, 0.3, 7.5, 137.036, 1.0, 0.25),
    (2.5, 10.0, 0.01, 1.0, 0.7, 3.0),
    (1e-3, 1e3, 1e-4, 3e10, 1.05e-27, 1e9),
]


def check_flux_identity(cfg: RunConfig) -> CheckResult:
    """Criterion 6: m v0 Delta Y / hbar = e B0 A / (c hbar) = 4 pi e mu / (c hbar)."""

    def run():
        worst = 0.0
        for e, b0, area, c, hbar, v0 in _PARAM_SETS + [
            (cfg.beam.charge_e, cfg.solenoid.b0, cfg.solenoid.area, cfg.constants.c, cfg.constants.hbar,
             cfg.beam.speed_v0)
        ]:
            if b0 == 0.0:
                continue
            from .core import Constants

            consts = Constants(c, hbar)
            beam = BeamParams(e, 1.3, v0, 1.0)
            sol = SolenoidLine(b0, area, c)
            dY = relative_displacement(magnetic_coupling(beam, sol, consts), beam)
            semi = phase_semiclassical(beam, dY, hbar)
            flux = phase_flux(e, b0, area, c, hbar)
            moment = 4.0 * math.pi * e * sol.moment_mu / (c * hbar)
            worst = max(worst, abs(semi - flux) / abs(flux), abs(moment - flux) / abs(flux))
        return worst / _EPS

    worst_ulps, dt = _timed(run)
    return CheckResult("AC6", "flux identity", worst_ulps <= 16.0, worst_ulps, 0.0, 16.0, dt,
                       "max relative deviation in units of machine epsilon")


def check_functional_form(cfg: RunConfig) -> CheckResult:
    """Criterion 7: normalised electric and magnetic y-forces are exact negations."""

    def run():
        worst = 0.0
        for (x, y), (e, p, mu, v0, c) in zip(
            log_polar_grid(),
            [(1.0, 1.0, 1.0, 1.0, 137.036), (-2.0, 0.3, 5.0, 0.01, 1.0), (0.5, -4.0, 0.2, 3.0, 2.9979e10)] * 34,
        ):
            mag = force_magnetic_y(e, mu, v0, c, x, y) * c / (e * mu * v0)
            el = -force_electric_y(e, p, x, y) / (e * p)
            worst = max(worst, abs(mag - el) / abs(el))
        return worst / _EPS

    worst_ulps, dt = _timed(run)
    return CheckResult("AC7", "electric/magnetic functional-form identity", worst_ulps <= 8.0,
                       worst_ulps, 0.0, 8.0, dt, "max relative deviation in units of machine epsilon")


def _column(header, table, name):
    i = header.index(name)
    return np.array([row[i] for row in table])


def check_scaling_laws(cfg: RunConfig) -> CheckResult:
    """Criterion 8: 1/v0 electric phase, linearity in p and B0 A, v0-free magnetic phase."""

    def run():
        v0s = list(np.logspace(-1.0, 0.0, 6) * cfg.beam.speed_v0)
        methods = ("closed", "wkb")
        h, t = sweep_table(cfg, "electric", "v0", v0s, methods)
        exps = []
        for col in ("ClosedForm.delta_phi", "WkbNumeric.delta_phi"):
            phi = np.abs(_column(h, t, col))
            exps.append(np.polyfit(np.log(v0s), np.log(phi), 1)[0])
        exponent_dev = max(abs(x + 1.0) for x in exps)

        def linearity(kind, param, grid, col):
            hh, tt = sweep_table(cfg, kind, param, grid, methods)
            xs = np.asarray(grid)
            ys = _column(hh, tt, col)
            slope = float(xs @ ys / (xs @ xs))
            return float(np.max(np.abs(ys - slope * xs)) / np.max(np.abs(ys)))

        lam = list(np.linspace(0.2, 2.0, 5) * cfg.line.lambda_)
        b0s = list(np.linspace(0.2, 2.0, 5) * cfg.solenoid.b0)
        areas = list(np.linspace(0.2, 2.0, 5) * cfg.solenoid.area)
        lin = max(
            linearity("electric", "lambda", lam, "ClosedForm.delta_phi"),
            linearity("magnetic", "b0", b0s, "ClosedForm.delta_phi"),
            linearity("magnetic", "area", areas, "Flux.delta_phi"),
        )
        hm, tm = sweep_table(cfg, "magnetic", "v0", v0s, methods)
        mag_phi = _column(hm, tm, "ClosedForm.delta_phi")
        variation = float((mag_phi.max() - mag_phi.min()) / abs(mag_phi.mean()))
        return exponent_dev, lin, variation

    (exponent_dev, lin, variation), dt = _timed(run)
    passed = exponent_dev <= 0.01 and lin < 1e-10 and variation < 1e-12
    return CheckResult("AC8", "scaling laws from sweeps", passed, exponent_dev, 0.0, 0.01, dt,
                       f"|exponent+1| shown; linearity residual {lin:.3g} (<1e-10); "
                       f"magnetic v0 variation {variation:.3g} (<1e-12)")


def dipole_limit_errors(epsilons, x=1.0, y=0.5, lambda_=1.0):
    out = []
    for eps in epsilons:
        line = ElectricDipoleLine(lambda_, eps)
        exact = float(potential_dipole_line_exact(line, x, y))
        approx = potential_dipole_line_approx(line.moment_p, x, y)
        out.append(abs(exact / approx - 1.0))
    return out


def check_dipole_limit(cfg: RunConfig) -> CheckResult:
    """Criterion 9: two-line potential converges to the point-dipole form at order >= 1.9."""
    eps = list(np.logspace(-1.0, -4.0, 7))

    def run():
        orders = []
        for x, y in ((1.0, 0.5), (2.0, -1.0), (0.3, 3.0)):
            r = math.hypot(x, y)
            scaled = [e * r for e in eps]
            errs = dipole_limit_errors(scaled, x, y)
            orders.append(fit_convergence_order(list(zip(scaled, errs))))
        return min(orders)

    order, dt = _timed(run)
    return CheckResult("AC9", "dipole-limit convergence order", order >= 1.9, order, 2.0, 1.9, dt,
                       "minimum fitted order (must be >= 1.9)")


def check_force_free_control(cfg: RunConfig) -> CheckResult:
    """Criterion 10: force_model=none gives zero trajectory lag but the same WKB phase."""
    beam, sol, consts = cfg.beam, cfg.solenoid, cfg.constants

    def run():
        free = magnetic_coupling(beam, sol, consts, ForceModel.NONE)
        dY, _, _ = trajectory_relative_displacement(free, beam, cfg.ode, cfg.force_source)
        wkb_cfg = cfg.wkb
        phi_n3, _ = phase_wkb_extrapolated(lambda w: phase_wkb_magnetic(beam, sol, w, consts),
                                           beam.slit_half_sep_d, cfg=wkb_cfg)
        # the WKB route never consults the force model; recompute under the
        # force-free configuration to show it is unchanged
        free_cfg = cfg.with_overrides({"model.force_model": "none"})
        phi_free, _ = phase_wkb_extrapolated(
            lambda w: phase_wkb_magnetic(free_cfg.beam, free_cfg.solenoid, w, free_cfg.constants),
            beam.slit_half_sep_d, cfg=free_cfg.wkb)
        return dY, phi_n3, phi_free

    (dY, phi_n3, phi_free), dt = _timed(run)
    passed = dY == 0.0 and phi_free == phi_n3 and phi_n3 != 0.0
    return CheckResult("AC10", "force-free negative control", passed, abs(dY), 0.0, 0.0, dt,
                       f"WKB phase newton3={phi_n3:.12g} none={phi_free:.12g}")


CHECKS: dict[str, tuple[str, Callable[[RunConfig], CheckResult]]] = {
    "AC1": ("force closed forms vs quadrature", check_force_quadrature),
    "AC2": ("lag chain vs time quadrature", check_lag_chain),
    "AC3": ("ODE perturbative convergence", check_ode_convergence),
    "AC4": ("d-independence", check_d_independence),
    "AC5": ("WKB vs semiclassical phase", check_wkb_agreement),
    "AC6": ("flux identity", check_flux_identity),
    "AC7": ("functional-form identity", check_functional_form),
    "AC8": ("scaling laws from sweeps", check_scaling_laws),
    "AC9": ("dipole-limit convergence", check_dipole_limit),
    "AC10": ("force-free negative control", check_force_free_control),
}


def run_checks(cfg: RunConfig, keys=None) -> list[CheckResult]:
    keys = keys or list(CHECKS)
    return [CHECKS[k][1](cfg) for k in keys]
