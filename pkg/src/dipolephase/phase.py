"""Phase shifts: momentum times lag, the flux expression, and WKB path integrals."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BeamParams,
    Constants,
    DomainError,
    ElectricDipoleLine,
    Method,
    PhaseResult,
    Side,
    SolenoidLine,
    ValidityWarning,
)
from .dynamics import CouplingSpec, lag_displacement
from .fields import (
    potential_dipole_line_approx,
    potential_dipole_line_exact,
    vector_potential_solenoid,
)
from .oracle import QuadratureConfig, integrate, require_converged, richardson_extrapolate

__all__ = [
    "Expansion",
    "PotentialModel",
    "WkbConfig",
    "phase_semiclassical",
    "phase_flux",
    "semiclassical_result",
    "phase_wkb_electric_analytic",
    "phase_wkb_magnetic_analytic",
    "wkb_validity_ratio",
    "phase_wkb_electric",
    "phase_wkb_magnetic",
    "phase_wkb_extrapolated",
    "vector_potential_circulation",
    "DEFAULT_Y_MAX_FACTORS",
]

DEFAULT_Y_MAX_FACTORS = (1e3, 1e4, 1e5)


class Expansion(str, enum.Enum):
    FIRST_ORDER = "FirstOrder"
    EXACT_ROOT = "ExactRoot"


class PotentialModel(str, enum.Enum):
    DIPOLE = "dipole"
    TWO_LINE = "two_line"


@dataclass(frozen=True)
class WkbConfig:
    """Straight-path WKB settings.

    ``y_max=None`` means 1e4 d. ``potential`` picks the point-dipole form
    2 p x / r^2 or the exact two-line-charge potential.
    """

    y_max: float | None = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    expansion: Expansion = Expansion.FIRST_ORDER
    potential: PotentialModel = PotentialModel.DIPOLE

    def __post_init__(self):
        if self.y_max is not None and not self.y_max > 0:
            raise DomainError("y_max must be > 0")
        object.__setattr__(self, "expansion", Expansion(self.expansion))
        object.__setattr__(self, "potential", PotentialModel(self.potential))

    def path_length(self, d: float) -> float:
        return 1e4 * d if self.y_max is None else self.y_max


def phase_semiclassical(beam: BeamParams, delta_Y: float, hbar: float) -> float:
    if not hbar > 0:
        raise DomainError("hbar must be > 0")
    return beam.mass_m * beam.speed_v0 * delta_Y / hbar


def phase_flux(e: float, b0: float, area: float, c: float, hbar: float) -> float:
    if not (c > 0 and hbar > 0):
        raise DomainError("c and hbar must be > 0")
    return e * b0 * area / (c * hbar)


def semiclassical_result(coupling: CouplingSpec, beam: BeamParams, hbar: float) -> PhaseResult:
    plus = lag_displacement(coupling, beam, Side.PLUS)
    minus = lag_displacement(coupling, beam, Side.MINUS)
    return PhaseResult.from_lags(plus, minus, beam.momentum, hbar, Method.CLOSED_FORM)


def phase_wkb_electric_analytic(beam: BeamParams, line: ElectricDipoleLine, hbar: float) -> float:
    return -4.0 * math.pi * beam.charge_e * line.moment_p / (beam.speed_v0 * hbar)


def phase_wkb_magnetic_analytic(beam: BeamParams, sol: SolenoidLine, constants: Constants) -> float:
    return 4.0 * math.pi * beam.charge_e * sol.moment_mu / (constants.c * constants.hbar)


def _potential(line: ElectricDipoleLine, model: PotentialModel):
    if model is PotentialModel.DIPOLE:
        return lambda x, y: potential_dipole_line_approx(line.moment_p, x, y)
    return lambda x, y: potential_dipole_line_exact(line, x, y)


def wkb_validity_ratio(beam: BeamParams, line: ElectricDipoleLine,
                       model: PotentialModel = PotentialModel.DIPOLE) -> float:
    """max |2 m e Phi| / p0^2 along the two paths (attained at y = 0)."""
    phi = _potential(line, PotentialModel(model))(beam.slit_half_sep_d, 0.0)
    return abs(2.0 * beam.mass_m * beam.charge_e * float(phi)) / beam.momentum**2


def phase_wkb_electric(beam: BeamParams, line: ElectricDipoleLine, cfg: WkbConfig | None = None,
                       hbar: float = 1.0):
    """Phase difference of the two straight paths x = +d and x = -d through the dipole potential.

    The constant p0 part of each path integral cancels and is dropped before
    integrating. Returns ``(delta_phi, error_bound)``.
    """
    cfg = cfg or WkbConfig()
    if not hbar > 0:
        raise DomainError("hbar must be > 0")
    d = beam.slit_half_sep_d
    y_max = cfg.path_length(d)
    m, e, p0 = beam.mass_m, beam.charge_e, beam.momentum
    phi = _potential(line, cfg.potential)

    ratio = wkb_validity_ratio(beam, line, cfg.potential)
    if ratio >= 0.1:
        warnings.warn(f"WKB potential ratio {ratio:.3g} >= 0.1; weak-potential expansion is poor",
                      ValidityWarning, stacklevel=2)

    if cfg.expansion is Expansion.FIRST_ORDER:
        def integrand(y):
            return -(m * e / p0) * (phi(d, y) - phi(-d, y)) / hbar
    else:
        if ratio >= 1.0:
            raise DomainError("p0^2 - 2 m e Phi < 0 on a path: the charge cannot pass classically")

        def integrand(y):
            a = p0 * p0 - 2.0 * m * e * phi(d, y)
            b = p0 * p0 - 2.0 * m * e * phi(-d, y)
            return -2.0 * m * e * (phi(d, y) - phi(-d, y)) / (np.sqrt(a) + np.sqrt(b)) / hbar

    if line.moment_p == 0.0:
        return 0.0, 0.0
    res = require_converged(integrate(integrand, -y_max, y_max, cfg.quadrature, scale=d),
                            "electric WKB phase")
    return res.value, res.error_bound


def phase_wkb_magnetic(beam: BeamParams, sol: SolenoidLine, cfg: WkbConfig | None = None,
                       constants: Constants | None = None):
    """(e / c hbar) times the difference of the A_y line integrals along x = +d and x = -d.

    Returns ``(delta_phi, error_bound)``.
    """
    cfg = cfg or WkbConfig()
    constants = constants or Constants(c=sol.c)
    d = beam.slit_half_sep_d
    y_max = cfg.path_length(d)
    k = beam.charge_e / (constants.c * constants.hbar)
    mu = sol.moment_mu

    def integrand(y):
        return k * (vector_potential_solenoid(mu, d, y).y - vector_potential_solenoid(mu, -d, y).y)

    if mu == 0.0:
        return 0.0, 0.0
    res = require_converged(integrate(integrand, -y_max, y_max, cfg.quadrature, scale=d),
                            "magnetic WKB phase")
    return res.value, res.error_bound


def phase_wkb_extrapolated(compute, d: float, factors=DEFAULT_Y_MAX_FACTORS, cfg: WkbConfig | None = None):
    """Richardson-extrapolate a truncated WKB phase to an infinite path.

    ``compute(cfg)`` must return ``(phase, error_bound)`` for a WkbConfig;
    it is called once per path length ``factor * d``. The truncation error
    is a series in h = d / y_max starting at first order.

    Returns ``(phase, error_estimate)``; the estimate adds the quadrature
    bounds, amplified by the extrapolation weights, to the Richardson
    estimate.
    """
    cfg = cfg or WkbConfig()
    hs, values, errs = [], [], []
    for f in factors:
        sub = WkbConfig(y_max=f * d, quadrature=cfg.quadrature, expansion=cfg.expansion,
                        potential=cfg.potential)
        v, err = compute(sub)
        hs.append(1.0 / f)
        values.append(v)
        errs.append(err)
    limit, rich_err = richardson_extrapolate(list(zip(hs, values)), order=1)
    weights = []
    for i in range(len(hs)):
        unit = [1.0 if j == i else 0.0 for j in range(len(hs))]
        weights.append(richardson_extrapolate(list(zip(hs, unit)), order=1)[0])
    quad_err = sum(abs(w) * e for w, e in zip(weights, errs))
    return limit, rich_err + quad_err


def vector_potential_circulation(moment_mu: float, radius: float, center=(0.0, 0.0),
                                 cfg: QuadratureConfig | None = None):
    """Line integral of the solenoid vector potential around a circle.

    Returns ``(circulation, error_bound)``.
    """
    cx, cy = center

    def integrand(theta):
        a = vector_potential_solenoid(moment_mu, cx + radius * np.cos(theta), cy + radius * np.sin(theta))
        return radius * (-a.x * np.sin(theta) + a.y * np.cos(theta))

    # finite interval: a large scale keeps the tangent map close to linear
    res = require_converged(integrate(integrand, 0.0, 2.0 * math.pi, cfg, scale=1e3, center=math.pi),
                            "circulation")
    return res.value, res.error_bound
