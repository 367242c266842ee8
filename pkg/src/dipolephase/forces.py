"""Forces between a passing beam charge and the dipole lines.

The closed forms give the y-component of the force exerted *on the line*.
The quadrature routines rebuild the full force vector from the z-integral of
the field gradient along the line, which also supplies the x-component that
the trajectory integrator needs.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .core import SINGULAR_DISTANCE, SingularityError
from .fields import Vec3
from .oracle import QuadratureConfig, integrate_infinite, require_converged

__all__ = [
    "QuadratureConfig",
    "ForceModel",
    "force_electric_y",
    "force_magnetic_y",
    "force_electric_quadrature",
    "force_magnetic_quadrature",
    "reaction_on_charge",
]


class ForceModel(str, enum.Enum):
    """How the solenoid pushes back on the passing charge."""

    NEWTON3 = "newton3"
    NONE = "none"


def _impact_sq(x_e: float, y_e: float) -> float:
    rho_sq = x_e * x_e + y_e * y_e
    if np.any(rho_sq < SINGULAR_DISTANCE**2):
        raise SingularityError("beam charge sits on the dipole line")
    return rho_sq


def force_electric_y(e: float, moment_p: float, x_e: float, y_e: float) -> float:
    """y-force on the electric dipole line from a charge at (x_e, y_e, 0)."""
    rho_sq = _impact_sq(x_e, y_e)
    return -e * moment_p * 4.0 * x_e * y_e / (rho_sq * rho_sq)


def force_magnetic_y(e: float, moment_mu: float, v0: float, c: float, x_e: float, y_e: float) -> float:
    """y-force on the solenoid from a charge at (x_e, y_e, 0) moving with speed v0 along +y."""
    rho_sq = _impact_sq(x_e, y_e)
    return e * moment_mu * v0 / c * 4.0 * x_e * y_e / (rho_sq * rho_sq)


def _gradient_integrals(kernels, rho: float, cfg: QuadratureConfig):
    results = [
        require_converged(integrate_infinite(k, cfg, scale=rho), f"force component {axis}")
        for axis, k in zip("xyz", kernels)
    ]
    force = Vec3(*(r.value for r in results))
    return force, max(r.error_bound for r in results)


def force_electric_quadrature(e: float, moment_p: float, x_e: float, y_e: float,
                              cfg: QuadratureConfig | None = None):
    """Force on the electric dipole line, ``int dz p d/dx E`` at x = y = 0.

    The integrand is the x-derivative of the Coulomb field of the beam
    charge. Returns ``(force, error_bound)`` with the bound being the largest
    component bound.
    """
    cfg = cfg or QuadratureConfig()
    rho = math.sqrt(_impact_sq(x_e, y_e))
    # separation from source to the point (0, 0, z) on the line
    dx, dy = -x_e, -y_e
    k = e * moment_p

    def r2(z):
        return dx * dx + dy * dy + z * z

    def fx(z):
        s = r2(z)
        return k * (1.0 / s**1.5 - 3.0 * dx * dx / s**2.5)

    def fy(z):
        return k * (-3.0 * dx * dy / r2(z) ** 2.5)

    def fz(z):
        return k * (-3.0 * dx * z / r2(z) ** 2.5)

    return _gradient_integrals((fx, fy, fz), rho, cfg)


def force_magnetic_quadrature(e: float, moment_mu: float, v0: float, c: float,
                              x_e: float, y_e: float, cfg: QuadratureConfig | None = None):
    """Force on the solenoid, ``int dz grad(mu B_z)`` at x = y = 0."""
    cfg = cfg or QuadratureConfig()
    rho = math.sqrt(_impact_sq(x_e, y_e))
    dx, dy = -x_e, -y_e
    k = -moment_mu * e * v0 / c  # B_z = -(e v0 / c) dx / R^3

    def r2(z):
        return dx * dx + dy * dy + z * z

    def fx(z):
        s = r2(z)
        return k * (1.0 / s**1.5 - 3.0 * dx * dx / s**2.5)

    def fy(z):
        return k * (-3.0 * dx * dy / r2(z) ** 2.5)

    def fz(z):
        return k * (-3.0 * dx * z / r2(z) ** 2.5)

    return _gradient_integrals((fx, fy, fz), rho, cfg)


def reaction_on_charge(force_on_line, model: ForceModel = ForceModel.NEWTON3):
    """Force on the passing charge given the force on the line.

    ``ForceModel.NONE`` switches the reaction off (the force-free reading of
    the magnetic case). Works on scalars, tuples and arrays.
    """
    sign = 0.0 if ForceModel(model) is ForceModel.NONE else -1.0
    if isinstance(force_on_line, tuple):
        return Vec3(*(sign * f for f in force_on_line))
    return sign * force_on_line
