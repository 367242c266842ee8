"""Point evaluation of the fields and potentials of the beam charge and dipole lines."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import SINGULAR_DISTANCE, ElectricDipoleLine, SingularityError

__all__ = [
    "Vec3",
    "efield_of_beam_charge",
    "bfield_of_moving_charge",
    "potential_dipole_line_exact",
    "potential_dipole_line_approx",
    "vector_potential_solenoid",
]


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1] + self.z * other[2]


def _separation(source, eval_at):
    rx = eval_at[0] - source[0]
    ry = eval_at[1] - source[1]
    rz = eval_at[2] - source[2]
    r = math.sqrt(rx * rx + ry * ry + rz * rz)
    if r < SINGULAR_DISTANCE:
        raise SingularityError(f"field point {tuple(eval_at)} coincides with source {tuple(source)}")
    return rx, ry, rz, r


def efield_of_beam_charge(e: float, source, eval_at) -> Vec3:
    """Coulomb field of a point charge ``e`` at ``source``, evaluated at ``eval_at``."""
    rx, ry, rz, r = _separation(source, eval_at)
    k = e / r**3
    return Vec3(k * rx, k * ry, k * rz)


def bfield_of_moving_charge(e: float, v0: float, c: float, source, eval_at) -> Vec3:
    """Low-velocity magnetic field of a charge moving with velocity ``v0`` along +y."""
    rx, ry, rz, r = _separation(source, eval_at)
    k = e * v0 / (c * r**3)
    return Vec3(k * rz, 0.0, -k * rx)


def potential_dipole_line_exact(line: ElectricDipoleLine, x: float, y: float) -> float:
    """Potential of the two line charges +lambda at (eps, 0) and -lambda at (-eps, 0); accepts arrays.

    Written as ``lambda * log1p(4 eps x / r1^2)`` so the difference of the two
    logarithms does not cancel when eps is tiny compared to the distance.
    """
    eps = line.epsilon
    r1_sq = (x - eps) ** 2 + y * y
    r2_sq = (x + eps) ** 2 + y * y
    if np.any(np.minimum(r1_sq, r2_sq) < SINGULAR_DISTANCE**2):
        raise SingularityError(f"({x}, {y}) lies on a line charge")
    return line.lambda_ * np.log1p(4.0 * eps * x / r1_sq)


def potential_dipole_line_approx(moment_p: float, x: float, y: float) -> float:
    """Point-dipole-line potential 2 p x / (x^2 + y^2); accepts arrays."""
    r_sq = x * x + y * y
    if np.any(r_sq < SINGULAR_DISTANCE**2):
        raise SingularityError("dipole potential evaluated on the dipole line")
    return 2.0 * moment_p * x / r_sq


def vector_potential_solenoid(moment_mu: float, x: float, y: float) -> Vec3:
    """Azimuthal vector potential outside a thin solenoid of moment per length ``moment_mu``.

    Accepts arrays for x and y (the components are then arrays too).
    """
    r_sq = x * x + y * y
    if np.any(r_sq < SINGULAR_DISTANCE**2):
        raise SingularityError("vector potential evaluated on the solenoid axis")
    k = 2.0 * moment_mu / r_sq
    return Vec3(-k * y, k * x, 0.0)
