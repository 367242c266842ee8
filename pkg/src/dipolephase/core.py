"""Domain types, constants and error classes shared by the whole package.

Units are Gaussian with an explicit speed of light. The default "desk"
system sets e = m = v0 = hbar = 1 and c = 137.036 so that magnetic effects
show up at their natural 1/c size while every number stays O(1).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

__all__ = [
    "DomainError",
    "SingularityError",
    "ConvergenceError",
    "ValidityWarning",
    "Constants",
    "BeamParams",
    "ElectricDipoleLine",
    "SolenoidLine",
    "Method",
    "Side",
    "PhaseResult",
    "make_electric_dipole_line",
    "make_solenoid_line",
    "SINGULAR_DISTANCE",
]

# Evaluations closer than this to a source line are refused.
SINGULAR_DISTANCE = 1e-12

DESK_C = 137.036


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation point coincides with a field source."""


class ConvergenceError(RuntimeError):
    """A numerical procedure stopped before meeting its tolerance.

    ``partial`` carries the best available estimate (or None).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ValidityWarning(UserWarning):
    """An approximation condition (eps << d, v0 << c, weak potential) is violated."""


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class Constants:
    c: float = DESK_C
    hbar: float = 1.0

    def __post_init__(self):
        _check_finite(c=self.c, hbar=self.hbar)
        if self.c <= 0 or self.hbar <= 0:
            raise DomainError("c and hbar must be strictly positive")


@dataclass(frozen=True)
class BeamParams:
    """Charged-particle beams moving along +y at x = +d and x = -d."""

    charge_e: float = 1.0
    mass_m: float = 1.0
    speed_v0: float = 1.0
    slit_half_sep_d: float = 1.0

    def __post_init__(self):
        _check_finite(
            charge_e=self.charge_e,
            mass_m=self.mass_m,
            speed_v0=self.speed_v0,
            slit_half_sep_d=self.slit_half_sep_d,
        )
        if self.speed_v0 <= 0:
            raise DomainError("speed_v0 must be > 0")
        if self.mass_m <= 0:
            raise DomainError("mass_m must be > 0")
        if self.slit_half_sep_d <= 0:
            raise DomainError("slit_half_sep_d must be > 0")

    @property
    def momentum(self) -> float:
        return self.mass_m * self.speed_v0

    def is_relativistic(self, c: float) -> bool:
        """True when v0/c exceeds 0.1, outside the nonrelativistic treatment."""
        return self.speed_v0 / c > 0.1

    def check_regime(self, constants: Constants) -> bool:
        """Warn (and return False) if the beam is too fast for the model."""
        if self.is_relativistic(constants.c):
            warnings.warn(
                f"v0/c = {self.speed_v0 / constants.c:.3g} > 0.1; "
                "nonrelativistic formulas are being used outside their range",
                ValidityWarning,
                stacklevel=2,
            )
            return False
        return True


@dataclass(frozen=True)
class ElectricDipoleLine:
    """Line charges +lambda at x = +epsilon and -lambda at x = -epsilon."""

    lambda_: float
    epsilon: float
    moment_p: float = field(init=False)

    def __post_init__(self):
        _check_finite(lambda_=self.lambda_, epsilon=self.epsilon)
        if self.epsilon <= 0:
            raise DomainError("epsilon must be > 0")
        object.__setattr__(self, "moment_p", 2.0 * self.epsilon * self.lambda_)

    def is_thin(self, d: float, ratio: float = 0.1) -> bool:
        """Whether epsilon << d holds (epsilon/d below ``ratio``)."""
        return self.epsilon / d < ratio

    def check_thin(self, d: float) -> bool:
        if not self.is_thin(d):
            warnings.warn(
                f"epsilon/d = {self.epsilon / d:.3g}; dipole-line approximation is poor",
                ValidityWarning,
                stacklevel=2,
            )
            return False
        return True


@dataclass(frozen=True)
class SolenoidLine:
    """Long thin solenoid along z with interior field b0 and cross-section area."""

    b0: float
    area: float
    c: float = DESK_C
    moment_mu: float = field(init=False)
    surface_current_k: float = field(init=False)

    def __post_init__(self):
        _check_finite(b0=self.b0, area=self.area, c=self.c)
        if self.area <= 0:
            raise DomainError("area must be > 0")
        if self.c <= 0:
            raise DomainError("c must be > 0")
        object.__setattr__(self, "moment_mu", self.b0 * self.area / (4.0 * math.pi))
        object.__setattr__(self, "surface_current_k", self.b0 * self.c / (4.0 * math.pi))

    @property
    def flux(self) -> float:
        return self.b0 * self.area


def make_electric_dipole_line(lambda_: float, epsilon: float) -> ElectricDipoleLine:
    return ElectricDipoleLine(lambda_, epsilon)


def make_solenoid_line(b0: float, area: float, constants: Constants | None = None) -> SolenoidLine:
    constants = constants or Constants()
    return SolenoidLine(b0, area, constants.c)


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    QUADRATURE = "Quadrature"
    TRAJECTORY = "Trajectory"
    WKB_ANALYTIC = "WkbAnalytic"
    WKB_NUMERIC = "WkbNumeric"
    FLUX = "Flux"


class Side(enum.Enum):
    PLUS = 1
    MINUS = -1

    def x_position(self, d: float) -> float:
        return self.value * d


@dataclass(frozen=True)
class PhaseResult:
    delta_y_plus: float
    delta_y_minus: float
    delta_Y: float
    delta_phi: float
    method: Method
    error_estimate: float = 0.0

    def __post_init__(self):
        expected = self.delta_y_plus - self.delta_y_minus
        if not math.isnan(self.delta_Y) and self.delta_Y != expected:
            raise DomainError(
                f"delta_Y={self.delta_Y!r} differs from delta_y_plus - delta_y_minus={expected!r}"
            )

    @classmethod
    def from_lags(cls, plus: float, minus: float, momentum: float, hbar: float,
                  method: Method, error_estimate: float = 0.0) -> "PhaseResult":
        delta_Y = plus - minus
        return cls(plus, minus, delta_Y, momentum * delta_Y / hbar, method, error_estimate)
