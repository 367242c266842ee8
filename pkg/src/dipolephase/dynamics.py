"""Lag of a charge passing a dipole line: impulse approximation and full trajectories.

Both dipole lines push on a charge at (x, y) with the same law once the
reaction force is taken,

    F_y(on charge) = g * 4 x y / (x^2 + y^2)^2,

where g = e p for the electric line and g = -e mu v0 / c for the solenoid.
Everything in this module is written in terms of that single coupling g.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BeamParams,
    ConvergenceError,
    Constants,
    DomainError,
    ElectricDipoleLine,
    Side,
    SingularityError,
    SolenoidLine,
)
from .forces import (
    ForceModel,
    force_electric_quadrature,
    force_electric_y,
    force_magnetic_quadrature,
    reaction_on_charge,
)
from .oracle import QuadratureConfig, integrate, require_converged

__all__ = [
    "CouplingKind",
    "CouplingSpec",
    "ForceSource",
    "OdeConfig",
    "Trajectory",
    "electric_coupling",
    "magnetic_coupling",
    "coupling_for_strength",
    "delta_vy",
    "lag_displacement",
    "relative_displacement",
    "delta_vy_quadrature",
    "lag_displacement_quadrature",
    "integrate_trajectory",
    "lag_from_trajectory",
    "trajectory_relative_displacement",
]


class CouplingKind(str, enum.Enum):
    ELECTRIC = "Electric"
    MAGNETIC = "Magnetic"


class ForceSource(str, enum.Enum):
    CLOSED_FORM_Y = "ClosedFormY"
    FULL_QUADRATURE_XY = "FullQuadratureXY"


@dataclass(frozen=True)
class CouplingSpec:
    kind: CouplingKind
    g: float

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise DomainError("coupling g must be finite")

    def strength(self, beam: BeamParams) -> float:
        """Dimensionless strength 4 pi |g| / (m v0^2 d) = |Delta Y| / d."""
        return 4.0 * math.pi * abs(self.g) / (beam.mass_m * beam.speed_v0**2 * beam.slit_half_sep_d)


def electric_coupling(beam: BeamParams, line: ElectricDipoleLine) -> CouplingSpec:
    return CouplingSpec(CouplingKind.ELECTRIC, beam.charge_e * line.moment_p)


def magnetic_coupling(beam: BeamParams, sol: SolenoidLine, constants: Constants | None = None,
                      force_model: ForceModel = ForceModel.NEWTON3) -> CouplingSpec:
    """Coupling seen by the charge; zero when the reaction force is switched off."""
    c = constants.c if constants is not None else sol.c
    if ForceModel(force_model) is ForceModel.NONE:
        return CouplingSpec(CouplingKind.MAGNETIC, 0.0)
    return CouplingSpec(CouplingKind.MAGNETIC, -beam.charge_e * sol.moment_mu * beam.speed_v0 / c)


def coupling_for_strength(kind: CouplingKind, strength: float, beam: BeamParams) -> CouplingSpec:
    """Coupling with the given dimensionless strength and the sign of e p > 0 / e mu > 0."""
    g = strength * beam.mass_m * beam.speed_v0**2 * beam.slit_half_sep_d / (4.0 * math.pi)
    if CouplingKind(kind) is CouplingKind.MAGNETIC:
        g = -g
    return CouplingSpec(CouplingKind(kind), g)


def delta_vy(coupling: CouplingSpec, beam: BeamParams, side: Side, y_e: float) -> float:
    """Velocity change accumulated from y = -inf up to y_e along the straight path."""
    x_e = side.x_position(beam.slit_half_sep_d)
    return -(coupling.g / (beam.mass_m * beam.speed_v0)) * 2.0 * x_e / (x_e * x_e + y_e * y_e)


def lag_displacement(coupling: CouplingSpec, beam: BeamParams, side: Side) -> float:
    return -2.0 * math.pi * coupling.g * side.value / (beam.mass_m * beam.speed_v0**2)


def relative_displacement(coupling: CouplingSpec, beam: BeamParams) -> float:
    return lag_displacement(coupling, beam, Side.PLUS) - lag_displacement(coupling, beam, Side.MINUS)


def _force_y_on_charge(coupling: CouplingSpec, x, y):
    # electric form with e p -> g already carries the third-law sign flip
    return -force_electric_y(1.0, coupling.g, x, y)


def delta_vy_quadrature(coupling: CouplingSpec, beam: BeamParams, side: Side, y_e: float,
                        cfg: QuadratureConfig | None = None):
    """``(1/m) int_{-inf}^{t} F_y dt'`` by quadrature over the straight path.

    Past the line (y_e > 0) the equivalent ``-int_{t}^{inf}`` is used: the
    force is odd in y so the whole-path impulse vanishes, and integrating the
    short remaining tail avoids cancelling the two lobes against each other.
    Returns ``(value, error_bound)``.
    """
    d = beam.slit_half_sep_d
    x_e = side.x_position(d)
    v0 = beam.speed_v0

    def impulse_rate(t):
        return _force_y_on_charge(coupling, x_e, v0 * t) / beam.mass_m

    t_e = y_e / v0
    if y_e > 0:
        res = integrate(impulse_rate, t_e, math.inf, cfg, scale=d / v0)
        res = require_converged(res, "velocity change")
        return -res.value, res.error_bound
    res = require_converged(integrate(impulse_rate, -math.inf, t_e, cfg, scale=d / v0),
                            "velocity change")
    return res.value, res.error_bound


def lag_displacement_quadrature(coupling: CouplingSpec, beam: BeamParams, side: Side,
                                cfg: QuadratureConfig | None = None,
                                inner_cfg: QuadratureConfig | None = None):
    """Lag ``int dt Delta v_y(t)`` with Delta v_y itself obtained by quadrature of the force.

    The inner (velocity) integrals default to a purely relative tolerance
    well below the outer one. Delta v_y keeps one sign along the path, so the
    inner errors add at most ``max(inner_err / |Delta v_y|) * |lag|`` to the
    outer bound. Returns ``(value, error_bound)``.
    """
    cfg = cfg or QuadratureConfig()
    inner_cfg = inner_cfg or QuadratureConfig(abs_tol=1e-300, rel_tol=min(1e-12, cfg.rel_tol * 1e-3))
    if coupling.g == 0.0:
        return 0.0, 0.0
    d = beam.slit_half_sep_d
    v0 = beam.speed_v0
    worst_rel = 0.0

    def velocity_change(t):
        nonlocal worst_rel
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            out[i], err = delta_vy_quadrature(coupling, beam, side, v0 * ti, inner_cfg)
            if out[i] != 0.0:
                worst_rel = max(worst_rel, err / abs(out[i]))
        return out

    outer = require_converged(integrate(velocity_change, -math.inf, math.inf, cfg, scale=d / v0),
                              "lag displacement")
    return outer.value, outer.error_bound + worst_rel * abs(outer.value)


@dataclass(frozen=True)
class OdeConfig:
    """Window and error control for trajectory integration.

    ``y_start``/``y_end`` default to -1e3 d and +1e3 d. ``local_error_tol``
    bounds the per-step error relative to the natural scale of each state
    component.
    """

    y_start: float | None = None
    y_end: float | None = None
    local_error_tol: float = 1e-10
    max_steps: int = 10**7
    tail_correction: bool = True

    def __post_init__(self):
        if not self.local_error_tol > 0:
            raise DomainError("local_error_tol must be > 0")
        if self.max_steps < 1:
            raise DomainError("max_steps must be >= 1")
        if self.y_start is not None and not self.y_start < 0:
            raise DomainError("y_start must be < 0")
        if self.y_end is not None and not self.y_end > 0:
            raise DomainError("y_end must be > 0")

    def window(self, d: float) -> tuple[float, float]:
        y0 = -1e3 * d if self.y_start is None else self.y_start
        y1 = 1e3 * d if self.y_end is None else self.y_end
        return y0, y1


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integrated trajectory.

    Along with the absolute state, ``y_offset`` and ``vy_offset`` hold the
    departure from the unperturbed motion y = y_start + v0 (t - t_start),
    integrated directly so the tiny lag is not lost to cancellation against
    the O(y_end) path length.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    y_offset: np.ndarray
    vy_offset: np.ndarray
    y_start: float
    y_end: float
    tail_correction: float = 0.0
    steps: int = 0
    rejected_steps: int = 0
    evaluations: int = 0
    max_local_error: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _tail(coupling, beam, x_side, y0, y1, duration):
    m, v0 = beam.mass_m, beam.speed_v0
    k = coupling.g / (m * v0 * v0)
    before = -2.0 * k * math.atan(x_side / abs(y0))
    after = -2.0 * k * math.atan(x_side / y1)
    dv_before = -(coupling.g / (m * v0)) * 2.0 * x_side / (x_side * x_side + y0 * y0)
    return before + after + dv_before * duration


def integrate_trajectory(coupling: CouplingSpec, beam: BeamParams, side: Side,
                         cfg: OdeConfig | None = None,
                         force_source: ForceSource = ForceSource.CLOSED_FORM_Y,
                         quad_cfg: QuadratureConfig | None = None) -> Trajectory:
    """Integrate m dv/dt = F(on charge) from (x_side, y_start) with velocity (0, v0).

    Uses an adaptive Dormand-Prince 5(4) pair. The step is also capped at a
    quarter of the current distance to the line (divided by v0) so a large
    step can never jump across the interaction region.

    Raises ConvergenceError past ``max_steps``, SingularityError if the charge
    comes within 1e-3 d of the line, and DomainError if it is turned back.
    """
    cfg = cfg or OdeConfig()
    force_source = ForceSource(force_source)
    m, v0, d = beam.mass_m, beam.speed_v0, beam.slit_half_sep_d
    x_side = side.x_position(d)
    y0, y1 = cfg.window(d)
    duration = (y1 - y0) / v0
    g = coupling.g

    if force_source is ForceSource.FULL_QUADRATURE_XY:
        quad_cfg = quad_cfg or QuadratureConfig(abs_tol=max(1e-13 * abs(g) / d**2, 1e-300), rel_tol=1e-12)

        def line_force(x, y):
            # F_line / g is the same field for both kinds of line
            if coupling.kind is CouplingKind.ELECTRIC:
                f, _ = force_electric_quadrature(1.0, g, x, y, quad_cfg)
            else:
                f, _ = force_magnetic_quadrature(1.0, -g, 1.0, 1.0, x, y, quad_cfg)
            return f

        def force(x, y):
            if g == 0.0:
                return 0.0, 0.0
            f = reaction_on_charge(line_force(x, y))
            return f.x, f.y
    else:
        def force(x, y):
            return 0.0, _force_y_on_charge(coupling, x, y)

    evaluations = 0

    def rhs(t, s):
        nonlocal evaluations
        evaluations += 1
        x = x_side + s[0]
        y = y0 + v0 * t + s[1]
        if x * x + y * y < (1e-3 * d) ** 2:
            raise SingularityError(f"trajectory reached the dipole line at t={t!r}")
        fx, fy = force(x, y)
        return np.array([s[2], s[3], fx / m, fy / m])

    # natural scales of (dx, dy, dvx, dvy)
    lag_scale = max(abs(2.0 * math.pi * g / (m * v0 * v0)), 1e-300 * d)
    scale = np.array([lag_scale, lag_scale, lag_scale * v0 / d, lag_scale * v0 / d])
    tol = cfg.local_error_tol

    t = 0.0
    s = np.zeros(4)
    ts, states = [t], [s.copy()]
    h = 0.05 * d / v0
    k1 = rhs(t, s)
    steps = rejected = 0
    max_err = 0.0
    while t < duration:
        if steps + rejected >= cfg.max_steps:
            raise ConvergenceError(f"step limit {cfg.max_steps} reached at t={t!r}",
                                   partial=(np.array(ts), np.array(states)))
        y_now = y0 + v0 * t + s[1]
        dist = math.hypot(x_side + s[0], y_now)
        h = min(h, 0.25 * max(dist, d) / v0, duration - t)
        ks = [k1]
        for i in range(1, 7):
            ks.append(rhs(t + _C[i] * h, s + h * sum(a * k for a, k in zip(_A[i], ks))))
        s_new = s + h * sum(b * k for b, k in zip(_B5, ks))
        err_vec = h * sum(e * k for e, k in zip(_E, ks))
        weight = scale + np.abs(s_new)
        err_norm = float(np.max(np.abs(err_vec) / weight)) / tol
        if err_norm <= 1.0:
            t += h
            s = s_new
            k1 = ks[6]
            steps += 1
            max_err = max(max_err, err_norm * tol)
            ts.append(t)
            states.append(s.copy())
            if v0 + s[3] <= 0.0:
                raise DomainError("charge was turned back before passing the line; coupling too strong")
            factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        h *= factor

    ts = np.array(ts)
    states = np.array(states)
    y_ref = y0 + v0 * ts
    tail = _tail(coupling, beam, x_side, y0, y1, duration) if cfg.tail_correction else 0.0
    return Trajectory(
        t=ts,
        x=x_side + states[:, 0],
        y=y_ref + states[:, 1],
        vx=states[:, 2],
        vy=v0 + states[:, 3],
        y_offset=states[:, 1],
        vy_offset=states[:, 3],
        y_start=y0,
        y_end=y1,
        tail_correction=tail,
        steps=steps,
        rejected_steps=rejected,
        evaluations=evaluations,
        max_local_error=max_err,
        meta={"side": side.name, "force_source": force_source.value, "g": g},
    )


def lag_from_trajectory(traj: Trajectory, beam: BeamParams) -> float:
    if traj.y_end <= 0:
        raise DomainError("trajectory ends before passing the dipole line")
    return float(traj.y_offset[-1]) + traj.tail_correction


def trajectory_relative_displacement(coupling: CouplingSpec, beam: BeamParams,
                                     cfg: OdeConfig | None = None,
                                     force_source: ForceSource = ForceSource.CLOSED_FORM_Y):
    """Delta Y from one trajectory on each side. Returns ``(delta_Y, plus, minus)``."""
    plus = lag_from_trajectory(integrate_trajectory(coupling, beam, Side.PLUS, cfg, force_source), beam)
    minus = lag_from_trajectory(integrate_trajectory(coupling, beam, Side.MINUS, cfg, force_source), beam)
    return plus - minus, plus, minus
