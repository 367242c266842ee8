"""Tables behind the CLI: per-method results for one configuration, and sweeps."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import RunConfig
from .core import ConvergenceError, DomainError, Method, PhaseResult, Side
from .dynamics import (
    CouplingSpec,
    delta_vy,
    electric_coupling,
    integrate_trajectory,
    lag_displacement_quadrature,
    lag_from_trajectory,
    magnetic_coupling,
)
from .phase import (
    phase_flux,
    phase_wkb_electric,
    phase_wkb_electric_analytic,
    phase_wkb_extrapolated,
    phase_wkb_magnetic,
    phase_wkb_magnetic_analytic,
    semiclassical_result,
)

__all__ = ["Row", "METHODS", "SWEEP_KEYS", "parse_methods", "electric_rows", "magnetic_rows", "sweep_table"]

METHODS = ("closed", "quadrature", "trajectory", "wkb")

SWEEP_KEYS = {
    "d": "beam.d",
    "v0": "beam.v0",
    "lambda": "electric.lambda",
    "epsilon": "electric.epsilon",
    "b0": "solenoid.b0",
    "area": "solenoid.area",
    "c": "constants.c",
}


@dataclass(frozen=True)
class Row:
    method: str
    quantity: str
    value: float
    error_estimate: float = 0.0


def parse_methods(text: str | None) -> tuple[str, ...]:
    if text is None or text.strip() in ("", "all"):
        return METHODS
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    bad = [n for n in names if n not in METHODS]
    if bad:
        raise DomainError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)} or all")
    return names


def _result_rows(res: PhaseResult) -> list[Row]:
    m = res.method.value
    err = res.error_estimate
    return [
        Row(m, "delta_y_plus", res.delta_y_plus, err),
        Row(m, "delta_y_minus", res.delta_y_minus, err),
        Row(m, "delta_Y", res.delta_Y, 2 * err),
        Row(m, "delta_phi", res.delta_phi, 2 * err),
    ]


def _nan_rows(method: Method) -> list[Row]:
    nan = math.nan
    return _result_rows(PhaseResult(nan, nan, nan, nan, method, nan))


def _lag_rows(cfg: RunConfig, coupling: CouplingSpec, methods) -> tuple[list[Row], float]:
    beam, hbar = cfg.beam, cfg.constants.hbar
    rows: list[Row] = []
    closed = semiclassical_result(coupling, beam, hbar)
    if "closed" in methods:
        d = beam.slit_half_sep_d
        for k in (-10.0, -1.0, 0.0, 1.0, 10.0):
            rows.append(Row(Method.CLOSED_FORM.value, f"delta_vy_plus@y={k:g}d",
                            delta_vy(coupling, beam, Side.PLUS, k * d)))
        rows.extend(_result_rows(closed))

    def add(res: PhaseResult):
        rows.extend(_result_rows(res))
        rows.append(Row(res.method.value, "delta_phi_minus_closed_form", res.delta_phi - closed.delta_phi))

    if "quadrature" in methods:
        plus, e_plus = lag_displacement_quadrature(coupling, beam, Side.PLUS, cfg.quad)
        minus, e_minus = lag_displacement_quadrature(coupling, beam, Side.MINUS, cfg.quad)
        add(PhaseResult.from_lags(plus, minus, beam.momentum, hbar, Method.QUADRATURE, max(e_plus, e_minus)))

    if "trajectory" in methods:
        try:
            lags, errs = [], []
            for side in (Side.PLUS, Side.MINUS):
                traj = integrate_trajectory(coupling, beam, side, cfg.ode, cfg.force_source)
                lags.append(lag_from_trajectory(traj, beam))
                errs.append(traj.max_local_error * max(abs(closed.delta_y_plus), 1e-300) * traj.steps)
            add(PhaseResult.from_lags(lags[0], lags[1], beam.momentum, hbar, Method.TRAJECTORY, max(errs)))
        except (DomainError, ConvergenceError) as exc:
            warnings.warn(f"trajectory method skipped: {exc}", RuntimeWarning, stacklevel=2)
            rows.extend(_nan_rows(Method.TRAJECTORY))
    return rows, closed.delta_phi


def electric_rows(cfg: RunConfig, methods=METHODS) -> list[Row]:
    beam, line, hbar = cfg.beam, cfg.line, cfg.constants.hbar
    coupling = electric_coupling(beam, line)
    rows, closed_phi = _lag_rows(cfg, coupling, methods)
    if "wkb" in methods:
        rows.append(Row(Method.WKB_ANALYTIC.value, "delta_phi", phase_wkb_electric_analytic(beam, line, hbar)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            phi, err = phase_wkb_extrapolated(lambda w: phase_wkb_electric(beam, line, w, hbar),
                                              beam.slit_half_sep_d, cfg=cfg.wkb)
        rows.append(Row(Method.WKB_NUMERIC.value, "delta_phi", phi, err))
        rows.append(Row(Method.WKB_NUMERIC.value, "delta_phi_minus_closed_form", phi - closed_phi))
    return rows


def magnetic_rows(cfg: RunConfig, methods=METHODS) -> list[Row]:
    beam, sol, consts = cfg.beam, cfg.solenoid, cfg.constants
    coupling = magnetic_coupling(beam, sol, consts, cfg.force_model)
    rows, closed_phi = _lag_rows(cfg, coupling, methods)
    if "closed" in methods:
        rows.append(Row(Method.FLUX.value, "delta_phi",
                        phase_flux(beam.charge_e, sol.b0, sol.area, consts.c, consts.hbar)))
    if "wkb" in methods:
        rows.append(Row(Method.WKB_ANALYTIC.value, "delta_phi", phase_wkb_magnetic_analytic(beam, sol, consts)))
        phi, err = phase_wkb_extrapolated(lambda w: phase_wkb_magnetic(beam, sol, w, consts),
                                          beam.slit_half_sep_d, cfg=cfg.wkb)
        rows.append(Row(Method.WKB_NUMERIC.value, "delta_phi", phi, err))
        rows.append(Row(Method.WKB_NUMERIC.value, "delta_phi_minus_closed_form", phi - closed_phi))
    return rows


def _sweep_point(args):
    cfg, kind, key, value, methods = args
    point = cfg.with_overrides({key: repr(float(value))})
    rows = electric_rows(point, methods) if kind == "electric" else magnetic_rows(point, methods)
    return rows


def sweep_table(cfg: RunConfig, kind: str, param: str, values, methods=("closed", "wkb"), jobs: int = 1):
    """One wide row per grid value, in grid order.

    Returns ``(header, rows)``; value columns are ``method.quantity`` and
    each is followed by its ``.err`` column.
    """
    if param not in SWEEP_KEYS:
        raise DomainError(f"cannot sweep {param!r}; choose from {', '.join(SWEEP_KEYS)}")
    if kind not in ("electric", "magnetic"):
        raise DomainError("sweep kind must be electric or magnetic")
    key = SWEEP_KEYS[param]
    tasks = [(cfg, kind, key, v, tuple(methods)) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    header = [param]
    if results:
        for r in results[0]:
            header += [f"{r.method}.{r.quantity}", f"{r.method}.{r.quantity}.err"]
    table = []
    for v, rows in zip(values, results):
        line = [float(v)]
        for r in rows:
            line += [r.value, r.error_estimate]
        table.append(line)
    return header, table

