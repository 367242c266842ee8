import math

import pytest

from dipolephase.config import DEFAULTS, ConfigError, RunConfig, load_config, parse_overrides, read_config_file
from dipolephase.dynamics import ForceSource
from dipolephase.forces import ForceModel
from dipolephase.phase import Expansion


def test_defaults_are_unit_params():
    cfg = RunConfig.from_flat()
    assert cfg.line.moment_p == 1.0
    assert cfg.solenoid.moment_mu == pytest.approx(1.0, rel=1e-15)
    assert cfg.constants.c == 137.036
    assert cfg.beam.momentum == 1.0
    assert cfg.force_model is ForceModel.NEWTON3
    assert cfg.force_source is ForceSource.CLOSED_FORM_Y
    assert cfg.ode.y_start is None and cfg.wkb.y_max is None


def test_ini_file_round_trip(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        "[beam]\nv0 = 2.0   ; faster\nd = 3\n\n"
        "[ode]\nlocal_error_tol = 1e-8\ntail_correction = no\nforce_source = FullQuadratureXY\n\n"
        "[wkb]\nexpansion = ExactRoot\n\n[model]\nforce_model = none\n"
    )
    flat = read_config_file(path)
    assert flat["beam.v0"] == "2.0"
    cfg = load_config(path, ["beam.d=4"])
    assert cfg.beam.speed_v0 == 2.0
    assert cfg.beam.slit_half_sep_d == 4.0
    assert cfg.ode.local_error_tol == 1e-8
    assert cfg.ode.tail_correction is False
    assert cfg.force_source is ForceSource.FULL_QUADRATURE_XY
    assert cfg.wkb.expansion is Expansion.EXACT_ROOT
    assert cfg.force_model is ForceModel.NONE


@pytest.mark.parametrize("override", [
    "beam.nope=1", "beam.v0=fast", "beam.v0=-1", "beam.v0=inf", "ode.tail_correction=maybe",
    "model.force_model=newton4", "solenoid.area=0",
])
def test_bad_values_are_config_errors(override):
    with pytest.raises(ConfigError):
        load_config(None, [override])


def test_malformed_override_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_overrides(["beam.v0"])
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.ini")


def test_with_overrides_keeps_other_keys():
    cfg = RunConfig.from_flat({"electric.lambda": "2"})
    new = cfg.with_overrides({"beam.v0": "0.5"})
    assert new.line.lambda_ == 2.0 and new.beam.speed_v0 == 0.5
    assert set(new.flat) == set(DEFAULTS)


def test_default_b0_is_exact():
    assert float(DEFAULTS["solenoid.b0"]) == 4.0 * math.pi


def test_shipped_default_ini_matches_defaults():
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "configs" / "default.ini"
    cfg = load_config(path)
    base = RunConfig.from_flat()
    assert (cfg.beam, cfg.line, cfg.solenoid, cfg.constants, cfg.quad, cfg.ode, cfg.wkb) == \
        (base.beam, base.line, base.solenoid, base.constants, base.quad, base.ode, base.wkb)
