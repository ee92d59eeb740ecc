import json

import pytest

from core.exceptions import ConfigError
from core.models import BENCHMARK_HGO_GAINS, SwitchSpec
from utils.config_loader import ConfigLoader

PRESETS = ("hgo-paper", "hosm-paper", "sd-paper-1", "sd-paper-2", "sd-paper-exact", "sd-paper-tanh")


def _minimal(**overrides):
    data = {
        "name": "mini",
        "signal": {"terms": [{"amplitude": 1.0, "omega": 2.0}]},
        "method": "sd-cascade",
        "params": {"k": 100.0, "L": 200.0, "stages": 2},
        "plan": {"t_end": 1.0, "dt": 1e-3},
    }
    data.update(overrides)
    return data


def test_presets_are_listed():
    assert set(PRESETS) <= set(ConfigLoader.list_presets())


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load_and_round_trip(name):
    cfg = ConfigLoader.load(name)
    assert cfg.name == name
    assert ConfigLoader.from_dict(ConfigLoader.to_dict(cfg)) == cfg
    assert json.loads(json.dumps(ConfigLoader.to_dict(cfg))) == ConfigLoader.to_dict(cfg)


def test_benchmark_presets():
    sd1 = ConfigLoader.load("sd-paper-1")
    assert sd1.n_orders == 4
    assert all(s.k == 3000.0 and s.L == 3000.0 and s.switch == SwitchSpec.sat(1e-4) for s in sd1.sd_stages)
    assert (sd1.plan.dt, sd1.plan.t_end, sd1.integrator) == (1e-6, 2.0, "rk4")

    sd2 = ConfigLoader.load("sd-paper-2")
    assert (sd2.sd_stages[0].k, sd2.sd_stages[0].L) == (5000.0, 10000.0)
    assert ConfigLoader.load("sd-paper-exact").sd_stages[0].switch.kind == "sgn"
    assert ConfigLoader.load("hgo-paper").hgo.c == BENCHMARK_HGO_GAINS

    hosm = ConfigLoader.load("hosm-paper")
    assert hosm.hosm.L == 3e7
    assert hosm.integrator == "euler"
    assert hosm.steady_window == (0.25, 0.5)


def test_defaults_are_filled_in():
    cfg = ConfigLoader.from_dict(_minimal())
    assert cfg.plan.t_start == 0.0
    assert cfg.plan.record_stride == 100
    assert cfg.integrator == "rk4"
    assert cfg.noise.kind == "none"
    assert cfg.band_fraction == 0.02
    assert cfg.steady_window == (0.5, 1.0)
    assert cfg.chatter_window == cfg.steady_window
    assert cfg.sd_stages[0].switch == SwitchSpec()


def test_default_windows_follow_short_horizons():
    cfg = ConfigLoader.from_dict(_minimal(plan={"t_start": 0.1, "t_end": 0.3, "dt": 1e-3}))
    assert cfg.steady_window == pytest.approx((0.2, 0.3))
    assert cfg.chatter_window == cfg.steady_window

    data = ConfigLoader.to_dict(ConfigLoader.load("sd-paper-1"))
    data["plan"]["t_end"] = 0.3
    del data["metrics"]
    assert ConfigLoader.from_dict(data).steady_window == pytest.approx((0.15, 0.3))


def test_stage_overrides():
    params = {"k": 100.0, "L": 200.0, "stages": 3, "stage_overrides": [{"stage": 3, "L": 50.0}]}
    cfg = ConfigLoader.from_dict(_minimal(params=params))
    assert [s.L for s in cfg.sd_stages] == [200.0, 200.0, 50.0]
    assert cfg.sd_stages[2].k == 100.0


def test_load_from_file(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(_minimal()), encoding="utf-8")
    assert ConfigLoader.load(str(path)).name == "mini"


@pytest.mark.parametrize("overrides, field", [
    ({"name": ""}, "name"),
    ({"method": "kalman"}, "method"),
    ({"plan": {"t_end": 1.0, "dt": 0.0}}, "plan.dt"),
    ({"plan": {"t_end": 1.0, "dt": 1e-3, "integrator": "rk45"}}, "plan.integrator"),
    ({"plan": {"t_start": 1.0, "t_end": 1.0, "dt": 1e-3}}, "plan.t_end"),
    ({"signal": {"terms": []}}, "signal.terms"),
    ({"signal": {"terms": [{"amplitude": 1.0, "omega": -1.0}]}}, "signal.terms[0].omega"),
    ({"params": {"k": -1.0, "L": 1.0}}, "params.k"),
    ({"params": {"k": 1.0, "L": 1.0, "stages": 0}}, "params.stages"),
    ({"params": {"k": 1.0, "L": 1.0, "stages": 2, "stage_overrides": [{"stage": 5}]}},
     "params.stage_overrides[0].stage"),
    ({"method": "hgo", "params": {"c": [1, 2, 3, 4, -5]}}, "params.c[4]"),
    ({"noise": {"kind": "uniform", "magnitude": -1.0}}, "noise.magnitude"),
    ({"noise": {"kind": "pink"}}, "noise.kind"),
    ({"initial_state": [0.0]}, "initial_state"),
    ({"metrics": {"steady_window": [0.5, 3.0]}}, "metrics.steady_window"),
    ({"metrics": {"band_fraction": 1.0}}, "metrics.band_fraction"),
])
def test_errors_name_the_offending_field(overrides, field):
    with pytest.raises(ConfigError) as excinfo:
        ConfigLoader.from_dict(_minimal(**overrides))
    assert excinfo.value.field == field


def test_unknown_preset(tmp_path):
    with pytest.raises(ConfigError, match="sd-paper-1"):
        ConfigLoader.load("no-such-preset")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        ConfigLoader.load(str(broken))
    assert excinfo.value.field == "config"


def test_overrides_clip_windows():
    cfg = ConfigLoader.with_overrides(ConfigLoader.load("sd-paper-1"), dt=1e-5, t_end=1.0, stride=10)
    assert (cfg.plan.dt, cfg.plan.t_end, cfg.plan.record_stride) == (1e-5, 1.0, 10)
    assert cfg.steady_window == (0.5, 1.0)

    short = ConfigLoader.with_overrides(cfg, t_end=0.2, output="elsewhere")
    assert short.steady_window == (0.1, 0.2)
    assert short.output == "elsewhere"
    assert short.sd_stages == cfg.sd_stages
