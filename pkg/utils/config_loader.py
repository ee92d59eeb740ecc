"""
Experiment configuration loading for SD Bench.

Configurations are JSON documents; named presets ship in core/presets.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from core.exceptions import ConfigError
from core.models import (
    INTEGRATORS, METHODS, NOISE_KINDS, BENCHMARK_HGO_GAINS, SIGNAL_KINDS, SWITCH_KINDS,
    ExperimentConfig, HgoConfig, HosmConfig, NoiseSpec, SdParams, SignalTerm,
    SimPlan, SwitchSpec, TestSignal,
)
from utils.validators import InputValidator

logger = logging.getLogger(__name__)

PRESET_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "core", "presets")

V = InputValidator


def _section(data: Dict[str, Any], key: str, required: bool = True) -> Dict[str, Any]:
    value = data.get(key)
    if value is None:
        if required:
            raise ConfigError(key, "missing section")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(key, "expected an object")
    return value


def _switch_from_dict(data: Any, field: str) -> SwitchSpec:
    if not isinstance(data, dict):
        raise ConfigError(field, "expected an object with 'kind'")
    kind = V.validate_choice(data.get("kind", "sat"), SWITCH_KINDS, f"{field}.kind")
    if kind == "sgn":
        return SwitchSpec.sgn()
    return SwitchSpec(kind, V.validate_positive(data.get("epsilon", 1e-4), f"{field}.epsilon"))


def _switch_to_dict(switch: SwitchSpec) -> Dict[str, Any]:
    if switch.kind == "sgn":
        return {"kind": "sgn"}
    return {"kind": switch.kind, "epsilon": switch.epsilon}


def _sd_stage_from_dict(data: Dict[str, Any], field: str, base: Optional[SdParams] = None) -> SdParams:
    k = data.get("k", base.k if base else None)
    L = data.get("L", base.L if base else None)
    if "switch" in data:
        switch = _switch_from_dict(data["switch"], f"{field}.switch")
    else:
        switch = base.switch if base else SwitchSpec()
    return SdParams(k=V.validate_positive(k, f"{field}.k"),
                    L=V.validate_positive(L, f"{field}.L"),
                    switch=switch)


def _sd_stages(params: Dict[str, Any]) -> tuple:
    """
    Either a `per_stage` list of {k, L, switch} or shared k/L/switch with
    `stages` count and optional `stage_overrides` [{stage (1-based), ...}].
    """
    if "per_stage" in params:
        per_stage = params["per_stage"]
        if not isinstance(per_stage, list) or not per_stage:
            raise ConfigError("params.per_stage", "expected a non-empty list")
        return tuple(_sd_stage_from_dict(s, f"params.per_stage[{i}]") for i, s in enumerate(per_stage))

    shared = _sd_stage_from_dict(params, "params")
    n_stages = V.validate_positive_int(params.get("stages", 4), "params.stages")
    stages = [shared] * n_stages
    for i, override in enumerate(params.get("stage_overrides", [])):
        field = f"params.stage_overrides[{i}]"
        stage = override.get("stage") if isinstance(override, dict) else None
        if not isinstance(stage, int) or not 1 <= stage <= n_stages:
            raise ConfigError(f"{field}.stage", f"must be an integer in 1..{n_stages}")
        stages[stage - 1] = _sd_stage_from_dict(override, field, base=shared)
    return tuple(stages)


class ConfigLoader:
    """Turns preset names or JSON files into validated ExperimentConfig objects."""

    @staticmethod
    def list_presets() -> List[str]:
        if not os.path.isdir(PRESET_DIR):
            return []
        return sorted(f[:-5] for f in os.listdir(PRESET_DIR) if f.endswith(".json"))

    @staticmethod
    def resolve_path(name_or_path: str) -> str:
        if os.path.isfile(name_or_path):
            return name_or_path
        preset = os.path.join(PRESET_DIR, f"{name_or_path}.json")
        if os.path.isfile(preset):
            return preset
        available = ", ".join(ConfigLoader.list_presets()) or "none"
        raise ConfigError("config", f"'{name_or_path}' is neither a file nor a preset (presets: {available})")

    @staticmethod
    def load(name_or_path: str) -> ExperimentConfig:
        path = ConfigLoader.resolve_path(name_or_path)
        try:
            with open(path, "r", encoding="utf-8") as config_file:
                data = json.load(config_file)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"{path} is not valid JSON: {e}") from None
        logger.debug(f"Loaded configuration {path}")
        return ConfigLoader.from_dict(data)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config", "expected a JSON object")

        name = data.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError("name", "missing or empty")

        sig_data = _section(data, "signal")
        raw_terms = sig_data.get("terms")
        if not isinstance(raw_terms, list) or not raw_terms:
            raise ConfigError("signal.terms", "expected a non-empty list")
        terms = []
        for i, term in enumerate(raw_terms):
            field = f"signal.terms[{i}]"
            if not isinstance(term, dict):
                raise ConfigError(field, "expected an object")
            omega = V.validate_number(term.get("omega"), f"{field}.omega")
            if omega < 0:
                raise ConfigError(f"{field}.omega", "must be >= 0")
            terms.append(SignalTerm(
                amplitude=V.validate_number(term.get("amplitude"), f"{field}.amplitude"),
                omega=omega,
                kind=V.validate_choice(term.get("kind", "sine"), SIGNAL_KINDS, f"{field}.kind"),
            ))
        signal = TestSignal(tuple(terms), name=str(sig_data.get("name", "signal")))

        method = V.validate_choice(data.get("method"), METHODS, "method")
        params = _section(data, "params", required=False)

        plan_data = _section(data, "plan")
        t_start = V.validate_number(plan_data.get("t_start", 0.0), "plan.t_start")
        t_end = V.validate_number(plan_data.get("t_end"), "plan.t_end")
        if t_end <= t_start:
            raise ConfigError("plan.t_end", "must be greater than plan.t_start")
        dt = V.validate_positive(plan_data.get("dt"), "plan.dt")
        if (t_end - t_start) / dt < 1 - 1e-9:
            raise ConfigError("plan.dt", "plan must contain at least one step")
        plan = SimPlan(t_start, t_end, dt,
                       V.validate_positive_int(plan_data.get("record_stride", 100), "plan.record_stride"))
        integrator = V.validate_choice(plan_data.get("integrator", "rk4"), INTEGRATORS, "plan.integrator")

        sd_stages, hgo, hosm = (), None, None
        if method == "sd-cascade":
            sd_stages = _sd_stages(params)
        elif method == "hgo":
            c = params.get("c", list(BENCHMARK_HGO_GAINS))
            if not isinstance(c, list) or len(c) != 5:
                raise ConfigError("params.c", "expected exactly 5 gains")
            hgo = HgoConfig(
                c=tuple(V.validate_positive(v, f"params.c[{i}]") for i, v in enumerate(c)),
                epsilon=V.validate_positive(params.get("epsilon", 0.03), "params.epsilon"),
            )
        else:
            final = params.get("final_switch", {"kind": "sgn"})
            hosm = HosmConfig(
                L=V.validate_positive(params.get("L", 3e7), "params.L"),
                final_switch=_switch_from_dict(final, "params.final_switch"),
            )

        noise_data = _section(data, "noise", required=False)
        seed = noise_data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("noise.seed", "expected a non-negative integer")
        magnitude = V.validate_number(noise_data.get("magnitude", 0.0), "noise.magnitude")
        if magnitude < 0:
            raise ConfigError("noise.magnitude", "must be >= 0")
        noise = NoiseSpec(
            kind=V.validate_choice(noise_data.get("kind", "none"), NOISE_KINDS, "noise.kind"),
            magnitude=magnitude,
            seed=seed,
        )

        dimension = 2 * len(sd_stages) if method == "sd-cascade" else 5
        initial_state = data.get("initial_state")
        if initial_state is not None:
            if not isinstance(initial_state, list) or len(initial_state) != dimension:
                raise ConfigError("initial_state", f"expected a list of {dimension} numbers")
            initial_state = tuple(V.validate_number(v, f"initial_state[{i}]")
                                  for i, v in enumerate(initial_state))

        metrics = _section(data, "metrics", required=False)
        band_fraction = V.validate_number(metrics.get("band_fraction", 0.02), "metrics.band_fraction")
        if not 0 < band_fraction < 1:
            raise ConfigError("metrics.band_fraction", "must lie in (0, 1)")
        default_window = [t_start + 0.5 * (t_end - t_start), t_end]
        steady = V.validate_window(metrics.get("steady_window", default_window), "metrics.steady_window")
        chatter = V.validate_window(metrics.get("chatter_window", list(steady)), "metrics.chatter_window")
        for field, (w_from, w_to) in (("metrics.steady_window", steady), ("metrics.chatter_window", chatter)):
            if w_from < t_start or w_to > t_end:
                raise ConfigError(field, f"must lie inside the plan [{t_start:g}, {t_end:g}]")

        output = data.get("output", "results")
        if not isinstance(output, str) or not output:
            raise ConfigError("output", "expected a directory path")

        return ExperimentConfig(
            name=name,
            signal=signal,
            method=method,
            plan=plan,
            integrator=integrator,
            sd_stages=sd_stages,
            hgo=hgo,
            hosm=hosm,
            noise=noise,
            initial_state=initial_state,
            band_fraction=band_fraction,
            steady_window=steady,
            chatter_window=chatter,
            output=output,
            description=str(data.get("description", "")),
        )

    @staticmethod
    def to_dict(cfg: ExperimentConfig) -> Dict[str, Any]:
        """Fully resolved JSON-compatible form; from_dict(to_dict(cfg)) == cfg."""
        if cfg.method == "sd-cascade":
            params = {"per_stage": [{"k": s.k, "L": s.L, "switch": _switch_to_dict(s.switch)}
                                    for s in cfg.sd_stages]}
        elif cfg.method == "hgo":
            params = {"c": list(cfg.hgo.c), "epsilon": cfg.hgo.epsilon}
        else:
            params = {"L": cfg.hosm.L, "final_switch": _switch_to_dict(cfg.hosm.final_switch)}

        return {
            "name": cfg.name,
            "description": cfg.description,
            "signal": {
                "name": cfg.signal.name,
                "terms": [{"amplitude": t.amplitude, "omega": t.omega, "kind": t.kind}
                          for t in cfg.signal.terms],
            },
            "method": cfg.method,
            "params": params,
            "plan": {
                "t_start": cfg.plan.t_start,
                "t_end": cfg.plan.t_end,
                "dt": cfg.plan.dt,
                "record_stride": cfg.plan.record_stride,
                "integrator": cfg.integrator,
            },
            "noise": {"kind": cfg.noise.kind, "magnitude": cfg.noise.magnitude, "seed": cfg.noise.seed},
            "initial_state": None if cfg.initial_state is None else list(cfg.initial_state),
            "metrics": {
                "band_fraction": cfg.band_fraction,
                "steady_window": list(cfg.steady_window),
                "chatter_window": list(cfg.chatter_window),
            },
            "output": cfg.output,
        }

    @staticmethod
    def with_overrides(cfg: ExperimentConfig, dt: Optional[float] = None, t_end: Optional[float] = None,
                       stride: Optional[int] = None, output: Optional[str] = None) -> ExperimentConfig:
        """
        Apply command-line overrides and re-validate.

        Metric windows reaching past a shortened t_end are clipped to it.
        """
        data = ConfigLoader.to_dict(cfg)
        plan = data["plan"]
        if dt is not None:
            plan["dt"] = dt
        if stride is not None:
            plan["record_stride"] = stride
        if t_end is not None:
            plan["t_end"] = t_end
            for key in ("steady_window", "chatter_window"):
                w_from, w_to = data["metrics"][key]
                if w_from >= t_end:
                    w_from = plan["t_start"] + 0.5 * (t_end - plan["t_start"])
                data["metrics"][key] = [w_from, min(w_to, t_end)]
        if output is not None:
            data["output"] = output
        return ConfigLoader.from_dict(data)

