"""Line-oriented `key = value` configuration files.

Dotted keys are namespaced per subsystem (filter.*, som.*, svm.*, tune.*,
engine.*, sim.*, signal.*) plus one global `seed`. Unknown keys are errors
so typos cannot silently fall back to defaults. Sub-seeds are derived from
the global seed by fixed offsets: the simulator uses the seed directly and
the map's RNG uses seed + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import EngineConfig, FilterParams, SomParams, SvmParams, TuneParams
from .errors import ConfigError
from .rig import SimConfig


def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {raw!r}") from exc


def _parse_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {raw!r}") from exc


def _parse_float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"expected a comma-separated list, got {raw!r}")
    return tuple(_parse_float(p) for p in parts)


def _parse_str(raw: str) -> str:
    return raw


_KEY_PARSERS = {
    "seed": _parse_int,
    "signal.frame_len": _parse_int,
    "signal.hop_len": _parse_int,
    "filter.mode": _parse_str,
    "filter.ma_window": _parse_int,
    "filter.kalman_q": _parse_float,
    "filter.kalman_r": _parse_float,
    "som.grid": _parse_int,
    "som.alpha0": _parse_float,
    "som.alpha_final": _parse_float,
    "som.sigma0": _parse_float,
    "som.sigma_final": _parse_float,
    "som.epochs": _parse_int,
    "som.k_label": _parse_float,
    "svm.kernel": _parse_str,
    "svm.c": _parse_float,
    "svm.gamma": _parse_float,
    "svm.budget": _parse_int,
    "svm.epsilon": _parse_float,
    "tune.c_values": _parse_float_list,
    "tune.gamma_values": _parse_float_list,
    "tune.k_folds": _parse_int,
    "tune.interval": _parse_int,
    "engine.calib_frames": _parse_int,
    "engine.trend_window": _parse_int,
    "engine.slope_min": _parse_float,
    "engine.detect_threshold": _parse_float,
    "sim.total_samples": _parse_int,
    "sim.pulse_period": _parse_int,
    "sim.carrier_cycles": _parse_int,
    "sim.samples_per_cycle": _parse_int,
    "sim.burst_amp": _parse_float,
    "sim.echo_delay": _parse_int,
    "sim.echo_amp_max": _parse_float,
    "sim.fault_onset": _parse_int,
    "sim.fault_ramp": _parse_int,
    "sim.noise_sd": _parse_float,
}


@dataclass(frozen=True)
class ConfigBundle:
    engine: EngineConfig
    sim: SimConfig
    seed: int


def parse_config_text(text: str) -> dict:
    """Parse raw config text into {key: typed value}; unknown keys error."""
    out: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        try:
            out[key] = _KEY_PARSERS[key](raw_value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from exc
    return out


def build_bundle(values: dict, seed_override: int | None = None) -> ConfigBundle:
    """Materialize typed configs from parsed values plus defaults."""
    v = dict(values)
    seed = seed_override if seed_override is not None else v.get("seed", 0)

    def take(key, default):
        return v[key] if key in v else default

    try:
        filter_params = FilterParams(
            mode=take("filter.mode", FilterParams.mode),
            ma_window=take("filter.ma_window", FilterParams.ma_window),
            kalman_q=take("filter.kalman_q", FilterParams.kalman_q),
            kalman_r=take("filter.kalman_r", FilterParams.kalman_r),
        )
        som = SomParams(
            grid=take("som.grid", SomParams.grid),
            alpha0=take("som.alpha0", SomParams.alpha0),
            alpha_final=take("som.alpha_final", SomParams.alpha_final),
            sigma0=take("som.sigma0", SomParams.sigma0),
            sigma_final=take("som.sigma_final", SomParams.sigma_final),
            epochs=take("som.epochs", SomParams.epochs),
            k_label=take("som.k_label", SomParams.k_label),
        )
        svm = SvmParams(
            kernel=take("svm.kernel", SvmParams.kernel),
            gamma=take("svm.gamma", SvmParams.gamma),
            c=take("svm.c", SvmParams.c),
            budget=take("svm.budget", SvmParams.budget),
            epsilon=take("svm.epsilon", SvmParams.epsilon),
        )
        tune = TuneParams(
            c_values=take("tune.c_values", TuneParams.c_values),
            gamma_values=take("tune.gamma_values", TuneParams.gamma_values),
            k_folds=take("tune.k_folds", TuneParams.k_folds),
            interval=take("tune.interval", TuneParams.interval),
        )
        engine = EngineConfig(
            frame_len=take("signal.frame_len", EngineConfig.frame_len),
            hop_len=take("signal.hop_len", EngineConfig.hop_len),
            filter=filter_params,
            som=som,
            svm=svm,
            tune=tune,
            calib_frames=take("engine.calib_frames", EngineConfig.calib_frames),
            trend_window=take("engine.trend_window", EngineConfig.trend_window),
            slope_min=take("engine.slope_min", EngineConfig.slope_min),
            detect_threshold=take("engine.detect_threshold", EngineConfig.detect_threshold),
            seed=seed,
        )
        sim = SimConfig(
            total_samples=take("sim.total_samples", 655360),
            pulse_period=take("sim.pulse_period", 4096),
            carrier_cycles=take("sim.carrier_cycles", 8),
            samples_per_cycle=take("sim.samples_per_cycle", 16),
            burst_amp=take("sim.burst_amp", 1.0),
            echo_delay=take("sim.echo_delay", 512),
            echo_amp_max=take("sim.echo_amp_max", 0.8),
            fault_onset=take("sim.fault_onset", -1),
            fault_ramp=take("sim.fault_ramp", -1),
            noise_sd=take("sim.noise_sd", 0.05),
            seed=seed,
        )
    except (ValueError, ConfigError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return ConfigBundle(engine=engine, sim=sim, seed=seed)


def load_config(text: str, seed_override: int | None = None) -> ConfigBundle:
    return build_bundle(parse_config_text(text), seed_override)
