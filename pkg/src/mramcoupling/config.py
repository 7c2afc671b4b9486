"""Run configuration.

INI file with four sections.  Every key has a default, a file only
overrides what it names, and naming anything else is an error so typos
fail loudly instead of silently running the defaults.

[stack]   layer sheet moments and geometry of one cell
[device]  electrical and thermal device parameters
[sweep]   grids for the sweep subcommands
[output]  CSV formatting
"""

import configparser
import io
from dataclasses import dataclass

from .characterization import RampProtocol
from .errors import ConfigError
from .metrics import ResistanceModel, StabilityParams, SunParams, SwitchParams
from .stack import LayerSpec, MtjStack, rp_from_ecd


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _float_list(text):
    items = [tok.strip() for tok in str(text).split(",") if tok.strip()]
    if not items:
        raise ConfigError(f"expected a comma-separated list, got {text!r}")
    return tuple(_float(tok) for tok in items)


def _float_or_auto(text):
    if str(text).strip().lower() == "auto":
        return "auto"
    return _float(text)


_SCHEMA = {
    "stack": {
        "ecd_nm": _float,
        "ra_ohm_um2": _float,
        "fl_ms_t_a": _float,
        "rl_ms_t_a": _float,
        "hl_ms_t_a": _float,
        "fl_thickness_nm": _float,
        "rl_thickness_nm": _float,
        "hl_thickness_nm": _float,
        "rl_z_nm": _float,
        "hl_z_nm": _float,
    },
    "device": {
        "ic0_ua": _float,
        "hk_oe": _float,
        "hc_oe": _float,
        "delta0": _float,
        "t_ref_k": _float,
        "tmr": _float,
        "vh_v": _float,
        "sun_prefactor": _float,
        "f0_hz": _float,
        "ramp_rate_oe_per_s": _float,
    },
    "sweep": {
        "ecd_list_nm": _float_list,
        "pitch_min_nm": _float_or_auto,
        "pitch_max_nm": _float,
        "pitch_step_nm": _float,
        "inter_pitch_nm": _float,
        "pitch_list_ratio": _float_list,
        "vp_min_v": _float,
        "vp_max_v": _float,
        "vp_step_v": _float,
        "temp_min_k": _float,
        "temp_max_k": _float,
        "temp_step_k": _float,
        "profile_points": _int,
    },
    "output": {
        "precision": _int,
    },
}

_DEFAULTS = {
    "stack": {
        "ecd_nm": 35.0,
        "ra_ohm_um2": 4.5,
        "fl_ms_t_a": 1.741e-3,
        "rl_ms_t_a": 0.05e-3,
        "hl_ms_t_a": -1.17e-3,
        "fl_thickness_nm": 1.4,
        "rl_thickness_nm": 1.0,
        "hl_thickness_nm": 7.0,
        "rl_z_nm": -2.2,
        "hl_z_nm": -7.0,
    },
    "device": {
        "ic0_ua": 57.2,
        "hk_oe": 4646.8,
        "hc_oe": 2200.0,
        "delta0": 45.5,
        "t_ref_k": 300.0,
        "tmr": 0.85,
        "vh_v": 0.5,
        "sun_prefactor": 3.18681938e11,
        "f0_hz": 1e9,
        "ramp_rate_oe_per_s": 6000.0,
    },
    "sweep": {
        "ecd_list_nm": (35.0, 55.0, 75.0),
        "pitch_min_nm": "auto",
        "pitch_max_nm": 200.0,
        "pitch_step_nm": 1.0,
        "inter_pitch_nm": 90.0,
        "pitch_list_ratio": (1.5, 2.0, 3.0),
        "vp_min_v": 0.5,
        "vp_max_v": 1.2,
        "vp_step_v": 0.05,
        "temp_min_k": 250.0,
        "temp_max_k": 400.0,
        "temp_step_k": 25.0,
        "profile_points": 0,
    },
    "output": {
        "precision": 9,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Typed configuration values, one dict per section."""

    stack: dict
    device: dict
    sweep: dict
    output: dict

    def build_stack(self, ecd_nm=None):
        s = self.stack
        return MtjStack(
            fl=LayerSpec("fl", s["fl_ms_t_a"], s["fl_thickness_nm"], 0.0),
            rl=LayerSpec("rl", s["rl_ms_t_a"], s["rl_thickness_nm"], s["rl_z_nm"]),
            hl=LayerSpec("hl", s["hl_ms_t_a"], s["hl_thickness_nm"], s["hl_z_nm"]),
            ecd_nm=s["ecd_nm"] if ecd_nm is None else float(ecd_nm),
            ra_ohm_um2=s["ra_ohm_um2"],
        )

    def switch_params(self):
        return SwitchParams(
            ic0_a=self.device["ic0_ua"] * 1e-6, hk_oe=self.device["hk_oe"]
        )

    def resistance_model(self, ecd_nm=None):
        ecd = self.stack["ecd_nm"] if ecd_nm is None else float(ecd_nm)
        return ResistanceModel(
            rp_ohm=rp_from_ecd(ecd, self.stack["ra_ohm_um2"]),
            tmr=self.device["tmr"],
            vh_v=self.device["vh_v"],
        )

    def sun_params(self):
        return SunParams(
            prefactor_b=self.device["sun_prefactor"],
            delta_for_log=self.device["delta0"],
        )

    def stability_params(self):
        return StabilityParams(
            delta0=self.device["delta0"],
            t_ref_k=self.device["t_ref_k"],
            hk_oe=self.device["hk_oe"],
        )

    def ramp_protocol(self):
        return RampProtocol(
            f0_hz=self.device["f0_hz"],
            ramp_rate_oe_per_s=self.device["ramp_rate_oe_per_s"],
        )


def default_config():
    return RunConfig(**{sec: dict(vals) for sec, vals in _DEFAULTS.items()})


def _validate_grids(cfg):
    sw = cfg.sweep
    for key in ("pitch_step_nm", "vp_step_v", "temp_step_k"):
        if not sw[key] > 0:
            raise ConfigError(f"[sweep] {key} must be positive, got {sw[key]}")
    if sw["profile_points"] < 0:
        raise ConfigError(
            f"[sweep] profile_points must be >= 0, got {sw['profile_points']}"
        )
    if not 1 <= cfg.output["precision"] <= 17:
        raise ConfigError(
            f"[output] precision must be in [1, 17], got {cfg.output['precision']}"
        )


def load_config(path=None):
    """Defaults, overlaid with the INI file at path when given."""
    cfg = default_config()
    if path is None:
        _validate_grids(cfg)
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc

    sections = {"stack": cfg.stack, "device": cfg.device,
                "sweep": cfg.sweep, "output": cfg.output}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key {key!r} in [{section}]")
            try:
                sections[section][key] = _SCHEMA[section][key](raw)
            except ConfigError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from None
    _validate_grids(cfg)
    return cfg


def _render(value):
    if isinstance(value, str):
        return value
    if isinstance(value, tuple):
        return ",".join(format(v, ".9g") for v in value)
    if isinstance(value, int):
        return str(value)
    return format(value, ".9g")


def render_defaults():
    """Default configuration as INI text; feed it back in with --config."""
    parser = configparser.ConfigParser()
    for section, values in _DEFAULTS.items():
        parser[section] = {key: _render(val) for key, val in values.items()}
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()
