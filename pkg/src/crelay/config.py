"""Flat dotted-key configuration.

Config files are TOML written with dotted keys only, e.g.::

    seed = 7
    constraints.i_th = -90.0
    constraints.noise_power = -119.5
    geometry.pr_positions = [[14.0, 0.0], [9.0, 12.0]]

They are flattened back to ``{"constraints.i_th": -90.0, ...}`` and turned
into the typed configs of the other modules. Presets are flat dicts of the
same shape; file values override preset values.
"""

import math
import sys
from pathlib import Path
from typing import Any

from .channel_models import ChannelConfig, ItuRParams, LogDistanceParams
from .constraints import DEFAULT_NOISE_POWER_DBM, ConstraintConfig
from .errors import CrelayError, IncompleteConfigError, InputFormatError
from .fading import NormalParams
from .scenario import CampaignConfig, Geometry

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = (
    "PRESETS",
    "load_flat",
    "resolve_flat",
    "constraint_config",
    "channel_config",
    "campaign_config",
)

CONSTRAINT_KEYS = {
    "constraints.i_th",
    "constraints.eps_i_out",
    "constraints.c_th",
    "constraints.eps_c_out",
    "constraints.noise_power",
}
CHANNEL_KEYS = {
    "channel.p_tx",
    "channel.d0",
    "channel.f_mhz",
    "channel.itu_n",
    "channel.l_floors",
    "channel.f_ghz",
    "channel.l_w",
    "channel.n_w",
}
CAMPAIGN_KEYS = {
    "geometry.cr_pos",
    "geometry.pr_positions",
    "geometry.id_positions",
    "geometry.wavelength",
    "large_scale.pl_d0",
    "large_scale.d0",
    "large_scale.n",
    "large_scale.mu_n",
    "large_scale.sigma_n",
    "small_scale.kind",
    "small_scale.m",
    "p_tx",
    "noise_power",
    "samples_per_snapshot",
    "seed",
    "oracle_samples",
    "model",
    "workers",
}
KNOWN_KEYS = CONSTRAINT_KEYS | CHANNEL_KEYS | CAMPAIGN_KEYS

# Positions are illustrative only. Large-scale values and thresholds are the
# indoor 2.4 GHz design values the decision tests are written against.
PRESETS: dict[str, dict[str, Any]] = {
    "paper-shape": {
        "geometry.cr_pos": [0.0, 0.0],
        "geometry.pr_positions": [[14.0, 0.0], [9.0, 12.0], [18.0, 6.0], [12.0, -9.0]],
        "geometry.id_positions": [[4.0, 2.0], [2.0, -3.0], [7.0, 5.0], [8.0, -2.0], [3.0, 6.0]],
        "geometry.wavelength": 0.125,
        "large_scale.pl_d0": 44.19,
        "large_scale.d0": 1.0,
        "large_scale.n": 3.46,
        "large_scale.mu_n": 3.58,
        "large_scale.sigma_n": 1.00,
        "small_scale.kind": "nakagami",
        "small_scale.m": 1.2,
        "p_tx": 10.0,
        "noise_power": -100.0,
        "samples_per_snapshot": 1000,
        "seed": 2016,
        "oracle_samples": 100_000,
        "model": "nakagami",
        "constraints.i_th": -90.0,
        "constraints.eps_i_out": 0.1,
        "constraints.c_th": 7.5,
        "constraints.eps_c_out": 0.1,
        "constraints.noise_power": DEFAULT_NOISE_POWER_DBM,
    },
}


def _flatten(table: dict, prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in table.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def load_flat(path: Path | str) -> dict[str, Any]:
    path = Path(path)
    try:
        with path.open("rb") as f:
            table = tomllib.load(f)
    except FileNotFoundError:
        raise InputFormatError("config file not found", path)
    except tomllib.TOMLDecodeError as e:
        raise InputFormatError(f"invalid config: {e}", path)
    flat = _flatten(table)
    unknown = sorted(set(flat) - KNOWN_KEYS)
    if unknown:
        raise InputFormatError(f"unknown config key(s): {', '.join(unknown)}", path)
    return flat


def resolve_flat(
    preset: str | None = None,
    path: Path | str | None = None,
    overrides: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Preset, then file, then explicit overrides (None values are skipped)"""
    flat: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise InputFormatError(f"unknown preset {preset!r}; available: {', '.join(sorted(PRESETS))}")
        flat.update(PRESETS[preset])
    if path is not None:
        flat.update(load_flat(path))
    flat.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return flat


def _number(flat: dict, key: str, default: Any = None, cast=float) -> Any:
    if key not in flat:
        if default is None:
            raise IncompleteConfigError(f"missing config key {key}")
        return default
    value = flat[key]
    try:
        if cast is int and isinstance(value, float) and not value.is_integer():
            raise ValueError(value)
        number = cast(value)
    except (TypeError, ValueError):
        raise InputFormatError(f"config key {key} must be {cast.__name__}, got {value!r}")
    if cast is float and not math.isfinite(number):
        raise InputFormatError(f"config key {key} must be finite, got {value!r}")
    return number


def _wrap(build, what: str):
    """Run ``build`` and report validation failures as config input errors"""
    try:
        return build()
    except (IncompleteConfigError, InputFormatError):
        raise
    except (CrelayError, TypeError, ValueError) as e:
        raise InputFormatError(f"invalid {what} config: {e}")


def constraint_config(flat: dict[str, Any]) -> ConstraintConfig:
    """Constraint thresholds; ``noise_power`` stays None when absent"""
    defaults = ConstraintConfig()
    return _wrap(
        lambda: ConstraintConfig(
            i_th=_number(flat, "constraints.i_th", defaults.i_th),
            eps_i_out=_number(flat, "constraints.eps_i_out", defaults.eps_i_out),
            c_th=_number(flat, "constraints.c_th", defaults.c_th),
            eps_c_out=_number(flat, "constraints.eps_c_out", defaults.eps_c_out),
            noise_power=(
                _number(flat, "constraints.noise_power") if "constraints.noise_power" in flat else None
            ),
        ),
        "constraints",
    )


def channel_config(flat: dict[str, Any]) -> ChannelConfig:
    defaults = ChannelConfig()
    return _wrap(
        lambda: ChannelConfig(
            p_tx=_number(flat, "channel.p_tx", defaults.p_tx),
            d0=_number(flat, "channel.d0", defaults.d0),
            itu=ItuRParams(
                f_mhz=_number(flat, "channel.f_mhz", defaults.itu.f_mhz),
                n=_number(flat, "channel.itu_n", defaults.itu.n),
                l_floors=_number(flat, "channel.l_floors", defaults.itu.l_floors),
            ),
            f_ghz=_number(flat, "channel.f_ghz", defaults.f_ghz),
            l_w=_number(flat, "channel.l_w", defaults.l_w),
            n_w=_number(flat, "channel.n_w") if "channel.n_w" in flat else None,
        ),
        "channel",
    )


def _positions(flat: dict, key: str) -> list:
    if key not in flat:
        raise IncompleteConfigError(f"missing config key {key}")
    value = flat[key]
    if not isinstance(value, list):
        raise InputFormatError(f"config key {key} must be a list of [x, y] pairs")
    return value


def campaign_config(flat: dict[str, Any]) -> CampaignConfig:
    if "geometry.cr_pos" not in flat:
        raise IncompleteConfigError("missing config key geometry.cr_pos")

    def build() -> CampaignConfig:
        n = _number(flat, "large_scale.n")
        sigma_n = _number(flat, "large_scale.sigma_n", 0.0)
        shadowing = None
        if sigma_n > 0:
            shadowing = NormalParams(mu=_number(flat, "large_scale.mu_n", n), sigma=sigma_n)
        return CampaignConfig(
            geometry=Geometry(
                cr_pos=flat["geometry.cr_pos"],
                pr_positions=_positions(flat, "geometry.pr_positions"),
                id_positions=_positions(flat, "geometry.id_positions"),
                wavelength=_number(flat, "geometry.wavelength", 0.125),
            ),
            path_loss=LogDistanceParams(
                pl_d0=_number(flat, "large_scale.pl_d0"),
                d0=_number(flat, "large_scale.d0", 1.0),
                n=n,
            ),
            constraints=constraint_config(flat),
            shadowing=shadowing,
            small_scale_kind=str(flat.get("small_scale.kind", "nakagami")),
            small_scale_m=_number(flat, "small_scale.m", 1.0),
            p_tx=_number(flat, "p_tx", 10.0),
            noise_power=_number(flat, "noise_power", -100.0),
            samples_per_snapshot=_number(flat, "samples_per_snapshot", 1000, int),
            seed=_number(flat, "seed", 0, int),
            oracle_samples=_number(flat, "oracle_samples", 100_000, int),
            model=str(flat.get("model", "nakagami")),
            workers=_number(flat, "workers", 1, int),
        )

    return _wrap(build, "campaign")
