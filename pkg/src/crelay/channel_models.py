"""Deterministic indoor path-loss predictors and dB/linear plumbing.

All predictors return mean path loss in dB. Shadowing is applied by the
caller (see :mod:`crelay.scenario`).
"""

import math
from dataclasses import dataclass, field

from .errors import require

__all__ = (
    "LogDistanceParams",
    "ItuRParams",
    "WinnerParams",
    "ChannelConfig",
    "log_distance_pl",
    "itu_r_pl",
    "winner2_pl",
    "mean_snr_from_budget",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_mw",
    "THIN_WALL_DB",
    "THICK_WALL_DB",
)

THIN_WALL_DB = 5.0
THICK_WALL_DB = 15.0


@dataclass(frozen=True)
class LogDistanceParams:
    """Log-distance model: PL(d) = PL(d0) + 10 n log10(d / d0)"""

    pl_d0: float
    d0: float = 1.0
    n: float = 3.0

    def __post_init__(self):
        require(math.isfinite(self.pl_d0), f"pl_d0 must be finite, got {self.pl_d0}")
        require(self.d0 > 0, f"reference distance d0 must be positive, got {self.d0}")
        require(self.n > 0, f"path-loss exponent must be positive, got {self.n}")


@dataclass(frozen=True)
class ItuRParams:
    """ITU-R indoor model. Frequency is in MHz (WinnerParams takes GHz)."""

    f_mhz: float = 2400.0
    n: float = 3.0
    l_floors: float = 0.0

    def __post_init__(self):
        require(self.f_mhz > 0, f"f_mhz must be positive, got {self.f_mhz}")
        require(self.l_floors >= 0, f"l_floors must be non-negative, got {self.l_floors}")


@dataclass(frozen=True)
class WinnerParams:
    """WINNER II rooms-and-corridors model. Frequency is in GHz (ItuRParams takes MHz).

    ``l_w`` is the per-wall loss: 5 dB for thin walls, 15 dB for thick ones,
    though any positive value is accepted. ``n_w`` may be fractional.
    """

    f_ghz: float = 2.4
    l_w: float = THIN_WALL_DB
    n_w: float = 0.0

    def __post_init__(self):
        require(self.f_ghz > 0, f"f_ghz must be positive, got {self.f_ghz}")
        require(self.l_w > 0, f"wall loss must be positive, got {self.l_w}")
        require(self.n_w >= 0, f"wall count must be non-negative, got {self.n_w}")


@dataclass(frozen=True)
class ChannelConfig:
    """Settings for fitting measured path loss and overlaying the standard models.

    ``n_w`` of None means the wall count is fitted from the measurements.
    """

    p_tx: float = 10.0
    d0: float = 1.0
    itu: ItuRParams = field(default_factory=ItuRParams)
    f_ghz: float = 2.4
    l_w: float = THIN_WALL_DB
    n_w: float | None = None

    def __post_init__(self):
        require(math.isfinite(self.p_tx), f"transmit power must be finite, got {self.p_tx}")
        require(self.d0 > 0, f"reference distance d0 must be positive, got {self.d0}")
        require(self.f_ghz > 0, f"f_ghz must be positive, got {self.f_ghz}")
        require(self.l_w > 0, f"wall loss must be positive, got {self.l_w}")
        require(self.n_w is None or self.n_w >= 0, f"wall count must be non-negative, got {self.n_w}")


def _check_distance(d: float) -> None:
    require(d > 0, f"link distance must be positive, got {d}")


def log_distance_pl(p: LogDistanceParams, d: float) -> float:
    _check_distance(d)
    return p.pl_d0 + 10.0 * p.n * math.log10(d / p.d0)


def itu_r_pl(p: ItuRParams, d: float) -> float:
    _check_distance(d)
    return 20.0 * math.log10(p.f_mhz) + 10.0 * p.n * math.log10(d) + p.l_floors - 28.0


def winner2_pl(p: WinnerParams, d: float) -> float:
    _check_distance(d)
    return 20.0 * math.log10(p.f_ghz / 5.0) + 36.8 * math.log10(d) + p.n_w * p.l_w + 43.8


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    require(x > 0, f"cannot express non-positive ratio {x} in dB")
    return 10.0 * math.log10(x)


# dBm and dB share the same 10^(x/10) map; milliwatts are the linear unit
dbm_to_mw = db_to_linear


def mean_snr_from_budget(p_tx: float, pl: float, noise: float) -> float:
    """Mean linear SNR of a link: transmit power (dBm) minus path loss (dB) over noise (dBm)"""
    for name, value in (("p_tx", p_tx), ("pl", pl), ("noise", noise)):
        require(math.isfinite(value), f"{name} must be finite, got {value}")
    return db_to_linear(p_tx - pl - noise)
