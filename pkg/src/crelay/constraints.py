"""Interference and capacity constraints and the AND-rule access decision.

Both constraint distributions are changes of variable of the SNR CDF:

    F_I(I_th) = F_gamma(I_th / sigma^2)        (interference at a PR)
    F_C(C_th) = F_gamma(2^C_th - 1)            (capacity at an ID, unit bandwidth)

A PR passes IC when 1 - F_I <= eps_I, an ID passes CC when F_C <= eps_C;
ties pass. The relay may access the channel for snapshot (PR, ID) only when
both pass.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .channel_models import db_to_linear
from .errors import IncompleteConfigError, require
from .fading import SnrDist, snr_cdf

__all__ = (
    "ConstraintConfig",
    "DecisionMatrix",
    "CalibrationResult",
    "DEFAULT_NOISE_POWER_DBM",
    "interference_cdf",
    "capacity_cdf",
    "capacity_snr_threshold",
    "interference_snr_threshold",
    "check_ic",
    "check_cc",
    "node_probabilities",
    "build_decision_matrix",
    "calibrate_noise_power",
)

logger = logging.getLogger(__name__)

# inside the sigma^2 window that reproduces the 1011 IC pattern of the indoor campaign
DEFAULT_NOISE_POWER_DBM = -119.5


@dataclass(frozen=True)
class ConstraintConfig:
    """Design thresholds. ``noise_power`` (sigma^2 at the PR, dBm) has no default
    because nothing fixes it; anything that needs F_I asks for it explicitly.
    """

    i_th: float = -90.0
    eps_i_out: float = 0.1
    c_th: float = 7.5
    eps_c_out: float = 0.1
    noise_power: float | None = None

    def __post_init__(self):
        require(math.isfinite(self.i_th), f"interference threshold must be finite, got {self.i_th}")
        require(0 < self.eps_i_out < 1, f"interference outage must lie in (0, 1), got {self.eps_i_out}")
        require(0 < self.eps_c_out < 1, f"capacity outage must lie in (0, 1), got {self.eps_c_out}")
        require(
            self.c_th >= 0 and math.isfinite(self.c_th),
            f"capacity threshold must be >= 0, got {self.c_th}",
        )
        require(
            self.noise_power is None or math.isfinite(self.noise_power),
            f"noise power must be finite, got {self.noise_power}",
        )

    def require_noise_power(self) -> float:
        if self.noise_power is None:
            raise IncompleteConfigError(
                "constraints.noise_power (sigma^2 at the primary receiver, dBm) is required to "
                "evaluate the interference constraint; the paper-shape preset uses "
                f"{DEFAULT_NOISE_POWER_DBM} dBm"
            )
        return self.noise_power


def interference_snr_threshold(i_th: float, noise_power: float) -> float:
    """I_th / sigma^2 as a linear ratio, both given in dBm"""
    return db_to_linear(i_th - noise_power)


def capacity_snr_threshold(c_th: float) -> float:
    """SNR at which log2(1 + gamma) reaches c_th"""
    require(c_th >= 0, f"capacity threshold must be >= 0, got {c_th}")
    return 2.0**c_th - 1.0


def interference_cdf(i_th: float, noise_power: float, d: SnrDist) -> float:
    return snr_cdf(interference_snr_threshold(i_th, noise_power), d)


def capacity_cdf(c_th: float, d: SnrDist) -> float:
    return snr_cdf(capacity_snr_threshold(c_th), d)


def check_ic(d: SnrDist, cfg: ConstraintConfig) -> bool:
    return 1.0 - interference_cdf(cfg.i_th, cfg.require_noise_power(), d) <= cfg.eps_i_out


def check_cc(d: SnrDist, cfg: ConstraintConfig) -> bool:
    return capacity_cdf(cfg.c_th, d) <= cfg.eps_c_out


def node_probabilities(d: SnrDist, cfg: ConstraintConfig, role: str) -> float:
    """F_I(I_th) for a ``"pr"`` node, F_C(C_th) for an ``"id"`` node"""
    if role == "pr":
        return interference_cdf(cfg.i_th, cfg.require_noise_power(), d)
    require(role == "id", f"unknown node role {role!r}")
    return capacity_cdf(cfg.c_th, d)


@dataclass(frozen=True)
class DecisionMatrix:
    """IC bits per PR, CC bits per ID; the grid is always their outer AND.

    ``pr_probabilities``/``id_probabilities`` hold F_I and F_C for audit,
    NaN for a node whose fit failed.
    """

    pr_ids: tuple[str, ...]
    id_ids: tuple[str, ...]
    ic_bits: tuple[bool, ...]
    cc_bits: tuple[bool, ...]
    pr_probabilities: tuple[float, ...] | None = None
    id_probabilities: tuple[float, ...] | None = None

    def __post_init__(self):
        require(len(self.pr_ids) == len(self.ic_bits), "one IC bit per PR is required")
        require(len(self.id_ids) == len(self.cc_bits), "one CC bit per ID is required")
        require(len(self.ic_bits) > 0 and len(self.cc_bits) > 0, "decision matrix needs a PR and an ID")

    @classmethod
    def from_bits(
        cls,
        ic_bits: Sequence[bool | int],
        cc_bits: Sequence[bool | int],
        pr_ids: Sequence[str] | None = None,
        id_ids: Sequence[str] | None = None,
    ) -> "DecisionMatrix":
        pr_ids = pr_ids or [f"PR{p + 1}" for p in range(len(ic_bits))]
        id_ids = id_ids or [f"ID{i + 1}" for i in range(len(cc_bits))]
        return cls(
            tuple(pr_ids),
            tuple(id_ids),
            tuple(bool(b) for b in ic_bits),
            tuple(bool(b) for b in cc_bits),
        )

    @property
    def grid(self) -> tuple[tuple[bool, ...], ...]:
        """grid[p][i] = ic_bits[p] AND cc_bits[i]"""
        return tuple(tuple(ic and cc for cc in self.cc_bits) for ic in self.ic_bits)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.ic_bits), len(self.cc_bits)

    def enabled(self, pr_id: str, id_id: str) -> bool:
        return self.ic_bits[self.pr_ids.index(pr_id)] and self.cc_bits[self.id_ids.index(id_id)]


def build_decision_matrix(
    pr_fits: Mapping[str, SnrDist],
    id_fits: Mapping[str, SnrDist],
    cfg: ConstraintConfig,
) -> DecisionMatrix:
    require(len(pr_fits) > 0 and len(id_fits) > 0, "need at least one PR fit and one ID fit")
    noise_power = cfg.require_noise_power()
    pr_probs = tuple(interference_cdf(cfg.i_th, noise_power, d) for d in pr_fits.values())
    id_probs = tuple(capacity_cdf(cfg.c_th, d) for d in id_fits.values())
    return DecisionMatrix(
        pr_ids=tuple(pr_fits),
        id_ids=tuple(id_fits),
        ic_bits=tuple(1.0 - f <= cfg.eps_i_out for f in pr_probs),
        cc_bits=tuple(f <= cfg.eps_c_out for f in id_probs),
        pr_probabilities=pr_probs,
        id_probabilities=id_probs,
    )


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    """Noise powers scanned, IC bits per PR at each, and the matching window"""

    noise_powers: np.ndarray
    ic_bits: np.ndarray
    matches: np.ndarray

    @property
    def window(self) -> tuple[float, float] | None:
        hits = self.noise_powers[self.matches]
        if len(hits) == 0:
            return None
        return float(hits.min()), float(hits.max())

    @property
    def midpoint(self) -> float | None:
        window = self.window
        return None if window is None else (window[0] + window[1]) / 2.0

    @property
    def contiguous(self) -> bool:
        idx = np.flatnonzero(self.matches)
        return len(idx) > 0 and bool(np.all(np.diff(idx) == 1))


def calibrate_noise_power(
    pr_dists: Sequence[SnrDist],
    cfg: ConstraintConfig,
    pattern: Sequence[bool | int],
    lo: float = -130.0,
    hi: float = -100.0,
    step: float = 0.1,
) -> CalibrationResult:
    """Scan sigma^2 over [lo, hi] (inclusive) for values whose IC bits equal ``pattern``"""
    require(len(pr_dists) == len(pattern), "pattern needs one bit per PR")
    require(lo < hi and step > 0, f"invalid sweep range [{lo}, {hi}] step {step}")
    steps = int(round((hi - lo) / step))
    grid = np.round(lo + step * np.arange(steps + 1), 10)
    target = np.array([bool(b) for b in pattern])
    bits = np.array(
        [[1.0 - interference_cdf(cfg.i_th, float(s), d) <= cfg.eps_i_out for d in pr_dists] for s in grid]
    )
    matches = np.all(bits == target, axis=1)
    result = CalibrationResult(grid, bits, matches)
    if result.window is None:
        logger.warning("no noise power in [%g, %g] dBm reproduces IC pattern %s", lo, hi, target.astype(int))
    else:
        logger.info("noise power window %s dBm, midpoint %.2f", result.window, result.midpoint)
    return result
