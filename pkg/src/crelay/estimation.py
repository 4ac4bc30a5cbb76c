"""Fitting channel models to measurements.

Large scale: least-squares log-distance fit, exponent inversion and a normal
MLE for shadowing, wall-count fit for WINNER II. Small scale: exponential and
Gamma MLEs for Rayleigh and Nakagami-m SNR, scored against the empirical CDF
by mean squared error.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .channel_models import (
    ChannelConfig,
    ItuRParams,
    LogDistanceParams,
    WinnerParams,
    itu_r_pl,
    log_distance_pl,
    winner2_pl,
)
from .errors import ConvergenceError, DegenerateFitError, require
from .fading import NAKAGAMI_MIN_M, FadingKind, NormalParams, SnrDist, normal_cdf, snr_cdf
from .special import digamma, trigamma

__all__ = (
    "Measurement",
    "SnrSampleSet",
    "PathLossFit",
    "FadingFit",
    "FadingReport",
    "PathLossReport",
    "EmpiricalCdf",
    "fit_log_distance_lse",
    "invert_exponents",
    "fit_normal_mle",
    "normal_cdf_mse",
    "fit_winner_walls",
    "fit_path_loss_report",
    "fit_rayleigh_mle",
    "fit_nakagami_mle",
    "fit_fading",
    "empirical_cdf",
    "ecdf_mse",
    "cdf_mse",
)

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
# exponent inversion is skipped within this relative distance of d0
_D0_GUARD = 0.01
# exponents closer than this (relative) count as having no spread
_MIN_SPREAD = 1e-9
# log-moment gaps below this mean m above about 1e4: no measurable fading, and
# the incomplete gamma kernel cannot evaluate such shapes within MAX_ITER
MIN_LOG_GAP = 5e-5


@dataclass(frozen=True)
class Measurement:
    link_id: str
    distance: float
    rx_power: float

    def __post_init__(self):
        require(self.distance > 0, f"distance of {self.link_id!r} must be positive, got {self.distance}")
        require(math.isfinite(self.rx_power), f"rx power of {self.link_id!r} must be finite")

    def path_loss(self, p_tx: float) -> float:
        return p_tx - self.rx_power


@dataclass(frozen=True, eq=False)
class SnrSampleSet:
    """Linear SNR samples of one node; stored as a read-only float array"""

    node_id: str
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).ravel()
        require(
            len(samples) >= 2,
            f"node {self.node_id!r} has {len(samples)} sample(s), at least 2 are needed",
            DegenerateFitError,
        )
        require(
            bool(np.all(np.isfinite(samples)) and np.all(samples > 0)),
            f"node {self.node_id!r} has non-positive or non-finite SNR samples",
        )
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class PathLossFit:
    params: LogDistanceParams
    sigma_pl: float

    def __post_init__(self):
        require(self.sigma_pl >= 0, f"residual spread must be non-negative, got {self.sigma_pl}")


@dataclass(frozen=True)
class FadingFit:
    """A fitted SNR law and its MSE against the empirical CDF.

    ``clamped`` marks a Nakagami shape raised to the physical lower bound.
    """

    dist: SnrDist
    mse: float
    clamped: bool = False

    def __post_init__(self):
        require(self.mse >= 0, f"MSE must be non-negative, got {self.mse}")


@dataclass(frozen=True)
class FadingReport:
    node_id: str
    rayleigh: FadingFit
    nakagami: FadingFit

    @property
    def best(self) -> FadingFit:
        # ties go to Nakagami, which nests Rayleigh
        if self.rayleigh.mse < self.nakagami.mse:
            return self.rayleigh
        return self.nakagami

    def select(self, model: str) -> FadingFit:
        if model == "best":
            return self.best
        kind = FadingKind.parse(model)
        return self.rayleigh if kind is FadingKind.RAYLEIGH else self.nakagami


class EmpiricalCdf:
    """Right-continuous step function F(x) = #{samples <= x} / N"""

    def __init__(self, observations: Sequence[float] | np.ndarray):
        self.observations = np.sort(np.asarray(observations, dtype=float).ravel())
        require(len(self.observations) > 0, "empirical CDF needs at least one observation")

    def __call__(self, x):
        counts = np.searchsorted(self.observations, x, side="right")
        value = counts / len(self.observations)
        if np.ndim(x) == 0:
            return float(value)
        return value


def empirical_cdf(s: SnrSampleSet) -> EmpiricalCdf:
    return EmpiricalCdf(s.samples)


def ecdf_mse(cdf: Callable, samples) -> float:
    """Mean of (cdf(x_i) - F_hat(x_i))^2 over the sample points themselves"""
    x = np.asarray(samples, dtype=float)
    model = np.asarray(cdf(x), dtype=float)
    empirical = EmpiricalCdf(x)(x)
    return float(np.mean((model - empirical) ** 2))


def cdf_mse(model: SnrDist, s: SnrSampleSet) -> float:
    return ecdf_mse(lambda x: snr_cdf(x, model), s.samples)


def normal_cdf_mse(params: NormalParams, ns: Sequence[float]) -> float:
    return ecdf_mse(lambda x: normal_cdf(x, params), ns)


def fit_log_distance_lse(ms: Sequence[Measurement], p_tx: float, d0: float = 1.0) -> PathLossFit:
    """Closed-form least squares of PL_i = PL(d0) + n * 10 log10(d_i / d0)"""
    require(d0 > 0, f"reference distance d0 must be positive, got {d0}")
    require(len(ms) >= 2, f"need at least 2 measurements, got {len(ms)}", DegenerateFitError)
    x = 10.0 * np.log10(np.array([m.distance for m in ms]) / d0)
    y = np.array([m.path_loss(p_tx) for m in ms])
    require(
        np.ptp(x) > 0,
        "all measurements share one distance; the exponent is not identifiable",
        DegenerateFitError,
    )
    dx = x - x.mean()
    sxx = float(np.dot(dx, dx))
    n = float(np.dot(dx, y - y.mean()) / sxx)
    require(n > 0, f"fitted path-loss exponent {n:.4g} is not positive", DegenerateFitError)
    pl_d0 = float(y.mean() - n * x.mean())
    residuals = y - (pl_d0 + n * x)
    sigma_pl = float(np.sqrt(np.mean(residuals**2)))
    logger.info("log-distance fit: PL(d0)=%.4g dB, n=%.4g, sigma=%.4g dB", pl_d0, n, sigma_pl)
    return PathLossFit(LogDistanceParams(pl_d0=pl_d0, d0=d0, n=n), sigma_pl)


def invert_exponents(ms: Sequence[Measurement], p_tx: float, pl_d0: float, d0: float = 1.0) -> list[float]:
    """Per-measurement exponents n_i = (PL_i - PL(d0)) / (10 log10(d_i / d0))"""
    exponents = []
    for m in ms:
        if abs(m.distance / d0 - 1.0) < _D0_GUARD:
            continue
        exponents.append((m.path_loss(p_tx) - pl_d0) / (10.0 * math.log10(m.distance / d0)))
    require(
        len(exponents) >= 2,
        f"only {len(exponents)} measurement(s) away from d0; need 2 to fit shadowing",
        DegenerateFitError,
    )
    return exponents


def fit_normal_mle(ns: Sequence[float]) -> NormalParams:
    values = np.asarray(ns, dtype=float)
    require(len(values) >= 2, f"need at least 2 values, got {len(values)}", DegenerateFitError)
    mu, sigma = float(values.mean()), float(values.std())
    require(
        sigma > _MIN_SPREAD * max(1.0, abs(mu)),
        "all values are equal; the spread is zero",
        DegenerateFitError,
    )
    return NormalParams(mu=mu, sigma=sigma)


def fit_winner_walls(ms: Sequence[Measurement], p_tx: float, f_ghz: float = 2.4, l_w: float = 5.0) -> float:
    """Least-squares average wall count for the WINNER II model"""
    require(len(ms) >= 1, "need at least one measurement to fit the wall count", DegenerateFitError)
    bare = WinnerParams(f_ghz=f_ghz, l_w=l_w, n_w=0.0)
    excess = [m.path_loss(p_tx) - winner2_pl(bare, m.distance) for m in ms]
    return max(float(np.mean(excess)) / l_w, 0.0)


@dataclass(frozen=True)
class PathLossReport:
    """Large-scale fit plus the per-measurement comparison of the three predictors.

    ``shadowing`` is None when the exponents show no spread (noiseless data).
    """

    fit: PathLossFit
    shadowing: NormalParams | None
    shadowing_mse: float | None
    itu: ItuRParams
    winner: WinnerParams
    predictions: list[dict] = field(default_factory=list)


def fit_path_loss_report(ms: Sequence[Measurement], cfg: ChannelConfig) -> PathLossReport:
    fit = fit_log_distance_lse(ms, cfg.p_tx, cfg.d0)
    shadowing = shadowing_mse = None
    try:
        exponents = invert_exponents(ms, cfg.p_tx, fit.params.pl_d0, cfg.d0)
        shadowing = fit_normal_mle(exponents)
        shadowing_mse = normal_cdf_mse(shadowing, exponents)
    except DegenerateFitError as e:
        logger.warning("shadowing not fitted: %s", e)
    n_w = cfg.n_w if cfg.n_w is not None else fit_winner_walls(ms, cfg.p_tx, cfg.f_ghz, cfg.l_w)
    winner = WinnerParams(f_ghz=cfg.f_ghz, l_w=cfg.l_w, n_w=n_w)
    predictions = [
        {
            "link_id": m.link_id,
            "distance_m": m.distance,
            "measured_pl_db": m.path_loss(cfg.p_tx),
            "log_distance_db": log_distance_pl(fit.params, m.distance),
            "itu_r_db": itu_r_pl(cfg.itu, m.distance),
            "winner2_db": winner2_pl(winner, m.distance),
        }
        for m in ms
    ]
    return PathLossReport(
        fit=fit,
        shadowing=shadowing,
        shadowing_mse=shadowing_mse,
        itu=cfg.itu,
        winner=winner,
        predictions=predictions,
    )


def fit_rayleigh_mle(s: SnrSampleSet) -> FadingFit:
    dist = SnrDist.rayleigh(float(s.samples.mean()))
    return FadingFit(dist, cdf_mse(dist, s))


def _greenwood_durand(gap: float) -> float:
    """Closed-form starting point for the Gamma shape given ln(mean) - mean(ln)"""
    if gap <= 0.5772:
        return (0.5000876 + 0.1648852 * gap - 0.0544274 * gap * gap) / gap
    return (8.898919 + 9.059950 * gap + 0.9775373 * gap * gap) / (
        gap * (17.79728 + 11.968477 * gap + gap * gap)
    )


def _solve_gamma_shape(gap: float) -> float:
    """Root of ln(m) - ψ(m) = gap by Newton iteration"""
    m = _greenwood_durand(gap)
    for i in range(NEWTON_MAX_ITER):
        f = math.log(m) - digamma(m) - gap
        fprime = 1.0 / m - trigamma(m)
        proposal = m - f / fprime
        if proposal <= 0:
            proposal = m / 2.0
        logger.debug("gamma shape newton step %d: m=%.12g", i, proposal)
        if abs(proposal - m) < NEWTON_TOL * max(1.0, m):
            return proposal
        m = proposal
    raise ConvergenceError(f"gamma shape solve did not converge in {NEWTON_MAX_ITER} iterations (gap={gap})")


def fit_nakagami_mle(s: SnrSampleSet) -> FadingFit:
    samples = s.samples
    require(np.ptp(samples) > 0, f"node {s.node_id!r}: all samples are equal", DegenerateFitError)
    mean = float(samples.mean())
    gap = math.log(mean) - float(np.log(samples).mean())
    require(
        gap >= MIN_LOG_GAP,
        f"node {s.node_id!r}: log-moment gap {gap:.3g} is below {MIN_LOG_GAP:g}; the samples show no fading",
        DegenerateFitError,
    )
    m = _solve_gamma_shape(gap)
    clamped = m < NAKAGAMI_MIN_M
    if clamped:
        logger.warning("node %s: Nakagami m=%.4g below %.1f, clamped", s.node_id, m, NAKAGAMI_MIN_M)
        m = NAKAGAMI_MIN_M
    dist = SnrDist.nakagami(m, mean)
    return FadingFit(dist, cdf_mse(dist, s), clamped)


def fit_fading(s: SnrSampleSet) -> FadingReport:
    report = FadingReport(s.node_id, fit_rayleigh_mle(s), fit_nakagami_mle(s))
    logger.info(
        "node %s: rayleigh mse=%.3g, nakagami m=%.4g mse=%.3g",
        s.node_id,
        report.rayleigh.mse,
        report.nakagami.dist.m,
        report.nakagami.mse,
    )
    return report
