"""Shadowing and small-scale SNR distributions.

The path-loss exponent is normal (shadowing). Received SNR is exponential
under Rayleigh fading and Gamma under Nakagami-m fading, with shape m and
scale gamma_bar / m so that the mean is gamma_bar in both cases.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, require
from .special import erf, regularized_lower_gamma

__all__ = (
    "FadingKind",
    "NormalParams",
    "SnrDist",
    "NAKAGAMI_MIN_M",
    "normal_cdf",
    "snr_cdf",
    "sample_snr",
)

NAKAGAMI_MIN_M = 0.5


class FadingKind(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    NAKAGAMI = "nakagami"

    @classmethod
    def parse(cls, value: "str | FadingKind") -> "FadingKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown fading model {value!r}, expected rayleigh or nakagami")


@dataclass(frozen=True)
class NormalParams:
    mu: float
    sigma: float

    def __post_init__(self):
        require(math.isfinite(self.mu), f"normal mean must be finite, got {self.mu}")
        require(
            self.sigma > 0 and math.isfinite(self.sigma),
            f"normal sigma must be positive, got {self.sigma}",
        )


@dataclass(frozen=True)
class SnrDist:
    """Small-scale SNR law. ``m`` is ignored (held at 1) for Rayleigh."""

    kind: FadingKind
    gamma_bar: float
    m: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FadingKind.parse(self.kind))
        require(
            self.gamma_bar > 0 and math.isfinite(self.gamma_bar),
            f"mean SNR must be positive and finite, got {self.gamma_bar}",
        )
        if self.kind is FadingKind.RAYLEIGH:
            object.__setattr__(self, "m", 1.0)
        else:
            require(
                math.isfinite(self.m) and self.m >= NAKAGAMI_MIN_M,
                f"Nakagami shape must be at least {NAKAGAMI_MIN_M}, got {self.m}",
            )

    @classmethod
    def rayleigh(cls, gamma_bar: float) -> "SnrDist":
        return cls(FadingKind.RAYLEIGH, gamma_bar)

    @classmethod
    def nakagami(cls, m: float, gamma_bar: float) -> "SnrDist":
        return cls(FadingKind.NAKAGAMI, gamma_bar, m)

    @property
    def scale(self) -> float:
        return self.gamma_bar / self.m


def normal_cdf(x, p: NormalParams):
    z = (np.asarray(x, dtype=float) - p.mu) / (math.sqrt(2.0) * p.sigma)
    value = 0.5 * (1.0 + erf(z))
    if np.ndim(x) == 0:
        return float(value)
    return value


def snr_cdf(gamma, d: SnrDist):
    """F_gamma at ``gamma`` (scalar or array of linear SNRs, all >= 0)"""
    g = np.asarray(gamma, dtype=float)
    require(bool(np.all(g >= 0)), "SNR must be non-negative")
    if d.kind is FadingKind.RAYLEIGH:
        value = -np.expm1(-g / d.gamma_bar)
    else:
        value = regularized_lower_gamma(d.m, d.m * g / d.gamma_bar)
    if np.ndim(gamma) == 0:
        return float(value)
    return value


def sample_snr(d: SnrDist, count: int, seed: "int | np.random.Generator") -> np.ndarray:
    """i.i.d. SNR draws; ``seed`` may also be a Generator, which is consumed in place"""
    require(count >= 1, f"sample count must be at least 1, got {count}")
    rng = np.random.default_rng(seed)
    if d.kind is FadingKind.RAYLEIGH:
        return rng.exponential(d.gamma_bar, count)
    return rng.gamma(d.m, d.scale, count)
