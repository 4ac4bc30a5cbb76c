"""Special functions behind the fading laws.

One kernel, the regularized lower incomplete gamma function, serves the
Gamma and exponential SNR CDFs and (through P(1/2, x^2)) the error function
used by the shadowing CDF. Digamma and trigamma feed the Gamma shape MLE.

The incomplete gamma evaluation follows the usual split: power series for
x < m + 1, Lentz continued fraction for the upper function otherwise.
Both are vectorised over x with numpy; m is a scalar.
"""

import logging
import math

import numpy as np

from .errors import ConvergenceError, require

__all__ = (
    "regularized_lower_gamma",
    "erf",
    "digamma",
    "trigamma",
)

logger = logging.getLogger(__name__)

REL_TOL = 1e-15
MAX_ITER = 2000
_FPMIN = 1e-300
# ψ and ψ' switch to the asymptotic expansion above this argument
_ASYMPTOTIC_FROM = 10.0


def _log_prefactor(m: float, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -x + m * np.log(x) - math.lgamma(m)


def _lower_series(m: float, x: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    ap = m
    term = np.full_like(x, 1.0 / m)
    total = term.copy()
    for i in range(max_iter):
        ap += 1.0
        term = term * x / ap
        total += term
        if np.all(np.abs(term) < np.abs(total) * tol):
            logger.debug("incomplete gamma series converged after %d terms", i + 1)
            break
    else:
        raise ConvergenceError(f"incomplete gamma series for m={m} did not converge in {max_iter} terms")
    return total * np.exp(_log_prefactor(m, x))


def _upper_continued_fraction(m: float, x: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    b = x + 1.0 - m
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter + 1):
        an = -i * (i - m)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < tol):
            logger.debug("incomplete gamma continued fraction converged after %d steps", i)
            break
    else:
        raise ConvergenceError(
            f"incomplete gamma continued fraction for m={m} did not converge in {max_iter} steps"
        )
    return np.exp(_log_prefactor(m, x)) * h


def regularized_lower_gamma(m: float, x, *, tol: float = REL_TOL, max_iter: int = MAX_ITER):
    """P(m, x) = 1 - Γ(m, x) / Γ(m) for scalar m > 0 and x >= 0 (scalar or array).

    Returns a float for scalar ``x`` and an array of the same shape otherwise.
    """
    require(m > 0 and math.isfinite(m), f"gamma shape must be positive and finite, got {m}")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    require(bool(np.all(xs >= 0)), "incomplete gamma argument must be non-negative")

    out = np.ones_like(xs)
    finite = np.isfinite(xs)
    series = finite & (xs < m + 1.0)
    fraction = finite & ~series
    if series.any():
        out[series] = _lower_series(m, xs[series], tol, max_iter)
    if fraction.any():
        out[fraction] = 1.0 - _upper_continued_fraction(m, xs[fraction], tol, max_iter)
    np.clip(out, 0.0, 1.0, out=out)
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def erf(x):
    """Error function via erf(x) = sign(x) P(1/2, x^2)"""
    xs = np.asarray(x, dtype=float)
    value = np.sign(xs) * regularized_lower_gamma(0.5, xs * xs)
    if np.ndim(x) == 0:
        return float(value)
    return value


def digamma(x: float) -> float:
    """ψ(x) for x > 0: recurrence up to the asymptotic range, then the Bernoulli series"""
    require(x > 0, f"digamma is only provided for positive arguments, got {x}")
    result = 0.0
    while x < _ASYMPTOTIC_FROM:
        result -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132))))
    )
    return result + math.log(x) - 0.5 / x - tail


def trigamma(x: float) -> float:
    """ψ'(x) for x > 0"""
    require(x > 0, f"trigamma is only provided for positive arguments, got {x}")
    result = 0.0
    while x < _ASYMPTOTIC_FROM:
        result += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = inv * inv2 * (
        1.0 / 6
        - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66))))
    )
    return result + inv + 0.5 * inv2 + tail
