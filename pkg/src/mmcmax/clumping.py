"""Poisson clumping approximations to the law of the maximum queue length.

Notation used throughout: ``q = lam/(c*mu)`` (the traffic intensity) and
``r = 1/q``. Queue-length levels are addressed by an integer ``m >= 0``; the
real offset ``h`` of the classical statement is ``m - log_r(n)``, so the first
level *not* reached is ``k = m + 1``.

The low-order approximation is::

    P{M_n <= m} ~ exp(-B * n * q**(m + 1))

with clump-rate constant ``B``. The high-order approximation keeps the
finite-``n`` correction; after cancelling common powers it reads::

    P{M_n <= m} ~ exp(-n * B / (r**(m + 1) - r**(c - 1)))

and is outside its regime (denominator <= 0) for ``m <= c - 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .queue_model import QueueParams, binomial_weighted_sum

#: Euler's constant to 20 significant digits.
EULER_GAMMA = 0.57721566490153286061


class Order(enum.Enum):
    LOW = "low"
    HIGH = "high"


def clump_rate_constant(params: QueueParams) -> float:
    """B = c^(c-2) * lam * mu^(c-3) * (c*mu - lam)^2 / S(c, lam, mu).

    S is :func:`~mmcmax.queue_model.binomial_weighted_sum`.
    """
    params.require_stable()
    c, lam, mu = params.c, params.lam, params.mu
    log_b = (
        (c - 2) * math.log(c)
        + math.log(lam)
        + (c - 3) * math.log(mu)
        + 2.0 * math.log(c * mu - lam)
        - math.log(binomial_weighted_sum(params))
    )
    return math.exp(log_b)


def _check_level(m) -> int:
    if isinstance(m, (bool, np.bool_)) or int(m) != m or m < 0:
        raise ValidationError(f"level m must be a nonnegative integer, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class MaxCdfApprox:
    """Evaluatable approximation of ``P{M_n <= m}`` for a fixed horizon ``n``."""

    params: QueueParams
    horizon_n: float
    order: Order = Order.LOW
    _log_b: float = field(init=False, repr=False, compare=False)
    _log_r: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.params.require_stable()
        n = float(self.horizon_n)
        if not math.isfinite(n) or n <= 0:
            raise ValidationError(f"horizon_n must be positive and finite, got {self.horizon_n!r}")
        object.__setattr__(self, "horizon_n", n)
        object.__setattr__(self, "order", Order(self.order))
        object.__setattr__(self, "_log_b", math.log(clump_rate_constant(self.params)))
        p = self.params
        object.__setattr__(self, "_log_r", math.log(p.c * p.mu / p.lam))

    @property
    def log_base(self) -> float:
        """ln(c*mu/lam)."""
        return self._log_r

    def offset_h(self, m: int) -> float:
        """Real offset h with m = log_{c*mu/lam}(n) + h."""
        return m - math.log(self.horizon_n) / self._log_r

    def in_regime(self, m: int) -> bool:
        """False where the high-order denominator is not positive."""
        m = _check_level(m)
        return self.order is Order.LOW or m + 1 > self.params.c - 1

    def exponent(self, m: int) -> float:
        """The positive quantity inside exp(-...); ``inf`` when out of regime."""
        m = _check_level(m)
        log_n = math.log(self.horizon_n)
        if self.order is Order.LOW:
            return math.exp(self._log_b + log_n - (m + 1) * self._log_r)
        gap = m + 2 - self.params.c
        if gap <= 0:
            return math.inf
        # r^(m+1) - r^(c-1) = r^(m+1) * (1 - r^-(gap))
        log_den = (m + 1) * self._log_r + math.log(-math.expm1(-gap * self._log_r))
        return math.exp(self._log_b + log_n - log_den)

    def cdf(self, m: int) -> float:
        return math.exp(-self.exponent(m))

    def pmf(self, m: int) -> float:
        """P{M_n = m} induced by the CDF, clamped at zero."""
        m = _check_level(m)
        value = self.cdf(m) - (self.cdf(m - 1) if m else 0.0)
        return max(value, 0.0)

    def table(self, m_max: int) -> "PmfTable":
        """CDF and pmf on 0..m_max with any regime or clamping flags."""
        m_max = _check_level(m_max)
        cdf = np.array([self.cdf(m) for m in range(m_max + 1)])
        raw = np.diff(cdf, prepend=0.0)
        flags = []
        if self.order is Order.HIGH:
            bad = [m for m in range(m_max + 1) if not self.in_regime(m)]
            if bad:
                flags.append(f"high-order out of regime at m={bad[0]}..{bad[-1]} (cdf set to 0)")
            clamped = [int(m) for m in np.flatnonzero(raw < 0)]
            if clamped:
                flags.append(f"high-order pmf clamped to 0 at m={clamped}")
        return PmfTable(cdf=cdf, pmf=np.maximum(raw, 0.0), flags=flags)

    def support_end(self, tail: float = 1e-9) -> int:
        """Smallest m with cdf(m) > 1 - tail."""
        m = max(0, int(math.log(self.horizon_n) / self._log_r))
        while self.cdf(m) <= 1.0 - tail:
            m += 1
        while m > 0 and self.cdf(m - 1) > 1.0 - tail:
            m -= 1
        return m


@dataclass(frozen=True)
class PmfTable:
    cdf: np.ndarray
    pmf: np.ndarray
    flags: list


def cdf_low_order(approx: MaxCdfApprox, m: int) -> float:
    if approx.order is not Order.LOW:
        approx = MaxCdfApprox(approx.params, approx.horizon_n, Order.LOW)
    return approx.cdf(m)


def cdf_high_order(approx: MaxCdfApprox, m: int) -> float:
    """High-order CDF; 0.0 for levels outside the regime (see :meth:`MaxCdfApprox.in_regime`)."""
    if approx.order is not Order.HIGH:
        approx = MaxCdfApprox(approx.params, approx.horizon_n, Order.HIGH)
    return approx.cdf(m)


def pmf(approx: MaxCdfApprox, m: int) -> float:
    return approx.pmf(m)


@dataclass(frozen=True)
class GumbelMoments:
    """Discrete-Gumbel moment estimates: mean = slope*ln(n) + intercept."""

    slope: float
    intercept: float
    variance: float

    def mean(self, n: float) -> float:
        return self.slope * math.log(n) + self.intercept


def gumbel_moments(params: QueueParams) -> GumbelMoments:
    """Slope 1/ln r, intercept (gamma + ln(B*q))/ln r + 1/2, variance (pi^2/6)/ln(r)^2 + 1/12."""
    params.require_stable()
    log_r = math.log(params.c * params.mu / params.lam)
    log_bq = math.log(clump_rate_constant(params)) - log_r
    return GumbelMoments(
        slope=1.0 / log_r,
        intercept=(EULER_GAMMA + log_bq) / log_r + 0.5,
        variance=(math.pi**2 / 6.0) / log_r**2 + 1.0 / 12.0,
    )


def mean_estimate(params: QueueParams, n: float) -> float:
    if not n > 0:
        raise ValidationError(f"n must be positive, got {n!r}")
    return gumbel_moments(params).mean(n)
