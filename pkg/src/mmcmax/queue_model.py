"""M/M/c parameters and Erlang A, B and C stationary quantities.

All functions are pure; the only state is the frozen :class:`QueueParams`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import NumericLimitError, UnstableQueueError, ValidationError

#: Largest c for which c! is finite in double precision.
DIRECT_FACTORIAL_LIMIT = 170

#: Relative size of a series term below which the incomplete gamma sum stops.
SERIES_RTOL = 1e-15

#: Hard cap on incomplete gamma series terms.
SERIES_MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class QueueParams:
    """Server count ``c``, arrival rate ``lam``, per-server service rate ``mu``.

    ``theta`` is the abandonment rate of the M/M/c+M (Erlang A) model; ``None``
    means no abandonment. ``math.inf`` is accepted and means immediate
    abandonment (the loss system).
    """

    c: int
    lam: float
    mu: float
    theta: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.c, bool) or not isinstance(self.c, int):
            if isinstance(self.c, float) and self.c.is_integer():
                object.__setattr__(self, "c", int(self.c))
            else:
                raise ValidationError(f"c must be a positive integer, got {self.c!r}")
        if self.c < 1:
            raise ValidationError(f"c must be a positive integer, got {self.c!r}")
        for name in ("lam", "mu"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be a positive finite real, got {value!r}")
            object.__setattr__(self, name, value)
        if self.theta is not None:
            theta = float(self.theta)
            if math.isnan(theta) or theta < 0:
                raise ValidationError(f"theta must be nonnegative, got {theta!r}")
            object.__setattr__(self, "theta", theta)

    @property
    def rho(self) -> float:
        """Traffic intensity lam / (c*mu)."""
        return self.lam / (self.c * self.mu)

    @property
    def offered_load(self) -> float:
        """lam / mu, i.e. c*rho."""
        return self.lam / self.mu

    @property
    def is_stable(self) -> bool:
        return self.lam < self.c * self.mu

    def require_stable(self) -> None:
        if not self.is_stable:
            raise UnstableQueueError(self.lam, self.c, self.mu)


def _logsumexp(logs) -> float:
    top = max(logs)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))


def _exp_checked(log_value: float, what: str) -> float:
    if log_value > 709.78:
        raise NumericLimitError(f"{what} overflows double precision (log value {log_value:.6g})")
    return math.exp(log_value)


def pi0_inverse_series(params: QueueParams) -> float:
    """1/pi_0 of the M/M/c queue from the stationary series.

    Sum_{j<c} a^j/j! + a^c/(c!(1-rho)) with offered load a = c*rho.
    """
    params.require_stable()
    c, a, rho = params.c, params.offered_load, params.rho
    if c <= DIRECT_FACTORIAL_LIMIT:
        term = 1.0
        total = 0.0
        for j in range(c):
            if j:
                term *= a / j
            total += term
        term *= a / c
        total += term / (1.0 - rho)
        if not math.isfinite(total):
            raise NumericLimitError("1/pi_0 overflows double precision")
        return total
    log_a = math.log(a)
    logs = [j * log_a - math.lgamma(j + 1) for j in range(c)]
    logs.append(c * log_a - math.lgamma(c + 1) - math.log1p(-rho))
    return _exp_checked(_logsumexp(logs), "1/pi_0")


def _closed_form_log_terms(params: QueueParams) -> tuple[list[float], float]:
    # log of i!*C(c-1,i-1)*lam^(c-i)*mu^(i-1) for i = 1..c, and log of
    # (c-1)!*mu^(c-2)*(c*mu - lam)
    c, lam, mu = params.c, params.lam, params.mu
    log_lam, log_mu = math.log(lam), math.log(mu)
    lg_c = math.lgamma(c)
    logs = [
        math.lgamma(i + 1) + lg_c - math.lgamma(i) - math.lgamma(c - i + 1)
        + (c - i) * log_lam + (i - 1) * log_mu
        for i in range(1, c + 1)
    ]
    log_den = lg_c + (c - 2) * log_mu + math.log(c * mu - lam)
    return logs, log_den


def binomial_weighted_sum(params: QueueParams) -> float:
    """Sum_{j=1..c} j! * C(c-1, j-1) * lam^(c-j) * mu^(j-1).

    This polynomial is the common denominator of the clump rate and the
    closed form of 1/pi_0.
    """
    c, lam, mu = params.c, params.lam, params.mu
    if c <= DIRECT_FACTORIAL_LIMIT:
        total = math.fsum(
            math.factorial(j) * math.comb(c - 1, j - 1) * lam ** (c - j) * mu ** (j - 1)
            for j in range(1, c + 1)
        )
        if math.isfinite(total) and total > 0:
            return total
    logs, _ = _closed_form_log_terms(params)
    return _exp_checked(_logsumexp(logs), "binomial-weighted sum")


def pi0_inverse_closed(params: QueueParams) -> float:
    """Closed form of 1/pi_0 as a ratio of polynomials in lam and mu."""
    params.require_stable()
    c, lam, mu = params.c, params.lam, params.mu
    if c <= DIRECT_FACTORIAL_LIMIT:
        num = binomial_weighted_sum(params)
        den = math.factorial(c - 1) * mu ** (c - 2) * (c * mu - lam)
        value = num / den
        if math.isfinite(value) and value > 0:
            return value
    logs, log_den = _closed_form_log_terms(params)
    return _exp_checked(_logsumexp(logs) - log_den, "1/pi_0")


def erlang_c_all_busy(params: QueueParams) -> float:
    """Probability that an M/M/c queue has all c servers busy (Erlang C)."""
    params.require_stable()
    c, a, rho = params.c, params.offered_load, params.rho
    if c <= DIRECT_FACTORIAL_LIMIT:
        top = a**c / (math.factorial(c) * (1.0 - rho))
        if math.isfinite(top):
            return top / pi0_inverse_closed(params)
    logs, log_den = _closed_form_log_terms(params)
    log_top = c * math.log(a) - math.lgamma(c + 1) - math.log1p(-rho)
    return math.exp(log_top - (_logsumexp(logs) - log_den))


def erlang_b_blocking(params: QueueParams) -> float:
    """Blocking probability of the M/M/c/c loss system (Erlang B).

    Evaluated by the recursion B_j = a*B_{j-1} / (j + a*B_{j-1}), which is
    algebraically the ratio a^c/c! / sum_{j<=c} a^j/j! without the overflow.
    """
    a = params.offered_load
    b = 1.0
    for j in range(1, params.c + 1):
        b = a * b / (j + a * b)
    return b


def incomplete_gamma_A(x: float, y: float) -> float:
    """A(x, y) = 1 + sum_{k>=1} y^k / prod_{l=1..k} (x + l).

    Equivalently x * e^y * y^(-x) * int_0^y t^(x-1) e^(-t) dt. Terms grow while
    k < y - x, so the stopping test only applies once they start shrinking.
    """
    x = float(x)
    y = float(y)
    if not x > 0 or not math.isfinite(x):
        raise ValidationError(f"x must be positive and finite, got {x!r}")
    if not y >= 0 or not math.isfinite(y):
        raise ValidationError(f"y must be nonnegative and finite, got {y!r}")
    if y == 0.0:
        return 1.0
    total = 1.0
    term = 1.0
    for k in range(1, SERIES_MAX_TERMS + 1):
        term *= y / (x + k)
        total += term
        if not math.isfinite(total):
            raise NumericLimitError(f"A({x!r}, {y!r}) overflows double precision")
        if k > y - x and term < SERIES_RTOL * total:
            return total
    raise NumericLimitError(
        f"A({x!r}, {y!r}) did not converge within {SERIES_MAX_TERMS} terms"
    )


def erlang_a_all_busy(params: QueueParams) -> float:
    """Probability that all servers are busy in the M/M/c+M queue (Erlang A).

    With E the Erlang B value and A = A(c*mu/theta, lam/theta) the result is
    A / (1/E + A - 1). ``theta`` of ``None`` or 0 gives Erlang C, ``inf``
    gives Erlang B.
    """
    theta = params.theta
    if theta is None or theta == 0.0:
        return erlang_c_all_busy(params)
    if math.isinf(theta):
        return erlang_b_blocking(params)
    e = erlang_b_blocking(params)
    if e == 0.0:
        raise NumericLimitError("Erlang B value underflows; 1/E is not representable")
    big_a = incomplete_gamma_A(params.c * params.mu / theta, params.lam / theta)
    return big_a / (1.0 / e + big_a - 1.0)
