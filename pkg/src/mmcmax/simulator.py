"""Event-driven simulation of the M/M/c queue and an exact uniformization oracle.

The simulation kernel comes from the compiled ``_kernel`` extension when it
is importable, otherwise from the pure-Python ``_kernel_py``. Set
``MMCMAX_PURE_PYTHON=1`` to force the fallback. Both produce identical output.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernel_py
from .errors import OracleScaleError, ValidationError
from .queue_model import QueueParams

if os.environ.get("MMCMAX_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernel as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
simulate_batch = (_compiled or _kernel_py).simulate_batch

#: Guard on lam_total * n for :func:`exact_max_cdf`.
ORACLE_MAX_JUMPS = 1e5
#: Poisson tail mass discarded by the oracle.
ORACLE_TAIL = 1e-12

MAX_SEED = (1 << 64) - 1


class CountConvention(enum.Enum):
    """What the recorded maximum counts.

    ``IN_SYSTEM`` counts every customer present, ``WAITING_ONLY`` those not in
    service, ``max(0, k - c)``. ``IN_SYSTEM_MINUS_ONE`` is ``max(0, k - 1)``,
    the level indexing under which the clumping formulas are calibrated; it
    coincides with ``WAITING_ONLY`` when ``c == 1``.
    """

    IN_SYSTEM = "in-system"
    WAITING_ONLY = "waiting"
    IN_SYSTEM_MINUS_ONE = "in-system-minus-one"

    def offset(self, c: int) -> int:
        if self is CountConvention.IN_SYSTEM:
            return 0
        if self is CountConvention.WAITING_ONLY:
            return c
        return 1

    def apply(self, state_max, c: int):
        """Map a running maximum of the number in system to this convention.

        Valid for maxima because ``k -> max(0, k - offset)`` is nondecreasing.
        """
        off = self.offset(c)
        if off == 0:
            return state_max
        if np.ndim(state_max):
            return np.maximum(np.asarray(state_max) - off, 0)
        return max(int(state_max) - off, 0)


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def _check_horizon(n) -> float:
    n = float(n)
    if not math.isfinite(n) or n <= 0:
        raise ValidationError(f"horizon must be positive and finite, got {n!r}")
    return n


@dataclass(frozen=True)
class SimConfig:
    params: QueueParams
    horizon_n: float
    seed: int = 0
    initial_state: int = 0
    count_convention: CountConvention = CountConvention.IN_SYSTEM

    def __post_init__(self):
        object.__setattr__(self, "horizon_n", _check_horizon(self.horizon_n))
        object.__setattr__(self, "seed", _check_seed(self.seed))
        if isinstance(self.initial_state, bool) or int(self.initial_state) != self.initial_state \
                or self.initial_state < 0:
            raise ValidationError(f"initial_state must be a nonnegative integer, got {self.initial_state!r}")
        object.__setattr__(self, "initial_state", int(self.initial_state))
        object.__setattr__(self, "count_convention", CountConvention(self.count_convention))


@dataclass(frozen=True)
class SimResult:
    max_observed: int
    events: int
    final_state: int


def simulate_states(params: QueueParams, horizon_n: float, seeds, initial_state: int = 0,
                    backend=None):
    """Run one replicate per seed and return raw (max_state, events, final_state) arrays.

    Maxima are numbers in system; apply a :class:`CountConvention` afterwards.
    """
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    kernel = simulate_batch if backend is None else backend.simulate_batch
    return kernel(params.c, params.lam, params.mu, float(horizon_n), int(initial_state), seeds)


def simulate_once(config: SimConfig) -> SimResult:
    """Simulate the queue on [0, horizon_n] from ``config.initial_state``.

    Holding times are exponential with rate ``lam + min(k, c)*mu``; a jump is an
    arrival with probability ``lam`` over that rate. The run stops at the first
    jump after the horizon, so the state at time n counts only if its jump came
    at or before n.
    """
    p = config.params
    maxima, events, finals = simulate_states(
        p, config.horizon_n, [config.seed], config.initial_state
    )
    return SimResult(
        max_observed=int(config.count_convention.apply(int(maxima[0]), p.c)),
        events=int(events[0]),
        final_state=int(finals[0]),
    )


def _poisson_window(mean: float, tail: float) -> tuple[int, np.ndarray]:
    """Left index and weights of a Poisson(mean) pmf covering all but ``tail`` mass."""
    lo = int(stats.poisson.ppf(tail / 2, mean)) if mean > 0 else 0
    hi = int(stats.poisson.isf(tail / 2, mean)) + 1
    lo = max(lo - 1, 0)
    ks = np.arange(lo, hi + 1)
    return lo, stats.poisson.pmf(ks, mean)


def exact_max_cdf(params: QueueParams, n: float, m: int, initial_state: int = 0) -> float:
    """P{max number in system on [0, n] <= m | X_0 = initial_state}, by uniformization.

    Level m + 1 is made absorbing. The uniformized chain jumps at rate
    lam + c*mu; the answer is the Poisson-weighted mass that has not been
    absorbed. Poisson weights outside a window holding all but 1e-12 of the
    mass are dropped.
    """
    n = _check_horizon(n)
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValidationError(f"m must be a nonnegative integer, got {m!r}")
    m = int(m)
    if isinstance(initial_state, bool) or int(initial_state) != initial_state or initial_state < 0:
        raise ValidationError(f"initial_state must be a nonnegative integer, got {initial_state!r}")
    if initial_state > m:
        raise ValidationError(f"initial_state {initial_state} exceeds m={m}")
    c, lam, mu = params.c, params.lam, params.mu
    rate = lam + c * mu
    jumps = rate * n
    if jumps > ORACLE_MAX_JUMPS:
        raise OracleScaleError(
            f"(lam + c*mu)*n = {jumps:.6g} exceeds the oracle guard {ORACLE_MAX_JUMPS:.0e}"
        )
    lo, weights = _poisson_window(jumps, ORACLE_TAIL)

    # transition probabilities for live states 0..m
    levels = np.arange(m + 1)
    up = np.full(m + 1, lam / rate)
    down = np.minimum(levels, c) * mu / rate
    stay = 1.0 - up - down

    v = np.zeros(m + 1)
    v[initial_state] = 1.0
    total = 0.0
    for j in range(lo + len(weights)):
        if j >= lo:
            total += weights[j - lo] * v.sum()
        nxt = v * stay
        nxt[1:] += v[:-1] * up[:-1]
        nxt[:-1] += v[1:] * down[1:]
        v = nxt  # mass moving up from level m is absorbed
    return float(min(max(total, 0.0), 1.0))
