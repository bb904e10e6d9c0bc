"""Pure-Python simulation kernel, used when the compiled one is unavailable.

Must stay operation-for-operation identical to ``_kernel.pyx``.
"""

from math import log1p

import numpy as np

from .rng import GOLDEN, MASK64, TWO_POW_M53


def _seed_state(seed):
    out = []
    x = seed
    for _ in range(4):
        z = (x + GOLDEN) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
        x = (x + GOLDEN) & MASK64
    return out


def simulate_batch(c, lam, mu, horizon, initial_state, seeds):
    """Simulate one replicate per seed; return (max_state, events, final_state) arrays."""
    count = len(seeds)
    maxima = np.empty(count, dtype=np.int64)
    events = np.empty(count, dtype=np.int64)
    finals = np.empty(count, dtype=np.int64)
    M = MASK64
    for r in range(count):
        s0, s1, s2, s3 = _seed_state(int(seeds[r]))
        k = initial_state
        kmax = k
        nev = 0
        t = 0.0
        while True:
            d = k if k < c else c
            total = lam + d * mu
            # exponential holding time
            x = (s1 * 5) & M
            out = ((((x << 7) | (x >> 57)) & M) * 9) & M
            tt = (s1 << 17) & M
            s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= tt
            s3 = ((s3 << 45) | (s3 >> 19)) & M
            u = (out >> 11) * TWO_POW_M53
            t += -log1p(-u) / total
            if t > horizon:
                break
            # arrival or departure
            x = (s1 * 5) & M
            out = ((((x << 7) | (x >> 57)) & M) * 9) & M
            tt = (s1 << 17) & M
            s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= tt
            s3 = ((s3 << 45) | (s3 >> 19)) & M
            u = (out >> 11) * TWO_POW_M53
            if u * total < lam:
                k += 1
                if k > kmax:
                    kmax = k
            else:
                k -= 1
            nev += 1
        maxima[r] = kmax
        events[r] = nev
        finals[r] = k
    return maxima, events, finals
