# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel. Mirrors ``_kernel_py.simulate_batch`` exactly."""

from libc.math cimport log1p
from libc.stdint cimport int64_t, uint64_t

import numpy as np

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t x) nogil:
    cdef uint64_t z = x + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline double _uniform(uint64_t* s) nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return <double>(result >> 11) * TWO_POW_M53


def simulate_batch(long c, double lam, double mu, double horizon,
                   long initial_state, const uint64_t[::1] seeds):
    """Simulate one replicate per seed; return (max_state, events, final_state) arrays."""
    cdef Py_ssize_t count = seeds.shape[0]
    maxima_arr = np.empty(count, dtype=np.int64)
    events_arr = np.empty(count, dtype=np.int64)
    finals_arr = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] maxima = maxima_arr
    cdef int64_t[::1] events = events_arr
    cdef int64_t[::1] finals = finals_arr
    cdef uint64_t s[4]
    cdef uint64_t x
    cdef Py_ssize_t r
    cdef int i
    cdef long k, kmax, d
    cdef int64_t nev
    cdef double t, total, u
    with nogil:
        for r in range(count):
            x = seeds[r]
            for i in range(4):
                s[i] = _mix64(x)
                x = x + GOLDEN
            k = initial_state
            kmax = k
            nev = 0
            t = 0.0
            while True:
                d = k if k < c else c
                total = lam + <double>d * mu
                u = _uniform(s)
                t += -log1p(-u) / total
                if t > horizon:
                    break
                u = _uniform(s)
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
    return maxima_arr, events_arr, finals_arr
