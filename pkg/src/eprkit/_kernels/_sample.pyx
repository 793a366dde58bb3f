# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of sampling_py: same counter-based stream, same strict
inverse-CDF selection, bit-identical counts. See sampling_py for the
algorithm contract."""

import numpy as np

ctypedef unsigned long long u64

cdef u64 _PHI = 0x9E3779B97F4A7C15
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9
cdef u64 _MIX2 = 0x94D049BB133111EB
cdef double _U53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline double _uniform(u64 seed, u64 n) noexcept nogil:
    cdef u64 x = seed + n * _PHI
    x ^= x >> 30
    x *= _MIX1
    x ^= x >> 27
    x *= _MIX2
    x ^= x >> 31
    return <double>(x >> 11) * _U53


def sample_counts(seed, shots, sum_cdf, cond_cdf):
    """Tally (sum outcome, first-factor outcome) pairs for ``shots`` chains."""
    cdef double[::1] scdf = np.ascontiguousarray(sum_cdf, dtype=np.float64)
    cdef double[:, ::1] ccdf = np.ascontiguousarray(cond_cdf, dtype=np.float64)
    cdef Py_ssize_t d = scdf.shape[0]
    cdef Py_ssize_t n_out = ccdf.shape[1]
    if ccdf.shape[0] != d:
        raise ValueError("cond_cdf must have one row per sum outcome")

    counts_arr = np.zeros((d, n_out), dtype=np.int64)
    cdef long long[:, ::1] counts = counts_arr
    cdef u64 useed = seed
    cdef Py_ssize_t nshots = shots
    cdef Py_ssize_t i, k, j
    cdef double u_sum, u_cond

    with nogil:
        for i in range(nshots):
            u_sum = _uniform(useed, 2 * <u64>i + 1)
            u_cond = _uniform(useed, 2 * <u64>i + 2)
            k = 0
            while k < d - 1 and u_sum >= scdf[k]:
                k += 1
            j = 0
            while j < n_out - 1 and u_cond >= ccdf[k, j]:
                j += 1
            counts[k, j] += 1
    return counts_arr
