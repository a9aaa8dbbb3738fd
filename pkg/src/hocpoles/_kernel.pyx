# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled crossing kernel; mirrors ``_kernel_py.ingest_block`` exactly."""

from libc.math cimport isnan

cdef int MEAN_RUNNING = 1


def ingest_block(const double[::1] y, double[::1] tails, signed char[::1] bits,
                 long long[::1] counts, long long[::1] samples, int mean_mode,
                 double ref, long long warmup, double[::1] mean_sum,
                 long long[::1] mean_count, bint use_ewma, double lam,
                 double[::1] periods, long long[::1] runs):
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t L = tails.shape[0]
    cdef Py_ssize_t t, k
    cdef double v, x, d, t_bar
    cdef double msum = mean_sum[0]
    cdef long long mcnt = mean_count[0]
    cdef long long r
    cdef signed char b, prev
    cdef bint clip, crossed, had_tail
    cdef bint running = mean_mode == MEAN_RUNNING

    for t in range(n):
        v = y[t]
        for k in range(L):
            clip = True
            if k == 0:
                if running:
                    msum += v
                    mcnt += 1
                    if mcnt < warmup:
                        clip = False
                    x = v - msum / <double>mcnt
                else:
                    x = v - ref
            else:
                x = v
            if clip:
                b = 1 if x >= 0.0 else 0
                prev = bits[k]
                if prev >= 0:
                    crossed = b != prev
                    if crossed:
                        counts[k] += 1
                    if use_ewma:
                        r = runs[k]
                        if r >= 0:
                            r += 1
                        if crossed:
                            if r > 0:
                                t_bar = periods[k]
                                if isnan(t_bar):
                                    periods[k] = <double>r
                                else:
                                    periods[k] = (1.0 - lam) * t_bar + lam * r
                            r = 0
                        runs[k] = r
                bits[k] = b
            had_tail = not isnan(tails[k])
            samples[k] += 1
            if not had_tail:
                tails[k] = v
                break
            d = v - tails[k]
            tails[k] = v
            v = d

    mean_sum[0] = msum
    mean_count[0] = mcnt
