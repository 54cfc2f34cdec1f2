# cython: language_level=3
"""Compiled hot kernels: batched Stockham DFT and one-sided Jacobi.

Same contract as ``rbtensor._pykernels``. Complex arrays are handled as
interleaved float64 views so the inner loops stay in plain C arithmetic.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI

NAME = "compiled"


def dft(x, factors, int sign):
    x = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t b = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    src = x.copy()
    dst = np.empty_like(src)
    cdef double[:, ::1] a
    cdef double[:, ::1] c
    cdef double[::1] tw
    cdef double[::1] sm
    cdef double[::1] tmp = np.empty(0, dtype=np.float64)
    cdef Py_ssize_t done = 1, rest = n, span, p
    cdef Py_ssize_t bi, j, s, v, kk, idx
    cdef double ang, re, im, xr, xi, wr, wi
    for p in factors:
        rest //= p
        span = done * p
        tw = np.empty(2 * done * p, dtype=np.float64)
        for j in range(done):
            for s in range(p):
                ang = sign * 2.0 * M_PI * ((j * s) % span) / span
                tw[2 * (j * p + s)] = cos(ang)
                tw[2 * (j * p + s) + 1] = sin(ang)
        sm = np.empty(2 * p * p, dtype=np.float64)
        for v in range(p):
            for s in range(p):
                ang = sign * 2.0 * M_PI * ((v * s) % p) / p
                sm[2 * (v * p + s)] = cos(ang)
                sm[2 * (v * p + s) + 1] = sin(ang)
        tmp = np.empty(2 * p, dtype=np.float64)
        a = src.view(np.float64)
        c = dst.view(np.float64)
        with nogil:
            for bi in range(b):
                for j in range(done):
                    for kk in range(rest):
                        for s in range(p):
                            idx = 2 * (j * p * rest + s * rest + kk)
                            xr = a[bi, idx]
                            xi = a[bi, idx + 1]
                            wr = tw[2 * (j * p + s)]
                            wi = tw[2 * (j * p + s) + 1]
                            tmp[2 * s] = xr * wr - xi * wi
                            tmp[2 * s + 1] = xr * wi + xi * wr
                        for v in range(p):
                            re = 0.0
                            im = 0.0
                            for s in range(p):
                                wr = sm[2 * (v * p + s)]
                                wi = sm[2 * (v * p + s) + 1]
                                re = re + tmp[2 * s] * wr - tmp[2 * s + 1] * wi
                                im = im + tmp[2 * s] * wi + tmp[2 * s + 1] * wr
                            idx = 2 * ((v * done + j) * rest + kk)
                            c[bi, idx] = re
                            c[bi, idx + 1] = im
        src, dst = dst, src
        done = span
    return src


cdef int _sweep(double[:, ::1] g, double[:, ::1] v, Py_ssize_t n, Py_ssize_t m,
                double tol) noexcept nogil:
    cdef Py_ssize_t p, q, i
    cdef double alpha, beta, gr, gi, mag, zeta, t, c, s, phr, phi
    cdef double ar, ai, br, bi_, spr, spi, smr, smi
    cdef int rotated = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            alpha = 0.0
            beta = 0.0
            gr = 0.0
            gi = 0.0
            for i in range(m):
                ar = g[p, 2 * i]
                ai = g[p, 2 * i + 1]
                br = g[q, 2 * i]
                bi_ = g[q, 2 * i + 1]
                alpha += ar * ar + ai * ai
                beta += br * br + bi_ * bi_
                gr += ar * br + ai * bi_
                gi += ar * bi_ - ai * br
            mag = sqrt(gr * gr + gi * gi)
            if mag == 0.0 or mag <= tol * sqrt(alpha * beta):
                continue
            rotated = 1
            zeta = (beta - alpha) / (2.0 * mag)
            if zeta >= 0:
                t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
            else:
                t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
            c = 1.0 / sqrt(1.0 + t * t)
            s = c * t
            phr = gr / mag
            phi = gi / mag
            # sp = s * phase, sm = s * conj(phase)
            spr = s * phr
            spi = s * phi
            smr = s * phr
            smi = -s * phi
            for i in range(m):
                ar = g[p, 2 * i]
                ai = g[p, 2 * i + 1]
                br = g[q, 2 * i]
                bi_ = g[q, 2 * i + 1]
                g[p, 2 * i] = c * ar - (smr * br - smi * bi_)
                g[p, 2 * i + 1] = c * ai - (smr * bi_ + smi * br)
                g[q, 2 * i] = (spr * ar - spi * ai) + c * br
                g[q, 2 * i + 1] = (spr * ai + spi * ar) + c * bi_
            for i in range(n):
                ar = v[p, 2 * i]
                ai = v[p, 2 * i + 1]
                br = v[q, 2 * i]
                bi_ = v[q, 2 * i + 1]
                v[p, 2 * i] = c * ar - (smr * br - smi * bi_)
                v[p, 2 * i + 1] = c * ai - (smr * bi_ + smi * br)
                v[q, 2 * i] = (spr * ar - spi * ai) + c * br
                v[q, 2 * i + 1] = (spr * ai + spi * ar) + c * bi_
    return rotated


def jacobi(gt, double tol, int max_sweeps):
    g_arr = np.array(gt, dtype=np.complex128, copy=True, order="C")
    cdef Py_ssize_t b = g_arr.shape[0]
    cdef Py_ssize_t n = g_arr.shape[1]
    cdef Py_ssize_t m = g_arr.shape[2]
    v_arr = np.zeros((b, n, n), dtype=np.complex128)
    v_arr[:] = np.eye(n)
    sweeps = np.zeros(b, dtype=np.int64)
    converged = np.ones(b, dtype=bool)
    cdef double[:, :, ::1] g = g_arr.view(np.float64)
    cdef double[:, :, ::1] v = v_arr.view(np.float64)
    cdef long long[::1] sw = sweeps
    cdef Py_ssize_t k
    cdef int it, rotated
    cdef int ok
    if n < 2:
        return g_arr, v_arr, sweeps, converged
    for k in range(b):
        ok = 0
        with nogil:
            for it in range(max_sweeps):
                rotated = _sweep(g[k], v[k], n, m, tol)
                sw[k] += 1
                if not rotated:
                    ok = 1
                    break
        converged[k] = ok == 1
    return g_arr, v_arr, sweeps, converged
