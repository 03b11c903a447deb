# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hyperplane-sum kernels (see _pure.py for the reference semantics)."""

import numpy as np

cimport cython

name = "cython"


cdef inline double _m4_scalar(long k1, long k2, long k3, long k4,
                              double[::1] g, double[::1] gp, double[::1] gpp,
                              long off, double h) nogil:
    cdef long k12 = k1 + k2
    cdef long k13 = k1 + k3
    cdef long k23 = k2 + k3
    cdef long a, b
    cdef double num, af, bf
    if k12 != 0 and k13 != 0 and k23 != 0:
        num = g[k1 + off] + g[k2 + off] + g[k3 + off] + g[k4 + off]
        return num / ((-3.0 * h * h * h) * (<double>k12 * <double>k13 * <double>k23))
    if k12 == 0:
        a = k1
        b = k3
    elif k13 == 0:
        a = k1
        b = k2
    else:
        a = k2
        b = k1
    if a == b or a == -b:
        if a == 0:
            return 1.0
        return gpp[a + off] / (6.0 * h * <double>a)
    af = <double>a
    bf = <double>b
    return (gp[a + off] - gp[b + off]) / (3.0 * h * h * (af * af - bf * bf))


def m4_lattice(k1, k2, k3, k4, double[::1] g, double[::1] gp, double[::1] gpp,
               long kmax, double h):
    """Vectorized M4 at integer lattice tuples (matches _pure.m4_lattice)."""
    cdef long[::1] a1 = np.ascontiguousarray(np.atleast_1d(k1), dtype=np.int64)
    cdef long[::1] a2 = np.ascontiguousarray(np.atleast_1d(k2), dtype=np.int64)
    cdef long[::1] a3 = np.ascontiguousarray(np.atleast_1d(k3), dtype=np.int64)
    cdef long[::1] a4 = np.ascontiguousarray(np.atleast_1d(k4), dtype=np.int64)
    cdef Py_ssize_t n = a1.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef long off = 3 * kmax
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _m4_scalar(a1[i], a2[i], a3[i], a4[i], g, gp, gpp, off, h)
    return out


def lam4_m4(double complex[::1] c1, double complex[::1] c2,
            double complex[::1] c3, double complex[::1] c4,
            double[::1] g, double[::1] gp, double[::1] gpp,
            long kmax, double L, double h):
    cdef long off = 3 * kmax
    cdef long i1, i2, i3, i4
    cdef double complex acc = 0
    cdef double complex p1, p12
    for i1 in range(-kmax, kmax + 1):
        p1 = c1[i1 + kmax]
        if p1 == 0:
            continue
        for i2 in range(-kmax, kmax + 1):
            p12 = p1 * c2[i2 + kmax]
            if p12 == 0:
                continue
            for i3 in range(-kmax, kmax + 1):
                i4 = -(i1 + i2 + i3)
                if i4 < -kmax or i4 > kmax:
                    continue
                if c3[i3 + kmax] == 0 or c4[i4 + kmax] == 0:
                    continue
                acc = acc + _m4_scalar(i1, i2, i3, i4, g, gp, gpp, off, h) \
                    * p12 * c3[i3 + kmax] * c4[i4 + kmax]
    return L * acc


def lam6_m4rho(cs, double[::1] g, double[::1] gp, double[::1] gpp,
               long kmax, double L, double h, slots):
    cdef double complex[::1] c1 = np.ascontiguousarray(cs[0], dtype=np.complex128)
    cdef double complex[::1] c2 = np.ascontiguousarray(cs[1], dtype=np.complex128)
    cdef double complex[::1] c3 = np.ascontiguousarray(cs[2], dtype=np.complex128)
    cdef double complex[::1] c4 = np.ascontiguousarray(cs[3], dtype=np.complex128)
    cdef double complex[::1] c5 = np.ascontiguousarray(cs[4], dtype=np.complex128)
    cdef double complex[::1] c6 = np.ascontiguousarray(cs[5], dtype=np.complex128)
    cdef long sa = slots[0], sb = slots[1], sc = slots[2]
    cdef long off = 3 * kmax
    cdef long i1, i2, i3, i4, i5, i6, ka, kb, kc, rho
    cdef long k[6]
    cdef double complex acc = 0
    cdef double complex p1, p2, p3, p4, p5
    for i1 in range(-kmax, kmax + 1):
        p1 = c1[i1 + kmax]
        if p1 == 0:
            continue
        for i2 in range(-kmax, kmax + 1):
            p2 = p1 * c2[i2 + kmax]
            if p2 == 0:
                continue
            for i3 in range(-kmax, kmax + 1):
                p3 = p2 * c3[i3 + kmax]
                if p3 == 0:
                    continue
                for i4 in range(-kmax, kmax + 1):
                    p4 = p3 * c4[i4 + kmax]
                    if p4 == 0:
                        continue
                    for i5 in range(-kmax, kmax + 1):
                        i6 = -(i1 + i2 + i3 + i4 + i5)
                        if i6 < -kmax or i6 > kmax:
                            continue
                        p5 = p4 * c5[i5 + kmax] * c6[i6 + kmax]
                        if p5 == 0:
                            continue
                        k[0] = i1; k[1] = i2; k[2] = i3
                        k[3] = i4; k[4] = i5; k[5] = i6
                        ka = k[sa]; kb = k[sb]; kc = k[sc]
                        rho = -(ka + kb + kc)
                        acc = acc + _m4_scalar(ka, kb, kc, rho, g, gp, gpp, off, h) \
                            * (h * <double>rho) * p5
    return L * acc
