# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled overlap kernels for trains of truncated Gaussian packets.

Mirrors ``_kernels_py`` exactly; the selector in ``kernels.py`` picks one.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, erfc, cos, sin, fabs, M_PI

cnp.import_array()

cdef enum:
    GL_ORDER = 32
    MAX_STACK = 200

cdef double _nodes[GL_ORDER]
cdef double _weights[GL_ORDER]

_x, _w = np.polynomial.legendre.leggauss(GL_ORDER)
for _i in range(GL_ORDER):
    _nodes[_i] = _x[_i]
    _weights[_i] = _w[_i]

cdef double TAIL_REL = 1e-16
cdef double PANEL_REL = 1e-13
cdef double PANEL_ABS = 1e-17
cdef double EMPTY_REL = 1e-10


cdef inline void _panel(double A, double k, double a, double b,
                        double *re, double *im) noexcept nogil:
    # 32-point Gauss-Legendre on [a, b] of exp(-A y^2 + i k y)
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (b + a)
    cdef double sr = 0.0, si = 0.0, y, g
    cdef int n
    for n in range(GL_ORDER):
        y = mid + half * _nodes[n]
        g = _weights[n] * exp(-A * y * y)
        sr += g * cos(k * y)
        si += g * sin(k * y)
    re[0] = sr * half
    im[0] = si * half


cdef void _adaptive(double A, double k, double a, double b, double floor,
                    double *out_re, double *out_im) noexcept nogil:
    cdef double st_a[MAX_STACK]
    cdef double st_b[MAX_STACK]
    cdef double st_r[MAX_STACK]
    cdef double st_i[MAX_STACK]
    cdef int top = 0
    cdef double tr = 0.0, ti = 0.0
    cdef double pa, pb, wr, wi, lr, li, rr, ri, m, dr, di
    _panel(A, k, a, b, &wr, &wi)
    st_a[0] = a
    st_b[0] = b
    st_r[0] = wr
    st_i[0] = wi
    top = 1
    while top > 0:
        top -= 1
        pa = st_a[top]
        pb = st_b[top]
        wr = st_r[top]
        wi = st_i[top]
        m = 0.5 * (pa + pb)
        _panel(A, k, pa, m, &lr, &li)
        _panel(A, k, m, pb, &rr, &ri)
        dr = lr + rr - wr
        di = li + ri - wi
        if (sqrt(dr * dr + di * di) <= PANEL_REL * sqrt((lr + rr) * (lr + rr) + (li + ri) * (li + ri))
                or sqrt(dr * dr + di * di) <= floor or top + 2 >= MAX_STACK or (pb - pa) < 1e-14):
            tr += lr + rr
            ti += li + ri
        else:
            st_a[top] = pa
            st_b[top] = m
            st_r[top] = lr
            st_i[top] = li
            top += 1
            st_a[top] = m
            st_b[top] = pb
            st_r[top] = rr
            st_i[top] = ri
            top += 1
    out_re[0] = tr
    out_im[0] = ti


cdef void _pair(double ca, double sa, double la, double ra,
                double cb, double sb, double lb, double rb,
                double dbeta, double *out_re, double *out_im) noexcept nogil:
    cdef double l = la if la > lb else lb
    cdef double r = ra if ra < rb else rb
    cdef double S, A, mu, K, mass, yl, yr, tail, mag, ph, ir, ii, sqA, ek
    # touching supports (zero-length overlap up to rounding) count as disjoint
    if r - l <= EMPTY_REL * (sa if sa < sb else sb):
        out_re[0] = 0.0
        out_im[0] = 0.0
        return
    S = sa * sa + sb * sb
    A = S / (2.0 * sa * sa * sb * sb)
    mu = (ca * sb * sb + cb * sa * sa) / S
    K = -(ca - cb) * (ca - cb) / (2.0 * S)
    ek = exp(K)
    sqA = sqrt(A)
    mass = sqrt(M_PI / A) * ek
    if mass == 0.0:
        out_re[0] = 0.0
        out_im[0] = 0.0
        return
    yl = l - mu
    yr = r - mu
    ph = dbeta * mu
    if yl < 0.0 and yr > 0.0:
        tail = 0.5 * mass * (erfc(sqA * yr) + erfc(-sqA * yl))
        if tail <= TAIL_REL * mass:
            mag = mass * exp(-dbeta * dbeta / (4.0 * A))
            out_re[0] = mag * cos(ph)
            out_im[0] = mag * sin(ph)
            return
    _adaptive(A, dbeta, yl, yr, PANEL_ABS * sqrt(M_PI / A), &ir, &ii)
    ir *= ek
    ii *= ek
    out_re[0] = ir * cos(ph) - ii * sin(ph)
    out_im[0] = ir * sin(ph) + ii * cos(ph)


def pair_overlap(double ca, double sa, double la, double ra,
                 double cb, double sb, double lb, double rb, double dbeta):
    """Integral of two unit-amplitude packets (b relative phase slope dbeta)."""
    cdef double re, im
    _pair(ca, sa, la, ra, cb, sb, lb, rb, dbeta, &re, &im)
    return complex(re, im)


def train_overlap(const double[::1] ca, const double complex[::1] pa,
                  double sa, double loa, double hia,
                  const double[::1] cb, const double complex[::1] pb,
                  double sb, double lob, double hib, double dbeta):
    """Sum over overlapping packet pairs of conj(pa_i) pb_k <a_i, b_k>.

    Centers must be sorted ascending; supports are ``[c + lo, c + hi]``.
    """
    cdef Py_ssize_t na = ca.shape[0]
    cdef Py_ssize_t nb = cb.shape[0]
    cdef Py_ssize_t i, k, k0 = 0
    cdef double left, right, re, im, ar, ai, br, bi
    cdef double tr = 0.0, ti = 0.0
    with nogil:
        for i in range(na):
            left = ca[i] + loa
            right = ca[i] + hia
            while k0 < nb and cb[k0] + hib <= left:
                k0 += 1
            k = k0
            ar = pa[i].real
            ai = -pa[i].imag
            while k < nb and cb[k] + lob < right:
                _pair(ca[i], sa, left, right, cb[k], sb, cb[k] + lob, cb[k] + hib,
                      dbeta, &re, &im)
                br = pb[k].real * re - pb[k].imag * im
                bi = pb[k].real * im + pb[k].imag * re
                tr += ar * br - ai * bi
                ti += ar * bi + ai * br
                k += 1
    return complex(tr, ti)
