# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: batched complex Jacobi diagonalisation and entropy sums.

The pure-numpy twin lives in ``_fallback.py``; both expose the same call
signatures and are selected by ``qcond.kernels``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, log2, hypot

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)


cdef int _jacobi_one(double complex[:, ::1] a, double complex[:, ::1] v,
                     bint want_v, double tol, int max_sweeps) nogil:
    cdef int n = a.shape[0]
    cdef int p, q, r, sweep
    cdef double off, fro, app, aqq, mag, tau, t, c, s
    cdef double complex apq, ph, x, y
    for sweep in range(max_sweeps):
        off = 0.0
        fro = 0.0
        for p in range(n):
            fro += a[p, p].real * a[p, p].real
            for q in range(p + 1, n):
                mag = cabs(a[p, q])
                off += 2.0 * mag * mag
        fro += off
        if sqrt(off) <= tol * (1.0 if fro < 1.0 else sqrt(fro)):
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = cabs(apq)
                if mag == 0.0:
                    continue
                # rephase column q so the (p, q) entry becomes real positive
                ph = apq / mag
                for r in range(n):
                    a[r, q] = a[r, q] * conj(ph)
                    a[q, r] = a[q, r] * ph
                if want_v:
                    for r in range(n):
                        v[r, q] = v[r, q] * conj(ph)
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for r in range(n):
                    if r == p or r == q:
                        continue
                    x = a[r, p]
                    y = a[r, q]
                    a[r, p] = c * x - s * y
                    a[r, q] = s * x + c * y
                    a[p, r] = conj(a[r, p])
                    a[q, r] = conj(a[r, q])
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_v:
                    for r in range(n):
                        x = v[r, p]
                        y = v[r, q]
                        v[r, p] = c * x - s * y
                        v[r, q] = s * x + c * y
    return -1


def jacobi_eigh_batch(mats, double tol=1e-14, int max_sweeps=60, bint want_vectors=False):
    """Eigen-decompose a stack of Hermitian matrices, shape (k, n, n).

    Returns ``(w, V, sweeps)``: unsorted eigenvalues (k, n), eigenvector
    columns (k, n, n) or None, and the sweep count per matrix (-1 when the
    sweep cap was hit).
    """
    cdef double complex[:, :, ::1] a = np.array(mats, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t i, j
    vv = np.zeros((k, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] v = vv
    w_arr = np.empty((k, n), dtype=np.float64)
    cdef double[:, ::1] w = w_arr
    sw_arr = np.empty(k, dtype=np.intc)
    cdef int[::1] sw = sw_arr
    with nogil:
        for i in range(k):
            if want_vectors:
                for j in range(n):
                    v[i, j, j] = 1.0
            sw[i] = _jacobi_one(a[i], v[i], want_vectors, tol, max_sweeps)
            for j in range(n):
                w[i, j] = a[i, j, j].real
    return w_arr, (vv if want_vectors else None), sw_arr


def vn_entropy_batch(mats, double tol=1e-14, int max_sweeps=60, double zero_cut=1e-15):
    """Von Neumann entropy in bits of each matrix in a stack of density matrices."""
    cdef double complex[:, :, ::1] a = np.array(mats, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double lam, acc
    cdef double complex[:, ::1] dummy = np.zeros((1, 1), dtype=np.complex128)
    out_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(k):
            _jacobi_one(a[i], dummy, False, tol, max_sweeps)
            acc = 0.0
            for j in range(n):
                lam = a[i, j, j].real
                if lam > zero_cut:
                    if lam > 1.0:
                        lam = 1.0
                    acc -= lam * log2(lam)
            out[i] = acc
    return out_arr


def shannon_rows(p, double zero_cut=1e-15):
    """Shannon entropy in bits of each row of a 2-D array of probabilities."""
    cdef double[:, ::1] a = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double x, acc
    out_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(k):
            acc = 0.0
            for j in range(n):
                x = a[i, j]
                if x > zero_cut:
                    acc -= x * log2(x)
            out[i] = acc
    return out_arr


def curvature_series(double z, double tol=1e-14, long max_terms=2000000000):
    """Partial sums ``(sum z^k/(2k+3), sum z^k, terms)`` truncated once z^k < tol."""
    cdef double zk = 1.0
    cdef double s_odd = 0.0
    cdef double s_geo = 0.0
    cdef long k = 0
    with nogil:
        while zk >= tol and k < max_terms:
            s_odd += zk / (2.0 * k + 3.0)
            s_geo += zk
            zk *= z
            k += 1
    return s_odd, s_geo, k
