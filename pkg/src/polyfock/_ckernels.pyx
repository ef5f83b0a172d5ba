# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; same contracts as polyfock._pykernels."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def radial_table(r, int n_q, int p_max):
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t n_r = rv.shape[0]
    out = np.empty((n_r, n_q, p_max + 1), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t i, q, p
    cdef double start, sq
    for i in range(n_r):
        start = 1.0
        for q in range(n_q):
            if q > 0:
                start = start * rv[i] / sqrt(<double>q)
            o[i, q, 0] = start
            sq = sqrt(<double>q)
            for p in range(p_max):
                if q > 0:
                    o[i, q, p + 1] = (rv[i] * o[i, q, p] - sq * o[i, q - 1, p]) / sqrt(<double>(p + 1))
                else:
                    o[i, q, p + 1] = rv[i] * o[i, q, p] / sqrt(<double>(p + 1))
    return out


def assemble(b_cod, b_dom, k_cod, k_dom, phi_hat):
    # radial index innermost on transposed copies: one contiguous dot product per entry
    cdef double[:, ::1] bc = np.ascontiguousarray(np.asarray(b_cod, dtype=np.float64).T)
    cdef double[:, ::1] bd = np.ascontiguousarray(np.asarray(b_dom, dtype=np.float64).T)
    cdef long[::1] kc = np.ascontiguousarray(k_cod, dtype=np.int64)
    cdef long[::1] kd = np.ascontiguousarray(k_dom, dtype=np.int64)
    ph_t = np.asarray(phi_hat, dtype=np.complex128).T
    cdef double[:, ::1] ph_re = np.ascontiguousarray(ph_t.real)
    cdef double[:, ::1] ph_im = np.ascontiguousarray(ph_t.imag)
    cdef Py_ssize_t n_a = ph_re.shape[0], n_r = ph_re.shape[1]
    cdef Py_ssize_t s_c = bc.shape[0], s_d = bd.shape[0]
    out = np.empty((s_c, s_d), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t r, j, i, d
    cdef double w, acc_re, acc_im
    cdef double *pc
    cdef double *pd
    cdef double *pre
    cdef double *pim
    for j in range(s_c):
        pc = &bc[j, 0]
        for i in range(s_d):
            d = (kc[j] - kd[i]) % n_a
            if d < 0:
                d += n_a
            pd = &bd[i, 0]
            pre = &ph_re[d, 0]
            pim = &ph_im[d, 0]
            acc_re = 0.0
            acc_im = 0.0
            for r in range(n_r):
                w = pc[r] * pd[r]
                acc_re += w * pre[r]
                acc_im += w * pim[r]
            o[j, i] = acc_re + 1j * acc_im
    return out
