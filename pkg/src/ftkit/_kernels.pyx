# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled sensitivity kernels; same contracts as ``_kernels_py``."""

import numpy as np

from libc.math cimport atan2, exp, hypot, isfinite, tanh

ACT_TANH, ACT_SIGMOID, ACT_MODRELU, ACT_ZRELU, ACT_PRELU = range(5)


def forward_step(const double[:, ::1] W, const double[:, ::1] V, double a, double b,
                 int act_code, double p1, double p2, double p3,
                 const double[::1] s_prev, const double[::1] r_prev,
                 double[::1] s_out, double[::1] r_out,
                 double[::1] ds_out, double[::1] dr_out):
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t m = W.shape[1]
    cdef Py_ssize_t i, k
    cdef double ws, vr, alpha, beta, t, mag, scale, phase, gate
    cdef int bad = 0
    for i in range(n):
        ws = 0.0
        for k in range(m):
            ws += W[i, k] * s_prev[k]
        vr = 0.0
        for k in range(n):
            vr += V[i, k] * r_prev[k]
        alpha = a * ws - b * vr
        beta = b * ws + a * vr
        if act_code == 0:  # tanh
            t = tanh(alpha)
            s_out[i] = t
            ds_out[i] = 1.0 - t * t
            t = tanh(beta)
            r_out[i] = t
            dr_out[i] = 1.0 - t * t
        elif act_code == 1:  # sigmoid
            t = 1.0 / (1.0 + exp(-alpha))
            s_out[i] = t
            ds_out[i] = t * (1.0 - t)
            t = 1.0 / (1.0 + exp(-beta))
            r_out[i] = t
            dr_out[i] = t * (1.0 - t)
        else:
            if act_code == 2:  # modrelu, p1 = bias
                mag = hypot(alpha, beta)
                if mag + p1 >= 0.0:
                    gate = 1.0
                    scale = (mag + p1) / mag if mag > 0.0 else 0.0
                else:
                    gate = 0.0
                    scale = 0.0
                s_out[i] = alpha * scale
                r_out[i] = beta * scale
            elif act_code == 3:  # zrelu
                gate = 1.0 if (alpha >= 0.0 and beta >= 0.0) else 0.0
                s_out[i] = alpha if gate == 1.0 else 0.0
                r_out[i] = beta if gate == 1.0 else 0.0
            else:  # prelu: p1 = radius, [p2, p3] = angle window
                phase = atan2(beta, alpha)
                if hypot(alpha, beta) >= p1 and p2 <= phase <= p3:
                    gate = 1.0
                else:
                    gate = 0.0
                s_out[i] = alpha if gate == 1.0 else 0.0
                r_out[i] = beta if gate == 1.0 else 0.0
            ds_out[i] = gate
            dr_out[i] = gate
        if not (isfinite(s_out[i]) and isfinite(r_out[i])):
            bad = 1
    return bad


def accumulate_full(const double[:, ::1] V, double a, double b,
                    const double[::1] wvec, const double[::1] s_prev, const double[::1] r_prev,
                    const double[:, :, ::1] dr_dw, const double[:, :, ::1] dr_dv,
                    double[:, ::1] g_w, double[:, ::1] g_v):
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t m = dr_dw.shape[2]
    cdef Py_ssize_t i, j, k, h
    cdef double acc
    u_arr = np.empty(n)
    cdef double[::1] u = u_arr
    for h in range(n):
        acc = 0.0
        for i in range(n):
            acc += V[i, h] * wvec[i]
        u[h] = acc
    for j in range(n):
        for k in range(m):
            acc = 0.0
            for h in range(n):
                acc += u[h] * dr_dw[h, j, k]
            g_w[j, k] += a * wvec[j] * s_prev[k] - b * acc
        for k in range(n):
            acc = 0.0
            for h in range(n):
                acc += u[h] * dr_dv[h, j, k]
            g_v[j, k] += -b * wvec[j] * r_prev[k] - b * acc


def advance_full(const double[:, ::1] V, double a, double b,
                 const double[::1] pbeta, const double[::1] s_prev, const double[::1] r_prev,
                 const double[:, :, ::1] src_w, const double[:, :, ::1] src_v,
                 double[:, :, ::1] dst_w, double[:, :, ::1] dst_v):
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t m = src_w.shape[2]
    cdef Py_ssize_t i, j, k, h
    cdef double acc
    for i in range(n):
        for j in range(n):
            for k in range(m):
                acc = 0.0
                for h in range(n):
                    acc += V[i, h] * src_w[h, j, k]
                acc *= a
                if i == j:
                    acc += b * s_prev[k]
                dst_w[i, j, k] = pbeta[i] * acc
            for k in range(n):
                acc = 0.0
                for h in range(n):
                    acc += V[i, h] * src_v[h, j, k]
                acc *= a
                if i == j:
                    acc += a * r_prev[k]
                dst_v[i, j, k] = pbeta[i] * acc


def accumulate_diag(const double[::1] vdiag, double a, double b,
                    const double[::1] wvec, const double[::1] s_prev, const double[::1] r_prev,
                    const double[:, ::1] dr_dw_d, const double[:, ::1] dr_dv_d,
                    double[:, ::1] g_w, double[:, ::1] g_v):
    # arithmetic grouped exactly like accumulate_full so that the two modes
    # agree bit-for-bit on unit-width layers
    cdef Py_ssize_t n = vdiag.shape[0]
    cdef Py_ssize_t m = dr_dw_d.shape[1]
    cdef Py_ssize_t i, k
    cdef double u, acc
    for i in range(n):
        u = vdiag[i] * wvec[i]
        for k in range(m):
            acc = u * dr_dw_d[i, k]
            g_w[i, k] += a * wvec[i] * s_prev[k] - b * acc
        for k in range(n):
            acc = u * dr_dv_d[i, k]
            g_v[i, k] += -b * wvec[i] * r_prev[k] - b * acc


def advance_diag(const double[::1] vdiag, double a, double b,
                 const double[::1] pbeta, const double[::1] s_prev, const double[::1] r_prev,
                 double[:, ::1] dr_dw_d, double[:, ::1] dr_dv_d):
    # grouped like advance_full for bit-exact agreement at width 1
    cdef Py_ssize_t n = vdiag.shape[0]
    cdef Py_ssize_t m = dr_dw_d.shape[1]
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        for k in range(m):
            acc = vdiag[i] * dr_dw_d[i, k]
            acc *= a
            acc += b * s_prev[k]
            dr_dw_d[i, k] = pbeta[i] * acc
        for k in range(n):
            acc = vdiag[i] * dr_dv_d[i, k]
            acc *= a
            acc += a * r_prev[k]
            dr_dv_d[i, k] = pbeta[i] * acc
