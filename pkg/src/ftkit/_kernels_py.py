"""Pure-numpy sensitivity kernels; fallback when the compiled extension is absent.

Index conventions (one layer, n units, m inputs):

* ``dr_dw[h, j, k]`` holds d r_t(h) / d W(j, k), shape (n, n, m)
* ``dr_dv[h, j, q]`` holds d r_t(h) / d V(j, q), shape (n, n, n)
* diagonal mode keeps only the j == h slices: ``dr_dw_d[i, k]`` is
  d r_t(i) / d W(i, k), shape (n, m); ``dr_dv_d[i, q]`` likewise (n, n).

``wvec`` is the error weight delta_t * sigma_real'(alpha_t) and ``pbeta``
is sigma_imag'(beta_t); ``s_prev``/``r_prev`` are the layer input and the
pre-step recurrent state at the current timestamp.
"""

import numpy as np

# activation codes shared with the compiled backend
ACT_TANH, ACT_SIGMOID, ACT_MODRELU, ACT_ZRELU, ACT_PRELU = range(5)


def forward_step(W, V, a, b, act_code, p1, p2, p3, s_prev, r_prev,
                 s_out, r_out, ds_out, dr_out):
    """One layer timestamp: conversion, activation, and channel derivatives.

    Writes the outputs and the per-channel derivative factors in place;
    returns 1 when any output is non-finite, else 0.  ``p1..p3`` carry the
    gated activations' parameters (bias / radius, angle window).
    """
    with np.errstate(over="ignore", invalid="ignore"):
        ws = W @ s_prev
        vr = V @ r_prev
        alpha = a * ws - b * vr
        beta = b * ws + a * vr
        if act_code == ACT_TANH:
            np.tanh(alpha, out=s_out)
            np.tanh(beta, out=r_out)
            ds_out[:] = 1.0 - s_out * s_out
            dr_out[:] = 1.0 - r_out * r_out
        elif act_code == ACT_SIGMOID:
            s_out[:] = 1.0 / (1.0 + np.exp(-alpha))
            r_out[:] = 1.0 / (1.0 + np.exp(-beta))
            ds_out[:] = s_out * (1.0 - s_out)
            dr_out[:] = r_out * (1.0 - r_out)
        else:
            if act_code == ACT_MODRELU:
                mag = np.hypot(alpha, beta)
                gate = mag + p1 >= 0.0
                scale = np.where(gate & (mag > 0.0), (mag + p1) / np.where(mag > 0.0, mag, 1.0), 0.0)
                s_out[:] = alpha * scale
                r_out[:] = beta * scale
            elif act_code == ACT_ZRELU:
                gate = (alpha >= 0.0) & (beta >= 0.0)
                s_out[:] = np.where(gate, alpha, 0.0)
                r_out[:] = np.where(gate, beta, 0.0)
            elif act_code == ACT_PRELU:
                phase = np.arctan2(beta, alpha)
                gate = (np.hypot(alpha, beta) >= p1) & (phase >= p2) & (phase <= p3)
                s_out[:] = np.where(gate, alpha, 0.0)
                r_out[:] = np.where(gate, beta, 0.0)
            else:
                raise ValueError(f"unknown activation code {act_code}")
            ds_out[:] = gate
            dr_out[:] = gate
    ok = np.all(np.isfinite(s_out)) and np.all(np.isfinite(r_out))
    return 0 if ok else 1


def accumulate_full(V, a, b, wvec, s_prev, r_prev, dr_dw, dr_dv, g_w, g_v):
    """Add one timestamp's loss gradient (full sensitivities) into g_w, g_v."""
    u = V.T @ wvec
    g_w += a * np.outer(wvec, s_prev) - b * np.tensordot(u, dr_dw, axes=(0, 0))
    g_v += -b * np.outer(wvec, r_prev) - b * np.tensordot(u, dr_dv, axes=(0, 0))


def advance_full(V, a, b, pbeta, s_prev, r_prev, src_w, src_v, dst_w, dst_v):
    """Advance the full sensitivity tensors one timestamp, src -> dst."""
    n = V.shape[0]
    diag = np.arange(n)

    prop = np.tensordot(V, src_w, axes=(1, 0))
    prop *= a
    prop[diag, diag, :] += b * s_prev
    np.multiply(pbeta[:, None, None], prop, out=dst_w)

    prop = np.tensordot(V, src_v, axes=(1, 0))
    prop *= a
    prop[diag, diag, :] += a * r_prev
    np.multiply(pbeta[:, None, None], prop, out=dst_v)


def accumulate_diag(vdiag, a, b, wvec, s_prev, r_prev, dr_dw_d, dr_dv_d, g_w, g_v):
    """Diagonal-mode gradient contribution (only i == j terms kept).

    Arithmetic is grouped exactly like ``accumulate_full`` so both modes
    agree bit-for-bit on unit-width layers.
    """
    u = vdiag * wvec
    g_w += a * np.outer(wvec, s_prev) - b * (u[:, None] * dr_dw_d)
    g_v += -b * np.outer(wvec, r_prev) - b * (u[:, None] * dr_dv_d)


def advance_diag(vdiag, a, b, pbeta, s_prev, r_prev, dr_dw_d, dr_dv_d):
    """Diagonal-mode sensitivity advance, updated in place.

    Grouped like ``advance_full`` for bit-exact agreement at width 1.
    """
    dr_dw_d[:] = pbeta[:, None] * (a * (vdiag[:, None] * dr_dw_d) + b * s_prev[None, :])
    dr_dv_d[:] = pbeta[:, None] * (a * (vdiag[:, None] * dr_dv_d) + a * r_prev[None, :])
