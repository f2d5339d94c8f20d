"""Backend parity and a naive-loop oracle for the sensitivity kernels."""

import numpy as np
import pytest

from ftkit import kernels


def _random_case(rng, n, m):
    return {
        "V": rng.normal(size=(n, n)),
        "a": rng.normal(),
        "b": rng.normal(),
        "wvec": rng.normal(size=n),
        "s_prev": rng.normal(size=m),
        "r_prev": rng.normal(size=n),
        "pbeta": rng.normal(size=n),
        "sw": rng.normal(size=(n, n, m)),
        "sv": rng.normal(size=(n, n, n)),
    }


def _naive_accumulate_full(case):
    V, a, b = case["V"], case["a"], case["b"]
    wvec, s_prev, r_prev = case["wvec"], case["s_prev"], case["r_prev"]
    sw, sv = case["sw"], case["sv"]
    n, m = sw.shape[0], sw.shape[2]
    g_w = np.zeros((n, m))
    g_v = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for k in range(m):
                dadw = -b * sum(V[i, h] * sw[h, j, k] for h in range(n))
                if i == j:
                    dadw += a * s_prev[k]
                g_w[j, k] += wvec[i] * dadw
            for q in range(n):
                dadv = -b * sum(V[i, h] * sv[h, j, q] for h in range(n))
                if i == j:
                    dadv -= b * r_prev[q]
                g_v[j, q] += wvec[i] * dadv
    return g_w, g_v


def _naive_advance_full(case):
    V, a, b = case["V"], case["a"], case["b"]
    pbeta, s_prev, r_prev = case["pbeta"], case["s_prev"], case["r_prev"]
    sw, sv = case["sw"], case["sv"]
    n, m = sw.shape[0], sw.shape[2]
    new_w = np.zeros_like(sw)
    new_v = np.zeros_like(sv)
    for i in range(n):
        for j in range(n):
            for k in range(m):
                val = a * sum(V[i, h] * sw[h, j, k] for h in range(n))
                if i == j:
                    val += b * s_prev[k]
                new_w[i, j, k] = pbeta[i] * val
            for q in range(n):
                val = a * sum(V[i, h] * sv[h, j, q] for h in range(n))
                if i == j:
                    val += a * r_prev[q]
                new_v[i, j, q] = pbeta[i] * val
    return new_w, new_v


@pytest.mark.parametrize("backend", sorted(kernels.backends()))
def test_accumulate_full_matches_naive_loops(backend):
    rng = np.random.default_rng(91)
    mod = kernels.backends()[backend]
    for n, m in [(1, 1), (2, 3), (4, 4), (5, 2)]:
        case = _random_case(rng, n, m)
        want_w, want_v = _naive_accumulate_full(case)
        g_w = np.zeros((n, m))
        g_v = np.zeros((n, n))
        mod.accumulate_full(
            case["V"], case["a"], case["b"], case["wvec"], case["s_prev"],
            case["r_prev"], case["sw"], case["sv"], g_w, g_v,
        )
        np.testing.assert_allclose(g_w, want_w, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(g_v, want_v, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("backend", sorted(kernels.backends()))
def test_advance_full_matches_naive_loops(backend):
    rng = np.random.default_rng(92)
    mod = kernels.backends()[backend]
    for n, m in [(1, 1), (2, 3), (4, 4)]:
        case = _random_case(rng, n, m)
        want_w, want_v = _naive_advance_full(case)
        dst_w = np.empty_like(case["sw"])
        dst_v = np.empty_like(case["sv"])
        mod.advance_full(
            case["V"], case["a"], case["b"], case["pbeta"], case["s_prev"],
            case["r_prev"], case["sw"], case["sv"], dst_w, dst_v,
        )
        np.testing.assert_allclose(dst_w, want_w, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(dst_v, want_v, rtol=1e-12, atol=1e-12)


def test_backends_agree_exactly_on_diag_mode():
    mods = kernels.backends()
    if len(mods) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(93)
    n, m = 6, 3
    case = _random_case(rng, n, m)
    vdiag = np.ascontiguousarray(np.diag(case["V"]))
    results = {}
    for name, mod in mods.items():
        g_w = np.zeros((n, m))
        g_v = np.zeros((n, n))
        sw_d = case["sw"][:, 0, :].copy()
        sv_d = case["sv"][:, 0, :].copy()
        mod.accumulate_diag(
            vdiag, case["a"], case["b"], case["wvec"], case["s_prev"],
            case["r_prev"], sw_d, sv_d, g_w, g_v,
        )
        mod.advance_diag(
            vdiag, case["a"], case["b"], case["pbeta"], case["s_prev"],
            case["r_prev"], sw_d, sv_d,
        )
        results[name] = (g_w, g_v, sw_d, sv_d)
    base = results.pop("python")
    for other in results.values():
        for mine, theirs in zip(base, other):
            np.testing.assert_allclose(mine, theirs, rtol=1e-13, atol=1e-14)


def test_backends_agree_on_full_mode():
    mods = kernels.backends()
    if len(mods) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(94)
    n, m = 7, 5
    case = _random_case(rng, n, m)
    results = {}
    for name, mod in mods.items():
        g_w = np.zeros((n, m))
        g_v = np.zeros((n, n))
        dst_w = np.empty_like(case["sw"])
        dst_v = np.empty_like(case["sv"])
        mod.accumulate_full(
            case["V"], case["a"], case["b"], case["wvec"], case["s_prev"],
            case["r_prev"], case["sw"], case["sv"], g_w, g_v,
        )
        mod.advance_full(
            case["V"], case["a"], case["b"], case["pbeta"], case["s_prev"],
            case["r_prev"], case["sw"], case["sv"], dst_w, dst_v,
        )
        results[name] = (g_w, g_v, dst_w, dst_v)
    base = results.pop("python")
    for other in results.values():
        for mine, theirs in zip(base, other):
            np.testing.assert_allclose(mine, theirs, rtol=1e-12, atol=1e-13)
