"""Dual-route checks: every compiled right-hand side against a literal
matrix-form transcription of the same equations on random states."""

import numpy as np
import pytest

from roasim import _kernels
from roasim.blockop import block_adjoint, block_trace
from roasim.model import IntegratorConfig, LorentzianPeak, Scenario, SiteBath
from roasim.pm import PMModel

import reference_impl as ref

NS = 3
KK = 2
PP = 4
SITES = np.array([0, 1, 1, 2], dtype=np.int64)


def rng():
    return np.random.default_rng(20240817)


def rand_c(r, *shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


def rand_v(r):
    m = rand_c(r, NS, NS)
    return np.ascontiguousarray((m + m.conj().T) / 2)


def close(a, b, tol=1e-13):
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) < tol * scale


def symmetrize_blocks(T):
    return 0.5 * (T + block_adjoint(T))


def test_general_low_matches_reference(warm_kernels):
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    omega = r.standard_normal(KK)
    g = rand_c(r, KK, NS)
    T = rand_c(r, NS, NS, NS, NS)
    A = rand_c(r, KK, NS, NS)
    theta = 0.3
    y = np.concatenate([T.ravel(), A.ravel()])
    out = np.zeros_like(y)
    _kernels.general_low_rhs(y, out, vt, omega, g, theta)
    dT = out[: NS**4].reshape(NS, NS, NS, NS)
    dA = out[NS**4 :].reshape(KK, NS, NS)
    rT, rA = ref.general_low_reference(T, A, vt, omega, g, theta)
    assert close(dT, rT)
    assert close(dA, rA)


def test_general_high_matches_reference(warm_kernels):
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    omega = r.standard_normal(KK)
    g = rand_c(r, KK, NS)
    T = rand_c(r, NS, NS, NS, NS)
    A = rand_c(r, KK, NS, NS)
    S = rand_c(r, KK, NS, NS, NS, NS)
    y = np.concatenate([T.ravel(), A.ravel(), S.ravel()])
    out = np.zeros_like(y)
    _kernels.general_high_rhs(y, out, vt, omega, g)
    n4 = NS**4
    na = KK * NS * NS
    dT = out[:n4].reshape(NS, NS, NS, NS)
    dA = out[n4 : n4 + na].reshape(KK, NS, NS)
    dS = out[n4 + na :].reshape(KK, NS, NS, NS, NS)
    rT, rA, rS = ref.general_high_reference(T, A, S, vt, omega, g)
    assert close(dT, rT)
    assert close(dA, rA)
    assert close(dS, rS)


def test_lorentzian_low_matches_reference(warm_kernels):
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    omega = r.standard_normal(PP)
    gamma = r.uniform(0.05, 0.6, PP)
    rootw = r.uniform(0.1, 1.0, PP)
    T = rand_c(r, NS, NS, NS, NS)
    At = rand_c(r, PP, NS, NS)
    y = np.concatenate([T.ravel(), At.ravel()])
    out = np.zeros_like(y)
    _kernels.lorentzian_low_rhs(y, out, vt, omega, gamma, rootw, SITES)
    dT = out[: NS**4].reshape(NS, NS, NS, NS)
    dAt = out[NS**4 :].reshape(PP, NS, NS)
    rT, rAt = ref.lorentzian_low_reference(T, At, vt, omega, gamma, rootw, SITES)
    assert close(dT, rT)
    assert close(dAt, rAt)


def test_lorentzian_high_matches_reference(warm_kernels):
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    omega = r.standard_normal(PP)
    gamma = r.uniform(0.05, 0.6, PP)
    rootw = r.uniform(0.1, 1.0, PP)
    T = rand_c(r, NS, NS, NS, NS)
    At = rand_c(r, PP, NS, NS)
    S = rand_c(r, NS, NS, PP, NS, NS)
    y = np.concatenate([T.ravel(), At.ravel(), S.ravel()])
    out = np.zeros_like(y)
    _kernels.lorentzian_high_rhs(y, out, vt, omega, gamma, rootw, SITES)
    n4 = NS**4
    na = PP * NS * NS
    dT = out[:n4].reshape(NS, NS, NS, NS)
    dAt = out[n4 : n4 + na].reshape(PP, NS, NS)
    dS = out[n4 + na :].reshape(NS, NS, PP, NS, NS)
    rT, rAt, rS = ref.lorentzian_high_reference(T, At, S, vt, omega, gamma, rootw, SITES)
    assert close(dT, rT)
    assert close(dAt, rAt)
    assert close(dS, rS)


@pytest.mark.parametrize("kernel", ["general-low", "general-high", "lorentzian-low", "lorentzian-high"])
def test_block_trace_derivative_vanishes(kernel, warm_kernels):
    """The summed diagonal blocks of dT cancel for any state."""
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    T = rand_c(r, NS, NS, NS, NS)
    n4 = NS**4
    if kernel.startswith("general"):
        omega = r.standard_normal(KK)
        g = rand_c(r, KK, NS)
        A = rand_c(r, KK, NS, NS)
        if kernel == "general-low":
            y = np.concatenate([T.ravel(), A.ravel()])
            out = np.zeros_like(y)
            _kernels.general_low_rhs(y, out, vt, omega, g, 0.5)
        else:
            S = rand_c(r, KK, NS, NS, NS, NS)
            y = np.concatenate([T.ravel(), A.ravel(), S.ravel()])
            out = np.zeros_like(y)
            _kernels.general_high_rhs(y, out, vt, omega, g)
    else:
        omega = r.standard_normal(PP)
        gamma = r.uniform(0.05, 0.6, PP)
        rootw = r.uniform(0.1, 1.0, PP)
        At = rand_c(r, PP, NS, NS)
        if kernel == "lorentzian-low":
            y = np.concatenate([T.ravel(), At.ravel()])
            out = np.zeros_like(y)
            _kernels.lorentzian_low_rhs(y, out, vt, omega, gamma, rootw, SITES)
        else:
            S = rand_c(r, NS, NS, PP, NS, NS)
            y = np.concatenate([T.ravel(), At.ravel(), S.ravel()])
            out = np.zeros_like(y)
            _kernels.lorentzian_high_rhs(y, out, vt, omega, gamma, rootw, SITES)
    dT = out[:n4].reshape(NS, NS, NS, NS)
    assert np.max(np.abs(block_trace(dT))) < 1e-13 * max(1.0, float(np.max(np.abs(dT))))


@pytest.mark.parametrize("kernel", ["general-low", "lorentzian-low", "lorentzian-high"])
def test_adjoint_symmetry_preserved(kernel, warm_kernels):
    """If T carries the block-adjoint symmetry, so does its derivative."""
    r = rng()
    vt = np.ascontiguousarray(rand_v(r).T)
    T = symmetrize_blocks(rand_c(r, NS, NS, NS, NS))
    n4 = NS**4
    if kernel == "general-low":
        omega = r.standard_normal(KK)
        g = rand_c(r, KK, NS)
        A = rand_c(r, KK, NS, NS)
        y = np.concatenate([T.ravel(), A.ravel()])
        out = np.zeros_like(y)
        _kernels.general_low_rhs(y, out, vt, omega, g, 0.5)
    elif kernel == "lorentzian-low":
        omega = r.standard_normal(PP)
        gamma = r.uniform(0.05, 0.6, PP)
        rootw = r.uniform(0.1, 1.0, PP)
        At = rand_c(r, PP, NS, NS)
        y = np.concatenate([T.ravel(), At.ravel()])
        out = np.zeros_like(y)
        _kernels.lorentzian_low_rhs(y, out, vt, omega, gamma, rootw, SITES)
    else:
        omega = r.standard_normal(PP)
        gamma = r.uniform(0.05, 0.6, PP)
        rootw = r.uniform(0.1, 1.0, PP)
        At = rand_c(r, PP, NS, NS)
        S = rand_c(r, NS, NS, PP, NS, NS)
        y = np.concatenate([T.ravel(), At.ravel(), S.ravel()])
        out = np.zeros_like(y)
        _kernels.lorentzian_high_rhs(y, out, vt, omega, gamma, rootw, SITES)
    dT = out[:n4].reshape(NS, NS, NS, NS)
    defect = np.max(np.abs(dT - block_adjoint(dT)))
    assert defect < 1e-13 * max(1.0, float(np.max(np.abs(dT))))


def small_pm_model():
    sc = Scenario(
        n_sites=2,
        couplings=np.array([[0.2, -0.7], [-0.7, -0.1]], dtype=complex),
        bath=[SiteBath(site=0, peaks=[LorentzianPeak(weight=0.4, half_width=0.15, center=0.9)])],
        initial_state=np.array([1.0, 0.0], dtype=complex),
        method="pm-reference",
        integrator=IntegratorConfig(),
    )
    return PMModel.from_scenario(sc, n_max=2)


def test_lindblad_matches_dense_reference(warm_kernels):
    model = small_pm_model()
    action = model.action()
    r = rng()
    x = rand_c(r, model.dim, model.dim)
    rho = x + x.conj().T
    out = np.zeros(model.dim * model.dim, dtype=complex)
    action.rhs(0.0, rho.ravel().copy(), out)
    H = model.hamiltonian().toarray()
    lowers = [model.lowering_operator(p).toarray() for p in range(model.n_modes)]
    rates = [2.0 * m.half_width for m in model.pseudomodes]
    expected = ref.lindblad_dense_reference(rho, H, lowers, rates)
    assert close(out.reshape(model.dim, model.dim), expected)


def test_lindblad_generic_matches_dense_reference(warm_kernels):
    model = small_pm_model()
    action = model.action()
    r = rng()
    rho = rand_c(r, model.dim, model.dim)  # deliberately non-Hermitian
    out = np.zeros(model.dim * model.dim, dtype=complex)
    action.generic_rhs(0.0, rho.ravel().copy(), out)
    H = model.hamiltonian().toarray()
    lowers = [model.lowering_operator(p).toarray() for p in range(model.n_modes)]
    rates = [2.0 * m.half_width for m in model.pseudomodes]
    expected = ref.lindblad_dense_reference(rho, H, lowers, rates)
    assert close(out.reshape(model.dim, model.dim), expected)


def test_helper_kernels():
    y = np.array([1.0 + 2j, -3.0, 0.5j])
    out = np.zeros_like(y)
    x = np.array([1.0j, 2.0, -1.0])
    _kernels.axpy(out, y, 0.5, x)
    assert np.allclose(out, y + 0.5 * x)
    assert _kernels.max_abs(np.array([1.0 + 0j, -4.0 + 3j])) == pytest.approx(5.0)
    assert np.isnan(_kernels.max_abs(np.array([1.0, np.nan + 0j]))) or _kernels.max_abs(
        np.array([1.0, np.nan + 0j])
    ) > 1e300
