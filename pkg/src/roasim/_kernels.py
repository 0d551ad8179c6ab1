"""Compiled right-hand sides and small array helpers.

All simulation state is passed as a flat complex128 vector laid out as the
system transition blocks first, then bath amplitude matrices, then (for the
high-order variants) the interaction blocks.  The kernels reshape slices of
that vector in place; nothing is copied.  Summation orders are fixed, so
repeated evaluation is bit-reproducible.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def axpy(out, y, a, x):
    """out = y + a*x, elementwise over flat complex arrays."""
    for i in range(y.size):
        out[i] = y[i] + a * x[i]


@njit(**_JIT)
def rk4_combine(y, dt, k1, k2, k3, k4):
    """y += dt/6 * (k1 + 2 k2 + 2 k3 + k4)."""
    c = dt / 6.0
    for i in range(y.size):
        y[i] = y[i] + c * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])


@njit(**_JIT)
def max_abs(y):
    """Largest entry magnitude; NaN if any entry is NaN."""
    m = 0.0
    for i in range(y.size):
        v = abs(y[i])
        if v != v:
            return np.nan
        if v > m:
            m = v
    return m


@njit(**_JIT)
def general_low_rhs(y, out, vt, omega, g, theta):
    """Low-order flow for a discrete bath.

    Layout: y = [T (ns^4), A (kk*ns^2)].  vt is the transposed system
    coupling matrix, omega the mode frequencies, g the (kk, ns) coupling
    rows.  theta weights the operator-product ordering; 0.5 is the
    symmetrized product used in production.
    """
    kk, ns = g.shape
    n4 = ns * ns * ns * ns
    T = y[:n4].reshape(ns, ns, ns, ns)
    A = y[n4:].reshape(kk, ns, ns)
    dT = out[:n4].reshape(ns, ns, ns, ns)
    dA = out[n4:].reshape(kk, ns, ns)

    for k in range(kk):
        w = omega[k]
        for a in range(ns):
            for b in range(ns):
                dA[k, a, b] = -1j * w * A[k, a, b]

    # site-summed dressing fields built from the bath amplitudes
    C = np.zeros((ns, ns, ns), dtype=np.complex128)
    D = np.zeros((ns, ns, ns), dtype=np.complex128)
    for k in range(kk):
        for m in range(ns):
            gk = g[k, m]
            if gk == 0j:
                continue
            gc = np.conj(gk)
            for a in range(ns):
                for b in range(ns):
                    dA[k, a, b] -= 1j * gk * T[m, m, a, b]
                    C[m, a, b] += gk * np.conj(A[k, b, a])
                    D[m, a, b] += gc * A[k, a, b]

    for m in range(ns):
        for q in range(ns):
            for a in range(ns):
                for b in range(ns):
                    comm = 0j
                    cl = 0j
                    cr = 0j
                    dl = 0j
                    dr = 0j
                    for r in range(ns):
                        comm += vt[m, r] * T[r, q, a, b] - T[m, r, a, b] * vt[r, q]
                        dc = C[m, a, r] - C[q, a, r]
                        cl += dc * T[m, q, r, b]
                        dd = D[m, a, r] - D[q, a, r]
                        dl += dd * T[m, q, r, b]
                        dc2 = C[m, r, b] - C[q, r, b]
                        cr += T[m, q, a, r] * dc2
                        dd2 = D[m, r, b] - D[q, r, b]
                        dr += T[m, q, a, r] * dd2
                    dT[m, q, a, b] = 1j * (
                        comm
                        + theta * cl + (1.0 - theta) * cr
                        + theta * dr + (1.0 - theta) * dl
                    )


@njit(**_JIT)
def general_high_rhs(y, out, vt, omega, g):
    """High-order flow for a discrete bath.

    Layout: y = [T (ns^4), A (kk*ns^2), S (kk*ns^4)].  The interaction
    blocks S are evolved with the ordering that keeps them zero for an
    initially unexcited bath; the bath amplitudes A are evolved redundantly
    (their block trace identity with S is a diagnostic).
    """
    kk, ns = g.shape
    n2 = ns * ns
    n4 = n2 * n2
    T = y[:n4].reshape(ns, ns, ns, ns)
    A = y[n4:n4 + kk * n2].reshape(kk, ns, ns)
    S = y[n4 + kk * n2:].reshape(kk, ns, ns, ns, ns)
    dT = out[:n4].reshape(ns, ns, ns, ns)
    dA = out[n4:n4 + kk * n2].reshape(kk, ns, ns)
    dS = out[n4 + kk * n2:].reshape(kk, ns, ns, ns, ns)

    for k in range(kk):
        w = omega[k]
        for a in range(ns):
            for b in range(ns):
                dA[k, a, b] = -1j * w * A[k, a, b]

    C = np.zeros((ns, ns, ns), dtype=np.complex128)
    D = np.zeros((ns, ns, ns), dtype=np.complex128)
    for k in range(kk):
        for m in range(ns):
            gk = g[k, m]
            if gk == 0j:
                continue
            gc = np.conj(gk)
            for a in range(ns):
                for b in range(ns):
                    dA[k, a, b] -= 1j * gk * T[m, m, a, b]
                    C[m, a, b] += gk * np.conj(A[k, b, a])
                    D[m, a, b] += gc * A[k, a, b]

    # F = sum_k [g_k, adj S_k] + [g_k^+, S_k]; diagonal blocks vanish
    F = np.zeros((ns, ns, ns, ns), dtype=np.complex128)
    for k in range(kk):
        for m in range(ns):
            for q in range(ns):
                dg = g[k, m] - g[k, q]
                dgc = np.conj(g[k, m]) - np.conj(g[k, q])
                if dg == 0j and dgc == 0j:
                    continue
                for a in range(ns):
                    for b in range(ns):
                        F[m, q, a, b] += (
                            dg * np.conj(S[k, q, m, b, a]) + dgc * S[k, m, q, a, b]
                        )

    for m in range(ns):
        for q in range(ns):
            for a in range(ns):
                for b in range(ns):
                    comm = 0j
                    for r in range(ns):
                        comm += vt[m, r] * T[r, q, a, b] - T[m, r, a, b] * vt[r, q]
                    dT[m, q, a, b] = 1j * (comm + F[m, q, a, b])

    for k in range(kk):
        w = omega[k]
        for m in range(ns):
            for q in range(ns):
                gq = g[k, q]
                for a in range(ns):
                    for b in range(ns):
                        acc = -1j * w * S[k, m, q, a, b] - 1j * gq * T[m, q, a, b]
                        for r in range(ns):
                            acc += 1j * (
                                vt[m, r] * S[k, r, q, a, b]
                                - S[k, m, r, a, b] * vt[r, q]
                            )
                            acc += 0.5j * F[m, q, a, r] * A[k, r, b]
                            acc += 0.5j * (C[m, a, r] - C[q, a, r]) * S[k, m, q, r, b]
                            acc += 0.5j * S[k, m, q, a, r] * (D[m, r, b] - D[q, r, b])
                        dS[k, m, q, a, b] = acc


@njit(**_JIT)
def lorentzian_low_rhs(y, out, vt, omega, gamma, rootw, site):
    """Low-order flow for per-site Lorentzian peaks.

    Layout: y = [T (ns^4), At (pp*ns^2)] where At holds one collective
    amplitude per peak.  omega/gamma/rootw/site give the peak center,
    half-width, square-root weight and owning site.
    """
    ns = vt.shape[0]
    pp = omega.shape[0]
    n4 = ns * ns * ns * ns
    T = y[:n4].reshape(ns, ns, ns, ns)
    At = y[n4:].reshape(pp, ns, ns)
    dT = out[:n4].reshape(ns, ns, ns, ns)
    dAt = out[n4:].reshape(pp, ns, ns)

    W = np.zeros((ns, ns, ns), dtype=np.complex128)
    for p in range(pp):
        sp = site[p]
        dec = -1j * omega[p] - gamma[p]
        rw = rootw[p]
        for a in range(ns):
            for b in range(ns):
                dAt[p, a, b] = dec * At[p, a, b] + rw * T[sp, sp, a, b]
                W[sp, a, b] += rw * At[p, a, b]

    # U_m = W_m - W_m^+ enters as the anti-Hermitian dressing field
    U = np.empty((ns, ns, ns), dtype=np.complex128)
    for m in range(ns):
        for a in range(ns):
            for b in range(ns):
                U[m, a, b] = W[m, a, b] - np.conj(W[m, b, a])

    for m in range(ns):
        for q in range(ns):
            for a in range(ns):
                for b in range(ns):
                    comm = 0j
                    anti = 0j
                    for r in range(ns):
                        comm += vt[m, r] * T[r, q, a, b] - T[m, r, a, b] * vt[r, q]
                        du_ar = U[m, a, r] - U[q, a, r]
                        du_rb = U[m, r, b] - U[q, r, b]
                        anti += T[m, q, a, r] * du_rb + du_ar * T[m, q, r, b]
                    dT[m, q, a, b] = 1j * comm + 0.5 * anti


@njit(**_JIT)
def lorentzian_high_rhs(y, out, vt, omega, gamma, rootw, site):
    """High-order flow for per-site Lorentzian peaks.

    Layout: y = [T (ns^4), At (pp*ns^2), S (ns^2*pp*ns^2)] with S indexed
    [m, q, p, a, b]: the interaction block for transition (m, q) and peak p.
    """
    ns = vt.shape[0]
    pp = omega.shape[0]
    n2 = ns * ns
    n4 = n2 * n2
    T = y[:n4].reshape(ns, ns, ns, ns)
    At = y[n4:n4 + pp * n2].reshape(pp, ns, ns)
    S = y[n4 + pp * n2:].reshape(ns, ns, pp, ns, ns)
    dT = out[:n4].reshape(ns, ns, ns, ns)
    dAt = out[n4:n4 + pp * n2].reshape(pp, ns, ns)
    dS = out[n4 + pp * n2:].reshape(ns, ns, pp, ns, ns)

    W = np.zeros((ns, ns, ns), dtype=np.complex128)
    for p in range(pp):
        sp = site[p]
        dec = -1j * omega[p] - gamma[p]
        rw = rootw[p]
        for a in range(ns):
            for b in range(ns):
                dAt[p, a, b] = dec * At[p, a, b] + rw * T[sp, sp, a, b]
                W[sp, a, b] += rw * At[p, a, b]

    # Q[m,q] = sum over peaks of site m of rw*(S[m,q,p] - adj S[q,m,p])
    #        + sum over peaks of site q of rw*(adj S[q,m,p] - S[m,q,p]);
    # diagonal blocks cancel identically and are skipped to keep the
    # block trace exactly constant.
    Q = np.zeros((ns, ns, ns, ns), dtype=np.complex128)
    for p in range(pp):
        sp = site[p]
        rw = rootw[p]
        for q in range(ns):
            if q == sp:
                continue
            for a in range(ns):
                for b in range(ns):
                    Q[sp, q, a, b] += rw * (
                        S[sp, q, p, a, b] - np.conj(S[q, sp, p, b, a])
                    )
                    Q[q, sp, a, b] += rw * (
                        np.conj(S[sp, q, p, b, a]) - S[q, sp, p, a, b]
                    )

    for m in range(ns):
        for q in range(ns):
            for a in range(ns):
                for b in range(ns):
                    comm = 0j
                    for r in range(ns):
                        comm += vt[m, r] * T[r, q, a, b] - T[m, r, a, b] * vt[r, q]
                    dT[m, q, a, b] = 1j * comm + Q[m, q, a, b]

    for p in range(pp):
        sp = site[p]
        dec = -1j * omega[p] - gamma[p]
        rw = rootw[p]
        for m in range(ns):
            for q in range(ns):
                src = rw if q == sp else 0.0
                for a in range(ns):
                    for b in range(ns):
                        acc = dec * S[m, q, p, a, b] + src * T[m, q, a, b]
                        for r in range(ns):
                            acc += 1j * (
                                vt[m, r] * S[r, q, p, a, b]
                                - S[m, r, p, a, b] * vt[r, q]
                            )
                            acc += 0.5 * Q[m, q, a, r] * At[p, r, b]
                            dw_rb = W[m, r, b] - W[q, r, b]
                            acc += 0.5 * S[m, q, p, a, r] * dw_rb
                            dwc_ar = np.conj(W[m, r, a]) - np.conj(W[q, r, a])
                            acc -= 0.5 * dwc_ar * S[m, q, p, r, b]
                        dS[m, q, p, a, b] = acc


@njit(**_JIT)
def lindblad_rhs(y, out, indptr, indices, data, up_idx, up_amp, rates):
    """Lindblad generator applied to a Hermitian density matrix.

    y holds the flattened density matrix.  The drift part is computed as
    Y + Y^+ with Y = A_eff rho, where the sparse A_eff = -iH - sum_p
    gamma_p n_p is given in CSR form.  up_idx/up_amp give, per decay
    channel, the composite index with that mode's occupation raised (or -1)
    and the matrix element of the lowering operator; rates holds the 2*gamma
    decay rates.
    """
    pp = up_idx.shape[0]
    dim = up_idx.shape[1]
    rho = y[:dim * dim].reshape(dim, dim)
    dr = out[:dim * dim].reshape(dim, dim)

    for i in range(dim):
        for j in range(dim):
            dr[i, j] = 0j
    for i in range(dim):
        for idx in range(indptr[i], indptr[i + 1]):
            k = indices[idx]
            v = data[idx]
            for j in range(dim):
                dr[i, j] += v * rho[k, j]

    # hermitize: drift = Y + Y^+
    for i in range(dim):
        dr[i, i] = dr[i, i] + np.conj(dr[i, i])
        for j in range(i + 1, dim):
            u = dr[i, j] + np.conj(dr[j, i])
            dr[j, i] = dr[j, i] + np.conj(dr[i, j])
            dr[i, j] = u

    for p in range(pp):
        r = rates[p]
        for i in range(dim):
            ui = up_idx[p, i]
            if ui < 0:
                continue
            fi = r * up_amp[p, i]
            for j in range(dim):
                uj = up_idx[p, j]
                if uj < 0:
                    continue
                dr[i, j] += fi * up_amp[p, j] * rho[ui, uj]


@njit(**_JIT)
def lindblad_generic_rhs(y, out, indptr, indices, data, up_idx, up_amp, rates):
    """Lindblad generator applied to an arbitrary (non-Hermitian) matrix.

    Needed for multi-time correlation functions, where the propagated
    object is an operator rather than a state.  Same data layout as
    lindblad_rhs; the right factor X A_eff^+ is computed explicitly.
    """
    pp = up_idx.shape[0]
    dim = up_idx.shape[1]
    X = y[:dim * dim].reshape(dim, dim)
    dr = out[:dim * dim].reshape(dim, dim)

    for i in range(dim):
        for j in range(dim):
            dr[i, j] = 0j
    for i in range(dim):
        for idx in range(indptr[i], indptr[i + 1]):
            k = indices[idx]
            v = data[idx]
            for j in range(dim):
                dr[i, j] += v * X[k, j]
    # X A_eff^+: contract columns of X with conjugated rows of A_eff
    for j in range(dim):
        for idx in range(indptr[j], indptr[j + 1]):
            k = indices[idx]
            vc = np.conj(data[idx])
            for i in range(dim):
                dr[i, j] += X[i, k] * vc

    for p in range(pp):
        r = rates[p]
        for i in range(dim):
            ui = up_idx[p, i]
            if ui < 0:
                continue
            fi = r * up_amp[p, i]
            for j in range(dim):
                uj = up_idx[p, j]
                if uj < 0:
                    continue
                dr[i, j] += fi * up_amp[p, j] * X[ui, uj]
