"""Closed-form references used by tests and validation runs.

Three exact solutions are provided: unitary evolution of a closed system,
the pure-dephasing flow of an uncoupled-site model with one bath mode per
site (solvable because the site populations are conserved), and the damped
two-level exchange model matching the single-excitation sector of one
lossy bosonic mode.  All are evaluated analytically, never by integration,
so they are independent of the integrator under test.
"""

import numpy as np
from scipy.linalg import expm

from .blockop import initial_transition_blocks

__all__ = [
    "closed_system_solution",
    "closed_system_blocks",
    "dephasing_phase",
    "dephasing_blocks",
    "dephasing_mode_amplitude",
    "damped_exchange_amplitudes",
]


def closed_system_solution(V: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """Unitary evolution exp(-iVt) rho0 exp(+iVt) via eigen-decomposition."""
    V = np.asarray(V, dtype=complex)
    w, Q = np.linalg.eigh(V)
    phase = np.exp(-1j * w * t)
    U = (Q * phase) @ Q.conj().T
    return U @ np.asarray(rho0, dtype=complex) @ U.conj().T


def closed_system_blocks(V: np.ndarray, t: float) -> np.ndarray:
    """Exact transition blocks for zero coupling.

    Block (m, n) is conj(U[m, a]) U[n, b] with U = exp(-iVt): the
    Heisenberg image of the matrix unit.
    """
    V = np.asarray(V, dtype=complex)
    w, Q = np.linalg.eigh(V)
    U = (Q * np.exp(-1j * w * t)) @ Q.conj().T
    return np.einsum("ma,nb->mnab", U.conj(), U)


def _check_dephasing(g: np.ndarray, omega: np.ndarray):
    g = np.asarray(g, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    if g.shape != omega.shape or g.ndim != 1:
        raise ValueError("need one (coupling, frequency) pair per site")
    if np.any(omega == 0.0):
        raise ValueError("mode frequencies must be nonzero")
    return g, omega


def dephasing_phase(g, omega, m: int, n: int, t) -> np.ndarray:
    """Phase of block (m, n) in the uncoupled-site one-mode-per-site model.

    Site populations are constant, each mode amplitude closes to
    -(|g|^2/w)(1 - e^{-iwt}), and the off-diagonal blocks pick up the
    integrated real part: phi_mn(t) = -(|g_m|^2/w_m)(t - sin(w_m t)/w_m)
    + (|g_n|^2/w_n)(t - sin(w_n t)/w_n).
    """
    g, omega = _check_dephasing(g, omega)
    t = np.asarray(t, dtype=float)

    def ramp(i):
        w = omega[i]
        return -(abs(g[i]) ** 2 / w) * (t - np.sin(w * t) / w)

    return ramp(m) - ramp(n)


def dephasing_blocks(g, omega, t: float) -> np.ndarray:
    """Exact transition blocks of the pure-dephasing model at time t.

    Diagonal blocks are constant; block (m, n) is exp(i phi_mn(t)) times
    its initial matrix unit, so every block keeps unit magnitude and the
    block products close exactly (the phases add).
    """
    g, omega = _check_dephasing(g, omega)
    n_sites = g.shape[0]
    T = initial_transition_blocks(n_sites)
    for m in range(n_sites):
        for n in range(n_sites):
            if m == n:
                continue
            T[m, n, m, n] = np.exp(1j * dephasing_phase(g, omega, m, n, float(t)))
    return T


def dephasing_mode_amplitude(g_m: complex, omega_m: float, t) -> np.ndarray:
    """Scalar factor of the mode-amplitude block in the dephasing model.

    The block is this factor times the (constant) diagonal transition
    block of the owning site: -(g/w)(1 - e^{-iwt}).
    """
    if omega_m == 0.0:
        raise ValueError("mode frequency must be nonzero")
    t = np.asarray(t, dtype=float)
    return -(g_m / omega_m) * (1.0 - np.exp(-1j * omega_m * t))


def damped_exchange_amplitudes(
    root_weight: float, center: float, half_width: float, t: float
) -> tuple[complex, complex]:
    """Amplitudes (c_s, c_b) of the damped two-level exchange model.

    Solves dc_s/dt = -i k c_b, dc_b/dt = (-i w0 - gamma) c_b - i k c_s
    with c_s(0) = 1, c_b(0) = 0; this is the single-excitation sector of
    a system level exchange-coupled to one lossy mode.
    """
    k = root_weight
    M = np.array(
        [[0.0, -1j * k], [-1j * k, -1j * center - half_width]], dtype=complex
    )
    c = expm(M * t) @ np.array([1.0, 0.0], dtype=complex)
    return complex(c[0]), complex(c[1])
