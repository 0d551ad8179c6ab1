"""Exact reference solver: damped-mode Lindblad dynamics in truncated Fock space.

Each Lorentzian bath peak is represented by one damped bosonic mode coupled
to its site's population operator.  The composite density matrix evolves
under a Lindblad master equation with decay rate twice the peak half width,
which makes the free-mode correlation function reproduce the peak's
exponential bath correlation exactly.  The reduced system state follows by
partial trace.

Composite index order: system index slowest, then the modes in model order,
each with ``n_max + 1`` Fock levels.

The generator is never materialized as a superoperator matrix; the drift is
applied as ``A_eff rho + h.c.`` with sparse ``A_eff = -iH - sum_p gamma_p
n_p``, and the jump terms as index-shifted gathers.  Dimensions up to the
cap (2e4 by default) stay tractable that way.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .model import DiscreteBath, IntegratorConfig, Scenario
from .integrator import integrate, IntegrationReport

__all__ = [
    "Pseudomode",
    "PMModel",
    "LindbladAction",
    "default_n_max",
    "simulate_pm",
]


@dataclass(frozen=True)
class Pseudomode:
    """One damped mode: owning site, center frequency, half width, coupling."""

    site: int
    center: float
    half_width: float
    root_weight: float


def default_n_max(pseudomodes: Sequence[Pseudomode]) -> int:
    """Fock truncation heuristic: deeper ladder for strongly coupled peaks."""
    if any(p.root_weight**2 > 0.5 for p in pseudomodes):
        return 6
    return 4


def _kron_chain(ops) -> sp.csr_matrix:
    out = ops[0]
    for op in ops[1:]:
        out = sp.kron(out, op, format="csr")
    return sp.csr_matrix(out)


class PMModel:
    """System plus one truncated damped mode per Lorentzian peak.

    Parameters
    ----------
    h_system : (N, N) array
        System Hamiltonian.
    pseudomodes : sequence of Pseudomode
        Damped modes; zero-coupling entries should be dropped beforehand
        (see :meth:`from_scenario`).
    n_max : int
        Highest Fock level kept per mode (>= 1).
    dim_cap : int
        Upper bound on the composite dimension; exceeded -> error.
    """

    def __init__(
        self,
        h_system: np.ndarray,
        pseudomodes: Sequence[Pseudomode],
        n_max: int,
        dim_cap: int = 20000,
    ):
        self.h_system = np.asarray(h_system, dtype=complex)
        self.n_sites = self.h_system.shape[0]
        self.pseudomodes = tuple(pseudomodes)
        self.n_modes = len(self.pseudomodes)
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        self.n_max = int(n_max)
        self.n_levels = self.n_max + 1
        self.fock_dim = self.n_levels**self.n_modes
        self.dim = self.n_sites * self.fock_dim
        if self.dim > dim_cap:
            raise ValueError(
                f"composite dimension {self.dim} exceeds cap {dim_cap}; "
                "reduce n_max or the number of peaks"
            )

    @classmethod
    def from_scenario(cls, scenario: Scenario, n_max: Optional[int] = None) -> "PMModel":
        """Model from a validated scenario with per-site Lorentzian baths.

        Zero-weight peaks are dropped (they cost Fock dimensions without
        coupling to anything).  ``n_max`` falls back to the scenario's
        setting and then to :func:`default_n_max`.
        """
        if isinstance(scenario.bath, DiscreteBath):
            raise ValueError(
                "damped-mode reference needs per-site Lorentzian baths, "
                "got explicit discrete modes"
            )
        modes = []
        for sb in scenario.bath:
            for p in sb.peaks:
                if p.weight == 0.0:
                    continue
                modes.append(
                    Pseudomode(
                        site=sb.site,
                        center=p.center,
                        half_width=p.half_width,
                        root_weight=float(np.sqrt(p.weight)),
                    )
                )
        if n_max is None:
            n_max = scenario.pm.n_max
        if n_max is None:
            n_max = default_n_max(modes) if modes else 1
        return cls(
            scenario.couplings, modes, n_max, dim_cap=scenario.pm.dim_cap
        )

    # -- composite-space operators ---------------------------------------

    def _mode_op(self, p: int, op: sp.spmatrix) -> sp.csr_matrix:
        ops = [sp.identity(self.n_sites, dtype=complex, format="csr")]
        for q in range(self.n_modes):
            if q == p:
                ops.append(sp.csr_matrix(op, dtype=complex))
            else:
                ops.append(sp.identity(self.n_levels, dtype=complex, format="csr"))
        return _kron_chain(ops)

    def lowering_operator(self, p: int) -> sp.csr_matrix:
        """Composite-space annihilation operator of mode p."""
        b = sp.diags(
            np.sqrt(np.arange(1, self.n_levels, dtype=float)), 1, dtype=complex
        )
        return self._mode_op(p, b)

    def number_operator(self, p: int) -> sp.csr_matrix:
        """Composite-space occupation operator of mode p."""
        n = sp.diags(np.arange(self.n_levels, dtype=float), 0, dtype=complex)
        return self._mode_op(p, n)

    def site_projector(self, m: int) -> sp.csr_matrix:
        """Composite-space projector onto system basis state m."""
        pm = sp.csr_matrix(
            (np.ones(1, dtype=complex), ([m], [m])),
            shape=(self.n_sites, self.n_sites),
        )
        ops = [pm] + [
            sp.identity(self.n_levels, dtype=complex, format="csr")
            for _ in range(self.n_modes)
        ]
        return _kron_chain(ops)

    def hamiltonian(self) -> sp.csr_matrix:
        """H = H_s + sum_p center_p n_p + sum_p root_weight_p P_site (b_p + b_p^+)."""
        eye_bath = sp.identity(self.fock_dim, dtype=complex, format="csr")
        h = sp.kron(sp.csr_matrix(self.h_system), eye_bath, format="csr")
        for p, mode in enumerate(self.pseudomodes):
            h = h + mode.center * self.number_operator(p)
            b = self.lowering_operator(p)
            coupling = self.site_projector(mode.site) @ (b + b.conj().T.tocsr())
            h = h + mode.root_weight * coupling
        return sp.csr_matrix(h)

    # -- state handling ---------------------------------------------------

    def initial_density(self, rho_s0: np.ndarray) -> np.ndarray:
        """Composite rho(0) = rho_s0 with every mode in its vacuum state."""
        vac = np.zeros((self.fock_dim, self.fock_dim), dtype=complex)
        vac[0, 0] = 1.0
        return np.kron(np.asarray(rho_s0, dtype=complex), vac)

    def partial_trace(self, rho: np.ndarray) -> np.ndarray:
        """Reduced system density matrix from the composite one."""
        r = rho.reshape(self.n_sites, self.fock_dim, self.n_sites, self.fock_dim)
        return np.einsum("afbf->ab", r)

    def mode_occupation(self, p: int, i: np.ndarray) -> np.ndarray:
        """Fock occupation of mode p inside composite index i."""
        stride = self.n_levels ** (self.n_modes - 1 - p)
        return (i // stride) % self.n_levels

    # -- generator --------------------------------------------------------

    def action(self, hamiltonian: Optional[sp.spmatrix] = None) -> "LindbladAction":
        """Bundle the generator pieces for the compiled Lindblad kernels.

        A custom composite-space Hamiltonian may be substituted; decay
        channels always remain the model's damped modes.
        """
        h = self.hamiltonian() if hamiltonian is None else sp.csr_matrix(hamiltonian)
        a_eff = -1j * h
        for p, mode in enumerate(self.pseudomodes):
            a_eff = a_eff - mode.half_width * self.number_operator(p)
        a_eff = sp.csr_matrix(a_eff)
        a_eff.sort_indices()

        idx = np.arange(self.dim)
        up_idx = np.empty((self.n_modes, self.dim), dtype=np.int64)
        up_amp = np.zeros((self.n_modes, self.dim))
        rates = np.empty(self.n_modes)
        for p, mode in enumerate(self.pseudomodes):
            occ = self.mode_occupation(p, idx)
            stride = self.n_levels ** (self.n_modes - 1 - p)
            raised = np.where(occ < self.n_max, idx + stride, -1)
            up_idx[p] = raised
            up_amp[p] = np.sqrt(occ + 1.0)
            rates[p] = 2.0 * mode.half_width
        return LindbladAction(a_eff, up_idx, up_amp, rates, self.dim)


class LindbladAction:
    """Kernel-ready Lindblad generator pieces.

    ``rhs`` assumes (and preserves) Hermitian input; ``generic_rhs``
    handles arbitrary matrices, as needed for correlation functions.
    """

    def __init__(self, a_eff: sp.csr_matrix, up_idx, up_amp, rates, dim: int):
        self.a_eff = a_eff
        self.up_idx = up_idx
        self.up_amp = up_amp
        self.rates = rates
        self.dim = dim

    def rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.lindblad_rhs(
            y, out, self.a_eff.indptr, self.a_eff.indices, self.a_eff.data,
            self.up_idx, self.up_amp, self.rates,
        )

    def generic_rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.lindblad_generic_rhs(
            y, out, self.a_eff.indptr, self.a_eff.indices, self.a_eff.data,
            self.up_idx, self.up_amp, self.rates,
        )


def simulate_pm(
    model: PMModel,
    rho_s0: np.ndarray,
    cfg: IntegratorConfig,
    observer=None,
) -> tuple[list[float], list[np.ndarray], IntegrationReport]:
    """Evolve the composite state and sample the reduced system matrix.

    Returns sample times, reduced density matrices, and the integration
    report.  ``observer(i, t, rho_s)`` is additionally called per sample
    when given.
    """
    action = model.action()
    y0 = model.initial_density(rho_s0).reshape(-1)
    times: list[float] = []
    rhos: list[np.ndarray] = []

    def sample(i, t, y):
        rho_s = model.partial_trace(y.reshape(model.dim, model.dim))
        times.append(t)
        rhos.append(rho_s)
        if observer is not None:
            observer(i, t, rho_s)

    report = integrate(action.rhs, y0, cfg, sample)
    return times, rhos, report
