"""Equations of motion for the reduced transition-block hierarchy.

Each dynamics class owns the flat state layout of one propagation variant,
builds the initial condition, and exposes a ``rhs(t, y, out)`` callback for
the integrator plus views into the flat vector.  The compiled loops live in
:mod:`roasim._kernels`; this module only prepares coefficient arrays and
reshapes state.

State layouts (complex128 throughout, system blocks first):

* ``general-low``     ``[T, A]``        A: one matrix per discrete mode
* ``general-high``    ``[T, A, S]``     S: one block set per discrete mode
* ``lorentzian-low``  ``[T, B]``        B: one matrix per Lorentzian peak
* ``lorentzian-high`` ``[T, B, S]``     S indexed ``[m, n, peak]``

T collects the reduced transition blocks; T[m, n] is the bath average of
the evolved ``|m><n|`` operator, stored as an (n_sites, n_sites) matrix.
"""

import numpy as np

from . import _kernels
from .blockop import initial_transition_blocks
from .model import DiscreteBath, Scenario, discretize

__all__ = [
    "GeneralLowDynamics",
    "GeneralHighDynamics",
    "LorentzianLowDynamics",
    "LorentzianHighDynamics",
    "make_dynamics",
    "resolve_discrete_bath",
    "lorentzian_peak_arrays",
]


def resolve_discrete_bath(scenario: Scenario) -> DiscreteBath:
    """Discrete modes for a scenario, sampling Lorentzian baths if needed."""
    if isinstance(scenario.bath, DiscreteBath):
        return scenario.bath
    d = scenario.discretization
    return discretize(
        scenario.bath,
        scenario.n_sites,
        delta_omega=d.delta_omega,
        omega_min=d.omega_min,
        omega_max=d.omega_max,
    )


def lorentzian_peak_arrays(scenario: Scenario):
    """Flatten per-site peaks into (centers, half_widths, root_weights, sites).

    Peak order follows the scenario bath list; the returned site array maps
    each peak back to the site it damps.
    """
    if isinstance(scenario.bath, DiscreteBath):
        raise ValueError(
            "scenario carries explicit discrete modes; Lorentzian propagation "
            "needs per-site peak parameters"
        )
    centers, widths, roots, sites = [], [], [], []
    for sb in scenario.bath:
        for p in sb.peaks:
            centers.append(p.center)
            widths.append(p.half_width)
            roots.append(np.sqrt(p.weight))
            sites.append(sb.site)
    return (
        np.asarray(centers, dtype=float),
        np.asarray(widths, dtype=float),
        np.asarray(roots, dtype=float),
        np.asarray(sites, dtype=np.int64),
    )


class _BlockDynamics:
    """Shared plumbing: system coupling matrix and transition-block views."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.n_sites = scenario.n_sites
        self.couplings = np.asarray(scenario.couplings, dtype=complex)
        # kernels contract against the transpose of the coupling matrix
        self._vt = np.ascontiguousarray(self.couplings.T)
        self._n4 = self.n_sites**4

    def transition_blocks(self, y: np.ndarray) -> np.ndarray:
        """(n, n, n, n) view of the transition blocks inside the flat state."""
        n = self.n_sites
        return y[: self._n4].reshape(n, n, n, n)

    def _new_state(self) -> np.ndarray:
        y = np.zeros(self.state_size, dtype=complex)
        y[: self._n4] = initial_transition_blocks(self.n_sites).reshape(-1)
        return y


class _GeneralDynamics(_BlockDynamics):
    """Shared setup for the discrete-mode variants."""

    def __init__(self, scenario: Scenario):
        super().__init__(scenario)
        bath = resolve_discrete_bath(scenario)
        self.frequencies = np.ascontiguousarray(bath.frequencies, dtype=float)
        self.mode_couplings = np.ascontiguousarray(bath.couplings, dtype=complex)
        self.n_modes = bath.n_modes

    def mode_amplitudes(self, y: np.ndarray) -> np.ndarray:
        """(n_modes, n, n) view of the per-mode lowering-operator blocks."""
        n = self.n_sites
        return y[self._n4 : self._n4 + self.n_modes * n * n].reshape(
            self.n_modes, n, n
        )

    def _bath_energy(self, A: np.ndarray, symmetrized: bool) -> np.ndarray:
        w = self.frequencies
        normal = np.einsum("k,kca,kcb->ab", w, A.conj(), A)
        if not symmetrized:
            return normal
        return 0.5 * (normal + np.einsum("k,kac,kbc->ab", w, A, A.conj()))

    def _coupling_fields(self, A: np.ndarray) -> np.ndarray:
        # X[n] = sum_k g_kn A_k^+ + conj(g_kn) A_k
        g = self.mode_couplings
        X = np.einsum("kn,kba->nab", g, A.conj())
        X += np.einsum("kn,kab->nab", g.conj(), A)
        return X


class GeneralLowDynamics(_GeneralDynamics):
    """Low-order propagation against explicit discrete bath modes.

    Parameters
    ----------
    scenario : Scenario
        Validated scenario; Lorentzian baths are discretized on entry.
    ordering_weight : float
        Interpolates between the two operator-product orderings in the
        dressing terms.  0.5 (default) is the symmetrized product; 0 and 1
        are the one-sided products, kept as a consistency knob.
    """

    method = "general-low"

    def __init__(self, scenario: Scenario, ordering_weight: float = 0.5):
        super().__init__(scenario)
        if not 0.0 <= ordering_weight <= 1.0:
            raise ValueError("ordering_weight must lie in [0, 1]")
        self.ordering_weight = float(ordering_weight)
        n2 = self.n_sites**2
        self.state_size = self._n4 + self.n_modes * n2

    def initial_state(self) -> np.ndarray:
        return self._new_state()

    def rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.general_low_rhs(
            y, out, self._vt, self.frequencies, self.mode_couplings,
            self.ordering_weight,
        )

    def energy_matrix(
        self,
        y: np.ndarray,
        symmetrized_bath: bool = True,
        interaction_prefactor: float = 0.5,
    ) -> np.ndarray:
        """Reduced total-energy matrix; trace against the initial state.

        The defaults (symmetrized bath product, prefactor 1/2 on the
        site-coupling anticommutator) give the combination conserved by
        the flow at ``ordering_weight = 0.5``; ``interaction_prefactor=1``
        restores the plain anticommutator form.
        """
        T = self.transition_blocks(y)
        A = self.mode_amplitudes(y)
        M = np.einsum("mn,mnab->ab", self.couplings, T)
        M += self._bath_energy(A, symmetrized_bath)
        X = self._coupling_fields(A)
        for n in range(self.n_sites):
            P = T[n, n]
            M += interaction_prefactor * (X[n] @ P + P @ X[n])
        return M

    def energy(self, y: np.ndarray, rho0: np.ndarray, **kw) -> float:
        """Total-energy expectation value in the initial state."""
        return float(np.trace(rho0 @ self.energy_matrix(y, **kw)).real)


class GeneralHighDynamics(_GeneralDynamics):
    """High-order propagation with explicit mode-transition blocks.

    Tracks, besides the transition blocks and mode amplitudes, one block
    set per mode for the product of the mode lowering operator with each
    transition operator.  The amplitudes are redundant: their identity
    with the block trace of the product set is a runtime diagnostic.
    """

    method = "general-high"

    def __init__(self, scenario: Scenario):
        super().__init__(scenario)
        n2 = self.n_sites**2
        self.state_size = self._n4 + self.n_modes * n2 + self.n_modes * n2 * n2

    def initial_state(self) -> np.ndarray:
        return self._new_state()

    def interaction_blocks(self, y: np.ndarray) -> np.ndarray:
        """(n_modes, n, n, n, n) view of the mode-transition product blocks."""
        n = self.n_sites
        start = self._n4 + self.n_modes * n * n
        return y[start:].reshape(self.n_modes, n, n, n, n)

    def rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.general_high_rhs(
            y, out, self._vt, self.frequencies, self.mode_couplings
        )

    def amplitude_defect(self, y: np.ndarray) -> float:
        """Max deviation between amplitudes and block-traced product blocks."""
        A = self.mode_amplitudes(y)
        S = self.interaction_blocks(y)
        if self.n_modes == 0:
            return 0.0
        trace = np.einsum("kmmab->kab", S)
        return float(np.abs(trace - A).max())

    def energy_matrix(
        self, y: np.ndarray, symmetrized_bath: bool = True
    ) -> np.ndarray:
        """Reduced total-energy matrix built from the product blocks.

        The interaction term uses the tracked mode-transition products
        directly, so it carries no ordering ambiguity.
        """
        T = self.transition_blocks(y)
        A = self.mode_amplitudes(y)
        S = self.interaction_blocks(y)
        M = np.einsum("mn,mnab->ab", self.couplings, T)
        M += self._bath_energy(A, symmetrized_bath)
        g = self.mode_couplings
        # sum_{k,n} g_kn (S_k[n,n])^+ + conj(g_kn) S_k[n,n]
        diag = np.einsum("knnab->knab", S)
        M += np.einsum("kn,knba->ab", g, diag.conj())
        M += np.einsum("kn,knab->ab", g.conj(), diag)
        return M

    def energy(self, y: np.ndarray, rho0: np.ndarray, **kw) -> float:
        """Total-energy expectation value in the initial state."""
        return float(np.trace(rho0 @ self.energy_matrix(y, **kw)).real)


class _LorentzianDynamics(_BlockDynamics):
    """Shared setup for the collective-amplitude variants."""

    def __init__(self, scenario: Scenario):
        super().__init__(scenario)
        centers, widths, roots, sites = lorentzian_peak_arrays(scenario)
        self.peak_centers = centers
        self.peak_half_widths = widths
        self.peak_root_weights = roots
        self.peak_sites = sites
        self.n_peaks = centers.shape[0]

    def collective_amplitudes(self, y: np.ndarray) -> np.ndarray:
        """(n_peaks, n, n) view of the collective damped-mode blocks."""
        n = self.n_sites
        return y[self._n4 : self._n4 + self.n_peaks * n * n].reshape(
            self.n_peaks, n, n
        )


class LorentzianLowDynamics(_LorentzianDynamics):
    """Low-order propagation with one damped collective mode per peak.

    The discrete-mode sums collapse into a single damped amplitude per
    Lorentzian peak, so the state size is independent of any frequency
    grid.  The resulting flow is dissipative: block traces stay exact
    while purity may decay.
    """

    method = "lorentzian-low"

    def __init__(self, scenario: Scenario):
        super().__init__(scenario)
        self.state_size = self._n4 + self.n_peaks * self.n_sites**2

    def initial_state(self) -> np.ndarray:
        return self._new_state()

    def rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.lorentzian_low_rhs(
            y, out, self._vt, self.peak_centers, self.peak_half_widths,
            self.peak_root_weights, self.peak_sites,
        )


class LorentzianHighDynamics(_LorentzianDynamics):
    """High-order propagation with per-peak transition-product blocks."""

    method = "lorentzian-high"

    def __init__(self, scenario: Scenario):
        super().__init__(scenario)
        n2 = self.n_sites**2
        self.state_size = self._n4 + self.n_peaks * n2 + n2 * self.n_peaks * n2

    def initial_state(self) -> np.ndarray:
        return self._new_state()

    def interaction_blocks(self, y: np.ndarray) -> np.ndarray:
        """(n, n, n_peaks, n, n) view of the peak-transition product blocks."""
        n = self.n_sites
        start = self._n4 + self.n_peaks * n * n
        return y[start:].reshape(n, n, self.n_peaks, n, n)

    def rhs(self, t: float, y: np.ndarray, out: np.ndarray) -> None:
        _kernels.lorentzian_high_rhs(
            y, out, self._vt, self.peak_centers, self.peak_half_widths,
            self.peak_root_weights, self.peak_sites,
        )

    def amplitude_defect(self, y: np.ndarray) -> float:
        """Max deviation between amplitudes and block-traced product blocks."""
        B = self.collective_amplitudes(y)
        S = self.interaction_blocks(y)
        if self.n_peaks == 0:
            return 0.0
        trace = np.einsum("mmpab->pab", S)
        return float(np.abs(trace - B).max())


_DYNAMICS = {
    "general-low": GeneralLowDynamics,
    "general-high": GeneralHighDynamics,
    "lorentzian-low": LorentzianLowDynamics,
    "lorentzian-high": LorentzianHighDynamics,
}


def make_dynamics(scenario: Scenario, ordering_weight: float = 0.5):
    """Instantiate the dynamics class matching ``scenario.method``.

    ``ordering_weight`` only applies to ``general-low``; passing a value
    other than 0.5 with any other method raises.
    """
    try:
        cls = _DYNAMICS[scenario.method]
    except KeyError:
        raise ValueError(
            f"no block dynamics for method {scenario.method!r}"
        ) from None
    if cls is GeneralLowDynamics:
        return cls(scenario, ordering_weight=ordering_weight)
    if ordering_weight != 0.5:
        raise ValueError(
            "ordering_weight is only adjustable for the general-low method"
        )
    return cls(scenario)
