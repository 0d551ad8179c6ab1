"""Built-in scenarios: the four benchmark baths on a 3-site chain, and a ring.

The four baths share one Lorentzian peak per site centered at unit
frequency and differ only in half width (narrow 0.1 / wide 0.5) and weight
(weak 0.3 / strong 1).  The chain couples nearest neighbours with matrix
element -1 and starts fully localized on the first site.

The 15-site ring preset fixes geometry and initial state (site index 7
excited) but has no published bath parameters, so explicit peaks are
required.
"""

import numpy as np

from .model import LorentzianPeak, Scenario, SiteBath

__all__ = ["PRESET_NAMES", "BATH_TABLE", "chain_couplings", "ring_couplings", "preset"]

# name -> (half_width, weight); peak centers all sit at 1.0
BATH_TABLE = {
    "bath-A": (0.1, 0.3),
    "bath-B": (0.1, 1.0),
    "bath-C": (0.5, 0.3),
    "bath-D": (0.5, 1.0),
}

PRESET_NAMES = ("bath-A", "bath-B", "bath-C", "bath-D", "ring-15")

PEAK_CENTER = 1.0


def chain_couplings(n_sites: int) -> np.ndarray:
    """Open-chain system matrix: -1 between nearest neighbours."""
    v = np.zeros((n_sites, n_sites), dtype=complex)
    for i in range(n_sites - 1):
        v[i, i + 1] = v[i + 1, i] = -1.0
    return v


def ring_couplings(n_sites: int) -> np.ndarray:
    """Closed-ring system matrix: the chain plus the wrap-around bond."""
    v = chain_couplings(n_sites)
    v[0, n_sites - 1] = v[n_sites - 1, 0] = -1.0
    return v


def _uniform_bath(n_sites, peaks) -> tuple[SiteBath, ...]:
    return tuple(SiteBath(site=s, peaks=tuple(peaks)) for s in range(n_sites))


def preset(name: str, method: str = "lorentzian-low", peaks=None) -> Scenario:
    """Named scenario, ready to run.

    Parameters
    ----------
    name : str
        One of ``PRESET_NAMES``.
    method : str
        Propagation method to embed in the scenario.
    peaks : sequence of LorentzianPeak, optional
        Required for ``ring-15`` (no published bath there); ignored
        otherwise.

    Raises
    ------
    ValueError
        Unknown name, or ``ring-15`` without explicit peaks.
    """
    if name in BATH_TABLE:
        half_width, weight = BATH_TABLE[name]
        n = 3
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
        bath = _uniform_bath(
            n,
            [LorentzianPeak(weight=weight, half_width=half_width, center=PEAK_CENTER)],
        )
        return Scenario(
            n_sites=n,
            couplings=chain_couplings(n),
            bath=bath,
            initial_state=psi,
            method=method,
            name=name,
        )
    if name == "ring-15":
        if not peaks:
            raise ValueError(
                "ring-15 has no built-in bath; pass explicit Lorentzian peaks"
            )
        n = 15
        psi = np.zeros(n, dtype=complex)
        psi[7] = 1.0
        return Scenario(
            n_sites=n,
            couplings=ring_couplings(n),
            bath=_uniform_bath(n, peaks),
            initial_state=psi,
            method=method,
            name=name,
        )
    raise ValueError(f"unknown preset {name!r}, expected one of {PRESET_NAMES}")
