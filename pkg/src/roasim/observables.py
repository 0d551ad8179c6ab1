"""Density-matrix reconstruction and scalar diagnostics from state snapshots.

Two reconstructions are available.  The trace form contracts the initial
state directly against the transition blocks; its trace is conserved but
eigenvalues may go slightly negative.  The positive form contracts against
the block square, which has Gram structure and therefore stays positive
semidefinite, at the cost of needing an explicit normalization.

Index convention: row = bra index, so the array equals the initial density
matrix at t = 0 and matches the ordinary Schroedinger-picture matrix for a
closed system.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blockop import block_square, block_trace

__all__ = [
    "ObservableRecord",
    "density_matrix_positive",
    "density_matrix_trace_form",
    "purity",
    "trace_residual",
    "observe",
]


def density_matrix_trace_form(T: np.ndarray, rho0: np.ndarray) -> np.ndarray:
    """Trace-conserving reduced density matrix.

    rho[n, m] = tr(rho0 @ T[m, n]); positivity is not guaranteed, which
    makes this the diagnostic form.
    """
    raw = np.einsum("ab,mnba->mn", rho0, T)
    return raw.T.copy()


def density_matrix_positive(T: np.ndarray, rho0: np.ndarray) -> np.ndarray:
    """Positive-semidefinite reduced density matrix, normalized to unit trace.

    rho[n, m] = tr(rho0 @ block_square(T)[m, n]) / sum of the diagonal
    contractions.  The block square gives the matrix Gram structure, so
    eigenvalues stay nonnegative up to roundoff; the trace is restored by
    the normalization.

    Raises
    ------
    ValueError
        If the normalization denominator is not positive (degenerate
        state; the run cannot be continued meaningfully).
    """
    raw = np.einsum("ab,mnba->mn", rho0, block_square(T))
    denom = np.trace(raw)
    if not denom.real > 1e-12:
        raise ValueError(
            f"density-matrix normalization denominator {denom:.3e} is not "
            "positive; state is degenerate"
        )
    return raw.T / denom


def purity(rho: np.ndarray) -> float:
    """tr(rho^2); 1 for pure states, 1/N for the maximally mixed state."""
    return float(np.einsum("mn,nm->", rho, rho).real)


def trace_residual(T: np.ndarray) -> float:
    """Max-abs deviation of the block trace from the identity.

    Zero for the exact flow; any residual is integrator error.
    """
    n = T.shape[0]
    return float(np.abs(block_trace(T) - np.eye(n)).max())


@dataclass(frozen=True)
class ObservableRecord:
    """Sampled diagnostics at one trajectory time."""

    time: float
    rho: np.ndarray
    purity: float
    trace_residual: float
    energy: Optional[float] = None


def observe(
    time: float,
    T: np.ndarray,
    rho0: np.ndarray,
    energy: Optional[float] = None,
    rho_form: str = "positive",
) -> ObservableRecord:
    """Build the per-sample record from a transition-block snapshot."""
    if rho_form == "positive":
        rho = density_matrix_positive(T, rho0)
    elif rho_form == "trace":
        rho = density_matrix_trace_form(T, rho0)
    else:
        raise ValueError(f"unknown density-matrix form {rho_form!r}")
    return ObservableRecord(
        time=time,
        rho=rho,
        purity=purity(rho),
        trace_residual=trace_residual(T),
        energy=energy,
    )
