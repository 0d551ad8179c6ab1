"""Block operator matrices for reduced Heisenberg-picture dynamics.

The reduced representation of the transition-operator family is stored as
one N x N complex matrix per ordered pair of system basis states.  The
whole collection lives in a single contiguous rank-4 ndarray of shape
(N, N, N, N), indexed as ``t[m, n, row, col]``: the first two axes select
the block, the last two address entries inside the block.

Scalar-coefficient matrices (plain (N, N) arrays) act on the block
indices; system operators (also (N, N) arrays) act inside each block.
All public indices are 0-based.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "initial_transition_blocks",
    "block_commutator",
    "diag_coupling_commutator",
    "blockwise_anticommutator",
    "block_square",
    "block_trace",
    "block_adjoint",
    "hermitian_block_defect",
    "check_blocks",
]


def initial_transition_blocks(n_sites: int) -> np.ndarray:
    """Blocks of the transition family at time zero.

    Block (m, n) is the matrix unit with a single 1 at row m, column n,
    so block products satisfy the same algebra as the underlying
    transition operators.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be positive")
    return np.eye(n_sites * n_sites, dtype=complex).reshape(
        n_sites, n_sites, n_sites, n_sites
    )


def check_blocks(t: np.ndarray) -> np.ndarray:
    """Validate shape, dtype and finiteness of a block array."""
    t = np.asarray(t)
    if t.ndim != 4 or len(set(t.shape)) != 1:
        raise ValueError(f"expected shape (N, N, N, N), got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("block array contains non-finite entries")
    return np.ascontiguousarray(t, dtype=complex)


def block_commutator(a: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Commutator of a scalar-coefficient matrix with a block array.

    Entry (m, n) is ``sum_k a[m, k] t[k, n] - t[m, k] a[k, n]`` with the
    scalar coefficients multiplying whole blocks.
    """
    left = np.einsum("mk,knab->mnab", a, t)
    right = np.einsum("kn,mkab->mnab", a, t)
    return left - right


def diag_coupling_commutator(g: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Commutator with a diagonal scalar-coefficient matrix.

    For a diagonal coefficient vector g the commutator reduces to the
    entrywise weight (g[m] - g[n]) on block (m, n).
    """
    g = np.asarray(g, dtype=complex)
    w = g[:, None] - g[None, :]
    return w[:, :, None, None] * t


def blockwise_anticommutator(t: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Anticommutator of each block with a single system operator a."""
    return t @ a + a[None, None] @ t


def block_square(t: np.ndarray) -> np.ndarray:
    """Block-matrix square: entry (m, n) is ``sum_k t[m, k] t[k, n]``."""
    return np.einsum("mkab,knbc->mnac", t, t)


def block_trace(t: np.ndarray) -> np.ndarray:
    """Sum of the diagonal blocks (an N x N system operator)."""
    return np.einsum("nnab->ab", t)


def block_adjoint(t: np.ndarray) -> np.ndarray:
    """Adjoint in the block sense: block (m, n) is ``t[n, m]^dagger``."""
    return t.transpose(1, 0, 3, 2).conj()


def hermitian_block_defect(t: np.ndarray) -> float:
    """Max-abs deviation from the Hermitian block structure."""
    return float(np.abs(t - block_adjoint(t)).max())
