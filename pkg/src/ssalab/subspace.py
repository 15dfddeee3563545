"""Signal-subspace bases, projectors, and the largest-principal-angle distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .core import EigentripleSet, LeadingTriples
from .errors import DimensionMismatch, RankTooLarge

ORTHONORMALITY_TOL = 1e-10
PROJECTOR_MATERIALIZE_LIMIT = 4096


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning an r-dimensional subspace of R^L."""

    columns: np.ndarray  # (L, r)

    def __post_init__(self):
        B = np.asarray(self.columns, dtype=float)
        if B.ndim != 2:
            raise ValueError(f"basis must be a 2-D array, got shape {B.shape}")
        L, r = B.shape
        if not 1 <= r < L:
            raise ValueError(f"need 1 <= r < L, got r={r}, L={L}")
        gram = B.T @ B
        if np.max(np.abs(gram - np.eye(r))) > ORTHONORMALITY_TOL:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "columns", B)

    @property
    def L(self) -> int:
        return self.columns.shape[0]

    @property
    def r(self) -> int:
        return self.columns.shape[1]


def basis_matrix(B) -> np.ndarray:
    """Accept a SubspaceBasis or a plain (L, r) array and return the array."""
    if isinstance(B, SubspaceBasis):
        return B.columns
    M = np.asarray(B, dtype=float)
    if M.ndim != 2 or not 1 <= M.shape[1] < M.shape[0]:
        raise ValueError(f"expected an L x r matrix with 1 <= r < L, got shape {M.shape}")
    return M


def signal_basis(ets: EigentripleSet | LeadingTriples, r: int) -> SubspaceBasis:
    """Basis of the estimated signal subspace: the r leading left vectors."""
    d = ets.sigmas.size
    if not 1 <= r <= d:
        raise RankTooLarge(f"rank r={r} outside 1..{d} retained triples")
    return SubspaceBasis(ets.u[:, :r].copy())


def projector(B) -> np.ndarray:
    """Orthogonal projector B B^T onto the spanned subspace."""
    M = basis_matrix(B)
    return M @ M.T


def noise_complement(B) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(B) in R^L."""
    M = basis_matrix(B)
    comp = null_space(M.T)
    if comp.shape[1] != M.shape[0] - M.shape[1]:
        raise RankTooLarge("basis does not have full column rank")
    return comp


def subspace_distance(A, B) -> float:
    """Spectral norm of the projector difference: sine of the largest principal angle.

    Equal to sqrt(1 - sigma_min(A^T B)^2), but evaluated as the largest
    singular value of (I - A A^T) B: the two agree exactly in real
    arithmetic, and the complement form avoids the cancellation that floors
    the sigma-min form near sqrt(eps) when the subspaces coincide. Always in
    [0, 1].
    """
    MA, MB = basis_matrix(A), basis_matrix(B)
    if MA.shape != MB.shape:
        raise DimensionMismatch(f"bases have different shapes: {MA.shape} vs {MB.shape}")
    residual = MB - MA @ (MA.T @ MB)
    s = np.linalg.svd(residual, compute_uv=False)
    return float(min(s[0], 1.0))


def subspace_distance_sigma_min(A, B) -> float:
    """The sqrt(1 - sigma_min^2) form of the same distance.

    Kept as an independent route for cross-checks; near-coincident subspaces
    bottom out around sqrt(eps) here, so prefer `subspace_distance`.
    """
    MA, MB = basis_matrix(A), basis_matrix(B)
    if MA.shape != MB.shape:
        raise DimensionMismatch(f"bases have different shapes: {MA.shape} vs {MB.shape}")
    s = np.linalg.svd(MA.T @ MB, compute_uv=False)
    smin = min(s[-1], 1.0)
    return float(np.sqrt(max(0.0, 1.0 - smin * smin)))


def projector_distance(A, B) -> float:
    """Distance via the explicit projector difference (dense oracle route).

    Only available for L <= PROJECTOR_MATERIALIZE_LIMIT; above that the
    sigma-min formula in `subspace_distance` is the one to use.
    """
    MA, MB = basis_matrix(A), basis_matrix(B)
    if MA.shape != MB.shape:
        raise DimensionMismatch(f"bases have different shapes: {MA.shape} vs {MB.shape}")
    L = MA.shape[0]
    if L > PROJECTOR_MATERIALIZE_LIMIT:
        raise ValueError(
            f"refusing to materialize an {L} x {L} projector "
            f"(limit {PROJECTOR_MATERIALIZE_LIMIT}); use subspace_distance"
        )
    D = MA @ MA.T - MB @ MB.T
    eigs = np.linalg.eigvalsh(D)
    return float(np.max(np.abs(eigs)))
