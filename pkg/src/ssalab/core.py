"""Basic SSA pipeline: embedding, decomposition, grouping, diagonal averaging.

The trajectory matrix of a series f_0..f_{N-1} with window L is the L x K
Hankel matrix (K = N - L + 1) whose column j is (f_j, ..., f_{j+L-1}).
Decomposition is either the plain SVD of that matrix ("basic") or the
eigendecomposition of the lag-autocovariance Toeplitz matrix ("toeplitz",
the variant intended for stationary series).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel, toeplitz
from scipy.signal import fftconvolve
from scipy.sparse.linalg import ArpackError, LinearOperator, eigsh

from .errors import (
    DecompositionFailed,
    IndexOutOfRange,
    WindowOutOfRange,
    ZeroResidual,
)

DEFAULT_SIGMA_CUTOFF = 1e-12


def as_series(values) -> np.ndarray:
    """Validate and return a time series as a 1-D float array.

    Requires length >= 3 and all values finite.
    """
    f = np.asarray(values, dtype=float)
    if f.ndim != 1:
        raise ValueError(f"time series must be one-dimensional, got shape {f.shape}")
    if f.size < 3:
        raise ValueError(f"time series must have length >= 3, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise ValueError("time series contains NaN or infinite values")
    return f


def embed(series, L: int) -> np.ndarray:
    """Build the L x K trajectory (Hankel) matrix of lagged windows."""
    f = as_series(series)
    n = f.size
    if not 2 <= L <= n - 1:
        raise WindowOutOfRange(f"window length must satisfy 2 <= L <= N-1 (L={L}, N={n})")
    return hankel(f[:L], f[L - 1:])


@dataclass(frozen=True)
class Eigentriple:
    """One (singular value, left vector, right vector) term of a decomposition."""

    sigma: float
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class EigentripleSet:
    """Ordered eigentriples with their provenance.

    For method "basic" these are the SVD triples of the trajectory matrix.
    For method "toeplitz" the u_i are orthonormal eigenvectors of the lag
    autocovariance matrix, sigma_i = ||X^T u_i|| and v_i = X^T u_i / sigma_i;
    that is not an SVD and the v_i need not be orthogonal.
    """

    sigmas: np.ndarray  # (d,) nonincreasing
    u: np.ndarray  # (L, d)
    v: np.ndarray  # (K, d)
    method: str  # "basic" | "toeplitz"
    L: int
    K: int

    @property
    def count(self) -> int:
        return int(self.sigmas.size)

    @property
    def triples(self) -> list[Eigentriple]:
        return [
            Eigentriple(float(self.sigmas[i]), self.u[:, i], self.v[:, i])
            for i in range(self.count)
        ]


def _fix_signs(U: np.ndarray, V: np.ndarray) -> None:
    """Flip each column pair so the largest-|entry| coordinate of u is positive."""
    if U.size == 0:
        return
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[idx, np.arange(U.shape[1])] < 0, -1.0, 1.0)
    U *= signs
    V *= signs


def decompose(X: np.ndarray, rel_cutoff: float = DEFAULT_SIGMA_CUTOFF) -> EigentripleSet:
    """SVD of a trajectory matrix, keeping triples with sigma > rel_cutoff * sigma_1.

    Columns are sign-normalized so outputs are reproducible across runs and
    backends; sigmas come out nonincreasing.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or min(X.shape) < 1:
        raise ValueError(f"trajectory matrix must be 2-D and nonempty, got shape {X.shape}")
    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailed(f"SVD backend failed: {exc}") from exc
    V = Vt.T
    keep = s > (rel_cutoff * s[0] if s.size else 0.0)
    d = int(np.count_nonzero(keep))
    U, s, V = U[:, :d].copy(), s[:d].copy(), V[:, :d].copy()
    _fix_signs(U, V)
    return EigentripleSet(sigmas=s, u=U, v=V, method="basic", L=X.shape[0], K=X.shape[1])


def lag_covariance_matrix(series, L: int) -> np.ndarray:
    """Toeplitz matrix of averaged lag products, entry(i,j) depending on |i-j|."""
    f = as_series(series)
    n = f.size
    if not 2 <= L <= n - 1:
        raise WindowOutOfRange(f"window length must satisfy 2 <= L <= N-1 (L={L}, N={n})")
    # full correlation gives sum_m f_m f_{m+k} at offset N-1+k
    acov = np.correlate(f, f, mode="full")[n - 1:n - 1 + L]
    first_row = acov / (n - np.arange(L))
    return toeplitz(first_row)


def decompose_toeplitz(
    series, L: int, rel_cutoff: float = DEFAULT_SIGMA_CUTOFF
) -> EigentripleSet:
    """Toeplitz-variant decomposition for stationary series.

    Eigenvectors of the lag covariance matrix play the role of the left
    vectors; they are ordered by sigma_i = ||X^T u_i|| nonincreasing. This
    deliberately is not the SVD of the trajectory matrix.
    """
    f = as_series(series)
    C = lag_covariance_matrix(f, L)
    X = embed(f, L)
    try:
        _, U = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailed(f"eigendecomposition failed: {exc}") from exc
    proj = X.T @ U  # (K, L)
    sigmas = np.linalg.norm(proj, axis=0)
    order = np.argsort(-sigmas, kind="stable")
    sigmas = sigmas[order]
    U = U[:, order]
    proj = proj[:, order]
    keep = sigmas > (rel_cutoff * sigmas[0] if sigmas.size else 0.0)
    d = int(np.count_nonzero(keep))
    U, sigmas, proj = U[:, :d].copy(), sigmas[:d].copy(), proj[:, :d]
    V = proj / sigmas
    _fix_signs(U, V)
    return EigentripleSet(sigmas=sigmas, u=U, v=V, method="toeplitz", L=X.shape[0], K=X.shape[1])


def _check_indices(ets: EigentripleSet, indices) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=int)
    if idx.size and (idx.min() < 1 or idx.max() > ets.count):
        raise IndexOutOfRange(
            f"eigentriple indices must lie in 1..{ets.count}, got {idx.tolist()}"
        )
    return idx


def group_matrix(ets: EigentripleSet, indices) -> np.ndarray:
    """Sum of the selected rank-one terms sigma_i u_i v_i^T (1-based indices)."""
    idx = _check_indices(ets, indices)
    if idx.size == 0:
        return np.zeros((ets.L, ets.K))
    cols = idx - 1
    return (ets.u[:, cols] * ets.sigmas[cols]) @ ets.v[:, cols].T


def diagonal_counts(L: int, K: int) -> np.ndarray:
    """Number of matrix entries on each antidiagonal i + j = const."""
    return np.convolve(np.ones(L), np.ones(K))


def hankelize(M: np.ndarray) -> np.ndarray:
    """Average a matrix along its antidiagonals, producing a series of length L+K-1."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or min(M.shape) < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {M.shape}")
    L, K = M.shape
    idx = np.add.outer(np.arange(L), np.arange(K)).ravel()
    sums = np.bincount(idx, weights=M.ravel(), minlength=L + K - 1)
    return sums / diagonal_counts(L, K)


def reconstruct(series, L: int, indices, method: str = "basic") -> np.ndarray:
    """embed -> decompose -> group -> diagonal averaging, in one call.

    `indices` selects eigentriples (1-based). `method` picks the basic SVD
    or the Toeplitz variant.
    """
    f = as_series(series)
    if method == "basic":
        ets = decompose(embed(f, L))
    elif method == "toeplitz":
        ets = decompose_toeplitz(f, L)
    else:
        raise ValueError(f"method must be 'basic' or 'toeplitz', got {method!r}")
    return hankelize(group_matrix(ets, indices))


def center(series) -> tuple[np.ndarray, float]:
    """Subtract the series mean; returns (centered series, mean)."""
    f = as_series(series)
    mean = float(f.mean())
    return f - mean, mean


def snr(signal, residual) -> float:
    """Mean squared signal over mean squared residual."""
    s = np.asarray(signal, dtype=float)
    r = np.asarray(residual, dtype=float)
    if s.shape != r.shape:
        raise ValueError(f"signal and residual lengths differ: {s.shape} vs {r.shape}")
    denom = float(np.mean(r**2))
    if denom == 0.0:
        raise ZeroResidual("residual is identically zero, SNR undefined")
    return float(np.mean(s**2)) / denom


# -- fast truncated decomposition -------------------------------------------
#
# The Monte-Carlo experiments decompose thousands of trajectory matrices where
# only the leading block is needed. Hankel structure makes X v and X^T u
# plain correlations, so the Gram operator X X^T can be applied through FFTs
# and fed to a Lanczos solver. Results must agree with `decompose` to within
# eigenvector conditioning; tests check that on random inputs.

_LANCZOS_MIN_SIDE = 96


def _corr(f: np.ndarray, v: np.ndarray) -> np.ndarray:
    # output[i] = sum_q f[i+q] v[q], length len(f) - len(v) + 1
    return fftconvolve(f, v[::-1], mode="valid")


@dataclass(frozen=True)
class LeadingTriples:
    """Leading block of a basic decomposition (sigmas nonincreasing)."""

    sigmas: np.ndarray  # (r,)
    u: np.ndarray  # (L, r)
    v: np.ndarray  # (K, r)
    L: int
    K: int


def leading_triples(series, L: int, rank: int) -> LeadingTriples:
    """Leading `rank` eigentriples of the basic decomposition of a series.

    Equivalent to decompose(embed(series, L)) truncated to `rank` terms, but
    computed with an FFT-based Lanczos iteration when the matrix is large.
    """
    f = as_series(series)
    n = f.size
    if not 2 <= L <= n - 1:
        raise WindowOutOfRange(f"window length must satisfy 2 <= L <= N-1 (L={L}, N={n})")
    K = n - L + 1
    rank = int(rank)
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    wide = L > K  # work on the smaller Gram side, transpose back at the end
    m = min(L, K)
    if rank > m:
        raise ValueError(f"rank {rank} exceeds min(L, K) = {m}")

    use_lanczos = m >= _LANCZOS_MIN_SIDE and rank <= m // 4
    if use_lanczos:
        def matvec(x):
            x = np.asarray(x, dtype=float).ravel()
            return _corr(f, _corr(f, x))

        op = LinearOperator((m, m), matvec=matvec, dtype=float)
        v0 = np.full(m, 1.0 / np.sqrt(m))
        try:
            lam, W = eigsh(op, k=rank, which="LA", v0=v0, tol=0)
        except ArpackError:
            use_lanczos = False
        else:
            order = np.argsort(lam)[::-1]
            lam = lam[order]
            W = W[:, order]
            sig = np.sqrt(np.maximum(lam, 0.0))
            other = np.column_stack([_corr(f, W[:, i]) for i in range(rank)])
            with np.errstate(divide="ignore", invalid="ignore"):
                other = np.where(sig > 0, other / sig, 0.0)
    if not use_lanczos:
        X = embed(f, L)
        G = X if not wide else X.T
        U, s, Vt = np.linalg.svd(G, full_matrices=False)
        sig = s[:rank].copy()
        W = U[:, :rank].copy()
        other = Vt[:rank].T.copy()

    if wide:
        U_out, V_out = other, W
    else:
        U_out, V_out = W, other
    U_out = np.ascontiguousarray(U_out)
    V_out = np.ascontiguousarray(V_out)
    _fix_signs(U_out, V_out)
    return LeadingTriples(sigmas=sig, u=U_out, v=V_out, L=L, K=K)


def rank_reconstruction(t: LeadingTriples, indices=None) -> np.ndarray:
    """Diagonal-averaged series from a leading-triples block.

    `indices` selects triples (1-based) within the block; default is all.
    """
    counts = diagonal_counts(t.L, t.K)
    total = np.zeros(t.L + t.K - 1)
    cols = range(t.sigmas.size) if indices is None else [int(i) - 1 for i in indices]
    for i in cols:
        if not 0 <= i < t.sigmas.size:
            raise IndexOutOfRange(f"triple index {i + 1} outside 1..{t.sigmas.size}")
        total += t.sigmas[i] * fftconvolve(t.u[:, i], t.v[:, i])
    return total / counts
