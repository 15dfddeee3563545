"""Subspace parameter estimation: ESPRIT, Min-Norm/MUSIC pseudospectra, root methods.

All estimators consume a basis of the estimated signal subspace (or its
orthogonal complement) and produce poles or pseudospectrum peaks; converting
poles to per-sample frequency and damping lives here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyNoiseBasis,
    FewerPeaksThanRequested,
    NonpositiveEigenvalue,
    RankDeficientShift,
    TlsDegenerate,
    TooFewRoots,
    VerticalSubspace,
    ZeroPole,
)
from .forecast import LinearRecurrence, PoleSet, characteristic_roots
from .subspace import basis_matrix

DEFAULT_GRIDSIZE = 2048
UNIT_CIRCLE_SLACK = 1e-9
ROOT_DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class ShiftMatrixEstimate:
    """Estimated r x r shift matrix; its eigenvalues are the pole estimates."""

    matrix: np.ndarray
    method: str  # "ls" | "tls"

    def poles(self) -> PoleSet:
        return PoleSet.from_roots(np.linalg.eigvals(self.matrix))


def esprit_ls(B) -> ShiftMatrixEstimate:
    """Least-squares solution of the shift-invariance system.

    Works for any full-column-rank basis of the signal subspace; the
    eigenvalues are invariant under nonsingular changes of that basis.
    """
    M = basis_matrix(B)
    L, r = M.shape
    if L < r + 1:
        raise RankDeficientShift(f"need L >= r + 1 rows, got L={L}, r={r}")
    upper, lower = M[:-1], M[1:]
    D, _, rank, _ = np.linalg.lstsq(upper, lower, rcond=None)
    if rank < r:
        raise RankDeficientShift(f"shift system rank {rank} < r = {r}")
    return ShiftMatrixEstimate(matrix=D, method="ls")


def esprit_tls(B) -> ShiftMatrixEstimate:
    """Total-least-squares solution of the shift-invariance system.

    Errors in both the shifted and unshifted blocks are minimized jointly:
    take the SVD of the stacked block [upper | lower], partition the right
    singular matrix into r x r blocks and return -V12 V22^{-1}. Invariant
    under orthogonal (not general nonsingular) basis changes.
    """
    M = basis_matrix(B)
    L, r = M.shape
    if L < r + 1:
        raise RankDeficientShift(f"need L >= r + 1 rows, got L={L}, r={r}")
    stacked = np.hstack([M[:-1], M[1:]])
    _, _, Vt = np.linalg.svd(stacked, full_matrices=True)
    V = Vt.T
    V12 = V[:r, r:]
    V22 = V[r:, r:]
    if np.linalg.cond(V22) > 1e12:
        raise TlsDegenerate("TLS block V22 is numerically singular")
    Z = -np.linalg.solve(V22.T, V12.T).T
    return ShiftMatrixEstimate(matrix=Z, method="tls")


@dataclass(frozen=True)
class ParamEstimates:
    """Per-pole frequency (cycles/sample, in [0, 0.5]), damping ln|mu|, and |mu|."""

    frequencies: np.ndarray
    dampings: np.ndarray
    moduli: np.ndarray


def poles_to_params(ps: PoleSet) -> ParamEstimates:
    """Convert poles to (frequency, damping, modulus) rows, sorted by frequency."""
    p = ps.poles
    if np.any(p == 0):
        raise ZeroPole("cannot convert a zero pole to frequency and damping")
    freq = np.abs(np.angle(p)) / (2.0 * np.pi)
    modulus = np.abs(p)
    damping = np.log(modulus)
    order = np.lexsort((modulus, damping, freq))
    return ParamEstimates(
        frequencies=freq[order], dampings=damping[order], moduli=modulus[order]
    )


def pair_frequencies(ps: PoleSet, tol: float = 1e-9) -> np.ndarray:
    """Nonnegative frequencies with conjugate partners collapsed, sorted ascending."""
    freqs = []
    used = np.zeros(ps.poles.size, dtype=bool)
    for i, z in enumerate(ps.poles):
        if used[i]:
            continue
        used[i] = True
        partners = np.where(~used & (np.abs(ps.poles - z.conjugate()) <= tol))[0]
        if partners.size:
            used[partners[0]] = True
        freqs.append(abs(np.angle(z)) / (2.0 * np.pi))
    return np.sort(np.asarray(freqs))


@dataclass(frozen=True)
class Pseudospectrum:
    """Reciprocal alignment 1/f(omega) on a frequency grid."""

    omegas: np.ndarray
    values: np.ndarray
    method: str  # "minnorm" | "music" | "ev"


def _steering_products(vectors: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """Inner products of the complex steering vector with each column, per omega."""
    L = vectors.shape[0]
    E = np.exp(2j * np.pi * np.outer(omegas, np.arange(L)))
    return E @ vectors


def minnorm_vector(B) -> np.ndarray:
    """Projection of the last coordinate axis onto the orthogonal complement."""
    M = basis_matrix(B)
    a = -M @ M[-1, :]
    a[-1] += 1.0
    nu2 = 1.0 - float(a[-1])
    if nu2 >= 1.0 - 1e-10:
        raise VerticalSubspace(f"subspace is vertical (nu2 = {nu2:.3g}); no min-norm vector")
    return a


def minnorm_alignment(B, omegas) -> np.ndarray:
    """Squared cosine between the steering vector and the min-norm vector."""
    a = minnorm_vector(B)
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    G = _steering_products(a[:, None], om)[:, 0]
    L = a.size
    return np.abs(G) ** 2 / (L * float(a @ a))


def music_alignment(noise_basis, omegas, eigenvalues=None) -> np.ndarray:
    """Sum of squared cosines against noise-basis columns, optionally 1/lambda weighted."""
    U = np.asarray(noise_basis, dtype=float)
    if U.ndim != 2 or U.shape[1] < 1:
        raise EmptyNoiseBasis("noise basis must have at least one column")
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    G = _steering_products(U, om)
    per_vector = np.abs(G) ** 2 / U.shape[0]
    if eigenvalues is None:
        return per_vector.sum(axis=1)
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.shape != (U.shape[1],):
        raise ValueError(f"need one eigenvalue per noise vector, got {lam.shape}")
    if np.any(lam <= 0):
        raise NonpositiveEigenvalue("EV weighting requires strictly positive eigenvalues")
    return per_vector @ (1.0 / lam)


def _grid(gridsize: int) -> np.ndarray:
    if gridsize < 2:
        raise ValueError(f"gridsize must be >= 2, got {gridsize}")
    return np.linspace(0.0, 0.5, int(gridsize))


def pseudospectrum_minnorm(B, gridsize: int = DEFAULT_GRIDSIZE) -> Pseudospectrum:
    """Min-norm pseudospectrum: peaks of 1/f mark the signal frequencies."""
    om = _grid(gridsize)
    f = minnorm_alignment(B, om)
    with np.errstate(divide="ignore"):
        return Pseudospectrum(omegas=om, values=1.0 / f, method="minnorm")


def pseudospectrum_music(
    noise_basis, gridsize: int = DEFAULT_GRIDSIZE, eigenvalues=None
) -> Pseudospectrum:
    """MUSIC pseudospectrum; pass noise-space eigenvalues for the EV weighting."""
    om = _grid(gridsize)
    f = music_alignment(noise_basis, om, eigenvalues=eigenvalues)
    with np.errstate(divide="ignore"):
        return Pseudospectrum(
            omegas=om, values=1.0 / f, method="music" if eigenvalues is None else "ev"
        )


def _closest_to_circle(candidates: np.ndarray, r: int, what: str) -> PoleSet:
    if candidates.size < r:
        raise TooFewRoots(f"only {candidates.size} {what} candidates for r = {r}")
    key = sorted(
        range(candidates.size),
        key=lambda i: (
            abs(1.0 - abs(candidates[i])),
            -abs(candidates[i]),
            abs(np.angle(candidates[i])),
            np.angle(candidates[i]),
        ),
    )
    chosen = candidates[key[:r]]
    return PoleSet(chosen)


def root_music_polynomial(noise_basis) -> np.ndarray:
    """Ascending coefficients of z^{L-1} (Z(1/z)^T P Z(z)) with P the noise projector.

    The polynomial is conjugate-reciprocal, so its roots come in (z, 1/conj(z))
    pairs; coefficient k is the k-th diagonal sum of the projector, i.e. the
    lag correlation of the noise-basis columns.
    """
    U = np.asarray(noise_basis, dtype=float)
    if U.ndim != 2 or U.shape[1] < 1:
        raise EmptyNoiseBasis("noise basis must have at least one column")
    L = U.shape[0]
    C = U @ U.T
    return np.array([np.trace(C, offset=k) for k in range(-(L - 1), L)])


def root_music(noise_basis, r: int) -> PoleSet:
    """Roots of the MUSIC polynomial on or inside the unit circle, r closest to it.

    Double roots on the circle split under rounding into a reciprocal pair;
    a small slack plus near-duplicate merging keeps exactly one candidate per
    pair. Ties break toward larger modulus, then smaller frequency.
    """
    coeffs = root_music_polynomial(noise_basis)
    roots = np.roots(coeffs[::-1])
    inside = roots[np.abs(roots) <= 1.0 + UNIT_CIRCLE_SLACK]
    merged = PoleSet.from_roots(inside, merge_tol=ROOT_DEDUP_TOL).poles
    return _closest_to_circle(merged, int(r), "unit-circle root")


def root_min_norm(lrf: LinearRecurrence, r: int) -> PoleSet:
    """The r characteristic roots of a recurrence closest to the unit circle."""
    ps = characteristic_roots(lrf)
    expanded = np.repeat(ps.poles, ps.multiplicities)
    return _closest_to_circle(expanded, int(r), "characteristic root")


def pooled_roots(complement_vectors) -> PoleSet:
    """Pool characteristic roots of recurrences read off complement vectors.

    Each vector with a nonzero last coordinate is rescaled to end in -1 and
    interpreted as recurrence coefficients. Signal roots recur across vectors
    while extraneous ones scatter; no clustering is applied here, the pooled
    set is exposed as experimental raw material.
    """
    all_roots = []
    for vec in complement_vectors:
        a = np.asarray(vec, dtype=float).ravel()
        if a.size < 2 or a[-1] == 0:
            raise ValueError("complement vectors need length >= 2 and nonzero last coordinate")
        coeffs = (-a / a[-1])[:-1]
        ps = characteristic_roots(LinearRecurrence(coeffs=coeffs))
        all_roots.append(np.repeat(ps.poles, ps.multiplicities))
    if not all_roots:
        raise ValueError("need at least one complement vector")
    return PoleSet(np.concatenate(all_roots))


def find_peaks(ps: Pseudospectrum, count: int) -> np.ndarray:
    """Frequencies of the top interior maxima, parabolic-refined, sorted ascending.

    Refinement fits a parabola to the log-values over the 3-point
    neighborhood; it falls back to the grid point when a neighbor is infinite
    or the curvature degenerates.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    v = np.asarray(ps.values, dtype=float)
    om = np.asarray(ps.omegas, dtype=float)
    interior = np.arange(1, v.size - 1)
    is_max = (v[interior] > v[interior - 1]) & (v[interior] > v[interior + 1])
    peaks = interior[is_max]
    if peaks.size < count:
        raise FewerPeaksThanRequested(
            f"found {peaks.size} interior maxima, {count} requested"
        )
    order = sorted(peaks.tolist(), key=lambda i: (-v[i], om[i]))
    chosen = order[:count]
    refined = []
    for i in chosen:
        with np.errstate(divide="ignore"):
            y0, y1, y2 = np.log(v[i - 1]), np.log(v[i]), np.log(v[i + 1])
        denom = y0 - 2.0 * y1 + y2
        delta = 0.5 * (y0 - y2) / denom if np.isfinite(denom) and denom != 0 else 0.0
        if not np.isfinite(delta) or abs(delta) > 1.0:
            delta = 0.0
        step = om[i + 1] - om[i]
        refined.append(om[i] + delta * step)
    return np.sort(np.asarray(refined))
