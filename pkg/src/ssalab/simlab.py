"""Monte-Carlo error laboratory: error-vs-window surfaces, convergence ratios,
the closed-form variance of reconstruction errors, and the forecast error split.

Reproducibility contract: replication i of an experiment draws from a
generator seeded with hash64(master_seed, experiment_id, i). Replications are
independent tasks writing to pre-assigned slots, so results are identical for
any worker count. The pool size is min(cpu count, SSA_LAB_THREADS) unless a
call asks for fewer.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import toeplitz

from .core import embed, leading_triples, rank_reconstruction
from .errors import InvalidSpec, OutOfDomain, VerticalSubspace
from .estimate import esprit_ls, pair_frequencies
from .forecast import min_norm_lrf
from .signals import (
    SignalSpec,
    exact_basis,
    exact_rank,
    gen_series,
    signal_values,
    true_frequencies,
)
from .subspace import subspace_distance

FUNCTIONALS = (
    "projector",
    "reconstruction",
    "reconstruction-last-10",
    "forecast-1-step",
    "frequency",
    "base",
)
_FUNCTIONAL_ALIASES = {"damping": "base", "damping/base": "base"}

WINDOW_POLICIES = ("r+1", "20", "25", "half-5", "half")

EXACT_SEPARABILITY_RMSE = 1e-10

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash64(*parts) -> int:
    """Stable 64-bit mix of integers and strings, platform independent."""
    h = 0x243F6A8885A308D3
    for part in parts:
        if isinstance(part, str):
            for byte in part.encode("utf-8"):
                h = _splitmix64(h ^ byte)
        elif isinstance(part, (int, np.integer)):
            h = _splitmix64(h ^ (int(part) & _MASK64))
        else:
            raise TypeError(f"hash64 accepts ints and strings, got {type(part)!r}")
    return h


def derive_seed(master_seed: int, experiment_id: str, rep_index: int) -> int:
    """Per-replication seed: counter-based, independent of evaluation order."""
    return hash64(master_seed, experiment_id, rep_index)


def pool_size(requested: Optional[int] = None) -> int:
    """Worker count: cpu count (or `requested`), capped by SSA_LAB_THREADS."""
    base = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("SSA_LAB_THREADS")
    if cap:
        base = min(base, int(cap))
    return max(1, base)


def canonical_functional(tag: str) -> str:
    tag = _FUNCTIONAL_ALIASES.get(tag, tag)
    if tag not in FUNCTIONALS:
        raise InvalidSpec(f"unknown functional {tag!r}; expected one of {FUNCTIONALS}")
    return tag


# -- single-replication error functionals ------------------------------------


@dataclass(frozen=True)
class _Truth:
    """Per-(spec, L) context: the noise-free quantities errors are measured against."""

    spec: SignalSpec
    L: int
    rank: int
    rec_rank: int
    signal: np.ndarray
    next_value: float
    exact_u: np.ndarray
    freqs: Optional[np.ndarray]
    log_b: float


def _make_truth(spec: SignalSpec, L: int, rec_rank: Optional[int] = None) -> _Truth:
    r = exact_rank(spec)
    if r is None:
        raise InvalidSpec(
            f"kind {spec.kind!r} has no finite rank; Monte-Carlo functionals need one"
        )
    s_ext = signal_values(spec, np.arange(spec.n + 1))
    return _Truth(
        spec=spec,
        L=L,
        rank=r,
        rec_rank=r if rec_rank is None else int(rec_rank),
        signal=s_ext[:-1],
        next_value=float(s_ext[-1]),
        exact_u=exact_basis(spec, L).columns,
        freqs=true_frequencies(spec),
        log_b=float(np.log(spec.b)),
    )


def _match_rms(true_vals: np.ndarray, estimates: np.ndarray) -> float:
    diffs = [np.min(np.abs(estimates - t)) for t in true_vals]
    return float(np.sqrt(np.mean(np.square(diffs))))


def _functional_error(tag: str, observed: np.ndarray, truth: _Truth) -> float:
    if tag == "projector":
        t = leading_triples(observed, truth.L, truth.rank)
        return subspace_distance(t.u, truth.exact_u)
    if tag in ("reconstruction", "reconstruction-last-10", "forecast-1-step"):
        t = leading_triples(observed, truth.L, truth.rec_rank)
        rec = rank_reconstruction(t)
        if tag == "reconstruction":
            return float(np.linalg.norm(rec - truth.signal) / np.sqrt(truth.signal.size))
        if tag == "reconstruction-last-10":
            tail = rec[-10:] - truth.signal[-10:]
            return float(np.sqrt(np.mean(tail**2)))
        lrf = min_norm_lrf(t.u)
        pred = float(lrf.coeffs @ rec[-lrf.order:])
        return abs(pred - truth.next_value)
    if tag in ("frequency", "base"):
        t = leading_triples(observed, truth.L, truth.rank)
        poles = esprit_ls(t.u).poles()
        if tag == "frequency":
            return _match_rms(truth.freqs, pair_frequencies(poles))
        est_freqs = np.abs(np.angle(poles.poles)) / (2.0 * np.pi)
        est_logmod = np.log(np.abs(poles.poles))
        diffs = []
        for w in truth.freqs:
            j = int(np.argmin(np.abs(est_freqs - w)))
            diffs.append(est_logmod[j] - truth.log_b)
        return float(np.sqrt(np.mean(np.square(diffs))))
    raise InvalidSpec(f"unknown functional {tag!r}")


# -- Monte-Carlo surfaces -----------------------------------------------------


@dataclass(frozen=True)
class ErrorSurface:
    """MSD and RMSE of one error functional over a list of window lengths.

    MSD averages the per-replication error magnitudes; RMSE averages their
    squares before the root. Failed replications (vertical subspace) are
    counted per window and excluded from the averages.
    """

    spec: SignalSpec
    functional: str
    windows: tuple
    msd: np.ndarray
    rmse: np.ndarray
    failures: np.ndarray
    reps: int
    master_seed: int
    experiment_id: str


def mc_error_surface(
    spec: SignalSpec,
    windows,
    reps: int,
    functional: str,
    master_seed: int = 0,
    experiment_id: Optional[str] = None,
    threads: Optional[int] = None,
    eigentriples: Optional[int] = None,
) -> ErrorSurface:
    """Estimate the error functional at each window length over `reps` replications.

    Replication i reuses one simulated series across all windows (common
    random numbers), seeded by the derivation contract above. `eigentriples`
    overrides how many leading terms the reconstruction functionals keep
    (default: the signal rank); parameter functionals always use the rank.
    """
    tag = canonical_functional(functional)
    windows = tuple(int(L) for L in windows)
    if reps < 1:
        raise InvalidSpec(f"reps must be >= 1, got {reps}")
    if not windows:
        raise InvalidSpec("need at least one window length")
    exp_id = experiment_id if experiment_id is not None else f"{spec.kind}:{tag}"
    truths = [_make_truth(spec, L, rec_rank=eigentriples) for L in windows]
    errors = np.full((len(windows), reps), np.nan)
    failed = np.zeros((len(windows), reps), dtype=bool)

    def run_rep(i: int) -> None:
        rng = np.random.default_rng(derive_seed(master_seed, exp_id, i))
        signal, residual = gen_series(spec, rng)
        observed = signal + residual
        for j, truth in enumerate(truths):
            try:
                errors[j, i] = _functional_error(tag, observed, truth)
            except VerticalSubspace:
                failed[j, i] = True

    workers = pool_size(threads)
    if workers > 1 and reps > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_rep, range(reps)))
    else:
        for i in range(reps):
            run_rep(i)

    msd = np.empty(len(windows))
    rmse = np.empty(len(windows))
    for j in range(len(windows)):
        ok = errors[j, ~failed[j]]
        if ok.size == 0:
            msd[j] = rmse[j] = np.nan
        else:
            msd[j] = float(np.mean(ok))
            rmse[j] = float(np.sqrt(np.mean(ok**2)))
    return ErrorSurface(
        spec=spec,
        functional=tag,
        windows=windows,
        msd=msd,
        rmse=rmse,
        failures=failed.sum(axis=1),
        reps=reps,
        master_seed=master_seed,
        experiment_id=exp_id,
    )


def mc_point_errors(
    spec: SignalSpec,
    L: int,
    points,
    reps: int,
    master_seed: int = 0,
    experiment_id: Optional[str] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Per-replication reconstruction errors at chosen series indices.

    Returns an array of shape (reps, len(points)); used to compare empirical
    per-point variance with the closed-form asymptotic expression.
    """
    truth = _make_truth(spec, L)
    pts = np.asarray(points, dtype=int)
    exp_id = experiment_id if experiment_id is not None else f"{spec.kind}:point:L={L}"
    out = np.empty((reps, pts.size))

    def run_rep(i: int) -> None:
        rng = np.random.default_rng(derive_seed(master_seed, exp_id, i))
        signal, residual = gen_series(spec, rng)
        rec = rank_reconstruction(leading_triples(signal + residual, L, truth.rank))
        out[i] = rec[pts] - truth.signal[pts]

    workers = pool_size(threads)
    if workers > 1 and reps > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_rep, range(reps)))
    else:
        for i in range(reps):
            run_rep(i)
    return out


# -- convergence ratios -------------------------------------------------------


def window_for_policy(policy: str, n: int, rank: int) -> int:
    """Resolve a window policy name to a window length for series length n."""
    if policy == "r+1":
        return rank + 1
    if policy in ("20", "25"):
        return int(policy)
    if policy == "half-5":
        return (n + 1) // 2 - 5
    if policy == "half":
        return (n + 1) // 2
    raise InvalidSpec(f"unknown window policy {policy!r}; expected one of {WINDOW_POLICIES}")


@dataclass(frozen=True)
class ConvergenceReport:
    """RMSE ratio between series lengths n1 and n2 = 4 n1 under one window policy.

    delta = rmse1 / rmse2; ratios near 8, 2 and 1 flag convergence rates
    N^-1.5, N^-0.5 and none. Cells where the error vanishes to rounding
    (exact separability) carry delta = None.
    """

    spec: SignalSpec
    functional: str
    policy: str
    n1: int
    n2: int
    window1: int
    window2: int
    rmse1: float
    rmse2: float
    delta: Optional[float]
    failures1: int
    failures2: int
    reps: int


def convergence_ratio(
    spec: SignalSpec,
    n1: int,
    functional: str,
    policy: str,
    reps: int,
    master_seed: int = 0,
    threads: Optional[int] = None,
) -> ConvergenceReport:
    """Run the same experiment at lengths n1 and 4 n1 and report the RMSE ratio."""
    tag = canonical_functional(functional)
    if reps < 1:
        raise InvalidSpec(f"reps must be >= 1, got {reps}")
    n2 = 4 * n1
    rank = exact_rank(spec)
    if rank is None:
        raise InvalidSpec(f"kind {spec.kind!r} has no finite rank")
    rows = []
    for n in (n1, n2):
        s = replace(spec, n=n)
        L = window_for_policy(policy, n, rank)
        surf = mc_error_surface(
            s,
            [L],
            reps,
            tag,
            master_seed=master_seed,
            experiment_id=f"{spec.kind}:{tag}:{policy}:N={n}",
            threads=threads,
        )
        rows.append((L, float(surf.rmse[0]), int(surf.failures[0])))
    (L1, rmse1, fail1), (L2, rmse2, fail2) = rows
    separable = rmse1 < EXACT_SEPARABILITY_RMSE or rmse2 < EXACT_SEPARABILITY_RMSE
    delta = None if separable else rmse1 / rmse2
    return ConvergenceReport(
        spec=spec,
        functional=tag,
        policy=policy,
        n1=n1,
        n2=n2,
        window1=L1,
        window2=L2,
        rmse1=rmse1,
        rmse2=rmse2,
        delta=delta,
        failures1=fail1,
        failures2=fail2,
        reps=reps,
    )


# -- closed-form variance of reconstruction errors ----------------------------


def _d1(beta: float, gamma: float) -> float:
    return (
        gamma**2 * (1 + beta)
        - 2 * gamma * beta * (1 + beta) ** 2
        + 4 * beta * (3 - 3 * beta + 2 * beta**2)
    ) / (12 * beta**2 * (1 - beta) ** 2)


def _d2(beta: float, gamma: float) -> float:
    poly = (
        gamma**4
        + 2 * gamma**3 * (3 * beta - 2 - 3 * beta**2)
        + 2 * gamma**2 * (3 - 9 * beta + 12 * beta**2 - 4 * beta**3)
        + 4 * gamma * (-1 + 4 * beta - 3 * beta**2 - 4 * beta**3 + 4 * beta**4)
        + (8 * beta - 56 * beta**2 + 144 * beta**3 - 160 * beta**4 + 64 * beta**5)
    )
    return poly / (6 * beta**2 * (1 - beta) ** 2 * gamma**2)


def _d3(beta: float, gamma: float) -> float:
    return 2.0 / (3.0 * beta)


def asymptotic_variance(beta: float, gamma: float, sigma: float, n: int) -> float:
    """First-order variance of the reconstruction error of a noisy constant signal.

    beta is the window fraction L/N, gamma in [0, 2] locates the point
    (gamma = 1 is the series middle). Symmetries beta <-> 1-beta and
    gamma <-> 2-gamma fold the arguments into the canonical quadrant, then
    the piecewise form selects a branch at gamma = 2 min(beta, 1-2 beta)
    and gamma = 2 beta. Returns sigma^2 / n times the branch value.
    """
    if not 0.0 < beta < 1.0:
        raise OutOfDomain(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 <= gamma <= 2.0:
        raise OutOfDomain(f"gamma must lie in [0, 2], got {gamma}")
    if sigma < 0 or n < 1:
        raise OutOfDomain(f"need sigma >= 0 and n >= 1, got sigma={sigma}, n={n}")
    if beta > 0.5:
        beta = 1.0 - beta
    if gamma > 1.0:
        gamma = 2.0 - gamma
    first_break = 2.0 * min(beta, 1.0 - 2.0 * beta)
    if gamma <= first_break:
        d = _d1(beta, gamma)
    elif gamma < 2.0 * beta:
        d = _d2(beta, gamma)
    else:
        d = _d3(beta, gamma)
    return sigma * sigma / n * d


# -- forecast error decomposition ---------------------------------------------


@dataclass(frozen=True)
class ForecastErrorSplit:
    """One-step forecast RMSE split into its two first-order sources.

    lrf_only applies the estimated recurrence to true signal values (errors
    from the recurrence coefficients alone); rec_only applies the exact
    recurrence to the reconstructed tail (errors from reconstruction alone);
    total uses both estimated parts.
    """

    spec: SignalSpec
    lrf_window: int
    rec_window: int
    rmse_total: float
    rmse_lrf_only: float
    rmse_rec_only: float
    failures: int
    reps: int


def forecast_error_split(
    spec: SignalSpec,
    lrf_window: int,
    rec_window: int,
    reps: int,
    master_seed: int = 0,
    threads: Optional[int] = None,
) -> ForecastErrorSplit:
    """Separate recurrence-estimation error from reconstruction error, one step ahead."""
    rank = exact_rank(spec)
    if rank is None:
        raise InvalidSpec(f"kind {spec.kind!r} has no finite rank")
    s_ext = signal_values(spec, np.arange(spec.n + 1))
    s_hist, truth = s_ext[:-1], float(s_ext[-1])
    exact_lrf = min_norm_lrf(exact_basis(spec, lrf_window))
    exp_id = f"{spec.kind}:forecast-split:Llrf={lrf_window}"
    errs = np.full((3, reps), np.nan)
    failed = np.zeros(reps, dtype=bool)

    def run_rep(i: int) -> None:
        rng = np.random.default_rng(derive_seed(master_seed, exp_id, i))
        signal, residual = gen_series(spec, rng)
        observed = signal + residual
        try:
            est_lrf = min_norm_lrf(leading_triples(observed, lrf_window, rank).u)
        except VerticalSubspace:
            failed[i] = True
            return
        rec = rank_reconstruction(leading_triples(observed, rec_window, rank))
        tail_rec = rec[-est_lrf.order:]
        tail_true = s_hist[-est_lrf.order:]
        errs[0, i] = float(est_lrf.coeffs @ tail_rec) - truth
        errs[1, i] = float(est_lrf.coeffs @ tail_true) - truth
        errs[2, i] = float(exact_lrf.coeffs @ tail_rec) - truth

    workers = pool_size(threads)
    if workers > 1 and reps > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_rep, range(reps)))
    else:
        for i in range(reps):
            run_rep(i)

    ok = errs[:, ~failed]
    rmse = np.sqrt(np.mean(ok**2, axis=1)) if ok.size else np.full(3, np.nan)
    return ForecastErrorSplit(
        spec=spec,
        lrf_window=lrf_window,
        rec_window=rec_window,
        rmse_total=float(rmse[0]),
        rmse_lrf_only=float(rmse[1]),
        rmse_rec_only=float(rmse[2]),
        failures=int(failed.sum()),
        reps=reps,
    )


# -- red-noise projector bound -------------------------------------------------


def red_noise_projector_bound(spec: SignalSpec, L: int) -> float:
    """Size of the non-vanishing projector-error term under red-noise residuals.

    Evaluates K (S S^T)^+ Sigma (I - U U^T) with S the noise-free trajectory
    matrix, Sigma the AR(1) autocovariance and U the exact signal basis. The
    norm is not pinned down by the derivation; this returns the spectral
    norm, so treat the value as an interpretation rather than a quotation.
    """
    rank = exact_rank(spec)
    if rank is None:
        raise InvalidSpec(f"kind {spec.kind!r} has no finite rank")
    S = embed(signal_values(spec), L)
    K = S.shape[1]
    U, s, _ = np.linalg.svd(S, full_matrices=False)
    inv = np.zeros_like(s)
    inv[:rank] = 1.0 / s[:rank] ** 2
    gram_pinv = (U * inv) @ U.T
    cov = spec.sigma**2 * toeplitz(spec.alpha ** np.arange(L))
    Ur = U[:, :rank]
    M = K * gram_pinv @ cov @ (np.eye(L) - Ur @ Ur.T)
    return float(np.linalg.norm(M, 2))


# -- experiment configuration ---------------------------------------------------


_SIGNAL_KEYS = {"kind", "n", "b", "c", "sigma", "alpha"}
_WHITE_NOISE_KINDS = {
    "damped_cos_wn",
    "damped_cos_mix",
    "two_cos",
    "chirp_am",
    "chirp_trend_mix",
    "exp_trend",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed simulate-command configuration."""

    spec: SignalSpec
    windows: tuple
    reps: int
    functional: str
    seed: int
    output: Optional[str] = None
    eigentriples: Optional[int] = None

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise InvalidSpec("experiment config must be a JSON object")
        sig = doc.get("signal")
        if not isinstance(sig, dict) or "kind" not in sig or "n" not in sig:
            raise InvalidSpec("config needs a 'signal' object with 'kind' and 'n'")
        unknown = set(sig) - _SIGNAL_KEYS
        if unknown:
            raise InvalidSpec(f"unknown signal fields: {sorted(unknown)}")
        fields = dict(sig)
        seed = doc.get("seed", 0)
        noise = doc.get("noise")
        if noise is not None:
            if not isinstance(noise, dict):
                raise InvalidSpec("'noise' must be an object")
            kind = noise.get("kind")
            if kind is not None:
                expect_red = fields["kind"] == "damped_cos_rn"
                if kind == "red" and not expect_red:
                    raise InvalidSpec(
                        f"noise kind 'red' conflicts with signal kind {fields['kind']!r}"
                    )
                if kind == "white" and fields["kind"] not in _WHITE_NOISE_KINDS:
                    raise InvalidSpec(
                        f"noise kind 'white' conflicts with signal kind {fields['kind']!r}"
                    )
            if "sigma" in noise:
                fields["sigma"] = noise["sigma"]
            if "alpha" in noise:
                fields["alpha"] = noise["alpha"]
            if "seed" in noise and "seed" not in doc:
                seed = noise["seed"]
        spec = SignalSpec(**fields)
        windows = doc.get("windows")
        if not isinstance(windows, (list, tuple)) or not windows:
            raise InvalidSpec("config needs a nonempty 'windows' list")
        reps = int(doc.get("reps", 100))
        functional = canonical_functional(doc.get("functional", "reconstruction"))
        ets = doc.get("eigentriples")
        return ExperimentConfig(
            spec=spec,
            windows=tuple(int(w) for w in windows),
            reps=reps,
            functional=functional,
            seed=int(seed),
            output=doc.get("output"),
            eigentriples=None if ets is None else int(ets),
        )


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> ErrorSurface:
    return mc_error_surface(
        config.spec,
        config.windows,
        config.reps,
        config.functional,
        master_seed=config.seed,
        threads=threads,
        eigentriples=config.eigentriples,
    )
