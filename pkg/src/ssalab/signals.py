"""Catalog of benchmark signals and residual generators.

Each catalog kind bundles a closed-form signal with the residual recipe used
in the error studies; `gen_series` returns the two parts separately so error
functionals always know the truth. Exponential damping is written through
the base b (s_n contains b^n), white noise has standard deviation sigma, and
red noise is the stationary AR(1) process with coefficient alpha and unit
variance before scaling by sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.signal import lfilter

from .core import decompose, embed
from .errors import InvalidSpec
from .forecast import PoleSet
from .subspace import SubspaceBasis, signal_basis

CATALOG_KINDS = (
    "const_saw",
    "damped_cos_const",
    "damped_cos_wn",
    "damped_cos_mix",
    "damped_cos_rn",
    "two_cos",
    "chirp_am",
    "chirp_trend_mix",
    "exp_trend",
    "custom",
)

_WHITE_KINDS = {
    "damped_cos_wn",
    "damped_cos_mix",
    "two_cos",
    "chirp_am",
    "chirp_trend_mix",
    "exp_trend",
    "custom",
}


@dataclass(frozen=True)
class NoiseSpec:
    """Stochastic residual description: white or stationary AR(1) ("red")."""

    kind: str = "white"
    sigma: float = 0.1
    alpha: float = 0.5
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("white", "red"):
            raise InvalidSpec(f"noise kind must be 'white' or 'red', got {self.kind!r}")
        if self.sigma < 0:
            raise InvalidSpec(f"noise sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidSpec(f"AR(1) alpha must lie in [0, 1), got {self.alpha}")


def white_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n)


def red_noise(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    """Stationary AR(1) draw: unit marginal variance, innovation variance 1 - alpha^2."""
    g = rng.standard_normal(n)
    x = np.sqrt(1.0 - alpha * alpha) * g
    x[0] = g[0]
    return lfilter([1.0], [1.0, -alpha], x)


@dataclass(frozen=True)
class SignalSpec:
    """One catalog entry: kind, length, and the parameters the kind uses."""

    kind: str
    n: int
    b: float = 1.0
    c: float = 0.1
    sigma: float = 0.1
    alpha: float = 0.5
    custom_signal: Optional[Callable[[np.ndarray], np.ndarray]] = None
    custom_rank: Optional[int] = None
    custom_poles: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in CATALOG_KINDS:
            raise InvalidSpec(f"unknown signal kind {self.kind!r}")
        if self.n < 3:
            raise InvalidSpec(f"series length must be >= 3, got {self.n}")
        if self.sigma < 0:
            raise InvalidSpec(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidSpec(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.b <= 0:
            raise InvalidSpec(f"base b must be > 0, got {self.b}")
        if self.kind == "custom" and self.custom_signal is None:
            raise InvalidSpec("custom kind needs a custom_signal callable")


def signal_values(spec: SignalSpec, indices=None) -> np.ndarray:
    """Closed-form signal values at the given sample indices (default 0..n-1)."""
    n = np.arange(spec.n, dtype=float) if indices is None else np.asarray(indices, dtype=float)
    kind = spec.kind
    if kind == "const_saw":
        return np.ones_like(n)
    if kind in ("damped_cos_const", "damped_cos_wn", "damped_cos_mix", "damped_cos_rn"):
        return spec.b**n * np.cos(2.0 * np.pi * n / 10.0)
    if kind == "two_cos":
        return np.cos(2.0 * np.pi * n / 19.0) + np.cos(2.0 * np.pi * n / 21.0)
    if kind == "chirp_am":
        return np.cos(2.0 * np.pi * n**2 / 1e5) * np.cos(2.0 * np.pi * n / 20.0)
    if kind == "chirp_trend_mix":
        return np.cos(2.0 * np.pi * n**2 / 1e5)
    if kind == "exp_trend":
        return spec.b**n
    if kind == "custom":
        return np.asarray(spec.custom_signal(n), dtype=float)
    raise InvalidSpec(f"unknown signal kind {kind!r}")


def residual_values(spec: SignalSpec, rng: np.random.Generator) -> np.ndarray:
    """Residual draw matching the kind's recipe (deterministic kinds ignore rng)."""
    n = np.arange(spec.n, dtype=float)
    kind = spec.kind
    if kind == "const_saw":
        return -spec.c * (-1.0) ** n
    if kind == "damped_cos_const":
        return np.full(spec.n, spec.c)
    if kind == "damped_cos_wn":
        return spec.sigma * white_noise(rng, spec.n)
    if kind == "damped_cos_mix":
        return (spec.sigma * white_noise(rng, spec.n) + spec.c) / np.sqrt(2.0)
    if kind == "damped_cos_rn":
        return spec.sigma * red_noise(rng, spec.n, spec.alpha)
    if kind == "chirp_trend_mix":
        return spec.sigma * white_noise(rng, spec.n) + spec.c * np.cos(
            2.0 * np.pi * n / 10.0
        )
    if kind in _WHITE_KINDS:
        return spec.sigma * white_noise(rng, spec.n)
    raise InvalidSpec(f"unknown signal kind {kind!r}")


def gen_series(spec: SignalSpec, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Generate (signal, residual); their sum is the observed series."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return signal_values(spec), residual_values(spec, rng)


def exact_rank(spec: SignalSpec) -> Optional[int]:
    """Trajectory-space dimension of the noise-free signal, None if unbounded."""
    kind = spec.kind
    if kind == "const_saw":
        return 1
    if kind.startswith("damped_cos"):
        return 2
    if kind == "two_cos":
        return 4
    if kind == "exp_trend":
        return 1
    if kind == "custom":
        return spec.custom_rank
    return None


def true_poles(spec: SignalSpec) -> Optional[PoleSet]:
    """Exact characteristic roots of the signal, None for infinite-rank kinds."""
    kind = spec.kind
    if kind == "const_saw":
        return PoleSet(np.array([1.0 + 0.0j]))
    if kind.startswith("damped_cos"):
        z = spec.b * np.exp(2j * np.pi / 10.0)
        return PoleSet(np.array([z, z.conjugate()]))
    if kind == "two_cos":
        z1 = np.exp(2j * np.pi / 19.0)
        z2 = np.exp(2j * np.pi / 21.0)
        return PoleSet(np.array([z1, z1.conjugate(), z2, z2.conjugate()]))
    if kind == "exp_trend":
        return PoleSet(np.array([spec.b + 0.0j]))
    if kind == "custom" and spec.custom_poles is not None:
        return PoleSet(np.asarray(spec.custom_poles, dtype=complex))
    return None


def true_frequencies(spec: SignalSpec) -> Optional[np.ndarray]:
    """Distinct nonnegative signal frequencies in cycles per sample."""
    ps = true_poles(spec)
    if ps is None:
        return None
    freqs = np.abs(np.angle(ps.poles)) / (2.0 * np.pi)
    return np.unique(np.round(freqs, 15))


@lru_cache(maxsize=128)
def _exact_basis_cached(spec: SignalSpec, L: int) -> SubspaceBasis:
    r = exact_rank(spec)
    if r is None:
        raise InvalidSpec(f"kind {spec.kind!r} has no finite rank; no exact basis")
    ets = decompose(embed(signal_values(spec), L))
    return signal_basis(ets, r)


def exact_basis(spec: SignalSpec, L: int) -> SubspaceBasis:
    """Exact signal-subspace basis at window L, from the noise-free trajectory matrix."""
    return _exact_basis_cached(spec, L)
