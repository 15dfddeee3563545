"""File formats: series CSV, eigentriple JSON, estimate/pseudospectrum CSV,
experiment reports. All floats are written with round-trip precision so a
decomposition exported to JSON reproduces downstream results bit for bit.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .core import EigentripleSet
from .estimate import ParamEstimates, Pseudospectrum
from .forecast import SignalModel
from .simlab import ErrorSurface


def read_series(path) -> np.ndarray:
    """Read a series from CSV: one value per line, optional single header line."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: no data lines")
    start = 0
    try:
        float(lines[0])
    except ValueError:
        start = 1
    values = []
    for k, ln in enumerate(lines[start:], start=start + 1):
        try:
            x = float(ln)
        except ValueError as exc:
            raise ValueError(f"{path}: line {k}: not a number: {ln!r}") from exc
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"{path}: line {k}: NaN/Inf values are rejected")
        values.append(x)
    if not values:
        raise ValueError(f"{path}: no numeric values")
    return np.asarray(values, dtype=float)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_series(path, values, fmt: str = "csv", header: str = "value") -> None:
    values = np.asarray(values, dtype=float)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for v in values:
                fh.write(_fmt(v) + "\n")
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump([float(v) for v in values], fh)
            fh.write("\n")
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def eigentriples_to_dict(ets: EigentripleSet, mean: float | None = None) -> dict:
    """JSON-ready view: {method, L, K, sigmas, u, v}; u[i]/v[i] are the i-th vectors."""
    doc = {
        "method": ets.method,
        "L": int(ets.L),
        "K": int(ets.K),
        "sigmas": [float(s) for s in ets.sigmas],
        "u": [[float(x) for x in ets.u[:, i]] for i in range(ets.count)],
        "v": [[float(x) for x in ets.v[:, i]] for i in range(ets.count)],
    }
    if mean is not None:
        doc["mean"] = float(mean)
    return doc


def eigentriples_from_dict(doc: dict) -> tuple[EigentripleSet, float]:
    """Inverse of eigentriples_to_dict; returns the set and the stored mean (0 if absent)."""
    try:
        method = doc["method"]
        L = int(doc["L"])
        K = int(doc["K"])
        sigmas = np.asarray(doc["sigmas"], dtype=float)
        u = np.asarray(doc["u"], dtype=float).T if doc["u"] else np.zeros((L, 0))
        v = np.asarray(doc["v"], dtype=float).T if doc["v"] else np.zeros((K, 0))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed eigentriple document: {exc}") from exc
    if u.shape != (L, sigmas.size) or v.shape != (K, sigmas.size):
        raise ValueError(
            f"eigentriple document dimensions disagree: L={L}, K={K}, "
            f"u{u.shape}, v{v.shape}, {sigmas.size} sigmas"
        )
    ets = EigentripleSet(sigmas=sigmas, u=u, v=v, method=method, L=L, K=K)
    return ets, float(doc.get("mean", 0.0))


def write_eigentriples(path, ets: EigentripleSet, mean: float | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(eigentriples_to_dict(ets, mean), fh)
        fh.write("\n")


def read_eigentriples(path) -> tuple[EigentripleSet, float]:
    with open(path, "r", encoding="utf-8") as fh:
        return eigentriples_from_dict(json.load(fh))


def write_param_estimates(path, est: ParamEstimates, fmt: str = "csv") -> None:
    rows = list(zip(est.frequencies, est.dampings, est.moduli))
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("frequency,damping,modulus\n")
            for fr, da, mo in rows:
                fh.write(f"{_fmt(fr)},{_fmt(da)},{_fmt(mo)}\n")
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                [
                    {"frequency": float(fr), "damping": float(da), "modulus": float(mo)}
                    for fr, da, mo in rows
                ],
                fh,
            )
            fh.write("\n")
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def write_pseudospectrum(path, ps: Pseudospectrum, fmt: str = "csv") -> None:
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("omega,value\n")
            for om, val in zip(ps.omegas, ps.values):
                fh.write(f"{_fmt(om)},{_fmt(val)}\n")
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "method": ps.method,
                    "omega": [float(x) for x in ps.omegas],
                    "value": [float(x) for x in ps.values],
                },
                fh,
            )
            fh.write("\n")
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def error_surface_rows(surf: ErrorSurface) -> list[tuple]:
    return [
        (int(L), surf.functional, float(surf.msd[j]), float(surf.rmse[j]), int(surf.reps))
        for j, L in enumerate(surf.windows)
    ]


def write_error_surface_csv(path, surf: ErrorSurface) -> None:
    """Plot-ready long format: one row per window length."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("L,functional,MSD,RMSE,reps\n")
        for L, tag, msd, rmse, reps in error_surface_rows(surf):
            fh.write(f"{L},{tag},{_fmt(msd)},{_fmt(rmse)},{reps}\n")


def error_surface_to_dict(surf: ErrorSurface) -> dict:
    return {
        "signal": {
            "kind": surf.spec.kind,
            "n": surf.spec.n,
            "b": surf.spec.b,
            "c": surf.spec.c,
            "sigma": surf.spec.sigma,
            "alpha": surf.spec.alpha,
        },
        "functional": surf.functional,
        "reps": surf.reps,
        "seed": surf.master_seed,
        "experiment_id": surf.experiment_id,
        "windows": [int(L) for L in surf.windows],
        "msd": [float(x) for x in surf.msd],
        "rmse": [float(x) for x in surf.rmse],
        "failures": [int(x) for x in surf.failures],
    }


def write_error_surface_json(path, surf: ErrorSurface) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(error_surface_to_dict(surf), fh, indent=2)
        fh.write("\n")


def signal_model_to_list(model: SignalModel) -> list[dict]:
    """JSON view: one entry per pole with its polynomial coefficients."""
    out = []
    for mu, k, coeffs in zip(model.poles, model.multiplicities, model.coefficients):
        out.append(
            {
                "re": float(mu.real),
                "im": float(mu.imag),
                "multiplicity": int(k),
                "coefficients": [[float(c.real), float(c.imag)] for c in coeffs],
            }
        )
    return out


def write_signal_model(path, model: SignalModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(signal_model_to_list(model), fh)
        fh.write("\n")
