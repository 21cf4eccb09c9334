"""Interpolation schemes for Lipschitz targets and empirical rate sweeps.

Two schemes are provided:

``"peaks"``
    f_P = f(0) + (f(1) - f(0)) x + sum_k 2 g(x_k) s_{p,k}, with
    g = f - affine part and peaks x_k = (2k+1) / 2^(p+1). Only the P = 2^p
    hats of level p carry weight; the ReLU rendering uses 2P + 2 functions.
    Note that f_P equals the affine part at every cell edge k / 2^p, so its
    error there is |g(k / 2^p)| and need not shrink with p.

``"dyadic"``
    The level-complete Schauder partial sum (levels 0..p), i.e. piecewise
    linear interpolation on the grid of spacing 1 / (2P). Error is at most
    c / (2P); the ReLU rendering uses 2 + 2(2P - 1) = 4P functions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coefficients import Expansion, analyze
from .evaluator import PartialSumSpec, sup_error

SCHEMES = ("peaks", "dyadic")
MAX_SWEEP_LEVEL = 12
EXACT_TOL = 1e-12


class MissingLipschitzError(ValueError):
    pass


def _lipschitz(f) -> float:
    c = getattr(f, "lipschitz", None)
    if c is None:
        raise MissingLipschitzError("target has no Lipschitz constant")
    return float(c)


def lipschitz_interpolant(f: Callable, p: int, scheme: str = "peaks") -> PartialSumSpec:
    """Level-complete partial-sum spec of the scheme's interpolant at level p."""
    _lipschitz(f)
    if p < 0:
        raise ValueError("p must be non-negative")
    if scheme == "dyadic":
        return PartialSumSpec.level_complete(analyze(f, p))
    if scheme != "peaks":
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    f0, f1 = float(f(0.0)), float(f(1.0))
    alpha0, alpha1 = f0, f1 - f0
    P = 2**p
    peaks = (2.0 * np.arange(P) + 1.0) / (2.0 * P)
    g = np.asarray(f(peaks), dtype=float) - (alpha0 + alpha1 * peaks)
    e = Expansion.zeros(p)
    e.alpha0, e.alpha1 = alpha0, alpha1
    e.levels[p] = 2.0 * g
    return PartialSumSpec.level_complete(e)


def relu_term_count(p: int, scheme: str = "peaks") -> int:
    """ReLU basis functions used by the scheme at level p, auxiliaries included."""
    P = 2**p
    return 2 * P + 2 if scheme == "peaks" else 4 * P


def rate_bound(c: float, p: int) -> float:
    """2c / P, the sup-norm bound claimed for P = 2^p hats."""
    return 2.0 * c / 2**p


def fit_loglog_slope(ns, errors) -> float | None:
    """Least-squares slope of log(error) against log(N).

    Errors below 1e-12 count as exact and are dropped; None when fewer
    than two points remain.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors >= EXACT_TOL
    if np.count_nonzero(keep) < 2:
        return None
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(errors[keep]), 1)
    return float(slope)


@dataclass
class RateReport:
    points: list[tuple[int, float]]
    fitted_slope: float | None
    scheme: str = "peaks"
    levels: list[int] = field(default_factory=list)
    rate_C: float | None = None

    def bounds(self) -> list[float]:
        return [rate_bound(self.rate_C, p) for p in self.levels]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["N", "sup_error"])
        for n, err in self.points:
            writer.writerow([n, format(err, ".17g")])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"slope": self.fitted_slope, "scheme": self.scheme, "levels": self.levels}

    def to_json(self) -> str:
        return json.dumps(self.sidecar())


def convergence_sweep(f: Callable, p_max: int, p_min: int = 0, scheme: str = "peaks") -> RateReport:
    """Sup error of the level-p interpolant for p = p_min..p_max."""
    c = _lipschitz(f)
    if not 0 <= p_min <= p_max <= MAX_SWEEP_LEVEL:
        raise ValueError(f"need 0 <= p_min <= p_max <= {MAX_SWEEP_LEVEL}")
    points, levels = [], []
    for p in range(p_min, p_max + 1):
        report = sup_error(f, lipschitz_interpolant(f, p, scheme), "Hat")
        points.append((relu_term_count(p, scheme), report.sup_error))
        levels.append(p)
    slope = fit_loglog_slope([n for n, _ in points], [e for _, e in points])
    if slope is not None and not math.isfinite(slope):
        slope = None
    return RateReport(points, slope, scheme, levels, c)
