"""Schauder coefficients of a target and their regrouping into ReLU,
sigmoidal and Softplus frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import (
    BasisKind,
    DyadicIndex,
    SoftplusConfig,
    hat,
    iter_indices,
    q_fn,
)

MAX_COND = 1e12


class IllConditionedError(ValueError):
    pass


@dataclass
class Expansion:
    """alpha0 * 1 + alpha1 * x + sum over n <= max_level of alpha[n][k] * s_{n,k}.

    ``levels[n]`` is an array of length 2^n, ordered by k.
    """

    alpha0: float
    alpha1: float
    levels: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.alpha0 = float(self.alpha0)
        self.alpha1 = float(self.alpha1)
        self.levels = [np.asarray(c, dtype=float) for c in self.levels]
        for n, c in enumerate(self.levels):
            if c.shape != (2**n,):
                raise ValueError(f"level {n} must hold {2**n} coefficients, got {c.shape}")

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    @classmethod
    def zeros(cls, max_level: int) -> "Expansion":
        return cls(0.0, 0.0, [np.zeros(2**n) for n in range(max_level + 1)])

    def coeff(self, n: int, k: int) -> float:
        """alpha_{n,k}, with the convention alpha_{n,-1} = 0."""
        if k == -1:
            return 0.0
        return float(self.levels[n][k])

    @property
    def coeffs(self) -> dict[DyadicIndex, float]:
        return {idx: self.coeff(idx.n, idx.k) for idx in iter_indices(self.max_level)}

    def as_vector(self) -> np.ndarray:
        """[alpha0, alpha1, alpha_{0,0}, alpha_{1,0}, ...] in series order."""
        return np.concatenate([[self.alpha0, self.alpha1], *self.levels])

    @classmethod
    def from_vector(cls, vec, max_level: int) -> "Expansion":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (2 ** (max_level + 1) + 1,):
            raise ValueError(f"expected {2 ** (max_level + 1) + 1} entries, got {vec.shape}")
        levels = [vec[2**n + 1 : 2 ** (n + 1) + 1] for n in range(max_level + 1)]
        return cls(vec[0], vec[1], levels)

    def to_dict(self) -> dict:
        return {
            "alpha0": self.alpha0,
            "alpha1": self.alpha1,
            "levels": [c.tolist() for c in self.levels],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Expansion":
        return cls(data["alpha0"], data["alpha1"], [np.asarray(c) for c in data["levels"]])

    @classmethod
    def from_json(cls, text: str) -> "Expansion":
        return cls.from_dict(json.loads(text))


@dataclass
class RegroupedExpansion:
    """Coefficients of an expansion rewritten in one of the pair frames.

    Each term is ``(idx, c_int, c_half)``: the coefficient of the element
    shifted by k and of the element shifted by k + 1/2. For HAT the
    half-shift slot is always 0.
    """

    kind: BasisKind
    alpha0: float
    alpha1: float
    terms: list[tuple[DyadicIndex, float, float]]
    cfg: SoftplusConfig | None = None

    @property
    def max_level(self) -> int:
        return self.terms[-1][0].n if self.terms else -1

    def to_expansion(self) -> Expansion:
        """Invert the regrouping."""
        out = Expansion.zeros(self.max_level)
        out.alpha0, out.alpha1 = self.alpha0, self.alpha1
        for idx, c_int, c_half in self.terms:
            if self.kind in (BasisKind.RELU_PAIR, BasisKind.SOFTPLUS_PAIR):
                out.levels[idx.n][idx.k] = -c_half / 2.0
            else:
                out.levels[idx.n][idx.k] = c_int
        return out


def dyadic_points(level: int) -> np.ndarray:
    """j / 2^level for j = 0 .. 2^level."""
    return np.arange(2**level + 1) / 2.0**level


def analyze(f: Callable, max_level: int) -> Expansion:
    """Schauder coefficients of ``f`` up to ``max_level``.

    alpha_{n,k} = 2 (f(m) - (f(l) + f(r)) / 2) for the cell [l, r] with
    midpoint m; the factor 2 undoes the 1/2 peak of the hats.
    """
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    top = max_level + 1
    fx = np.asarray(f(dyadic_points(top)), dtype=float)
    levels = []
    for n in range(max_level + 1):
        step = 2 ** (top - n)
        left = fx[0:-1:step]
        right = fx[step::step]
        mid = fx[step // 2 :: step]
        levels.append(2.0 * (mid - (left + right) / 2.0))
    return Expansion(fx[0], fx[-1] - fx[0], levels)


def _collocation_matrix(max_level: int, column: Callable[[DyadicIndex, np.ndarray], np.ndarray]):
    grid = dyadic_points(max_level + 1)
    cols = [np.ones_like(grid), grid.copy()]
    cols.extend(column(idx, grid) for idx in iter_indices(max_level))
    return grid, np.column_stack(cols)


def collocation_matrix(max_level: int) -> np.ndarray:
    """Hat-basis evaluation matrix on the level ``max_level + 1`` dyadic grid."""
    return _collocation_matrix(max_level, hat)[1]


def _solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"collocation system is singular: {exc}") from exc


def collocation_oracle(f: Callable, max_level: int) -> Expansion:
    """Coefficients from a dense interpolation solve; independent check of
    :func:`analyze`.
    """
    grid, matrix = _collocation_matrix(max_level, hat)
    coeffs = _solve(matrix, np.asarray(f(grid), dtype=float))
    return Expansion.from_vector(coeffs, max_level)


def analyze_q(f: Callable, max_level: int, cfg: SoftplusConfig) -> Expansion:
    """Coefficients beta of ``f`` against chi, x and the Softplus hats q_{n,k}.

    Obtained by collocation on the level ``max_level + 1`` dyadic grid, so
    the truncated q-expansion interpolates f there.
    """
    grid, matrix = _collocation_matrix(max_level, lambda idx, x: q_fn(idx, cfg, x))
    cond = np.linalg.cond(matrix)
    if not cond < MAX_COND:
        raise IllConditionedError(f"Softplus collocation condition number {cond:.3g} exceeds {MAX_COND:g}")
    coeffs = _solve(matrix, np.asarray(f(grid), dtype=float))
    return Expansion.from_vector(coeffs, max_level)


def regroup(e: Expansion, kind, cfg: SoftplusConfig | None = None) -> RegroupedExpansion:
    """Rewrite ``e`` in the frame of ``kind`` without reordering terms.

    ReluPair / SoftplusPair: (a_{n,k} + a_{n,k-1}, -2 a_{n,k}).
    SigmoidalDiff / SigmoidalSoftplusDiff: (a_{n,k}, -a_{n,k}).
    For the Softplus kinds ``e`` should hold the beta coefficients from
    :func:`analyze_q`.
    """
    kind = BasisKind.parse(kind)
    if kind is BasisKind.COUNTEREXAMPLE_G:
        raise ValueError("CounterexampleG does not lead to a ReLU basis; no regrouping exists")
    if kind.is_softplus:
        cfg = cfg if cfg is not None else SoftplusConfig()
    terms = []
    for idx in iter_indices(e.max_level):
        a = e.coeff(idx.n, idx.k)
        if kind is BasisKind.HAT:
            terms.append((idx, a, 0.0))
        elif kind in (BasisKind.RELU_PAIR, BasisKind.SOFTPLUS_PAIR):
            terms.append((idx, a + e.coeff(idx.n, idx.k - 1), -2.0 * a))
        else:
            terms.append((idx, a, -a))
    return RegroupedExpansion(kind, e.alpha0, e.alpha1, terms, cfg if kind.is_softplus else None)
