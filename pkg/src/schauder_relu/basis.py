"""Closed-form activations and dyadic basis families on [0, 1].

Every function accepts a scalar or a numpy array for ``x`` and returns the
same shape. Hat functions peak at 1/2 (not 1); all coefficient formulas in
the package assume that normalization.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

LN2 = math.log(2.0)
DEFAULT_GRID_BITS = 14
GRID_BITS_ENV = "SCHAUDER_GRID_BITS"


@dataclass(frozen=True, order=True)
class DyadicIndex:
    """Level ``n`` and position ``k`` of a dyadic basis element.

    Ordering is dictionary order on ``(n, k)``, which is also the series
    order of every expansion in this package.
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"level must be non-negative, got n={self.n}")
        if not 0 <= self.k <= 2**self.n - 1:
            raise ValueError(f"position k={self.k} out of range for level n={self.n}")

    @property
    def rank(self) -> int:
        return linear_rank(self)

    @property
    def support(self) -> tuple[float, float]:
        h = 2.0**-self.n
        return self.k * h, (self.k + 1) * h

    @property
    def midpoint(self) -> float:
        return (self.k + 0.5) * 2.0**-self.n


class BasisKind(enum.Enum):
    HAT = "Hat"
    RELU_PAIR = "ReluPair"
    SIGMOIDAL_DIFF = "SigmoidalDiff"
    SOFTPLUS_PAIR = "SoftplusPair"
    SIGMOIDAL_SOFTPLUS_DIFF = "SigmoidalSoftplusDiff"
    COUNTEREXAMPLE_G = "CounterexampleG"

    @property
    def is_softplus(self) -> bool:
        return self in (BasisKind.SOFTPLUS_PAIR, BasisKind.SIGMOIDAL_SOFTPLUS_DIFF)

    @property
    def is_pair(self) -> bool:
        """True when each (n, k) contributes two basis functions."""
        return self not in (BasisKind.HAT, BasisKind.COUNTEREXAMPLE_G)

    @classmethod
    def parse(cls, name: "str | BasisKind") -> "BasisKind":
        if isinstance(name, cls):
            return name
        for kind in cls:
            if name in (kind.value, kind.name) or name.lower() == kind.value.lower():
                return kind
        raise ValueError(f"unknown basis kind {name!r}")


@dataclass(frozen=True)
class SoftplusConfig:
    """Sharpness schedule for the Softplus families.

    ``K`` plays the role of the basis constant of the ReLU hat basis. Its
    true value is not known, so it is a user setting (default 1).
    """

    K: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K > 0):
            raise ValueError(f"K must be positive and finite, got {self.K}")

    def a(self, n: int) -> float:
        return 4.0 * LN2 * 2.0 * self.K * 2.0 ** (2 * n + 2)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr


def _shape_like(result, x):
    if np.ndim(x) == 0:
        return float(result)
    return result


def _half_shift(k) -> float:
    """Convert a shift that is an integer or half-integer to an exact float."""
    frac = Fraction(k)
    if (2 * frac).denominator != 1:
        raise ValueError(f"shift must be an integer or half-integer, got {k}")
    # Half-integers are exact in binary floating point.
    return float(frac)


def relu(x):
    """max(0, x); rejects non-finite input."""
    arr = _as_array(x)
    if not np.all(np.isfinite(arr)):
        raise ValueError("relu: non-finite input")
    return _shape_like(np.where(arr > 0.0, arr, 0.0), x)


def _relu(arr):
    # Unchecked variant for internal hot loops.
    return np.maximum(arr, 0.0)


def _softplus(a: float, arr):
    ax = a * arr
    return np.maximum(arr, 0.0) + np.log1p(np.exp(-np.abs(ax))) / a


def softplus(a: float, x):
    """ln(1 + e^{a x}) / a, evaluated without overflow for large a."""
    if not (a > 0 and math.isfinite(a)):
        raise ValueError(f"softplus sharpness must be positive, got {a}")
    arr = _as_array(x)
    return _shape_like(_softplus(a, arr), x)


def _scaled(idx: DyadicIndex, x):
    # 2^n x - k is exact for dyadic x at the resolutions used here.
    return np.ldexp(_as_array(x), idx.n) - idx.k


def hat(idx: DyadicIndex, x):
    """Schauder hat on [k/2^n, (k+1)/2^n] with peak value 1/2."""
    y = _scaled(idx, x)
    out = np.where(y <= 0.5, y, 1.0 - y)
    out = np.where((y > 0.0) & (y < 1.0), out, 0.0)
    return _shape_like(out, x)


def t_fn(idx: DyadicIndex, x):
    """Second ReLU difference r(y) - 2 r(y - 1/2) + r(y - 1), y = 2^n x - k."""
    y = _scaled(idx, x)
    return _shape_like(_relu(y) - 2.0 * _relu(y - 0.5) + _relu(y - 1.0), x)


def d_fn(idx: DyadicIndex, x, offset=0):
    """First ReLU difference r(y) - r(y - 1/2) with y = 2^n x - (k + offset).

    ``offset`` may be any integer or half-integer; ``offset=1/2`` gives the
    partner term in the sigmoidal expansion, since
    d(y) - d(y - 1/2) = t(y).
    """
    y = _scaled(idx, x) - _half_shift(offset)
    return _shape_like(_relu(y) - _relu(y - 0.5), x)


def g_fn(idx: DyadicIndex, x):
    """Five-term ReLU expression that also equals the hat pointwise."""
    y = _scaled(idx, x)
    out = _relu(y) - _relu(y - 0.5) - _relu(0.5 - y) + _relu(1.0 - y) - 0.5
    return _shape_like(out, x)


def a_of(idx: DyadicIndex, cfg: SoftplusConfig) -> float:
    """Softplus sharpness 4 ln2 * 2K * 2^(2n+2) for level ``idx.n``."""
    return cfg.a(idx.n)


def q_fn(idx: DyadicIndex, cfg: SoftplusConfig, x, a: float | None = None):
    """Softplus second difference, a smooth perturbation of ``t_fn``.

    ``a`` overrides the level schedule (used for the fixed-sharpness figure).
    """
    a = a_of(idx, cfg) if a is None else a
    y = _scaled(idx, x)
    out = _softplus(a, y) - 2.0 * _softplus(a, y - 0.5) + _softplus(a, y - 1.0)
    return _shape_like(out, x)


def u_fn(idx: DyadicIndex, cfg: SoftplusConfig, x, offset=0, a: float | None = None):
    """Softplus first difference p_a(y) - p_a(y - 1/2), y = 2^n x - (k + offset).

    Increases monotonically from 0 to 1/2.
    """
    a = a_of(idx, cfg) if a is None else a
    y = _scaled(idx, x) - _half_shift(offset)
    return _shape_like(_softplus(a, y) - _softplus(a, y - 0.5), x)


def linear_rank(idx: DyadicIndex) -> int:
    return 2**idx.n + idx.k - 1


def unrank(rank: int) -> DyadicIndex:
    if rank < 0:
        raise ValueError(f"rank must be non-negative, got {rank}")
    n = (rank + 1).bit_length() - 1
    return DyadicIndex(n, rank + 1 - 2**n)


def iter_indices(max_level: int):
    """All indices with n <= max_level in dictionary order."""
    for n in range(max_level + 1):
        for k in range(2**n):
            yield DyadicIndex(n, k)


def grid_bits() -> int:
    raw = os.environ.get(GRID_BITS_ENV)
    if raw is None or raw == "":
        return DEFAULT_GRID_BITS
    bits = int(raw)
    if not 1 <= bits <= 24:
        raise ValueError(f"{GRID_BITS_ENV} must be in [1, 24], got {bits}")
    return bits


def verification_grid(level: int | None = None, bits: int | None = None) -> np.ndarray:
    """Uniform grid of 2^bits + 1 points on [0, 1], plus every dyadic
    breakpoint j / 2^level when ``level`` is given.
    """
    bits = grid_bits() if bits is None else bits
    grid = np.linspace(0.0, 1.0, 2**bits + 1)
    if level is not None and level > bits:
        grid = np.union1d(grid, np.linspace(0.0, 1.0, 2**level + 1))
    return grid
