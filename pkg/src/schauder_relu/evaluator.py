"""Partial sums of expansions in every frame and sup-norm measurements."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .basis import (
    LN2,
    BasisKind,
    DyadicIndex,
    SoftplusConfig,
    _relu,
    _scaled,
    _softplus,
    d_fn,
    hat,
    iter_indices,
    q_fn,
    t_fn,
    u_fn,
    verification_grid,
)
from .coefficients import Expansion, RegroupedExpansion, regroup


@dataclass(frozen=True)
class PartialSumSpec:
    """Which prefix of an expansion's series to sum.

    Exactly one of ``level`` (every term with n <= level, plus the two
    auxiliaries) or ``n_terms`` (the first N basis functions in series
    order, auxiliaries first) is set.
    """

    expansion: Expansion
    level: int | None = None
    n_terms: int | None = None

    def __post_init__(self):
        if (self.level is None) == (self.n_terms is None):
            raise ValueError("give exactly one of level or n_terms")
        if self.level is not None and not 0 <= self.level <= self.expansion.max_level:
            raise ValueError(
                f"level {self.level} not available (expansion holds levels 0..{self.expansion.max_level})"
            )
        if self.n_terms is not None and self.n_terms < 0:
            raise ValueError("n_terms must be non-negative")

    @classmethod
    def level_complete(cls, expansion: Expansion, level: int | None = None) -> "PartialSumSpec":
        return cls(expansion, level=expansion.max_level if level is None else level)

    @classmethod
    def first_n(cls, expansion: Expansion, n_terms: int) -> "PartialSumSpec":
        return cls(expansion, n_terms=n_terms)

    def term_count(self, kind) -> int:
        """Number of basis functions summed, auxiliaries included."""
        kind = BasisKind.parse(kind)
        if self.n_terms is not None:
            return self.n_terms
        per_index = 2 if kind.is_pair else 1
        return 2 + per_index * (2 ** (self.level + 1) - 1)


@dataclass(frozen=True)
class ErrorReport:
    sup_error: float
    argmax_x: float
    grid_size: int

    def to_dict(self) -> dict:
        return {"sup_error": self.sup_error, "argmax_x": self.argmax_x, "grid_size": self.grid_size}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class FrameCheck:
    """Outcome of comparing two frames at the same truncation.

    ``bound`` is None for exact identities (the difference should be
    rounding noise) and the perturbation budget otherwise.
    """

    kinds: tuple[BasisKind, BasisKind]
    level: int
    max_abs_diff: float
    bound: float | None

    @property
    def exact(self) -> bool:
        return self.bound is None

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.max_abs_diff <= self.bound


def _element_pair(kind: BasisKind, idx: DyadicIndex, cfg: SoftplusConfig | None):
    """The integer-shift and half-shift basis functions of ``kind`` at idx."""
    if kind is BasisKind.HAT:
        return (lambda x: hat(idx, x)), None
    if kind is BasisKind.RELU_PAIR:
        return (lambda x: _relu(_scaled(idx, x))), (lambda x: _relu(_scaled(idx, x) - 0.5))
    if kind is BasisKind.SIGMOIDAL_DIFF:
        return (lambda x: d_fn(idx, x)), (lambda x: d_fn(idx, x, offset=0.5))
    a = cfg.a(idx.n)
    if kind is BasisKind.SOFTPLUS_PAIR:
        return (lambda x: _softplus(a, _scaled(idx, x))), (lambda x: _softplus(a, _scaled(idx, x) - 0.5))
    if kind is BasisKind.SIGMOIDAL_SOFTPLUS_DIFF:
        return (lambda x: u_fn(idx, cfg, x, a=a)), (lambda x: u_fn(idx, cfg, x, offset=0.5, a=a))
    raise ValueError(f"no series frame for {kind.value}")


def iter_terms(reg: RegroupedExpansion) -> Iterator[tuple[float, Callable]]:
    """(coefficient, basis function) pairs in series order."""
    yield reg.alpha0, np.ones_like
    yield reg.alpha1, (lambda x: np.array(x, dtype=float, copy=True))
    for idx, c_int, c_half in reg.terms:
        first, second = _element_pair(reg.kind, idx, reg.cfg)
        yield c_int, first
        if second is not None:
            yield c_half, second


def _regrouped(spec: PartialSumSpec, kind: BasisKind, cfg) -> RegroupedExpansion:
    if kind.is_softplus and cfg is None:
        cfg = SoftplusConfig()
    reg = regroup(spec.expansion, kind, cfg)
    if spec.level is not None:
        reg.terms = [t for t in reg.terms if t[0].n <= spec.level]
    return reg


def total_terms(expansion: Expansion, kind) -> int:
    return PartialSumSpec.level_complete(expansion).term_count(kind)


def eval_partial(spec: PartialSumSpec, kind, cfg: SoftplusConfig | None = None, x=None):
    """Sum the prefix of the series described by ``spec`` in the frame ``kind``.

    Terms are accumulated one at a time in series order.
    """
    kind = BasisKind.parse(kind)
    reg = _regrouped(spec, kind, cfg)
    if spec.n_terms is not None and spec.n_terms > total_terms(spec.expansion, kind):
        raise ValueError(
            f"requested {spec.n_terms} terms but the {kind.value} series holds "
            f"{total_terms(spec.expansion, kind)}"
        )
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr)
    acc = np.zeros_like(flat)
    limit = spec.n_terms
    for count, (coef, fn) in enumerate(iter_terms(reg)):
        if limit is not None and count >= limit:
            break
        if coef != 0.0:
            acc = acc + coef * fn(flat)
    if arr.ndim == 0:
        return float(acc[0])
    return acc.reshape(arr.shape)


def sup_error(
    f: Callable,
    spec: PartialSumSpec,
    kind,
    cfg: SoftplusConfig | None = None,
    grid: np.ndarray | None = None,
) -> ErrorReport:
    """max |f - partial sum| over the verification grid.

    The grid contains every dyadic breakpoint through two levels past the
    truncation, so piecewise-linear frames reach their sup on it. Ties
    resolve to the smallest x.
    """
    if grid is None:
        top = spec.level if spec.level is not None else spec.expansion.max_level
        grid = verification_grid(level=top + 2)
    err = np.abs(np.asarray(f(grid), dtype=float) - eval_partial(spec, kind, cfg, grid))
    i = int(np.argmax(err))
    return ErrorReport(float(err[i]), float(grid[i]), int(grid.size))


def perturbation_bound(e: Expansion, level: int, cfg: SoftplusConfig) -> float:
    """Budget for |sum a t - Softplus-frame sum| with the same coefficients.

    Each q_{n,k} is within 4 ln2 / a(n) of t_{n,k}.
    """
    total = 0.0
    for n in range(level + 1):
        a = cfg.a(n)
        total += np.sum(np.abs(e.levels[n])) * 4.0 * LN2 / a
    return float(total)


def _dropped_tail_bound(e: Expansion, level: int, cfg: SoftplusConfig) -> float:
    # The pair frame omits p_a(2^n x - 2^n), at most ln2 / a(n) on [0, 1].
    return float(sum(abs(e.levels[n][-1]) * LN2 / cfg.a(n) for n in range(level + 1)))


def frame_identity_check(
    e: Expansion,
    kinds,
    cfg: SoftplusConfig | None = None,
    level: int | None = None,
    grid: np.ndarray | None = None,
) -> FrameCheck:
    """max |partial_kind1 - partial_kind2| on the grid at a common level.

    Exact frames (Hat, ReluPair, SigmoidalDiff) are identical; when a
    Softplus frame is involved the coefficients of ``e`` are used in both
    and the difference is checked against the perturbation budget.
    """
    k1, k2 = (BasisKind.parse(k) for k in kinds)
    level = e.max_level if level is None else level
    spec = PartialSumSpec.level_complete(e, level)
    cfg = cfg if cfg is not None else SoftplusConfig()
    grid = verification_grid(level=level + 2) if grid is None else grid
    diff = np.abs(eval_partial(spec, k1, cfg, grid) - eval_partial(spec, k2, cfg, grid))
    bound = None
    if k1.is_softplus != k2.is_softplus:
        bound = perturbation_bound(e, level, cfg)
        if BasisKind.SOFTPLUS_PAIR in (k1, k2):
            bound += _dropped_tail_bound(e, level, cfg)
    elif k1.is_softplus and k1 != k2:
        # Both Softplus frames: they differ only by the dropped tail term.
        bound = _dropped_tail_bound(e, level, cfg)
    return FrameCheck((k1, k2), level, float(np.max(diff)), bound)


def perturbation_gaps(cfg: SoftplusConfig, max_level: int, grid: np.ndarray | None = None):
    """(idx, a, measured max |t - q| on the grid, 4 ln2 / a) for every n <= max_level."""
    grid = verification_grid(level=max_level + 2) if grid is None else grid
    rows = []
    for idx in iter_indices(max_level):
        a = cfg.a(idx.n)
        gap = float(np.max(np.abs(t_fn(idx, grid) - q_fn(idx, cfg, grid))))
        rows.append((idx, a, gap, 4.0 * LN2 / a))
    return rows
