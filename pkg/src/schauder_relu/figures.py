"""Sampled curve data for the reference plots, one table per panel."""

from __future__ import annotations

import numpy as np

from .basis import DyadicIndex, SoftplusConfig, d_fn, g_fn, hat, q_fn, relu, t_fn
from .multivariate import pyramid

CURVES = [DyadicIndex(0, 0), DyadicIndex(1, 0), DyadicIndex(1, 1), DyadicIndex(2, 1)]
FIGURE_SHARPNESS = 10.0
PANELS = ("relu", "first-differences", "second-differences", "g-shifted", "softplus-hat", "pyramid")


def _label(prefix: str, idx: DyadicIndex) -> str:
    return f"{prefix}_n{idx.n}_k{idx.k}"


def _curve_panel(prefix: str, fn, x: np.ndarray):
    header = ["x"] + [_label(prefix, idx) for idx in CURVES]
    columns = [x] + [fn(idx, x) for idx in CURVES]
    return header, np.column_stack(columns)


def panel(name: str, samples: int = 1025, surface: int = 101):
    """(header, rows) for one panel; 1-D panels are sampled on [0, 1]."""
    x = np.linspace(0.0, 1.0, samples)
    if name == "relu":
        return _curve_panel("r", lambda idx, x: relu(np.ldexp(x, idx.n) - idx.k), x)
    if name == "first-differences":
        return _curve_panel("d", d_fn, x)
    if name == "second-differences":
        header, rows = _curve_panel("t", t_fn, x)
        hats = np.column_stack([hat(idx, x) for idx in CURVES])
        return header + [_label("s", idx) for idx in CURVES], np.hstack([rows, hats])
    if name == "g-shifted":
        return _curve_panel("g_plus_half", lambda idx, x: g_fn(idx, x) + 0.5, x)
    if name == "softplus-hat":
        idx = DyadicIndex(0, 0)
        q = q_fn(idx, SoftplusConfig(), x, a=FIGURE_SHARPNESS)
        return ["x", "q_a10", "t"], np.column_stack([x, q, t_fn(idx, x)])
    if name == "pyramid":
        t = np.linspace(0.0, 1.0, surface)
        xx, yy = np.meshgrid(t, t, indexing="ij")
        xs, ys = xx.ravel(), yy.ravel()
        return ["x", "y", "z"], np.column_stack([xs, ys, pyramid(xs, ys)])
    raise ValueError(f"unknown panel {name!r}; choose from {PANELS}")


def all_panels(samples: int = 1025, surface: int = 101) -> dict:
    return {name: panel(name, samples, surface) for name in PANELS}
