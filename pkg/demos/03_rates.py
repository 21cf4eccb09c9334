"""
How fast do the interpolants converge?
======================================

Two schemes are available. "peaks" keeps only the finest level of hats,
weighted by the target at the hat peaks. "dyadic" keeps every level up to
p. The first one stalls: between peaks it falls back to the chord.
"""

import math

from schauder_relu.approximation import convergence_sweep, rate_bound
from schauder_relu.expr import Func1D

targets = {"abs(x-0.5)": 1.0, "sin(pi*x)": math.pi, "x*(1-x)": 1.0}

for src, c in targets.items():
    f = Func1D.from_source(src, c)
    for scheme in ("peaks", "dyadic"):
        rep = convergence_sweep(f, 10, 2, scheme)
        worst = max(err / rate_bound(c, p) for p, (_, err) in zip(rep.levels, rep.points))
        slope = "n/a (exact)" if rep.fitted_slope is None else f"{rep.fitted_slope:+.3f}"
        print(f"{src:>11} {scheme:>6}: slope {slope:>12}, worst error / (2c/P) = {worst:.3f}")

# The peaks scheme's error at p = 4 for sin(pi x)
f = Func1D.from_source("sin(pi*x)", math.pi)
print(convergence_sweep(f, 4, 4, "peaks").to_csv())
