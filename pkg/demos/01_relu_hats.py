"""
Hats out of three ReLUs
=======================

A Schauder hat is a second difference of shifted ReLUs. We check this on a
fine grid, then expand a parabola and sum it in three different frames.
"""

import numpy as np

from schauder_relu import BasisKind, DyadicIndex, PartialSumSpec, analyze, eval_partial, hat, t_fn
from schauder_relu.basis import verification_grid
from schauder_relu.expr import Func1D

x = verification_grid(bits=12)

# t_{n,k} is r(y) - 2 r(y - 1/2) + r(y - 1) with y = 2^n x - k
idx = DyadicIndex(3, 5)
print("support of", idx, "=", idx.support)
print("max |t - s| on the grid:", np.max(np.abs(t_fn(idx, x) - hat(idx, x))))

# Coefficients of x(1 - x): each level is a quarter of the previous one
f = Func1D.from_source("x*(1-x)")
e = analyze(f, 5)
for n, level in enumerate(e.levels):
    print(f"level {n}: {level[0]:.6f} (x{len(level)})")

# The same partial sum, rendered as hats, ReLU pairs and ReLU ramps
spec = PartialSumSpec.level_complete(e)
sums = {k: eval_partial(spec, k, x=x) for k in (BasisKind.HAT, BasisKind.RELU_PAIR, BasisKind.SIGMOIDAL_DIFF)}
ref = sums[BasisKind.HAT]
for kind, s in sums.items():
    print(f"{kind.value:>14}: max diff to Hat {np.max(np.abs(s - ref)):.2e}, "
          f"max error to f {np.max(np.abs(s - f(x))):.2e}")
