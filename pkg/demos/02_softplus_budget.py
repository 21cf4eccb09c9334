"""
Smoothing the hats with Softplus
================================

Replacing every ReLU by a Softplus of growing sharpness moves each hat by
at most 4 ln2 / a. The sharpness schedule keeps the total movement below
1 / (2K).
"""

import numpy as np

from schauder_relu import SoftplusConfig, analyze, frame_identity_check
from schauder_relu.evaluator import perturbation_gaps
from schauder_relu.expr import Func1D

for K in (0.5, 1.0, 4.0):
    cfg = SoftplusConfig(K)
    rows = perturbation_gaps(cfg, 6)
    total = sum(gap for _, _, gap, _ in rows)
    print(f"K = {K}: a(0) = {cfg.a(0):.2f}, total gap {total:.5f} < {1 / (2 * K)}")

# Gap per level shrinks by a factor four
for idx, a, gap, bound in perturbation_gaps(SoftplusConfig(1.0), 4):
    if idx.k == 0:
        print(f"n = {idx.n}: a = {a:9.2f}  gap = {gap:.3e}  bound = {bound:.3e}")

# A full expansion in the smooth frame stays inside its budget
e = analyze(Func1D.from_source("sin(pi*x)"), 6)
for kind in ("SoftplusPair", "SigmoidalSoftplusDiff"):
    check = frame_identity_check(e, ("Hat", kind))
    print(f"{kind}: max diff {check.max_abs_diff:.4f}, budget {check.bound:.4f}")

print("sharpest element used:", np.format_float_scientific(SoftplusConfig(1.0).a(6), 3))
