"""
A pyramid that ReLU ridges cannot build
=======================================

Finite sums of ReLU ridges are piecewise linear on a line arrangement, and
no two cells where the sum vanishes can share an edge. A square pyramid
needs exactly that around its base corners. Here we look at an
arrangement and then watch least squares fail to close the gap.
"""

import numpy as np

from schauder_relu.multivariate import (
    build_arrangement,
    check_neighbor_relation,
    fit_pyramid,
    random_planes,
    zero_region_audit,
)

rng = np.random.default_rng(0)
dec = build_arrangement(random_planes(10, rng))
print(f"{len(dec.regions)} regions, {len(dec.adjacency)} shared edges, area {dec.total_area():.12f}")
report = check_neighbor_relation(dec)
print("neighbor relation holds:", report.passed, "on", report.edges_checked, "edges")
print("zero-zero edges:", zero_region_audit(dec).zero_zero_adjacent)

# Random ridge features and a linear solve, with growing dictionaries
for n in (8, 16, 32, 64, 128, 256):
    fit = fit_pyramid(n, 42, 101)
    print(f"N = {n:>3}: sup residual {fit.residual_sup:.4f}, rms {fit.residual_l2:.4f}, rank {fit.rank}")
