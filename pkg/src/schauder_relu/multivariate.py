"""Two-dimensional ReLU sums: line arrangements on the unit square,
per-region activation patterns, and the pyramid experiments.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

EPS = 1e-9
MAX_PLANES = 64
MAX_FIT_PLANES = 256
MAX_FIT_GRID = 201
BOUNDARY = -1

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@dataclass(frozen=True)
class ReluPlane:
    """The term alpha * relu(w . x + b)."""

    w: tuple[float, float]
    b: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "w", (float(self.w[0]), float(self.w[1])))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.w == (0.0, 0.0):
            raise ValueError("ReLU plane weight must be non-zero")
        if self.alpha == 0.0:
            raise ValueError("ReLU plane coefficient must be non-zero")

    @property
    def norm(self) -> float:
        return math.hypot(*self.w)

    def normalized_line(self) -> tuple[np.ndarray, float]:
        """Unit normal and offset of the line w . x + b = 0."""
        return np.array(self.w) / self.norm, self.b / self.norm

    def affine(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ np.array(self.w) + self.b

    def __call__(self, pts) -> np.ndarray:
        return self.alpha * np.maximum(self.affine(pts), 0.0)

    def to_dict(self) -> dict:
        return {"w": list(self.w), "b": self.b, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, data: dict) -> "ReluPlane":
        return cls(tuple(data["w"]), data["b"], data["alpha"])


def relu_sum(planes, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.zeros(len(pts))
    for plane in planes:
        out = out + plane(pts)
    return out


def pyramid(x, y):
    """max(0, 1 - 4 max(|x - 1/2|, |y - 1/2|)) on [0, 1]^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for v in (x, y):
        if np.any(~np.isfinite(v) | (v < 0.0) | (v > 1.0)):
            raise ValueError("pyramid is defined on [0, 1]^2 only")
    m = np.maximum(np.abs(x - 0.5), np.abs(y - 0.5))
    out = np.maximum(0.0, 1.0 - 4.0 * m)
    return float(out) if out.ndim == 0 else out


def polygon_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if abs(area) < 1e-300:
        return verts.mean(axis=0)
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * area)


def _clip(verts, labels, signs, dists, side: int, line_id: int):
    """Part of a convex polygon on one side of a line, with edge labels."""
    out_v, out_l = [], []
    m = len(verts)
    for j in range(m):
        jn = (j + 1) % m
        sp, sq = signs[j], signs[jn]
        if sp != -side:
            # Leaving an on-line vertex toward the dropped side runs along the cut.
            out_v.append(verts[j])
            out_l.append(line_id if (sp == 0 and sq == -side) else labels[j])
        if sp * sq == -1:
            t = dists[j] / (dists[j] - dists[jn])
            out_v.append(verts[j] + t * (verts[jn] - verts[j]))
            out_l.append(labels[j] if sq == side else line_id)
    return np.array(out_v), out_l


def split_polygon(verts: np.ndarray, labels: list[int], normal, offset: float, line_id: int):
    """Split a convex polygon by normal . x + offset = 0.

    Returns (positive_piece, negative_piece), or None when the line does not
    cut the interior. Each piece is (vertices, edge_labels).
    """
    dists = verts @ normal + offset
    signs = np.where(dists > EPS, 1, np.where(dists < -EPS, -1, 0))
    if not (np.any(signs > 0) and np.any(signs < 0)):
        return None
    pos = _clip(verts, labels, signs, dists, 1, line_id)
    neg = _clip(verts, labels, signs, dists, -1, line_id)
    return pos, neg


@dataclass
class Region:
    vertices: np.ndarray
    edge_labels: list[int]
    z: np.ndarray
    wR: np.ndarray
    bR: float

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        return polygon_centroid(self.vertices)

    def sample_points(self) -> np.ndarray:
        """Centroid plus four points pulled halfway toward vertices."""
        c = self.centroid
        verts = self.vertices
        picks = [verts[i * len(verts) // 4] for i in range(4)]
        return np.vstack([c] + [c + 0.5 * (v - c) for v in picks])


@dataclass
class RegionDecomposition:
    """Convex cells of the line arrangement of a ReLU sum on [0, 1]^2.

    ``adjacency`` holds (r, q, i): regions r and q share a positive-length
    edge on line i, with plane i off in r and on in q. ``groups[i]`` lists
    the planes whose lines coincide with line i (just [i] unless degenerate
    planes were merged).
    """

    planes: list[ReluPlane]
    regions: list[Region]
    adjacency: list[tuple[int, int, int]]
    groups: dict[int, list[int]] = field(default_factory=dict)

    @property
    def z(self) -> np.ndarray:
        return np.array([r.z for r in self.regions]).reshape(len(self.regions), len(self.planes))

    @property
    def wR(self) -> np.ndarray:
        return np.array([r.wR for r in self.regions])

    @property
    def bR(self) -> np.ndarray:
        return np.array([r.bR for r in self.regions])

    def total_area(self) -> float:
        return float(sum(r.area for r in self.regions))

    def locate(self, pt, margin: float = 0.0) -> list[int]:
        """Indices of regions whose interior (shrunk by margin) contains pt."""
        hits = []
        for i, r in enumerate(self.regions):
            v = r.vertices
            e = np.roll(v, -1, axis=0) - v
            cross = e[:, 0] * (pt[1] - v[:, 1]) - e[:, 1] * (pt[0] - v[:, 0])
            lengths = np.hypot(e[:, 0], e[:, 1])
            if np.all(cross > margin * lengths):
                hits.append(i)
        return hits

    def to_dict(self) -> dict:
        return {
            "planes": [p.to_dict() for p in self.planes],
            "regions": [
                {
                    "vertices": r.vertices.tolist(),
                    "edge_labels": list(r.edge_labels),
                    "z": r.z.astype(int).tolist(),
                    "wR": r.wR.tolist(),
                    "bR": r.bR,
                }
                for r in self.regions
            ],
            "adjacency": [list(a) for a in self.adjacency],
            "groups": {str(k): v for k, v in self.groups.items()},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _coincidence_groups(planes: list[ReluPlane]) -> dict[int, list[int]]:
    """Group planes by line, keyed by the first plane on each line."""
    groups: dict[int, list[int]] = {}
    lines = [p.normalized_line() for p in planes]
    for i, (n_i, o_i) in enumerate(lines):
        match = None
        for j in groups:
            n_j, o_j = lines[j]
            for s in (1.0, -1.0):
                if np.all(np.abs(n_i - s * n_j) < EPS) and abs(o_i - s * o_j) < EPS:
                    match = j
        if match is None:
            groups[i] = [i]
        else:
            warnings.warn(f"plane {i} lies on the same line as plane {match}; merged", stacklevel=3)
            groups[match].append(i)
    return groups


def _activation(planes, pt) -> np.ndarray:
    return np.array([p.affine(pt) > 0.0 for p in planes], dtype=bool)


def _adjacency(regions: list[Region], planes, groups) -> list[tuple[int, int, int]]:
    found = set()
    for i in groups:
        normal, offset = planes[i].normalized_line()
        direction = np.array([-normal[1], normal[0]])
        edges = []
        for r, region in enumerate(regions):
            v = region.vertices
            side = 1 if float(region.centroid @ normal + offset) > 0 else -1
            for j, label in enumerate(region.edge_labels):
                if label != i:
                    continue
                a, b = v[j] @ direction, v[(j + 1) % len(v)] @ direction
                edges.append((r, side, min(a, b), max(a, b)))
        for x in range(len(edges)):
            r, s, lo, hi = edges[x]
            for y in range(x + 1, len(edges)):
                q, t, lo2, hi2 = edges[y]
                if s == t or r == q:
                    continue
                if min(hi, hi2) - max(lo, lo2) > EPS:
                    off, on = (r, q) if s < 0 else (q, r)
                    found.add((off, on, i))
    return sorted(found)


def build_arrangement(planes) -> RegionDecomposition:
    """Split the unit square by every plane's line and record activation
    patterns, per-region weights and edge adjacency.
    """
    planes = list(planes)
    if len(planes) > MAX_PLANES:
        raise ValueError(f"at most {MAX_PLANES} planes supported, got {len(planes)}")
    seen = set()
    for p in planes:
        key = (p.w, p.b)
        if key in seen:
            raise ValueError(f"duplicate (w, b) pair {key}")
        seen.add(key)
    groups = _coincidence_groups(planes)

    cells = [(UNIT_SQUARE.copy(), [BOUNDARY] * 4)]
    for i in groups:
        normal, offset = planes[i].normalized_line()
        nxt = []
        for verts, labels in cells:
            pieces = split_polygon(verts, labels, normal, offset, i)
            if pieces is None:
                nxt.append((verts, labels))
            else:
                nxt.extend(pieces)
        cells = nxt

    W = np.array([p.w for p in planes]).reshape(len(planes), 2)
    B = np.array([p.b for p in planes])
    A = np.array([p.alpha for p in planes])
    regions = []
    for verts, labels in cells:
        z = _activation(planes, polygon_centroid(verts))
        coef = A * z
        regions.append(Region(verts, labels, z, coef @ W if len(planes) else np.zeros(2), float(coef @ B)))
    return RegionDecomposition(planes, regions, _adjacency(regions, planes, groups), groups)


@dataclass
class NeighborReport:
    passed: bool
    edges_checked: int
    first_violation: tuple[int, int, int] | None = None
    reason: str = ""
    signs: list[int] = field(default_factory=list)


def check_neighbor_relation(dec: RegionDecomposition, planes=None, tol: float = 1e-9) -> NeighborReport:
    """Verify wQ - wR = +-alpha_i w_i and bQ - bR = +-alpha_i b_i on every
    shared edge, with the sign set by which side has plane i switched on.
    """
    planes = dec.planes if planes is None else list(planes)
    signs = []
    for r, q, i in dec.adjacency:
        R, Q = dec.regions[r], dec.regions[q]
        group = dec.groups.get(i, [i])
        flips = np.flatnonzero(R.z != Q.z)
        if sorted(flips.tolist()) != sorted(group):
            return NeighborReport(
                False, len(signs), (r, q, i),
                f"regions {r},{q} across line {i} differ in bits {flips.tolist()}, expected {group}",
                signs,
            )
        dw = np.zeros(2)
        db = 0.0
        for j in group:
            s = int(Q.z[j]) - int(R.z[j])
            dw = dw + s * planes[j].alpha * np.array(planes[j].w)
            db += s * planes[j].alpha * planes[j].b
        if np.max(np.abs((Q.wR - R.wR) - dw)) > tol or abs((Q.bR - R.bR) - db) > tol:
            return NeighborReport(
                False, len(signs), (r, q, i),
                f"weight jump across line {i} between regions {r},{q} is not +-alpha_i w_i",
                signs,
            )
        signs.append(int(Q.z[i]) - int(R.z[i]))
    return NeighborReport(True, len(signs), None, "", signs)


@dataclass
class ZeroAudit:
    zero_regions: list[int]
    nonzero_regions: list[int]
    zero_zero_adjacent: list[tuple[int, int, int]]
    target_mismatch: list[int] = field(default_factory=list)

    @property
    def obstruction_found(self) -> bool:
        return bool(self.zero_zero_adjacent)


def zero_region_audit(dec: RegionDecomposition, target=None, tol: float = 1e-9) -> ZeroAudit:
    """Classify regions as zero (wR = 0 and bR = 0) or not, and list every
    edge shared by two zero regions.

    ``target(x, y)`` is optional; regions where the candidate sum departs
    from it at any sample point are reported in ``target_mismatch``.
    """
    zero, nonzero = [], []
    for idx, region in enumerate(dec.regions):
        is_zero = np.all(np.abs(region.wR) <= tol) and abs(region.bR) <= tol
        (zero if is_zero else nonzero).append(idx)
    zero_set = set(zero)
    pairs = [a for a in dec.adjacency if a[0] in zero_set and a[1] in zero_set]
    mismatch = []
    if target is not None:
        for idx, region in enumerate(dec.regions):
            pts = region.sample_points()
            cand = pts @ region.wR + region.bR
            want = np.asarray(target(pts[:, 0], pts[:, 1]), dtype=float)
            if np.max(np.abs(cand - want)) > tol:
                mismatch.append(idx)
    return ZeroAudit(zero, nonzero, pairs, mismatch)


def random_planes(count: int, rng: np.random.Generator, b_range=(-1.5, 0.5)) -> list[ReluPlane]:
    """Unit-circle weights, uniform biases, coefficients uniform in +-[0.5, 2]."""
    u = rng.random((count, 3))
    theta = 2.0 * np.pi * u[:, 0]
    b = b_range[0] + (b_range[1] - b_range[0]) * u[:, 1]
    alpha = np.where(u[:, 2] < 0.5, -1.0, 1.0) * (0.5 + 3.0 * np.abs(u[:, 2] - 0.5))
    return [ReluPlane((math.cos(t), math.sin(t)), bb, a) for t, bb, a in zip(theta, b, alpha)]


@dataclass
class FitReport:
    n_planes: int
    seed: int
    grid: int
    residual_sup: float
    residual_l2: float
    train_rms: float
    rank: int
    rank_deficient: bool
    planes: list[ReluPlane]

    def to_dict(self) -> dict:
        return {
            "N": self.n_planes,
            "seed": self.seed,
            "grid": self.grid,
            "eval_grid": 2 * self.grid - 1,
            "residual_sup": self.residual_sup,
            "residual_l2": self.residual_l2,
            "train_rms": self.train_rms,
            "rank": self.rank,
            "rank_deficient": self.rank_deficient,
            "planes": [p.to_dict() for p in self.planes],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _square_grid(g: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, g)
    xx, yy = np.meshgrid(t, t, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def fit_pyramid(n_planes: int, seed: int, grid: int = 101) -> FitReport:
    """Least-squares fit of the pyramid by random ReLU ridge features.

    Feature i is relu(w_i . x + b_i) with w_i uniform on the unit circle
    and b_i uniform in [-1.5, 0.5], drawn in order from ``seed`` so that
    smaller N gives a prefix of the larger dictionary. Residuals are
    measured on the (2g - 1)^2 refinement of the g x g training grid;
    ``residual_l2`` is the RMS there.
    """
    if not 0 <= n_planes <= MAX_FIT_PLANES:
        raise ValueError(f"N must be in [0, {MAX_FIT_PLANES}]")
    if not 2 <= grid <= MAX_FIT_GRID:
        raise ValueError(f"grid must be in [2, {MAX_FIT_GRID}]")
    rng = np.random.default_rng(seed)
    u = rng.random((n_planes, 2))
    theta = 2.0 * np.pi * u[:, 0]
    W = np.column_stack([np.cos(theta), np.sin(theta)])
    b = -1.5 + 2.0 * u[:, 1]

    train = _square_grid(grid)
    fine = _square_grid(2 * grid - 1)
    y_train = pyramid(train[:, 0], train[:, 1])
    y_fine = pyramid(fine[:, 0], fine[:, 1])
    if n_planes == 0:
        alpha = np.zeros(0)
        rank = 0
    else:
        A = np.maximum(train @ W.T + b, 0.0)
        alpha, _, rank, _ = np.linalg.lstsq(A, y_train, rcond=None)
    pred_train = np.maximum(train @ W.T + b, 0.0) @ alpha
    pred_fine = np.maximum(fine @ W.T + b, 0.0) @ alpha
    resid = y_fine - pred_fine
    planes = [ReluPlane(tuple(w), bb, a) for w, bb, a in zip(W, b, alpha) if a != 0.0]
    return FitReport(
        n_planes=n_planes,
        seed=seed,
        grid=grid,
        residual_sup=float(np.max(np.abs(resid))),
        residual_l2=float(np.sqrt(np.mean(resid**2))),
        train_rms=float(np.sqrt(np.mean((y_train - pred_train) ** 2))),
        rank=int(rank),
        rank_deficient=bool(rank < n_planes),
        planes=planes,
    )
