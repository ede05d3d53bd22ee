"""Geometric functionals on point sets and closed polylines.

Point sets are 1-D arrays of complex numbers.  Diameter and set distance
carry accelerated paths (convex hull, KD-tree) that agree exactly with the
brute-force definitions on the pairs they select; everything downstream
(relative distance, turning, shape, quasicircle constants, separation
matrices) is a deterministic function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import (
    CenterOnBoundary,
    ClippedCurve,
    CurveTooSmall,
    DegenerateSet,
    EmptySet,
    IdenticalEndpoints,
    PointsNotInSet,
    TooFewCurves,
)

_HULL_THRESHOLD = 64          # below this, brute force beats a hull
_PAIRWISE_BUDGET = 4_000_000  # max n*m for dense pairwise distance


def as_points(points) -> np.ndarray:
    return np.asarray(points, dtype=np.complex128).ravel()


def _hull_candidates(pts: np.ndarray) -> np.ndarray:
    """Convex-hull vertices of a point set (all points on degeneracy).

    Every pair realizing the diameter consists of extreme points, so the
    maximum pairwise distance over these candidates equals the full scan.
    """
    if len(pts) <= _HULL_THRESHOLD:
        return pts
    xy = np.column_stack((pts.real, pts.imag))
    try:
        hull = ConvexHull(xy)
    except QhullError:
        return pts  # collinear or otherwise degenerate
    return pts[hull.vertices]


def _max_pairwise(pts: np.ndarray) -> float:
    d = np.abs(pts[:, None] - pts[None, :])
    return float(d.max())


def diameter(points) -> float:
    """Largest pairwise distance; 0 for a singleton."""
    pts = as_points(points)
    if len(pts) == 0:
        raise EmptySet("diameter of an empty set")
    if len(pts) == 1:
        return 0.0
    return _max_pairwise(_hull_candidates(pts))


def set_distance(a, b) -> float:
    """Smallest pairwise distance between two nonempty point sets."""
    pa, pb = as_points(a), as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptySet("set_distance of an empty set")
    if len(pa) * len(pb) <= _PAIRWISE_BUDGET:
        block = max(1, _PAIRWISE_BUDGET // max(len(pb), 1))
        best = math.inf
        for lo in range(0, len(pa), block):
            d = np.abs(pa[lo:lo + block, None] - pb[None, :])
            best = min(best, float(d.min()))
        return best
    tree = cKDTree(np.column_stack((pb.real, pb.imag)))
    dists, idx = tree.query(np.column_stack((pa.real, pa.imag)), k=1)
    i = int(np.argmin(dists))
    # recompute through the same arithmetic as the dense path
    return float(abs(pa[i] - pb[idx[i]]))


def relative_distance(a, b) -> float:
    """set_distance(a, b) / min(diameter(a), diameter(b))."""
    da, db = diameter(a), diameter(b)
    if da == 0.0 or db == 0.0:
        raise DegenerateSet("relative distance needs positive diameters")
    return set_distance(a, b) / min(da, db)


def turning(points, z1: complex, z2: complex) -> float:
    """diameter(E) / |z1 - z2| for z1, z2 in E; infinity when z1 == z2."""
    pts = as_points(points)
    z1, z2 = complex(z1), complex(z2)
    if not (np.any(pts == z1) and np.any(pts == z2)):
        raise PointsNotInSet("turning is defined only about points of the set")
    if z1 == z2:
        return math.inf
    return diameter(pts) / abs(z1 - z2)


def shape(boundary, z: complex) -> float:
    """Farthest-boundary over nearest-boundary distance from z."""
    pts = as_points(boundary)
    if len(pts) == 0:
        raise EmptySet("shape needs a nonempty boundary sample")
    d = np.abs(pts - complex(z))
    nearest = float(d.min())
    if nearest == 0.0:
        raise CenterOnBoundary("center lies on the sampled boundary")
    return float(d.max()) / nearest


def _arc_key(arc: np.ndarray) -> tuple:
    first = arc[0]
    return (diameter(arc), len(arc), first.real, first.imag)


def split_arcs(curve, x: complex, y: complex) -> tuple[np.ndarray, np.ndarray]:
    """The two vertex chains of a closed polyline between vertices x and y,
    smaller diameter first (ties: fewer vertices, then lexicographic first
    vertex).  Both chains include the endpoints."""
    pts = curve.points if hasattr(curve, "points") else as_points(curve)
    x, y = complex(x), complex(y)
    if x == y:
        raise IdenticalEndpoints("split_arcs needs two distinct vertices")
    ix = np.flatnonzero(pts == x)
    iy = np.flatnonzero(pts == y)
    if len(ix) == 0 or len(iy) == 0:
        raise PointsNotInSet("split endpoints must be polyline vertices")
    i, j = int(ix[0]), int(iy[0])
    if i > j:
        i, j = j, i
    arc1 = pts[i:j + 1]
    arc2 = np.concatenate((pts[j:], pts[:i + 1]))
    return tuple(sorted((arc1, arc2), key=_arc_key))  # type: ignore[return-value]


def _sample_indices(m: int, max_pairs: int) -> np.ndarray:
    """Deterministic stride subsample of 0..m-1 keeping <= max_pairs pairs."""
    t = int((1 + math.isqrt(1 + 8 * max_pairs)) // 2)
    t = max(2, min(m, t))
    stride = math.ceil(m / t)
    return np.arange(0, m, stride)


def quasicircle_constant(curve, max_pairs: int = 300) -> float:
    """Empirical bounded-turning constant of a closed polyline.

    Maximum over a deterministic stride subsample of vertex pairs (x, y) of
    diam(smaller arc between x and y) / |x - y|.  A lower bound for the true
    supremum of the underlying curve.
    """
    clipped = bool(getattr(curve, "clipped", False))
    if clipped:
        raise ClippedCurve("quasicircle constant is not computed for clipped curves")
    pts = curve.points if hasattr(curve, "points") else as_points(curve)
    m = len(pts)
    if m < 8:
        raise CurveTooSmall("need at least 8 vertices")

    idx = _sample_indices(m, max_pairs)
    t = len(idx)
    # candidate extreme points of each inter-sample segment (cyclic)
    bounds = list(idx) + [m]
    seg_candidates = []
    for k in range(t):
        lo = bounds[k]
        hi = bounds[k + 1]
        seg = pts[lo:hi + 1] if hi < m else np.concatenate((pts[lo:], pts[:1]))
        seg_candidates.append(_hull_candidates(seg))

    def arc_diam(a: int, b: int) -> float:
        """Diameter of the arc covering segments a..b-1 (cyclic)."""
        parts = [seg_candidates[k % t] for k in range(a, b)]
        return _max_pairwise(np.concatenate(parts))

    best = 1.0
    for ai in range(t):
        for bi in range(ai + 1, t):
            x, y = pts[idx[ai]], pts[idx[bi]]
            if x == y:
                continue  # coincident vertices (crack pinch): not a valid pair
            d1 = arc_diam(ai, bi)
            d2 = arc_diam(bi, ai + t)
            lam = min(d1, d2) / abs(x - y)
            if lam > best:
                best = lam
    return best


@dataclass(frozen=True)
class SeparationMatrix:
    """Pairwise relative distances between curves; diagonal entries are NaN."""

    ids: tuple[int, ...]
    matrix: np.ndarray
    min_value: float
    min_pair: tuple[int, int]


def separation_matrix(curves) -> SeparationMatrix:
    """Symmetric matrix of pairwise relative distances of curve vertex sets."""
    curves = list(curves)
    if len(curves) < 2:
        raise TooFewCurves("need at least two curves")
    ids = tuple(getattr(c, "component_id", i) for i, c in enumerate(curves))
    pts = [c.points if hasattr(c, "points") else as_points(c) for c in curves]
    diams = [diameter(p) for p in pts]
    if any(d == 0.0 for d in diams):
        raise DegenerateSet("every curve needs positive diameter")
    n = len(curves)
    mat = np.full((n, n), np.nan)
    best = math.inf
    pair = (ids[0], ids[1])
    for i in range(n):
        for j in range(i + 1, n):
            val = set_distance(pts[i], pts[j]) / min(diams[i], diams[j])
            mat[i, j] = mat[j, i] = val
            if val < best:
                best = val
                pair = (ids[i], ids[j])
    return SeparationMatrix(ids=ids, matrix=mat, min_value=best, min_pair=pair)
