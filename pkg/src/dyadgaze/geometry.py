"""Face/eye regions of interest and gaze containment tests.

Conventions used throughout:
  - polygons are convex, counter-clockwise (positive shoelace area),
    with collinear boundary points removed;
  - a point on the polygon boundary counts as inside, which makes
    point_in_polygon(p) equivalent to distance_to_polygon(p) == 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, NoFace

# Landmark index ranges of the 68-point convention.
LEFT_EYE_IDX = slice(36, 42)
RIGHT_EYE_IDX = slice(42, 48)

DEFAULT_EYE_MARGIN = 1.5
DEFAULT_D_MAX = 100.0

# Tolerance for the boundary-inside rule; matches the accepted
# disagreement band against brute-force oracles.
_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class Polygon:
    """Convex polygon as an (n, 2) float vertex array, n >= 3, CCW."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise Degenerate(f"polygon needs >= 3 2-D vertices, got shape {v.shape}")
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    def area(self) -> float:
        """Shoelace area; positive for CCW vertex order."""
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def centroid(self) -> tuple[float, float]:
        c = self.vertices.mean(axis=0)
        return float(c[0]), float(c[1])


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> Polygon:
    """Convex hull via Andrew's monotone chain.

    Returns the hull counter-clockwise with collinear boundary points
    dropped. Raises Degenerate when all points are collinear or fewer
    than three points are given.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise Degenerate(f"expected (n, 2) points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise Degenerate("points must be finite")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) < 3:
        raise Degenerate("need at least 3 distinct points")

    def half(seq):
        out: list[tuple[float, float]] = []
        for p in seq:
            # strict turn test drops collinear boundary points
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise Degenerate("all points are collinear")
    return Polygon(np.array(hull))


def face_polygon(face) -> Polygon:
    """Face ROI: convex hull of all 68 landmarks."""
    if not face.success:
        raise NoFace("face detection unsuccessful for this frame")
    return convex_hull(face.landmarks)


def scale_about(poly: Polygon, center, factor: float) -> Polygon:
    c = np.asarray(center, dtype=float)
    return Polygon(c + factor * (poly.vertices - c))


def eye_polygons(face, margin: float = DEFAULT_EYE_MARGIN) -> tuple[Polygon, Polygon]:
    """Eye ROIs: hulls of the eyelid landmarks, dilated about their centroid.

    The scaling center is the mean of the six eyelid landmarks (not of the
    hull vertices), so batched evaluation can scale the raw points before
    hull construction and obtain the identical polygon.
    """
    if not face.success:
        raise NoFace("face detection unsuccessful for this frame")
    if margin < 1.0:
        raise ValueError(f"margin must be >= 1, got {margin}")
    out = []
    for idx in (LEFT_EYE_IDX, RIGHT_EYE_IDX):
        pts = np.asarray(face.landmarks, dtype=float)[idx]
        center = pts.mean(axis=0)
        out.append(scale_about(convex_hull(pts), center, margin))
    return out[0], out[1]


def point_in_polygon(p, poly: Polygon) -> bool:
    """Ray-casting containment test; boundary points count as inside."""
    px, py = float(p[0]), float(p[1])
    v = poly.vertices
    n = len(v)
    inside = False
    for i in range(n):
        ax, ay = v[i]
        bx, by = v[(i + 1) % n]
        # explicit boundary check keeps the PIP/distance equivalence exact
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if abs(cross) <= _BOUNDARY_EPS * (1.0 + abs(bx - ax) + abs(by - ay)):
            dot = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
            seg2 = (bx - ax) ** 2 + (by - ay) ** 2
            if -_BOUNDARY_EPS <= dot <= seg2 + _BOUNDARY_EPS:
                return True
        if (ay > py) != (by > py):
            x_at = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_at:
                inside = not inside
    return inside


def distance_to_polygon(p, poly: Polygon) -> float:
    """0 for interior/boundary points, else min distance to any edge."""
    if point_in_polygon(p, poly):
        return 0.0
    pt = np.asarray(p, dtype=float)
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    ab = b - a
    ap = pt - a
    seg2 = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", ap, ab) / np.where(seg2 == 0, 1.0, seg2), 0.0, 1.0)
    closest = a + t[:, None] * ab
    return float(np.min(np.hypot(*(pt - closest).T)))


def contact_score(p, poly: Polygon, d_max: float = DEFAULT_D_MAX) -> float:
    """Continuous contact value: 1 inside, linear ramp to 0 at d_max."""
    if d_max <= 0:
        raise ValueError(f"d_max must be positive, got {d_max}")
    d = distance_to_polygon(p, poly)
    if d == 0.0:
        return 1.0
    return max(0.0, 1.0 - d / d_max)


def points_in_hulls(point_sets: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Batched hull-containment: queries[i] in hull(point_sets[i])?

    Uses the angular-gap criterion: q lies in the hull of S iff the
    directions from q to the points of S leave no angular gap larger
    than pi (a gap of exactly pi means q sits on the hull boundary,
    which counts as inside). Avoids per-frame hull construction.

    point_sets: (n, k, 2), queries: (n, 2) -> (n,) bool. Rows with
    non-finite values come back False.
    """
    d = point_sets - queries[:, None, :]
    r2 = np.einsum("nkc,nkc->nk", d, d)
    on_vertex = np.any(r2 <= _BOUNDARY_EPS**2, axis=1)
    with np.errstate(invalid="ignore"):
        theta = np.sort(np.arctan2(d[:, :, 1], d[:, :, 0]), axis=1)
        gaps = np.diff(theta, axis=1)
        wrap = theta[:, 0] + 2.0 * np.pi - theta[:, -1]
        max_gap = np.maximum(gaps.max(axis=1, initial=-np.inf), wrap)
        inside = max_gap <= np.pi + 1e-12
    finite = np.all(np.isfinite(point_sets), axis=(1, 2)) & np.all(
        np.isfinite(queries), axis=1
    )
    return (inside | on_vertex) & finite
