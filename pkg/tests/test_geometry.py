"""Geometry tests against independent brute-force oracles.

Oracles used here (and by the acceptance suite):
  - winding-number containment (angle summation)
  - dense edge sampling + ternary refinement for distances
  - O(n^3) edge-validity convex hull
"""

from __future__ import annotations

import numpy as np
import pytest

from dyadgaze.errors import Degenerate, NoFace
from dyadgaze.geometry import (
    Polygon,
    contact_score,
    convex_hull,
    distance_to_polygon,
    eye_polygons,
    face_polygon,
    point_in_polygon,
    points_in_hulls,
)

from conftest import make_face

UNIT_SQUARE = Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


# -- oracles -------------------------------------------------------------------

def winding_inside(p, vertices) -> bool:
    """Nonzero winding of the polygon boundary around p."""
    v = np.asarray(vertices, dtype=float) - np.asarray(p, dtype=float)
    ang = np.arctan2(v[:, 1], v[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return abs(float(d.sum())) > np.pi


def sampled_boundary_distance(p, vertices, coarse=512, iters=90) -> float:
    """Min distance from p to the polygon outline, by sampling + ternary search."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(vertices, dtype=float)
    b = np.roll(a, -1, axis=0)
    t = np.linspace(0.0, 1.0, coarse)
    pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    d2 = ((pts - p) ** 2).sum(axis=2)
    ti = d2.argmin(axis=1)
    lo = np.clip(t[ti] - 1.0 / (coarse - 1), 0.0, 1.0)
    hi = np.clip(t[ti] + 1.0 / (coarse - 1), 0.0, 1.0)

    def f(tt):
        q = a + tt[:, None] * (b - a)
        return ((q - p) ** 2).sum(axis=1)

    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        keep_lo = f(m1) <= f(m2)
        lo = np.where(keep_lo, lo, m1)
        hi = np.where(keep_lo, m2, hi)
    tm = (lo + hi) / 2.0
    return float(np.sqrt(min(f(tm).min(), d2.min())))


def brute_hull_vertex_set(pts) -> set:
    """Hull vertices by O(n^3) edge validity: (i, j) is a hull edge iff
    every other point lies on its left."""
    pts = np.asarray(pts, dtype=float)
    n = len(pts)
    on_hull = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            e = pts[j] - pts[i]
            d = pts - pts[i]
            cr = e[0] * d[:, 1] - e[1] * d[:, 0]
            if np.all(cr >= -1e-12):
                on_hull.add(i)
                on_hull.add(j)
    return {tuple(pts[i]) for i in on_hull}


def random_convex_polygon(rng, n_min=3, n_max=12, scale=100.0) -> Polygon:
    while True:
        pts = rng.uniform(-scale, scale, size=(rng.integers(n_min, n_max + 1), 2))
        try:
            return convex_hull(pts)
        except Degenerate:
            continue


# -- convex hull ---------------------------------------------------------------

def test_hull_square_with_interior_point():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    hull = convex_hull(pts)
    assert len(hull) == 4
    assert {tuple(v) for v in hull.vertices} == {(0, 0), (1, 0), (1, 1), (0, 1)}
    assert hull.area() > 0  # counter-clockwise


def test_hull_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    for _ in range(25):
        pts = rng.normal(size=(68, 2)) * 50.0
        hull = convex_hull(pts)
        assert {tuple(v) for v in hull.vertices} == brute_hull_vertex_set(pts)
        assert hull.area() > 0
        # every input point is inside per the winding oracle or on the hull
        verts = {tuple(v) for v in hull.vertices}
        for p in pts:
            assert winding_inside(p, hull.vertices) or tuple(p) in verts


def test_hull_collinear_degenerate():
    with pytest.raises(Degenerate):
        convex_hull([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(Degenerate):
        convex_hull([(0, 0), (1, 1)])


def test_hull_drops_collinear_boundary_points():
    hull = convex_hull([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)])
    assert {tuple(v) for v in hull.vertices} == {(0, 0), (2, 0), (2, 2), (0, 2)}


def test_hull_idempotent():
    rng = np.random.default_rng(7)
    for _ in range(10):
        hull = convex_hull(rng.uniform(size=(30, 2)))
        again = convex_hull(hull.vertices)
        assert np.array_equal(
            np.sort(hull.vertices, axis=0), np.sort(again.vertices, axis=0)
        )


# -- face / eye polygons ---------------------------------------------------------

def test_face_polygon_contains_all_landmarks(fixture_face):
    hull = face_polygon(fixture_face)
    verts = {tuple(v) for v in hull.vertices}
    for p in fixture_face.landmarks:
        assert winding_inside(p, hull.vertices) or tuple(p) in verts


def test_face_polygon_requires_success():
    with pytest.raises(NoFace):
        face_polygon(make_face(success=False))
    with pytest.raises(NoFace):
        eye_polygons(make_face(success=False))


def test_eye_polygons_margin_one_is_eyelid_hull(fixture_face):
    left, right = eye_polygons(fixture_face, margin=1.0)
    raw_left = convex_hull(fixture_face.landmarks[36:42])
    raw_right = convex_hull(fixture_face.landmarks[42:48])
    assert np.allclose(np.sort(left.vertices, axis=0), np.sort(raw_left.vertices, axis=0))
    assert np.allclose(np.sort(right.vertices, axis=0), np.sort(raw_right.vertices, axis=0))


def test_eye_polygons_margin_two_doubles_centroid_distance(fixture_face):
    one, _ = eye_polygons(fixture_face, margin=1.0)
    two, _ = eye_polygons(fixture_face, margin=2.0)
    center = fixture_face.landmarks[36:42].mean(axis=0)
    d1 = np.hypot(*(one.vertices - center).T)
    d2 = np.hypot(*(two.vertices - center).T)
    assert np.allclose(d2, 2.0 * d1)


def test_eye_area_ratio_is_margin_squared(fixture_face):
    base_l, base_r = eye_polygons(fixture_face, margin=1.0)
    big_l, big_r = eye_polygons(fixture_face, margin=1.5)
    assert big_l.area() / base_l.area() == pytest.approx(2.25, abs=1e-9)
    assert big_r.area() / base_r.area() == pytest.approx(2.25, abs=1e-9)


def test_eye_polygons_inside_face_polygon():
    for wall in (0, 2_500_000, 7_000_000, 11_300_000):
        face = make_face(wall_us=wall)
        hull = face_polygon(face)
        for poly in eye_polygons(face, margin=1.5):
            for v in poly.vertices:
                assert point_in_polygon(v, hull)


def test_eye_margin_below_one_rejected(fixture_face):
    with pytest.raises(ValueError):
        eye_polygons(fixture_face, margin=0.5)


# -- containment ------------------------------------------------------------------

def test_pip_interior_exterior():
    assert point_in_polygon((0.5, 0.5), UNIT_SQUARE)
    assert not point_in_polygon((2.0, 2.0), UNIT_SQUARE)


def test_pip_boundary_counts_as_inside():
    assert point_in_polygon((0.0, 0.0), UNIT_SQUARE)  # vertex
    assert point_in_polygon((0.5, 0.0), UNIT_SQUARE)  # edge midpoint
    assert point_in_polygon((1.0, 0.5), UNIT_SQUARE)
    assert point_in_polygon((0.5, 1.0), UNIT_SQUARE)


def test_pip_agrees_with_winding_oracle():
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(300):
        poly = random_convex_polygon(rng)
        lo = poly.vertices.min(axis=0) - 30
        hi = poly.vertices.max(axis=0) + 30
        for _ in range(5):
            p = rng.uniform(lo, hi)
            got = point_in_polygon(p, poly)
            want = winding_inside(p, poly.vertices)
            if got != want:
                # disagreement allowed only within 1e-9 of the outline
                assert sampled_boundary_distance(p, poly.vertices) <= 1e-9
            checked += 1
    assert checked == 1500


def test_batched_containment_matches_scalar():
    rng = np.random.default_rng(9)
    sets, queries, expect = [], [], []
    for _ in range(400):
        pts = rng.uniform(-50, 50, size=(6, 2))
        try:
            poly = convex_hull(pts)
        except Degenerate:
            continue
        q = rng.uniform(-80, 80, size=2)
        sets.append(pts)
        queries.append(q)
        expect.append(point_in_polygon(q, poly))
    got = points_in_hulls(np.array(sets), np.array(queries))
    assert got.tolist() == expect


def test_batched_containment_invalid_rows_false():
    sets = np.full((2, 4, 2), np.nan)
    sets[1] = [[0, 0], [1, 0], [1, 1], [0, 1]]
    got = points_in_hulls(sets, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert got.tolist() == [False, True]


# -- distance ---------------------------------------------------------------------

def test_distance_interior_zero():
    assert distance_to_polygon((0.5, 0.5), UNIT_SQUARE) == 0.0
    assert distance_to_polygon((0.0, 0.5), UNIT_SQUARE) == 0.0  # boundary


def test_distance_axis_aligned():
    assert distance_to_polygon((2.0, 0.5), UNIT_SQUARE) == pytest.approx(1.0, abs=1e-12)
    assert distance_to_polygon((-1.0, -1.0), UNIT_SQUARE) == pytest.approx(np.sqrt(2), abs=1e-12)


def test_distance_agrees_with_sampling_oracle():
    rng = np.random.default_rng(17)
    for _ in range(150):
        poly = random_convex_polygon(rng)
        p = rng.uniform(poly.vertices.min() - 60, poly.vertices.max() + 60, size=2)
        got = distance_to_polygon(p, poly)
        if got == 0.0:
            continue
        want = sampled_boundary_distance(p, poly.vertices)
        assert got == pytest.approx(want, abs=1e-6)


def test_pip_iff_distance_zero():
    rng = np.random.default_rng(23)
    for _ in range(200):
        poly = random_convex_polygon(rng)
        p = rng.uniform(poly.vertices.min() - 20, poly.vertices.max() + 20, size=2)
        assert point_in_polygon(p, poly) == (distance_to_polygon(p, poly) == 0.0)


# -- contact score -------------------------------------------------------------------

def test_contact_score_ramp():
    assert contact_score((0.5, 0.5), UNIT_SQUARE, d_max=100.0) == 1.0
    assert contact_score((101.0, 0.5), UNIT_SQUARE, d_max=100.0) == 0.0  # d == d_max
    assert contact_score((51.0, 0.5), UNIT_SQUARE, d_max=100.0) == pytest.approx(0.5)
    assert contact_score((500.0, 0.5), UNIT_SQUARE, d_max=100.0) == 0.0  # clamped


def test_contact_score_monotone_in_distance():
    scores = [contact_score((1.0 + d, 0.5), UNIT_SQUARE, d_max=100.0) for d in np.linspace(0, 150, 40)]
    assert all(a >= b for a, b in zip(scores, scores[1:]))


def test_contact_score_rigid_invariance():
    rng = np.random.default_rng(31)
    poly = random_convex_polygon(rng)
    p = np.array([130.0, -40.0])
    base = contact_score(p, poly, d_max=100.0)
    theta = 0.83
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    shift = np.array([37.0, -11.0])
    moved = Polygon(poly.vertices @ rot.T + shift)
    assert contact_score(rot @ p + shift, moved, d_max=100.0) == pytest.approx(base, abs=1e-9)


def test_contact_score_rejects_bad_dmax():
    with pytest.raises(ValueError):
        contact_score((0.5, 0.5), UNIT_SQUARE, d_max=0.0)
