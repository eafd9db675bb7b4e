import itertools
import random
from fractions import Fraction

from plhomeo.arrangement import locate_face, overlay
from plhomeo.geom import INSIDE, point_in_polygon, polygon, seg_intersection

Q = Fraction


def pt(x, y):
    return (Q(x), Q(y))


def square(x0, y0, x1, y1):
    return polygon([pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)])


def test_disjoint_squares():
    arr = overlay([square(0, 0, 1, 1), square(3, 3, 4, 4)])
    assert len(arr.bounded_faces()) == 2
    assert arr.euler_ok()


def test_identical_squares_merge():
    arr = overlay([square(0, 0, 1, 1), square(0, 0, 1, 1)])
    assert len(arr.bounded_faces()) == 1
    assert len(arr.edges) == 4
    assert all(labels == frozenset({0, 1}) for labels in arr.edge_labels)


def brute_force_intersections(p1, p2):
    """Independent oracle: all pairwise edge intersection points."""
    pts = set()
    for a, b in p1.edges():
        for c, d in p2.edges():
            kind, val = seg_intersection(a, b, c, d)
            if kind == "point":
                pts.add(val)
            elif kind == "overlap":
                pts.update(val)
    return pts


def test_offset_squares_three_faces():
    p1, p2 = square(0, 0, 2, 2), square(1, 1, 3, 3)
    expected = brute_force_intersections(p1, p2)
    assert expected == {pt(1, 2), pt(2, 1)}
    arr = overlay([p1, p2])
    faces = arr.bounded_faces()
    assert len(faces) == 3
    inter = [f for f in faces if all(f.labels)]
    assert len(inter) == 1
    verts = sorted(arr.points[i] for i in inter[0].outer)
    assert verts == [pt(1, 1), pt(1, 2), pt(2, 1), pt(2, 2)]
    assert expected <= set(arr.points)
    assert arr.euler_ok()


def test_nested_squares_hole():
    arr = overlay([square(0, 0, 10, 10), square(2, 2, 3, 3)])
    faces = arr.bounded_faces()
    assert len(faces) == 2
    annulus = [f for f in faces if f.labels == (True, False)]
    assert len(annulus) == 1 and len(annulus[0].holes) == 1
    inner = [f for f in faces if f.labels == (True, True)]
    assert len(inner) == 1 and not inner[0].holes
    assert arr.euler_ok()


def test_face_labels_match_sample_classification():
    rng = random.Random(3)
    for trial in range(10):
        polys = []
        for _ in range(rng.randint(2, 4)):
            x0, y0 = rng.randint(0, 6), rng.randint(0, 6)
            w, h = rng.randint(1, 5), rng.randint(1, 5)
            polys.append(square(x0, y0, x0 + w, y0 + h))
        arr = overlay(polys)
        assert arr.euler_ok()
        for face in arr.bounded_faces():
            for k, poly in enumerate(polys):
                assert (point_in_polygon(face.sample, poly) == INSIDE) \
                    == face.labels[k]


def test_overlay_permutation_invariant():
    polys = [square(0, 0, 2, 2), square(1, 1, 3, 3), square(1, 0, 4, 1)]
    base = None
    for perm in itertools.permutations(range(3)):
        arr = overlay([polys[i] for i in perm])
        summary = sorted(
            (tuple(sorted(arr.points[i] for i in f.outer)),
             tuple(f.labels[perm.index(k)] for k in range(3)))
            for f in arr.bounded_faces())
        if base is None:
            base = summary
        else:
            assert summary == base


def test_locate_face():
    arr = overlay([square(0, 0, 2, 2), square(1, 1, 3, 3)])
    f = locate_face(arr, pt(Q(3, 2), Q(3, 2)))
    assert all(f.labels)
    f = locate_face(arr, pt(Q(1, 2), Q(1, 2)))
    assert f.labels == (True, False)
    f = locate_face(arr, pt(10, 10))
    assert not f.bounded


def test_triangle_star_overlay():
    t1 = polygon([pt(0, 0), pt(4, 0), pt(2, 3)])
    t2 = polygon([pt(0, 2), pt(4, 2), pt(2, -1)])
    arr = overlay([t1, t2])
    assert arr.euler_ok()
    hexagon = [f for f in arr.bounded_faces() if all(f.labels)]
    assert len(hexagon) == 1
    assert len(hexagon[0].outer) == 6
