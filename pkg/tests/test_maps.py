import random
from fractions import Fraction

import pytest

from plhomeo.circle import is_circle_identity, rotation_number
from plhomeo.errors import StructureViolated
from plhomeo.maps import (CellMap, PLMap2, boundary_restriction, compose,
                          evaluate, first_disagreement, fixed_set,
                          identity_map, inverse, is_identity, map_equal,
                          orientation, period, power, reflection_map,
                          rotation_map, rotoreflection_map, serializable_parts,
                          from_complex, validate_homeo)
from plhomeo.suspension import DISC, SPHERE, band_cells

Q = Fraction


def pt(x, y):
    return (Q(x), Q(y))


def rational_points(model, rng, count):
    lo = 0 if model == DISC else -1
    pts = []
    for _ in range(count):
        t = Q(rng.randint(0, 255), 256)
        s = Q(rng.randint(lo * 64 + 1, 63), 64)
        pts.append((t, s))
    return pts


def test_identity_basics():
    f = identity_map(DISC)
    assert validate_homeo(f) == []
    assert is_identity(f)
    assert period(f) == 1
    assert orientation(f) == "preserving"
    assert evaluate(f, pt(Q(1, 3), Q(1, 2))) == pt(Q(1, 3), Q(1, 2))


def test_rotation_map_validates_and_evaluates():
    f = rotation_map(DISC, 1, 4)
    assert validate_homeo(f) == []
    assert evaluate(f, pt(0, Q(1, 2))) == pt(Q(1, 4), Q(1, 2))
    assert evaluate(f, pt(Q(7, 8), Q(1, 2))) == pt(Q(1, 8), Q(1, 2))
    assert evaluate(f, pt(0, 0)) == pt(0, 0)  # center fixed
    assert orientation(f) == "preserving"


def test_rotation_period_and_power():
    f = rotation_map(DISC, 1, 6)
    assert period(f, 10) == 6
    assert is_identity(power(f, 6))
    assert not is_identity(power(f, 3))
    assert map_equal(power(f, 2), rotation_map(DISC, 2, 6))


def test_reflection_map():
    f = reflection_map(DISC)
    assert validate_homeo(f) == []
    assert orientation(f) == "reversing"
    assert period(f, 10) == 2
    assert evaluate(f, pt(Q(1, 8), Q(1, 2))) == pt(Q(7, 8), Q(1, 2))


def test_rotoreflection_period():
    f = rotoreflection_map(1, 4)
    assert validate_homeo(f) == []
    assert orientation(f) == "reversing"
    # square is the rotation by 1/2, so the period is 4
    sq = power(f, 2)
    assert map_equal(sq, rotation_map(SPHERE, 1, 2, bands=4))
    assert period(f, 16) == 4


def test_rotoreflection_period_n8():
    f = rotoreflection_map(3, 8)
    assert period(f, 16) == 8
    assert fixed_set(f).is_empty()


def test_compose_pointwise_oracle():
    rng = random.Random(5)
    a = rotation_map(DISC, 1, 3)
    b = reflection_map(DISC, bands=6)
    c = compose(a, b)
    assert validate_homeo(c) == []
    for p in rational_points(DISC, rng, 200):
        assert evaluate(c, p) == evaluate(b, evaluate(a, p))


def test_compose_inverse_identity():
    f = compose(rotation_map(DISC, 2, 5), reflection_map(DISC, bands=5))
    g = compose(f, inverse(f))
    assert is_identity(g)
    assert is_identity(compose(inverse(f), f))


def test_sphere_rotation_fixed_set_is_poles():
    f = rotation_map(SPHERE, 1, 3)
    fs = fixed_set(f)
    assert fs.zero == [pt(0, -1), pt(0, 1)]
    assert not fs.one and not fs.two and not fs.everything


def test_disc_rotation_fixed_set_is_center():
    f = rotation_map(DISC, 1, 4)
    fs = fixed_set(f)
    assert fs.zero == [pt(0, 0)]
    assert not fs.one


def test_identity_fixed_set_everything():
    assert fixed_set(identity_map(DISC)).everything


def test_reflection_fixed_set_is_diameter():
    f = reflection_map(DISC)
    fs = fixed_set(f)
    assert fs.zero == [] and len(fs.one) == 1 and not fs.everything
    chain = fs.one[0]
    assert pt(0, 1) in chain and pt(Q(1, 2), 1) in chain and pt(0, 0) in chain


def test_sphere_reflection_fixed_circle():
    f = reflection_map(SPHERE)
    fs = fixed_set(f)
    assert len(fs.one) == 1
    chain = fs.one[0]
    assert chain[0] == chain[-1]  # closed curve
    assert pt(0, 1) in chain and pt(0, -1) in chain


def test_equator_reflection_fixed_circle_avoids_poles():
    cells = band_cells(SPHERE, 4)
    f = PLMap2(SPHERE, [CellMap(tuple(c), tuple((x, -y) for x, y in c))
                        for c in cells])
    assert validate_homeo(f) == []
    fs = fixed_set(f)
    assert len(fs.one) == 1 and fs.one[0][0] == fs.one[0][-1]
    assert all(p[1] == 0 for p in fs.one[0])


def test_boundary_restriction_rotation():
    f = rotation_map(DISC, 1, 3)
    b = boundary_restriction(f)
    rc = rotation_number(b)
    assert (rc.k, rc.n) == (1, 3)


def test_boundary_restriction_reflection():
    f = reflection_map(DISC)
    b = boundary_restriction(f)
    assert b.orientation == -1
    assert b(Q(0)) == 0 and b(Q(1, 4)) == Q(3, 4)


def test_map_equality_mod_representation():
    f = rotation_map(DISC, 1, 4, bands=4)
    g = rotation_map(DISC, 1, 4, bands=8)
    assert map_equal(f, g)
    assert not map_equal(f, rotation_map(DISC, 3, 4))
    w = first_disagreement(f, rotation_map(DISC, 3, 4))
    assert w is not None
    assert evaluate(f, w) != evaluate(rotation_map(DISC, 3, 4), w)


def test_serialization_roundtrip():
    f = compose(rotation_map(DISC, 1, 4), reflection_map(DISC, bands=4))
    cx, img_verts, img_lifts = serializable_parts(f)
    g = from_complex(cx, img_verts, img_lifts)
    assert map_equal(f, g)
    assert validate_homeo(g) == []


def test_validate_rejects_flipped_triangle():
    cells = band_cells(DISC, 4)
    bad = []
    for i, c in enumerate(cells):
        if i == 0:
            # mirror one cell's image only: mixed determinant signs
            bad.append(CellMap(tuple(c), tuple((-x, y) for x, y in c)))
        else:
            bad.append(CellMap(tuple(c), tuple(c)))
    f = PLMap2(DISC, bad)
    problems = validate_homeo(f)
    assert problems != []


def test_validate_rejects_degree_two_cover():
    cells = band_cells(SPHERE, 4)
    out = []
    for c in cells:
        img = [(2 * x, y) for x, y in c]
        from plhomeo.maps import shift_into_unit
        _, img_u = shift_into_unit(img)
        out.append(CellMap(tuple(c), img_u))
    f = PLMap2(SPHERE, out)
    problems = validate_homeo(f)
    assert any("preimages" in p or "image complex" in p for p in problems)


def test_nonperiodic_map_detected():
    # radial squeeze on the disc: s -> s/2 towards the center on inner band
    cells = [
        (pt(0, 0), pt(1, 0), pt(1, Q(1, 2)), pt(0, Q(1, 2))),
        (pt(0, Q(1, 2)), pt(1, Q(1, 2)), pt(1, 1), pt(0, 1)),
    ]
    # build as two vertical splits to keep cells convex and meridian-cut
    cells = []
    for j in range(3):
        a, b = Q(j, 3), Q(j + 1, 3)
        cells.append(((a, Q(0)), (b, Q(0)), (b, Q(1, 2)), (a, Q(1, 2))))
        cells.append(((a, Q(1, 2)), (b, Q(1, 2)), (b, Q(1)), (a, Q(1))))

    def squeeze(p):
        x, y = p
        if y <= Q(1, 2):
            return (x, y / 2)
        return (x, Q(3, 2) * y - Q(1, 2))

    f = PLMap2(DISC, [CellMap(tuple(c), tuple(squeeze(p) for p in c))
                      for c in cells])
    assert validate_homeo(f) == []
    assert period(f, 64) is None
