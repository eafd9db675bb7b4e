import random
from fractions import Fraction

import pytest

from plhomeo.eqcomplex import equivariant_complex
from plhomeo.errors import NotInterior, StructureViolated
from plhomeo.generate import make_instance
from plhomeo.geom import INSIDE, point_in_polygon, polygon
from plhomeo.maps import evaluate, rotation_map
from plhomeo.regions import (auto_cap, component_containing,
                             interior_intersection_components, invariant_disc)
from plhomeo.suspension import DISC, SPHERE

Q = Fraction


def pt(x, y):
    return (Q(x), Q(y))


def square(x0, y0, x1, y1):
    return polygon([pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)])


def test_two_squares_intersection():
    comps = interior_intersection_components([square(0, 0, 2, 2),
                                              square(1, 1, 3, 3)])
    assert len(comps) == 1
    assert sorted(comps[0].boundary.verts) == [pt(1, 1), pt(1, 2), pt(2, 1),
                                               pt(2, 2)]
    # every boundary edge comes from one of the two inputs
    assert all(len(p) >= 1 for p in comps[0].provenance)


def test_disjoint_squares_empty():
    assert interior_intersection_components(
        [square(0, 0, 1, 1), square(5, 5, 6, 6)]) == []


def test_u_shape_and_bar_two_components():
    u = polygon([pt(0, 0), pt(5, 0), pt(5, 4), pt(3, 4), pt(3, 1),
                 pt(2, 1), pt(2, 4), pt(0, 4)])
    bar = square(0, 2, 5, 3)
    comps = interior_intersection_components([u, bar])
    assert len(comps) == 2
    for c in comps:
        assert c.boundary.area2() > 0


def test_component_containing():
    discs = [square(0, 0, 2, 2), square(1, 1, 3, 3)]
    c = component_containing(discs, pt(Q(3, 2), Q(3, 2)))
    assert point_in_polygon(pt(Q(3, 2), Q(3, 2)), c.boundary) == INSIDE
    with pytest.raises(NotInterior):
        component_containing(discs, pt(1, Q(3, 2)))  # on a boundary
    with pytest.raises(NotInterior):
        component_containing(discs, pt(10, 10))


def test_u_bar_component_membership_matches_pip():
    u = polygon([pt(0, 0), pt(5, 0), pt(5, 4), pt(3, 4), pt(3, 1),
                 pt(2, 1), pt(2, 4), pt(0, 4)])
    bar = square(0, 2, 5, 3)
    left = component_containing([u, bar], pt(1, Q(5, 2)))
    assert point_in_polygon(pt(1, Q(5, 2)), left.boundary) == INSIDE
    assert point_in_polygon(pt(4, Q(5, 2)), left.boundary) != INSIDE


def test_invariant_disc_model_rotation_cap():
    f = rotation_map(SPHERE, 1, 4)
    region = invariant_disc(f, pt(0, 1), 4, Q(1, 2))
    # the cap is already invariant: region = cap s >= 1/2
    assert region.area2() == 2 * Q(1, 2)  # width 1, height 1/2, doubled
    assert all(p[1] == Q(1, 2) for p in region.boundary_cycle)
    assert all(ks for ks in region.provenance)


def test_invariant_disc_scrambled_rotation():
    f, h, r = make_instance(SPHERE, "rotation", 1, 3, seed=5, moves=8)
    region = invariant_disc(f, pt(0, 1), 3, Q(1, 3))
    k = region.complex
    # exact invariance as cell sets
    assert frozenset(k.cell_perm[c] for c in region.cells) == region.cells
    # boundary provenance: every edge on some iterate of the cap circle
    assert all(ks for ks in region.provenance)
    # the north pole is inside, the south pole is not
    assert region.contains_cell_point(pt(0, 1))
    south_cells = [ci for ci, poly in enumerate(k.polys)
                   if any(p[1] == -1 for p in poly)]
    assert all(ci not in region.cells for ci in south_cells)


def test_invariant_disc_shrinking_nests():
    f, h, r = make_instance(SPHERE, "rotation", 1, 4, seed=2, moves=6)
    big = invariant_disc(f, pt(0, 1), 4, Q(1, 4))
    small = invariant_disc(f, pt(0, 1), 4, Q(5, 8))
    rng = random.Random(0)
    for ci in list(small.cells)[:40]:
        c = small.complex.polys[ci]
        cx = sum(p[0] for p in c) / len(c)
        cy = sum(p[1] for p in c) / len(c)
        assert big.contains_cell_point((Q(cx), Q(cy)))


def test_invariant_disc_on_disc_model():
    f, h, r = make_instance(DISC, "rotation", 1, 4, seed=2, moves=8)
    region = invariant_disc(f, pt(0, 0), 4, Q(1, 2))
    k = region.complex
    assert frozenset(k.cell_perm[c] for c in region.cells) == region.cells
    assert region.contains_cell_point(pt(0, 0))
    # region avoids the boundary circle
    assert all(p[1] < 1 for p in region.boundary_cycle)


def test_auto_cap():
    f, h, r = make_instance(SPHERE, "rotation", 1, 3, seed=7, moves=6)
    tau = auto_cap(f, pt(0, 1), 3, Q(0))
    assert Q(0) <= tau < 1
    region = invariant_disc(f, pt(0, 1), 3, tau)
    assert region.cells
