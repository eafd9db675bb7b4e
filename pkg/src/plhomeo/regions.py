"""Topological-disc regions: planar intersection components and exact
invariant discs around fixed points.

The planar half implements constructive disc-intersection machinery on
polygons (components of common interiors, their spliced simple boundaries,
provenance of boundary arcs).  The model half computes an invariant disc
around a fixed pole by flooding an equivariant refinement cut along all
iterates of a latitude cap circle; everything is combinatorial and exact,
so invariance is literal set equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arrangement import Arrangement, locate_face, overlay
from .eqcomplex import EqComplex, equivariant_complex
from .errors import (DegenerateInput, NotInterior, ResourceExceeded,
                     StructureViolated)
from .exact import mod1
from .geom import (INSIDE, Pt, Polygon, centroid, point_in_polygon, polygon)
from .maps import PLMap2, evaluate, power
from .suspension import DISC, SPHERE, s_range

Q = Fraction


# ---------------------------------------------------------------------------
# planar components of common disc interiors


@dataclass
class RegionComponent:
    """Closure of one component of a common interior: a polygonal disc."""
    boundary: Polygon
    provenance: list[frozenset[int]]   # per boundary edge: input polygons

    def contains(self, p: Pt) -> str:
        return point_in_polygon(p, self.boundary)


def interior_intersection_components(discs) -> list[RegionComponent]:
    """Components of the intersection of the open disc interiors."""
    discs = [d if isinstance(d, Polygon) else polygon(d) for d in discs]
    arr = overlay(discs)
    out = []
    for face in arr.bounded_faces():
        if not all(face.labels):
            continue
        if face.holes:
            raise StructureViolated(
                "intersection component with a hole: inputs are not discs")
        out.append(_component_from_face(arr, face))
    out.sort(key=lambda c: min(c.boundary.verts))
    return out


def _component_from_face(arr: Arrangement, face) -> RegionComponent:
    verts = [arr.points[i] for i in face.outer]
    labels = []
    edge_lookup = {}
    for (a, b), lab in zip(arr.edges, arr.edge_labels):
        edge_lookup[(a, b)] = lab
        edge_lookup[(b, a)] = lab
    n = len(face.outer)
    for i in range(n):
        labels.append(edge_lookup[(face.outer[i], face.outer[(i + 1) % n])])
    return RegionComponent(polygon(verts), labels)


def component_containing(discs, x: Pt) -> RegionComponent:
    """The unique component whose interior contains x."""
    discs = [d if isinstance(d, Polygon) else polygon(d) for d in discs]
    for d in discs:
        if point_in_polygon(x, d) != INSIDE:
            raise NotInterior(f"{x} is not interior to every disc")
    arr = overlay(discs)
    face = locate_face(arr, x)
    if not face.bounded or not all(face.labels):
        raise StructureViolated("containing face is not inside all discs")
    return _component_from_face(arr, face)


# ---------------------------------------------------------------------------
# invariant discs around fixed poles (equivariant cell regions)


@dataclass
class CellRegion:
    """A region given as a cell subset of an equivariant refinement."""
    complex: EqComplex
    cells: frozenset[int]
    boundary_cycle: list[Pt]            # chart points of the boundary walk
    boundary_edges: list[int]
    provenance: list[list[int]]         # per boundary edge: iterates k with
                                        # the edge on f^k(cap circle)

    def area2(self) -> Fraction:
        from .geom import area2
        return sum(area2(self.complex.polys[c]) for c in self.cells)

    def contains_cell_point(self, p: Pt) -> bool:
        from .geom import OUTSIDE, point_in_convex
        q = (mod1(p[0]), p[1])
        for ci in self.cells:
            for cand in (q, (q[0] + 1, q[1])):
                if point_in_convex(cand, list(self.complex.polys[ci])) \
                        != OUTSIDE:
                    return True
        return False


def pole_for(model: str, x: Pt) -> Fraction:
    """The collapsed level of a fixed pole x; error otherwise."""
    from .suspension import collapsed_levels
    if x[1] in collapsed_levels(model):
        return x[1]
    raise StructureViolated(
        f"invariant-disc construction requires a pole, got {x}")


def invariant_disc(f: PLMap2, x: Pt, n: int, cap_level: Fraction,
                   k: EqComplex | None = None) -> CellRegion:
    """Invariant disc around the fixed pole x from the cap at cap_level.

    The disc is the closure of the x-component of the intersection of all
    f^i-images of the open cap; invariance f(D) = D holds as exact cell-set
    equality, and every boundary edge lies on some iterate of the cap circle.
    """
    level = pole_for(f.model, x)
    lo, hi = s_range(f.model)
    if not lo < cap_level < hi:
        raise DegenerateInput("cap level must be strictly inside the range")
    if k is None:
        k = equivariant_complex(f, n, level_cuts=[cap_level])
    side = 1 if level > cap_level else -1
    cap = frozenset(ci for ci, poly in enumerate(k.polys)
                    if (centroid(list(poly))[1] - cap_level) * side > 0)
    sets = [cap]
    for _ in range(1, n):
        sets.append(frozenset(k.cell_perm[c] for c in sets[-1]))
    inter = frozenset.intersection(*sets)
    seeds = [ci for ci in inter
             if any(p[1] == level for p in k.polys[ci])]
    if not seeds:
        raise StructureViolated("pole not inside the intersection")
    comp = _flood(k, inter, seeds)
    if frozenset(k.cell_perm[c] for c in comp) != comp:
        raise StructureViolated("component is not invariant under f")
    cycle, bedges = _region_boundary(k, comp)
    prov = _cap_provenance(k, f, n, bedges, cap_level)
    return CellRegion(k, comp, cycle, bedges, prov)


def _flood(k: EqComplex, allowed: frozenset[int], seeds) -> frozenset[int]:
    seen = set()
    stack = [c for c in seeds]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        poly = k.polys[c]
        m = len(poly)
        for i in range(m):
            from .suspension import _edge_key
            ei = k.edge_index[_edge_key(poly[i], poly[(i + 1) % m])]
            for d in k.edge_cells[ei]:
                if d != c and d in allowed and d not in seen:
                    stack.append(d)
    return frozenset(seen)


def _region_boundary(k: EqComplex, cells: frozenset[int]):
    """Boundary edges (one incident cell inside) walked into a cycle."""
    bedges = []
    for ei, inc in enumerate(k.edge_cells):
        inside = [c for c in inc if c in cells]
        if len(inc) == 2 and len(inside) == 1:
            bedges.append(ei)
        elif len(inc) == 1 and inside:
            p, q = k.edges[ei]
            if p[1] == q[1] and p[1] in (Q(-1), Q(0), Q(1)):
                continue  # collapsed or model-boundary line: not a free edge
            bedges.append(ei)
    if not bedges:
        raise StructureViolated("region has no boundary")
    adj: dict[int, list[int]] = {}
    for ei in bedges:
        a, b = k.edge_verts[ei]
        adj.setdefault(a, []).append(ei)
        adj.setdefault(b, []).append(ei)
    for v, ids in adj.items():
        if len(ids) != 2:
            raise StructureViolated("region boundary is not a 1-manifold")
    start = bedges[0]
    cycle_edges = [start]
    a0, b0 = k.edge_verts[start]
    cur_v, prev_e = b0, start
    verts_cycle = [a0, b0]
    while True:
        nxt = [e for e in adj[cur_v] if e != prev_e]
        e = nxt[0]
        if e == start:
            break
        cycle_edges.append(e)
        a, b = k.edge_verts[e]
        cur_v = b if a == cur_v else a
        verts_cycle.append(cur_v)
        prev_e = e
        if len(cycle_edges) > len(bedges):
            raise StructureViolated("boundary walk does not close")
    if len(cycle_edges) != len(bedges):
        raise StructureViolated("region boundary is not a single curve")
    pts = [k.verts[v] for v in verts_cycle[:-1]]
    return pts, cycle_edges


def _cap_provenance(k: EqComplex, f: PLMap2, n: int, bedges, cap_level):
    """For each boundary edge, the iterates k with edge on f^k(cap circle)."""
    out = []
    iterates = [power(f, i) for i in range(n)]
    for ei in bedges:
        p, q = k.edges[ei]
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        mp = (mod1(mid[0]), mid[1])
        ks = []
        for i in range(n):
            # edge on f^i(C)  <=>  f^{n-i}(edge) on C
            y = evaluate(iterates[(n - i) % n], mp)[1]
            if y == cap_level:
                ks.append(i)
        if not ks:
            raise StructureViolated(
                "boundary edge not carried by any iterate of the cap circle")
        out.append(ks)
    return out


def auto_cap(f: PLMap2, x: Pt, n: int, within: Fraction,
             attempts: int = 32) -> Fraction:
    """Shrink a cap toward the pole until all n iterates stay inside the
    neighborhood {side of `within`}; halving steps, bounded attempts."""
    level = pole_for(f.model, x)
    lo, hi = s_range(f.model)
    tau = within
    for _ in range(attempts):
        if not lo < tau < hi:
            tau = (tau + level) / 2
            continue
        try:
            k = equivariant_complex(f, n, level_cuts=[tau, within])
        except StructureViolated:
            tau = (tau + level) / 2
            continue
        side = 1 if level > tau else -1
        wside = 1 if level > within else -1
        cap = frozenset(ci for ci, poly in enumerate(k.polys)
                        if (centroid(list(poly))[1] - tau) * side > 0)
        ok = True
        cur = cap
        for _ in range(n):
            if any((centroid(list(k.polys[c]))[1] - within) * wside <= 0
                   for c in cur):
                ok = False
                break
            cur = frozenset(k.cell_perm[c] for c in cur)
        if ok:
            return tau
        tau = (tau + level) / 2
    raise ResourceExceeded("no invariant cap found within the attempt budget")
