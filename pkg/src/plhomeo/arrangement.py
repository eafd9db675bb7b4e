"""Exact overlay of simple polygons into a labeled planar arrangement.

Brute-force pairwise intersection (fine at desk scale), half-edge face
walking, and per-face containment labels certified by an interior sample
point.  Coincident edges from distinct inputs merge into one arrangement
edge carrying all labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateInput, OverlayDegenerate
from .geom import (Pt, Polygon, INSIDE, OUTSIDE, cross, on_segment, orient,
                   point_in_polygon, polygon, seg_intersection, area2)


@dataclass
class Face:
    outer: list[int] | None          # vertex cycle (None for the unbounded face)
    holes: list[list[int]]
    labels: tuple[bool, ...]         # containment in each input polygon
    sample: Pt | None                # interior point (None for unbounded)
    bounded: bool


@dataclass
class Arrangement:
    points: list[Pt]
    edges: list[tuple[int, int]]
    edge_labels: list[frozenset[int]]
    faces: list[Face] = field(default_factory=list)

    def bounded_faces(self) -> list[Face]:
        return [f for f in self.faces if f.bounded]

    def euler_ok(self) -> bool:
        """Generalized Euler formula V - E + F = 1 + C (C components)."""
        v, e, f = len(self.points), len(self.edges), len(self.faces)
        return v - e + f == 1 + self._n_components()

    def _n_components(self) -> int:
        parent = list(range(len(self.points)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(len(self.points))})


def overlay(polys) -> Arrangement:
    """Full arrangement of a sequence of simple polygons, exactly."""
    polys = [p if isinstance(p, Polygon) else polygon(p) for p in polys]
    segments: list[tuple[Pt, Pt, int]] = []
    for idx, p in enumerate(polys):
        for a, b in p.edges():
            segments.append((a, b, idx))
    pieces = _split_segments(segments)
    arr = _build_graph(pieces)
    _walk_faces(arr, polys)
    if not arr.euler_ok():
        raise OverlayDegenerate("arrangement fails the Euler check")
    return arr


def _split_segments(segments):
    """Split every segment at all intersections; dedupe with merged labels."""
    cuts: list[set[Pt]] = [set((s[0], s[1])) for s in segments]
    n = len(segments)
    for i in range(n):
        a, b, _ = segments[i]
        for j in range(i + 1, n):
            c, d, _ = segments[j]
            kind, val = seg_intersection(a, b, c, d)
            if kind == "point":
                cuts[i].add(val)
                cuts[j].add(val)
            elif kind == "overlap":
                lo, hi = val
                cuts[i].update((lo, hi))
                cuts[j].update((lo, hi))
    pieces: dict[tuple[Pt, Pt], set[int]] = {}
    for (a, b, label), pts in zip(segments, cuts):
        ordered = sorted(pts)
        if ordered[0] != min(a, b) or ordered[-1] != max(a, b):
            raise OverlayDegenerate("split points escape their segment")
        for u, v in zip(ordered, ordered[1:]):
            key = (u, v)
            pieces.setdefault(key, set()).add(label)
    return pieces


def _build_graph(pieces):
    index: dict[Pt, int] = {}
    points: list[Pt] = []

    def vid(p: Pt) -> int:
        if p not in index:
            index[p] = len(points)
            points.append(p)
        return index[p]

    edges = []
    labels = []
    for (u, v), labs in sorted(pieces.items()):
        edges.append((vid(u), vid(v)))
        labels.append(frozenset(labs))
    return Arrangement(points, edges, labels)


def _dir_lt(points, v, e1, e2) -> bool:
    """Exact CCW angular order of outgoing edges at vertex v."""
    d1 = _direction(points, v, e1)
    d2 = _direction(points, v, e2)
    h1, h2 = _half(d1), _half(d2)
    if h1 != h2:
        return h1 < h2
    c = d1[0] * d2[1] - d1[1] * d2[0]
    return c > 0


def _direction(points, v, other):
    p, q = points[v], points[other]
    return (q[0] - p[0], q[1] - p[1])


def _half(d) -> int:
    """0 for angles in [0, pi), 1 for [pi, 2pi)."""
    if d[1] > 0 or (d[1] == 0 and d[0] > 0):
        return 0
    return 1


def _walk_faces(arr: Arrangement, polys: list[Polygon]):
    points = arr.points
    out: dict[int, list[int]] = {}
    for a, b in arr.edges:
        out.setdefault(a, []).append(b)
        out.setdefault(b, []).append(a)
    for v, nbrs in out.items():
        # insertion sort with the exact comparator
        ordered: list[int] = []
        for w in nbrs:
            k = 0
            while k < len(ordered) and _dir_lt(points, v, ordered[k], w):
                k += 1
            ordered.insert(k, w)
        out[v] = ordered

    def next_halfedge(u, v):
        """Continue the face left of u->v: clockwise-next at v from (v,u)."""
        ring = out[v]
        i = ring.index(u)
        return (v, ring[(i - 1) % len(ring)])

    visited: set[tuple[int, int]] = set()
    cycles: list[list[int]] = []
    for a, b in sorted(arr.edges):
        for h in ((a, b), (b, a)):
            if h in visited:
                continue
            cyc = []
            cur = h
            while cur not in visited:
                visited.add(cur)
                cyc.append(cur[0])
                cur = next_halfedge(*cur)
            cycles.append(cyc)

    areas = [area2(tuple(points[i] for i in cyc)) for cyc in cycles]
    samples = [_cycle_sample(arr, cyc) for cyc in cycles]

    def innermost_positive(p: Pt) -> int | None:
        best = None
        for ci, cyc in enumerate(cycles):
            if areas[ci] <= 0:
                continue
            verts = tuple(points[i] for i in cyc)
            if point_in_polygon(p, verts) == INSIDE:
                if best is None or areas[ci] < areas[best]:
                    best = ci
        return best

    owner = [innermost_positive(s) for s in samples]
    faces: list[Face] = []
    hole_map: dict[int | None, list[list[int]]] = {}
    for ci, cyc in enumerate(cycles):
        if areas[ci] > 0:
            if owner[ci] != ci:
                raise OverlayDegenerate("face sample escaped its cycle")
        else:
            hole_map.setdefault(owner[ci], []).append(cyc)
    for ci, cyc in enumerate(cycles):
        if areas[ci] <= 0:
            continue
        labels = tuple(point_in_polygon(samples[ci], p) == INSIDE for p in polys)
        faces.append(Face(cyc, hole_map.get(ci, []), labels, samples[ci], True))
    faces.append(Face(None, hole_map.get(None, []),
                      tuple(False for _ in polys), None, False))
    arr.faces = faces


def _cycle_sample(arr: Arrangement, cyc: list[int]) -> Pt:
    """An off-skeleton point inside the face bounded by this cycle.

    Taken near the lexicographically smallest cycle corner, inside the wedge
    the cycle turns through there, shrunk until the connecting segment clears
    every non-incident feature.
    """
    points = arr.points
    n = len(cyc)
    k = min(range(n), key=lambda i: points[cyc[i]])
    v = points[cyc[k]]
    prv = points[cyc[k - 1]]
    nxt = points[cyc[(k + 1) % n]]
    # face-side wedge sweeps CCW from the outgoing direction to the reversed
    # incoming one; convex wedges take the positive combination, reflex ones
    # its negation
    da = (nxt[0] - v[0], nxt[1] - v[1])
    db = (prv[0] - v[0], prv[1] - v[1])
    turn = da[0] * db[1] - da[1] * db[0]
    if turn > 0:
        d = (da[0] + db[0], da[1] + db[1])
    elif turn < 0:
        d = (-da[0] - db[0], -da[1] - db[1])
    else:
        d = (-da[1], da[0])
    t = Fraction(1, 4)
    for _ in range(256):
        p = (v[0] + t * d[0], v[1] + t * d[1])
        if _segment_clear(arr, v, p):
            return p
        t /= 8
    raise OverlayDegenerate("no interior sample point found")


def _segment_clear(arr: Arrangement, v: Pt, p: Pt) -> bool:
    """(v, p] avoids all vertices and edges (edges through v: beyond v)."""
    for q in arr.points:
        if q != v and on_segment(q, v, p):
            return False
    for a, b in arr.edges:
        pa, pb = arr.points[a], arr.points[b]
        if v == pa or v == pb:
            other = pb if v == pa else pa
            if orient(v, other, p) == 0:
                dot = ((other[0] - v[0]) * (p[0] - v[0])
                       + (other[1] - v[1]) * (p[1] - v[1]))
                if dot > 0:  # collinear, same side: overlap near v
                    return False
            continue
        kind, val = seg_intersection(v, p, pa, pb)
        if kind == "overlap":
            return False
        if kind == "point" and val != v:
            return False
    return True


def point_on_skeleton(arr: Arrangement, p: Pt) -> bool:
    for a, b in arr.edges:
        if on_segment(p, arr.points[a], arr.points[b]):
            return True
    return False


def locate_face(arr: Arrangement, p: Pt) -> Face:
    """Face containing an off-skeleton point."""
    if point_on_skeleton(arr, p):
        raise DegenerateInput("point lies on the arrangement skeleton")
    best = None
    best_area = None
    for f in arr.faces:
        if not f.bounded:
            continue
        verts = tuple(arr.points[i] for i in f.outer)
        if point_in_polygon(p, verts) == INSIDE:
            a = area2(verts)
            if best is None or a < best_area:
                best, best_area = f, a
    if best is None:
        return arr.faces[-1]
    return best
