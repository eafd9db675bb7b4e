"""Planar primitives over exact rationals.

Points are (x, y) tuples of Fractions.  Everything here is decided by the
sign of exact determinants; there are no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInput

Pt = tuple[Fraction, Fraction]

CCW, COLLINEAR, CW = 1, 0, -1
INSIDE, BOUNDARY, OUTSIDE = "inside", "boundary", "outside"


def orient(a: Pt, b: Pt, c: Pt) -> int:
    """Sign of the 2x2 determinant of (b - a, c - a): +1 CCW, -1 CW, 0."""
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return 1 if d > 0 else (-1 if d < 0 else 0)


def cross(o: Pt, a: Pt, b: Pt) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def on_segment(p: Pt, a: Pt, b: Pt) -> bool:
    """p lies on the closed segment [a, b]."""
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def seg_intersection(a: Pt, b: Pt, c: Pt, d: Pt):
    """Intersect closed segments [a,b] and [c,d] exactly.

    Returns ("none", None), ("point", p) or ("overlap", (p, q)) with p != q.
    """
    o1, o2 = orient(a, b, c), orient(a, b, d)
    if o1 == 0 and o2 == 0:  # collinear supporting lines
        lo1, hi1 = sorted((a, b))
        lo2, hi2 = sorted((c, d))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return ("none", None)
        if lo == hi:
            return ("point", lo)
        return ("overlap", (lo, hi))
    if o1 == 0 and on_segment(c, a, b):
        return ("point", c)
    if o2 == 0 and on_segment(d, a, b):
        return ("point", d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o3 == 0 and on_segment(a, c, d):
        return ("point", a)
    if o4 == 0 and on_segment(b, c, d):
        return ("point", b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        denom = (b[0] - a[0]) * (d[1] - c[1]) - (b[1] - a[1]) * (d[0] - c[0])
        t = ((c[0] - a[0]) * (d[1] - c[1]) - (c[1] - a[1]) * (d[0] - c[0])) / denom
        p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        return ("point", p)
    return ("none", None)


def area2(verts: tuple[Pt, ...]) -> Fraction:
    """Twice the signed area of a closed polygon (CCW positive)."""
    total = Fraction(0)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total


def is_simple(verts: tuple[Pt, ...]) -> bool:
    """Exact simplicity: non-adjacent edges never meet, adjacent only at the
    shared vertex, vertices pairwise distinct."""
    n = len(verts)
    if n < 3 or len(set(verts)) != n:
        return False
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        if a == b:
            return False
        for j in range(i + 1, n):
            c, d = edges[j]
            kind, val = seg_intersection(a, b, c, d)
            if kind == "none":
                continue
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if not adjacent:
                return False
            if kind == "overlap":
                return False
            shared = b if j == i + 1 else a
            if val != shared:
                return False
    return True


@dataclass(frozen=True)
class Polygon:
    """A simple polygon with CCW vertex order and positive area."""
    verts: tuple[Pt, ...]

    def __len__(self):
        return len(self.verts)

    def edges(self):
        n = len(self.verts)
        return [(self.verts[i], self.verts[(i + 1) % n]) for i in range(n)]

    def area2(self) -> Fraction:
        return area2(self.verts)


def polygon(points) -> Polygon:
    """Validate and orient a vertex sequence; raises DegenerateInput."""
    verts = tuple((Fraction(x), Fraction(y)) for x, y in points)
    verts = _strip_collinear(verts)
    if len(verts) < 3:
        raise DegenerateInput("polygon needs at least 3 non-collinear vertices")
    a2 = area2(verts)
    if a2 == 0:
        raise DegenerateInput("polygon has zero area")
    if a2 < 0:
        verts = tuple(reversed(verts))
    if not is_simple(verts):
        raise DegenerateInput("polygon is not simple")
    return Polygon(verts)


def _strip_collinear(verts: tuple[Pt, ...]) -> tuple[Pt, ...]:
    """Drop repeated and straight-through vertices."""
    out = list(verts)
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if b == a or orient(a, b, c) == 0 and on_segment(b, a, c):
                del out[i]
                changed = True
                break
    return tuple(out)


def point_in_polygon(p: Pt, poly: Polygon) -> str:
    """Exact crossing-number classification against a simple polygon."""
    verts = poly.verts if isinstance(poly, Polygon) else tuple(poly)
    n = len(verts)
    for i in range(n):
        if on_segment(p, verts[i], verts[(i + 1) % n]):
            return BOUNDARY
    return INSIDE if _crossings_odd(p, verts) else OUTSIDE


def _crossings_odd(p: Pt, verts: tuple[Pt, ...]) -> bool:
    """Parity of crossings of an upward ray rule; p must be off the boundary."""
    inside = False
    n = len(verts)
    px, py = p
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a[1] > py) != (b[1] > py):
            side = orient(a, b, p)
            if b[1] < a[1]:
                side = -side
            if side > 0:  # edge crosses the rightward ray from p
                inside = not inside
    return inside


def clip_convex(subject: list[Pt], clip: list[Pt]) -> list[Pt]:
    """Intersection of two convex CCW polygons (Sutherland-Hodgman), exact.

    Runs on homogeneous integer coordinates (no per-step normalization);
    returns a possibly empty CCW Fraction vertex list, degenerate results
    as [].
    """
    out = []
    for x, y in subject:
        w = x.denominator * y.denominator // _gcd(x.denominator,
                                                  y.denominator)
        out.append((x.numerator * (w // x.denominator),
                    y.numerator * (w // y.denominator), w))
    n = len(clip)
    for i in range(n):
        if not out:
            return []
        a, b = clip[i], clip[(i + 1) % n]
        # integer line functional matching cross(a, b, .): positive = left
        axn, axd = a[0].numerator, a[0].denominator
        ayn, ayd = a[1].numerator, a[1].denominator
        bxn, bxd = b[0].numerator, b[0].denominator
        byn, byd = b[1].numerator, b[1].denominator
        ca = ayn * byd - byn * ayd          # ay - by, over ayd*byd
        cb = bxn * axd - axn * bxd          # bx - ax, over axd*bxd
        sa = ayd * byd
        sb = axd * bxd
        ai = ca * sb
        bi = cb * sa
        ci = -(ai * axn * ayd + bi * ayn * axd)
        scale = axd * ayd
        ais, bis = ai * scale, bi * scale
        res = []
        m = len(out)
        vals = [ais * px + bis * py + ci * pw for (px, py, pw) in out]
        for j in range(m):
            p, vp = out[j], vals[j]
            q, vq = out[(j + 1) % m], vals[(j + 1) % m]
            if vp >= 0:
                res.append(p)
            if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
                alpha = vp * q[2]
                beta = vq * p[2]
                den = alpha - beta
                rx = alpha * q[0] * p[2] - beta * p[0] * q[2]
                ry = alpha * q[1] * p[2] - beta * p[1] * q[2]
                rw = den * p[2] * q[2]
                g = _gcd(_gcd(abs(rx), abs(ry)), abs(rw))
                if rw < 0:
                    g = -g
                res.append((rx // g, ry // g, rw // g))
        out = res
    pts = [(Fraction(px, pw), Fraction(py, pw)) for (px, py, pw) in out]
    return normalize_poly(pts)


def _gcd(a, b):
    from math import gcd
    return gcd(a, b) or 1


def clip_halfplane(poly: list[Pt], a: Pt, b: Pt) -> list[Pt]:
    """Keep the closed side left of the directed line a->b."""
    res: list[Pt] = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = cross(a, b, p), cross(a, b, q)
        if sp >= 0:
            res.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            t = sp / (sp - sq)
            res.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return res


def normalize_poly(poly: list[Pt]) -> list[Pt]:
    """Dedupe consecutive and collinear vertices; [] when area vanishes."""
    out: list[Pt] = []
    for p in poly:
        if not out or p != out[-1]:
            out.append(p)
    if len(out) >= 2 and out[0] == out[-1]:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if orient(a, b, c) == 0:
                del out[i]
                changed = True
                break
    if len(out) < 3 or area2(tuple(out)) == 0:
        return []
    return out


def split_convex(poly: list[Pt], a: Pt, b: Pt) -> tuple[list[Pt], list[Pt]]:
    """Split a convex polygon by the full line through a, b.

    Returns (left piece, right piece); either may be [] if the line misses.
    """
    left = normalize_poly(clip_halfplane(list(poly), a, b))
    right = normalize_poly(clip_halfplane(list(poly), b, a))
    return left, right


def poly_bbox(poly) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return min(xs), min(ys), max(xs), max(ys)


def bbox_overlap(b1, b2) -> bool:
    return not (b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1])


def point_in_convex(p: Pt, poly: list[Pt]) -> str:
    """Classification against a convex CCW polygon."""
    n = len(poly)
    on_edge = False
    for i in range(n):
        s = orient(poly[i], poly[(i + 1) % n], p)
        if s < 0:
            return OUTSIDE
        if s == 0:
            if on_segment(p, poly[i], poly[(i + 1) % n]):
                on_edge = True
            else:
                return OUTSIDE
    return BOUNDARY if on_edge else INSIDE


def convex_touch(p_poly: list[Pt], q_poly: list[Pt]) -> bool:
    """Do two convex polygons intersect at all (even in a single point)?"""
    for v in p_poly:
        if point_in_convex(v, q_poly) != OUTSIDE:
            return True
    for v in q_poly:
        if point_in_convex(v, p_poly) != OUTSIDE:
            return True
    np_, nq = len(p_poly), len(q_poly)
    for i in range(np_):
        for j in range(nq):
            kind, _ = seg_intersection(p_poly[i], p_poly[(i + 1) % np_],
                                       q_poly[j], q_poly[(j + 1) % nq])
            if kind != "none":
                return True
    return False


def centroid(poly: list[Pt]) -> Pt:
    """Area centroid of a simple polygon (affine-equivariant)."""
    a_total = Fraction(0)
    cx = Fraction(0)
    cy = Fraction(0)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        w = x1 * y2 - x2 * y1
        a_total += w
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    if a_total == 0:
        raise DegenerateInput("centroid of a degenerate polygon")
    return (cx / (3 * a_total), cy / (3 * a_total))
