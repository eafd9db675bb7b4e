"""Cellwise-affine self-homeomorphisms of the disc and sphere models.

A PLMap2 is a list of convex chart cells tiling the unit rectangle, each
with its affine image; the model map is the induced quotient map.  All
operations (evaluation, composition, inversion, iteration, period and
fixed-set computation, validation) are exact.

Composition keeps the refined pieces as cells, so the source of f^n is the
common refinement of the pullbacks of f's cells under all lower iterates;
for periodic f that refinement is permuted cell-to-cell by f, which is what
the equivariant machinery needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circle import CirclePL
from .errors import (NotPeriodic, OverlayDegenerate, ParseError,
                     StructureViolated)
from .exact import mod1
from .geom import (Pt, area2, bbox_overlap, clip_convex, on_segment, orient,
                   point_in_convex, poly_bbox, INSIDE, OUTSIDE)
from .suspension import (Affine, SuspensionComplex, affine_from_pairs,
                         band_cells, collapsed_levels, complex_check,
                         is_collapsed, model_point, s_range, DISC, SPHERE)

Q = Fraction


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def shift_into_unit(poly) -> tuple[int, tuple[Pt, ...]]:
    """Translate a chart polygon into [0,1] horizontally; error if it
    straddles a meridian."""
    xs = [p[0] for p in poly]
    m = _floor(min(xs))
    if max(xs) > m + 1:
        m += 1
        if min(xs) < m:
            raise OverlayDegenerate("cell straddles the meridian")
    return m, tuple((x - m, y) for x, y in poly)


def ccw(poly):
    return tuple(poly) if area2(tuple(poly)) > 0 else tuple(reversed(poly))


def poly_key(poly) -> tuple[Pt, ...]:
    """Canonical key: unit-shifted, CCW, rotated to the smallest vertex."""
    _, p = shift_into_unit(ccw(poly))
    k = min(range(len(p)), key=lambda i: p[i])
    return tuple(p[k:] + p[:k])


@dataclass(frozen=True)
class CellMap:
    poly: tuple[Pt, ...]   # CCW convex chart polygon inside [0,1] x s-range
    img: tuple[Pt, ...]    # image chart points, aligned with poly


@dataclass
class PLMap2:
    model: str
    cells: list[CellMap]
    _affines: list[Affine] = field(default=None, repr=False, compare=False)
    _bboxes: list = field(default=None, repr=False, compare=False)
    _pows: dict = field(default=None, repr=False, compare=False)

    def affine(self, i: int) -> Affine:
        if self._affines is None:
            self._affines = [None] * len(self.cells)
        if self._affines[i] is None:
            c = self.cells[i]
            self._affines[i] = affine_from_pairs(list(c.poly), list(c.img))
        return self._affines[i]

    def bbox(self, i: int):
        if self._bboxes is None:
            self._bboxes = [poly_bbox(c.poly) for c in self.cells]
        return self._bboxes[i]

    @property
    def orientation_sign(self) -> int:
        return 1 if self.affine(0).det > 0 else -1

    def pow_cache(self) -> dict:
        if self._pows is None:
            self._pows = {}
        return self._pows


def identity_map(model: str, cells=None) -> PLMap2:
    if cells is None:
        cells = band_cells(model, 4)
    return PLMap2(model, [CellMap(tuple(c), tuple(c)) for c in cells])


# ---------------------------------------------------------------------------
# model isometries


def _band_count(n: int) -> int:
    """Bands compatible with a shift by multiples of 1/n."""
    bands = n
    while bands < 3:
        bands += n
    return bands


def rotation_map(model: str, k: int, n: int, bands: int | None = None) -> PLMap2:
    """(t, s) -> (t + k/n, s) on a band complex compatible with the shift."""
    bands = bands or _band_count(n)
    if (Q(k, n) * bands).denominator != 1:
        raise ParseError("band count incompatible with the rotation step")
    cells = band_cells(model, bands)
    shift = Q(k, n)
    out = []
    for c in cells:
        img = [(x + shift, y) for x, y in c]
        _, img_u = shift_into_unit(img)
        out.append(CellMap(tuple(c), img_u))
    return PLMap2(model, out)


def reflection_map(model: str, bands: int = 4) -> PLMap2:
    """(t, s) -> (-t, s); fixed meridians t in {0, 1/2}."""
    cells = band_cells(model, bands)
    out = []
    for c in cells:
        img = [(-x, y) for x, y in c]
        _, img_u = shift_into_unit(img)
        out.append(CellMap(tuple(c), img_u))
    return PLMap2(model, out)


def rotoreflection_map(k: int, n: int, bands: int | None = None) -> PLMap2:
    """(t, s) -> (t + k/n, -s) on the sphere."""
    bands = bands or _band_count(n)
    if (Q(k, n) * bands).denominator != 1:
        raise ParseError("band count incompatible with the rotation step")
    cells = band_cells(SPHERE, bands)
    shift = Q(k, n)
    out = []
    for c in cells:
        img = [(x + shift, -y) for x, y in c]
        _, img_u = shift_into_unit(img)
        out.append(CellMap(tuple(c), img_u))
    return PLMap2(SPHERE, out)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: PLMap2, p: Pt) -> Pt:
    """Image of a model point, exactly; ties go to the lowest cell index."""
    t, s = model_point(f.model, p[0], p[1])
    if is_collapsed(f.model, (t, s)):
        return _collapsed_image(f, s)
    idx, chart = locate_cell(f, (t, s))
    x, y = f.affine(idx)(chart)
    return model_point(f.model, x, y)


def locate_cell(f: PLMap2, p: Pt) -> tuple[int, Pt]:
    """Lowest-index cell whose chart contains p (or its +1 translate)."""
    from bisect import bisect_right
    candidates = [p] if p[0] != 0 else [p, (p[0] + 1, p[1])]
    cache = f.pow_cache()
    idx = cache.get("_locidx")
    if idx is None:
        boxes = [f.bbox(i) for i in range(len(f.cells))]
        order = sorted(range(len(f.cells)), key=lambda i: boxes[i][0])
        idx = (order, [boxes[i][0] for i in order])
        cache["_locidx"] = idx
    order, minxs = idx
    best = None
    best_q = None
    for q in candidates:
        hi = bisect_right(minxs, q[0])
        for oi in range(hi):
            i = order[oi]
            if best is not None and i >= best:
                continue
            bb = f.bbox(i)
            if bb[2] < q[0] or bb[1] > q[1] or bb[3] < q[1]:
                continue
            if point_in_convex(q, list(f.cells[i].poly)) != OUTSIDE:
                best = i
                best_q = q
    if best is None:
        raise StructureViolated(f"point {p} not covered by any cell")
    return best, best_q


def _collapsed_image(f: PLMap2, level: Fraction) -> Pt:
    for c in f.cells:
        for (x, y), (xi, yi) in zip(c.poly, c.img):
            if y == level:
                return model_point(f.model, Q(0), yi)
    raise StructureViolated("no cell touches the collapsed line")


# ---------------------------------------------------------------------------
# composition and friends


def compose(f: PLMap2, g: PLMap2) -> PLMap2:
    """g after f.  Cells: pieces of f's cells whose f-image fits one g-cell."""
    if f.model != g.model:
        raise ParseError("cannot compose maps on different models")
    order, g_sorted_minx = _x_index(g)
    g_polys = [list(c.poly) for c in g.cells]
    g_boxes = [poly_bbox(p) for p in g_polys]
    out: list[CellMap] = []
    from bisect import bisect_right
    for ci, cell in enumerate(f.cells):
        A = f.affine(ci)
        img = [A(p) for p in cell.poly]
        m, img_u = shift_into_unit(img)
        img_ccw = list(img_u) if A.det > 0 else list(reversed(img_u))
        Ainv = A.inverse()
        target = area2(tuple(img_ccw))
        got = Q(0)
        boxi = poly_bbox(img_ccw)
        hi = bisect_right(g_sorted_minx, boxi[2])
        for oi in range(hi):
            di = order[oi]
            gb = g_boxes[di]
            if gb[2] < boxi[0] or gb[3] < boxi[1] or boxi[3] < gb[1]:
                continue
            piece = clip_convex(img_ccw, g_polys[di])
            if not piece:
                continue
            got += area2(tuple(piece))
            B = g.affine(di)
            src = [Ainv((x + m, y)) for x, y in piece]
            new_img = [B(p) for p in piece]
            if A.det < 0:
                src.reverse()
                new_img.reverse()
            out.append(CellMap(tuple(src), tuple(new_img)))
        if got != target:
            raise OverlayDegenerate("composition pieces fail to tile a cell")
    return PLMap2(f.model, out)


def _x_index(g: PLMap2):
    """Cells ordered by min-x with the sorted keys, for interval pruning."""
    boxes = [g.bbox(i) for i in range(len(g.cells))]
    order = sorted(range(len(g.cells)), key=lambda i: boxes[i][0])
    return order, [boxes[i][0] for i in order]


def inverse(f: PLMap2) -> PLMap2:
    out = []
    for cell in f.cells:
        _, img_u = shift_into_unit(cell.img)
        poly = list(img_u)          # index-aligned with cell.poly
        img = list(cell.poly)
        if area2(tuple(poly)) < 0:
            poly.reverse()
            img.reverse()
        out.append(CellMap(tuple(poly), tuple(img)))
    return PLMap2(f.model, out)


def power(f: PLMap2, m: int) -> PLMap2:
    """f^m with per-map memoization of the iterates."""
    if m < 0:
        return power(inverse(f), -m)
    cache = f.pow_cache()
    if m in cache:
        return cache[m]
    if "conj" in cache and m >= 2:
        base, h, hinv = cache["conj"]
        out = compose(compose(hinv, power(base, m)), h)
        cache[m] = out
        return out
    if 0 not in cache:
        cache[0] = identity_map(f.model, [list(c.poly) for c in f.cells])
    if 1 not in cache:
        cache[1] = f
    best = max(i for i in cache if isinstance(i, int) and i <= m)
    out = cache[best]
    for i in range(best + 1, m + 1):
        out = compose(out, f)
        cache[i] = out
    return out


def seed_conjugated_powers(fp: PLMap2, f: PLMap2, h: PLMap2, n: int):
    """Record fp = h o f o h^-1 so iterates are built lazily through the
    conjugation (cheap when f is much smaller than the conjugated copy).

    Such iterates are correct as maps but their cells are not the chain
    refinement; structural consumers use chain_power instead."""
    cache = fp.pow_cache()
    cache["conj"] = (f, h, inverse(h))
    return fp


def chain_power(f: PLMap2, m: int) -> PLMap2:
    """f^m built strictly by left-composition with f, memoized.

    The source cells of the result are the common refinement of the
    pullbacks of f's own cells under all lower iterates; for periodic f
    that refinement is permuted cell-to-cell by f, which the equivariant
    machinery relies on."""
    if m == 0:
        return identity_map(f.model, [list(c.poly) for c in f.cells])
    cache = f.pow_cache()
    best = 0
    for i in range(m, 0, -1):
        if ("chain", i) in cache:
            best = i
            break
    if best == 0:
        cache[("chain", 1)] = f
        cache.setdefault(1, f)
        best = 1
    out = cache[("chain", best)]
    for i in range(best + 1, m + 1):
        out = compose(out, f)
        cache[("chain", i)] = out
        cache.setdefault(i, out)
    return out


def is_identity(f: PLMap2) -> bool:
    for i in range(len(f.cells)):
        a = f.affine(i)
        if not (a.a == 1 and a.b == 0 and a.d == 0 and a.e == 1 and a.f == 0
                and a.c.denominator == 1):
            return False
    return True


def map_equal(f: PLMap2, g: PLMap2) -> bool:
    """Equality as model maps: identical affine action (mod horizontal
    integer shifts) on every overlap piece."""
    if f.model != g.model:
        return False
    g_boxes = [poly_bbox(c.poly) for c in g.cells]
    for ci in range(len(f.cells)):
        A = f.affine(ci)
        box = f.bbox(ci)
        for di in range(len(g.cells)):
            if not bbox_overlap(box, g_boxes[di]):
                continue
            piece = clip_convex(list(f.cells[ci].poly), list(g.cells[di].poly))
            if not piece:
                continue
            B = g.affine(di)
            if not (A.a == B.a and A.b == B.b and A.d == B.d and A.e == B.e
                    and A.f == B.f and (A.c - B.c).denominator == 1):
                return False
    return True


def first_disagreement(f: PLMap2, g: PLMap2):
    """A witness model point where the two maps differ, or None."""
    g_boxes = [poly_bbox(c.poly) for c in g.cells]
    for ci in range(len(f.cells)):
        A = f.affine(ci)
        box = f.bbox(ci)
        for di in range(len(g.cells)):
            if not bbox_overlap(box, g_boxes[di]):
                continue
            piece = clip_convex(list(f.cells[ci].poly), list(g.cells[di].poly))
            if not piece:
                continue
            B = g.affine(di)
            if (A.a == B.a and A.b == B.b and A.d == B.d and A.e == B.e
                    and A.f == B.f and (A.c - B.c).denominator == 1):
                continue
            # centroid of the piece disagrees or a corner does
            for p in piece:
                if evaluate(f, model_point(f.model, mod1(p[0]), p[1])) != \
                        evaluate(g, model_point(g.model, mod1(p[0]), p[1])):
                    return model_point(f.model, mod1(p[0]), p[1])
            cx = sum(p[0] for p in piece) / len(piece)
            cy = sum(p[1] for p in piece) / len(piece)
            return model_point(f.model, mod1(cx), cy)
    return None


def period(f: PLMap2, n_max: int = 64):
    for n in range(1, n_max + 1):
        if is_identity(power(f, n)):
            return n
    return None


def orientation(f: PLMap2) -> str:
    return "preserving" if f.orientation_sign > 0 else "reversing"


# ---------------------------------------------------------------------------
# fixed sets


@dataclass
class FixedSet:
    zero: list[Pt]               # isolated fixed model points
    one: list[list[Pt]]          # maximal fixed arcs (model point chains)
    two: list[tuple[Pt, ...]]    # fixed 2-cells (chart polygons)
    everything: bool
    segments: list[tuple[Pt, Pt]] = field(default_factory=list)  # chart form

    def is_empty(self) -> bool:
        return not (self.zero or self.one or self.two or self.everything)


def fixed_set(f: PLMap2) -> FixedSet:
    lo, hi = s_range(f.model)
    zero_chart: list[Pt] = []
    segs: list[tuple[Pt, Pt]] = []
    two: list[tuple[Pt, ...]] = []
    for ci, cell in enumerate(f.cells):
        A = f.affine(ci)
        disp = [A(p)[0] - p[0] for p in cell.poly]
        dlo, dhi = min(disp), max(disp)
        for delta in range(-_floor(-dlo), _floor(dhi) + 1):
            kind, data = _fixed_in_cell(A, list(cell.poly), delta)
            if kind == "point":
                zero_chart.append(data)
            elif kind == "segment":
                segs.append(data)
            elif kind == "cell":
                two.append(cell.poly)
    total2 = sum(area2(p) for p in two)
    if total2 == 2 * (hi - lo):
        return FixedSet([], [], [], True)
    # poles / apex: fixed iff their collapsed line maps to itself
    for level in collapsed_levels(f.model):
        img = _collapsed_image(f, level)
        if img[1] == level:
            zero_chart.append((Q(0), level))
    zero, chains, canon_segs = _assemble_fixed(f.model, zero_chart, segs)
    return FixedSet(zero, chains, two, False, canon_segs)


def _fixed_in_cell(A: Affine, poly: list[Pt], delta: int):
    """Solve A(x) = x + (delta, 0) on a convex cell."""
    m11, m12, m21, m22 = A.a - 1, A.b, A.d, A.e - 1
    r1, r2 = Q(delta) - A.c, -A.f
    det = m11 * m22 - m12 * m21
    if det != 0:
        x = (r1 * m22 - m12 * r2) / det
        y = (m11 * r2 - r1 * m21) / det
        if point_in_convex((x, y), poly) != OUTSIDE:
            return "point", (x, y)
        return "none", None
    if m11 == m12 == m21 == m22 == 0:
        if r1 == 0 and r2 == 0:
            return "cell", None
        return "none", None
    # singular but nonzero: a line of solutions or none
    if (m11, m12) != (0, 0):
        p, q, r = m11, m12, r1
        # consistency of the second row on one solution of the first
        x0, y0 = _line_point(p, q, r)
        if m21 * x0 + m22 * y0 != r2:
            return "none", None
    else:
        p, q, r = m21, m22, r2
        x0, y0 = _line_point(p, q, r)
        if m11 * x0 + m12 * y0 != r1:
            return "none", None
    pts = _line_cell_points(p, q, r, poly)
    if not pts:
        return "none", None
    if len(pts) == 1:
        return "point", pts[0]
    return "segment", (pts[0], pts[-1])


def _line_point(p, q, r) -> Pt:
    if q != 0:
        return (Q(0), r / q)
    return (r / p, Q(0))


def _line_cell_points(p, q, r, poly: list[Pt]) -> list[Pt]:
    """Intersection of the line p x + q y = r with a convex polygon,
    as sorted extreme points."""
    hits: list[Pt] = []
    n = len(poly)
    vals = [p * v[0] + q * v[1] - r for v in poly]
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        fa, fb = vals[i], vals[(i + 1) % n]
        if fa == 0:
            hits.append(a)
        if fa * fb < 0:
            t = fa / (fa - fb)
            hits.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    uniq = sorted(set(hits))
    return [uniq[0], uniq[-1]] if len(uniq) > 1 else uniq


def _assemble_fixed(model, zero_chart, segs):
    """Normalize to model points, dedupe by chart geometry, merge chains.

    Segments are a multigraph on model points: two distinct arcs may join
    the same pair of collapsed points (e.g. both meridians of a fixed great
    circle), so deduplication must use the chart form, not the endpoints.
    """
    from .suspension import _edge_key
    canon: dict[tuple[Pt, Pt], tuple[Pt, Pt]] = {}
    for a, b in segs:
        key = _edge_key(a, b)
        canon[key] = key
    edges = []  # (node_a, node_b) per unique chart segment
    for (pa, pb) in sorted(canon):
        na = model_point(model, mod1(pa[0]), pa[1])
        nb = model_point(model, mod1(pb[0]), pb[1])
        if na == nb:  # chart segment inside a collapsed line: just the point
            zero_chart.append(pa)
            continue
        edges.append((na, nb, (pa, pb)))
    adj: dict[Pt, list[int]] = {}
    for ei, (na, nb, _) in enumerate(edges):
        adj.setdefault(na, []).append(ei)
        adj.setdefault(nb, []).append(ei)
    unused = set(range(len(edges)))
    chains = []
    starts = sorted([v for v, ids in adj.items() if len(ids) % 2 == 1]) \
        + sorted(adj.keys())
    for start in starts:
        while True:
            cand = [ei for ei in adj.get(start, []) if ei in unused]
            if not cand:
                break
            chain = [start]
            cur = start
            while True:
                cand = sorted(ei for ei in adj.get(cur, []) if ei in unused)
                if not cand:
                    break
                ei = cand[0]
                unused.discard(ei)
                na, nb, _ = edges[ei]
                cur = nb if cur == na else na
                chain.append(cur)
            chains.append(chain)
    zero = []
    on_chain = {v for ch in chains for v in ch}
    for p in zero_chart:
        mp = model_point(model, mod1(p[0]), p[1])
        if mp not in on_chain and mp not in zero:
            zero.append(mp)
    return sorted(zero), chains, [e[2] for e in edges]


# ---------------------------------------------------------------------------
# boundary restriction (disc)


def boundary_restriction(f: PLMap2) -> CirclePL:
    if f.model != DISC:
        raise ParseError("boundary restriction needs the disc model")
    edges = []
    for ci, cell in enumerate(f.cells):
        n = len(cell.poly)
        for i in range(n):
            p, q = cell.poly[i], cell.poly[(i + 1) % n]
            if p[1] == 1 and q[1] == 1:
                pi, qi = cell.img[i], cell.img[(i + 1) % n]
                if p[0] > q[0]:
                    p, q, pi, qi = q, p, qi, pi
                edges.append((p[0], q[0], pi[0], qi[0]))
    edges.sort()
    if not edges or edges[0][0] != 0:
        raise StructureViolated("boundary not edge-covered from t=0")
    breaks = []
    u = mod1(edges[0][2])
    pos = Q(0)
    for (a, b, ia, ib) in edges:
        if a != pos:
            raise StructureViolated("boundary edges do not chain")
        breaks.append((a, u))
        u = u + (ib - ia)
        pos = b
    if pos != 1:
        raise StructureViolated("boundary does not close up")
    sign = f.orientation_sign
    return CirclePL(tuple(breaks), sign).normalize()


# ---------------------------------------------------------------------------
# validation


def validate_homeo(f: PLMap2) -> list[str]:
    """Structured report; empty means the map is a valid model homeo."""
    problems: list[str] = []
    try:
        cx, img_charts = to_complex(f)
    except (OverlayDegenerate, StructureViolated, ParseError) as exc:
        return [f"cell structure invalid: {exc}"]
    problems.extend(complex_check(cx))
    sign = None
    for i in range(len(f.cells)):
        d = f.affine(i).det
        if d == 0:
            problems.append(f"cell {i} has zero determinant")
        elif sign is None:
            sign = 1 if d > 0 else -1
        elif (d > 0) != (sign > 0):
            problems.append("mixed determinant signs")
            break
    problems.extend(_edge_image_consistency(f))
    problems.extend(_collapse_conditions(f))
    try:
        inv = inverse(f)
        icx, _ = to_complex(inv)
        for msg in complex_check(icx):
            problems.append(f"image complex: {msg}")
    except (OverlayDegenerate, StructureViolated, ParseError) as exc:
        problems.append(f"image complex invalid: {exc}")
    if f.model == DISC and not problems:
        try:
            boundary_restriction(f)
        except (StructureViolated, ParseError) as exc:
            problems.append(f"boundary restriction invalid: {exc}")
    if not problems:
        cnt = _generic_preimage_count(f)
        if cnt != 1:
            problems.append(f"generic point has {cnt} preimages")
    return problems


def require_valid(f: PLMap2):
    problems = validate_homeo(f)
    if problems:
        raise StructureViolated("; ".join(problems))


def _edge_image_consistency(f: PLMap2) -> list[str]:
    """Shared cell edges must have images agreeing up to one horizontal
    integer shift: the model map is then well defined across the edge."""
    from .suspension import _edge_key
    problems = []
    seen: dict = {}
    for cell in f.cells:
        n = len(cell.poly)
        for i in range(n):
            p, q = cell.poly[i], cell.poly[(i + 1) % n]
            pi, qi = cell.img[i], cell.img[(i + 1) % n]
            if q < p:
                p, q, pi, qi = q, p, qi, pi
            key = _edge_key(p, q)
            if key not in seen:
                seen[key] = (pi, qi)
            else:
                p0, q0 = seen[key]
                d1, d2 = pi[0] - p0[0], qi[0] - q0[0]
                if pi[1] != p0[1] or qi[1] != q0[1] or d1 != d2 \
                        or d1.denominator != 1:
                    problems.append(f"edge {key} image mismatch")
    return problems


def _collapse_conditions(f: PLMap2) -> list[str]:
    problems = []
    levels = collapsed_levels(f.model)
    targets = {}
    for cell in f.cells:
        for (x, y), (xi, yi) in zip(cell.poly, cell.img):
            if y in levels:
                targets.setdefault(y, set()).add(yi)
            elif f.model == DISC and y == 1:
                if yi != 1:
                    problems.append("disc boundary not preserved")
                    return problems
    if f.model == DISC:
        if targets.get(Q(0)) != {Q(0)}:
            problems.append("disc center must map to the center")
    else:
        t1 = targets.get(Q(1), set())
        t2 = targets.get(Q(-1), set())
        if len(t1) != 1 or len(t2) != 1 or {next(iter(t1)), next(iter(t2))} \
                != {Q(1), Q(-1)}:
            problems.append("poles must map onto poles")
    return problems


def _generic_preimage_count(f: PLMap2) -> int:
    """Preimage count of a generic rational point under the chart images."""
    img_polys = []
    for ci, cell in enumerate(f.cells):
        m, img_u = shift_into_unit(cell.img)
        img_polys.append(ccw(img_u))
    for candidate_cell in img_polys:
        cx = sum(p[0] for p in candidate_cell) / len(candidate_cell)
        cy = sum(p[1] for p in candidate_cell) / len(candidate_cell)
        p = (mod1(cx), cy)
        on_edge = False
        cnt = 0
        for poly in img_polys:
            for q in (p, (p[0] + 1, p[1])):
                cls = point_in_convex(q, list(poly))
                if cls == INSIDE:
                    cnt += 1
                elif cls == "boundary":
                    on_edge = True
        if on_edge:
            continue
        return cnt
    return -1


# ---------------------------------------------------------------------------
# triangulated view (serialization and complex checks)


def to_complex(f: PLMap2) -> tuple[SuspensionComplex, list[list[Pt]]]:
    """Fan-triangulate cells into the vertex/lift form plus image charts."""
    verts: list[Pt] = []
    index: dict[Pt, int] = {}

    def vid(chart: Pt) -> int:
        key = (mod1(chart[0]), chart[1])
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    tris = []
    lifts = []
    img_charts = []
    for cell in f.cells:
        n = len(cell.poly)
        for i in range(1, n - 1):
            corners = [cell.poly[0], cell.poly[i], cell.poly[i + 1]]
            imgs = [cell.img[0], cell.img[i], cell.img[i + 1]]
            ids = [vid(c) for c in corners]
            lf = []
            for c, vi in zip(corners, ids):
                lift = c[0] - verts[vi][0]
                if lift.denominator != 1:
                    raise OverlayDegenerate("non-integer lift")
                lf.append(int(lift))
            tris.append(tuple(ids))
            lifts.append(tuple(lf))
            img_charts.append(imgs)
    cx = SuspensionComplex(f.model, verts, tris, lifts)
    return cx, img_charts


def from_complex(cx: SuspensionComplex, img_verts: list[Pt],
                 img_lifts: list[tuple[int, int, int]]) -> PLMap2:
    """Rebuild a map from the serialized triangle form."""
    cells = []
    for ti, tri in enumerate(cx.tris):
        chart = cx.chart(ti)
        img = []
        for z, vi in enumerate(tri):
            t, s = img_verts[vi]
            img.append((t + img_lifts[ti][z], s))
        poly = list(chart)
        if area2(tuple(poly)) < 0:
            poly.reverse()
            img.reverse()
        cells.append(CellMap(tuple(poly), tuple(img)))
    return PLMap2(cx.model, cells)


def serializable_parts(f: PLMap2):
    """(complex, per-vertex image, per-triangle image lifts) for JSON."""
    cx, img_charts = to_complex(f)
    img_verts: list[Pt | None] = [None] * len(cx.verts)
    img_lifts = []
    for ti, tri in enumerate(cx.tris):
        lf = []
        for z, vi in enumerate(tri):
            x, y = img_charts[ti][z]
            canon = (mod1(x), y)
            if img_verts[vi] is None:
                img_verts[vi] = canon
            if img_verts[vi][1] != y or (x - img_verts[vi][0]).denominator != 1:
                raise OverlayDegenerate("vertex images inconsistent")
            lf.append(int(x - img_verts[vi][0]))
        img_lifts.append(tuple(lf))
    return cx, img_verts, img_lifts
