"""Exact convex-combination (Tutte) embeddings with prescribed boundary.

Interior vertices are placed at the uniform average of their neighbors;
the sparse rational system is solved by symmetric elimination with a
minimum-degree pivot order, so the result is exact and deterministic.
With the boundary on a convex polygon the solution is an embedding; the
caller re-checks triangle orientations and raises on degeneracy.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import EmbeddingDegenerate

Q = Fraction


def tutte_positions(adjacency: dict, prescribed: dict) -> dict:
    """Positions for all vertices: prescribed ones kept, interior solved.

    adjacency: vertex -> iterable of neighbor vertices (symmetric).
    prescribed: vertex -> (x, y) exact target.
    """
    interior = sorted(v for v in adjacency if v not in prescribed)
    if not interior:
        return dict(prescribed)
    rows: dict = {}
    rhs: dict = {}
    for v in interior:
        nbrs = sorted(set(adjacency[v]) - {v})
        if not nbrs:
            raise EmbeddingDegenerate(f"isolated interior vertex {v}")
        row = {v: Q(len(nbrs))}
        b = [Q(0), Q(0)]
        for w in nbrs:
            if w in prescribed:
                b[0] += prescribed[w][0]
                b[1] += prescribed[w][1]
            else:
                row[w] = row.get(w, Q(0)) - 1
        rows[v] = row
        rhs[v] = b
    order = []
    remaining = set(interior)
    elim: dict = {}
    while remaining:
        v = min(remaining, key=lambda u: (len(rows[u]), u))
        remaining.discard(v)
        order.append(v)
        pivot_row, pivot_rhs = rows.pop(v), rhs.pop(v)
        p = pivot_row.pop(v, Q(0))
        if p == 0:
            raise EmbeddingDegenerate("singular convex-combination system")
        elim[v] = (pivot_row, pivot_rhs, p)
        for u in list(pivot_row):
            if u not in rows:
                continue
            urow = rows[u]
            cv = urow.pop(v, Q(0))
            if cv == 0:
                continue
            factor = cv / p
            for w, cw in pivot_row.items():
                if w == u:
                    urow[u] = urow.get(u, Q(0)) - factor * cw
                else:
                    urow[w] = urow.get(w, Q(0)) - factor * cw
                    if urow[w] == 0:
                        del urow[w]
            rhs[u][0] -= factor * pivot_rhs[0]
            rhs[u][1] -= factor * pivot_rhs[1]
    pos = dict(prescribed)
    for v in reversed(order):
        row, b, p = elim[v]
        x, y = b[0], b[1]
        for w, cw in row.items():
            x -= cw * pos[w][0]
            y -= cw * pos[w][1]
        pos[v] = (x / p, y / p)
    return pos
