"""Command-line driver: generate, analyze, conjugate, verify, render,
selftest.

Exit codes: 0 success, 1 verification failure, 2 structural violation,
3 parse error, 4 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import io as pio
from .circle import (classify_interval, classify_line, CirclePL,
                     compose_circle, conjugate_circle_to_model,
                     fixed_points_reversing, is_circle_identity,
                     iterate_circle, period_circle, rotation_number)
from .conjugacy import Certificate, ModelIsometry, check_certificate
from .disc import (analyze_disc, build_conjugacy_reflection,
                   build_conjugacy_rotation, rigidity_check)
from .errors import InvalidClass, ParseError, PLHomeoError, StructureViolated
from .exact import fmt_rat, parse_rat
from .generate import make_instance
from .maps import (PLMap2, compose, evaluate, fixed_set, map_equal,
                   first_disagreement, validate_homeo)
from .sphere import (analyze_sphere, build_conjugacy_fixedpoint,
                     build_conjugacy_free)
from .suspension import DISC, SPHERE

Q = Fraction


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 0
    try:
        return args.func(args) or 0
    except PLHomeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def _build_parser():
    p = argparse.ArgumentParser(
        prog="plhomeo",
        description="Exact classification and conjugacy certificates for "
                    "periodic PL homeomorphisms")
    sub = p.add_subparsers()

    g = sub.add_parser("generate", help="emit a scrambled model isometry")
    g.add_argument("--space", choices=(DISC, SPHERE), required=True)
    g.add_argument("--kind", required=True,
                   choices=("identity", "rotation", "reflection",
                            "rotoreflection"))
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--moves", type=int, default=10)
    g.add_argument("--out", required=True)
    g.add_argument("--key-out", help="answer key file (scramble + model)")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="classify an instance")
    a.add_argument("path")
    a.add_argument("--n-max", type=int, default=64)
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("conjugate", help="build a conjugacy certificate")
    c.add_argument("path")
    c.add_argument("--out", required=True)
    c.add_argument("--n-max", type=int, default=64)
    c.set_defaults(func=cmd_conjugate)

    v = sub.add_parser("verify", help="independently re-check a certificate")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.add_argument("--n-max", type=int, default=64)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="draw an instance as SVG")
    r.add_argument("path")
    r.add_argument("--out", required=True)
    r.add_argument("--n-max", type=int, default=64)
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("selftest", help="run the acceptance battery")
    s.add_argument("--seeds", type=int, default=3,
                   help="scramble seeds per class")
    s.add_argument("--moves", type=int, default=10)
    s.add_argument("--quick", action="store_true",
                   help="small class sample instead of the full matrix")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--inject-corruption", action="store_true",
                   help="plant a deliberate failure to prove detection")
    s.set_defaults(func=cmd_selftest)
    return p


# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    f, h, r = make_instance(args.space, args.kind, args.k, args.n,
                            args.seed, args.moves)
    pio.save_json(args.out, pio.instance_to_dict(args.space, f))
    if args.key_out:
        key = {
            "space": args.space, "kind": args.kind, "k": args.k, "n": args.n,
            "seed": args.seed, "moves": args.moves,
            "scramble": pio.map2_to_dict(h),
        }
        pio.save_json(args.key_out, key)
    print(f"wrote {args.out} ({len(f.cells)} cells)")
    return 0


def _analysis_dict(space, f, n_max):
    if space == "interval":
        cls = classify_interval(f, declared_periodic=False)
        return {"space": space, "class": cls.kind,
                "period": 1 if cls.kind == "identity" else 2,
                "fixed_point": fmt_rat(cls.fixed_point)
                if cls.fixed_point is not None else None}
    if space == "line":
        cls = classify_line(f, declared_periodic=False)
        return {"space": space, "class": cls.kind,
                "period": 1 if cls.kind == "identity" else 2,
                "fixed_point": fmt_rat(cls.fixed_point)
                if cls.fixed_point is not None else None}
    if space == "circle":
        n = period_circle(f, n_max)
        if n is None:
            from .errors import NotPeriodic
            raise NotPeriodic(f"no period up to {n_max}")
        out = {"space": space, "period": n,
               "orientation": "preserving" if f.orientation == 1
               else "reversing"}
        if f.orientation == 1:
            rc = rotation_number(f, n_max)
            out["class"] = "rotation"
            out["k"], out["n"] = rc.k, rc.n
        else:
            p, q = fixed_points_reversing(f)
            out["class"] = "reflection"
            out["fixed_points"] = [fmt_rat(p), fmt_rat(q)]
        return out
    if space == DISC:
        ana = analyze_disc(f, n_max)
        out = {"space": space, "class": ana.kind, "period": ana.n,
               "orientation": "reversing" if ana.kind == "reflection"
               else "preserving"}
        if ana.kind == "rotation":
            out["k"], out["n"] = ana.k, ana.n
            out["fixed_point"] = [fmt_rat(ana.fixed_point[0]),
                                  fmt_rat(ana.fixed_point[1])]
        if ana.kind == "reflection":
            out["fixed_arc_endpoints"] = [
                [fmt_rat(ana.fixed_arc[0][0]), fmt_rat(ana.fixed_arc[0][1])],
                [fmt_rat(ana.fixed_arc[-1][0]),
                 fmt_rat(ana.fixed_arc[-1][1])]]
        return out
    ana = analyze_sphere(f, n_max)
    out = {"space": space, "class": ana.kind, "period": ana.n,
           "orientation": "preserving" if ana.kind in ("identity", "rotation")
           else "reversing"}
    if ana.kind in ("rotation", "rotoreflection"):
        out["k"], out["n"] = ana.k, ana.n
    if ana.kind == "rotoreflection":
        out["fixed_set"] = "empty"
    elif ana.kind == "rotation":
        out["fixed_set"] = "two poles"
    elif ana.kind == "reflection":
        out["fixed_set"] = "simple closed curve"
    return out


def _fmt_pt(p) -> str:
    if isinstance(p, (list, tuple)):
        return "(" + ", ".join(str(x) for x in p) + ")"
    return str(p)


def _analysis_text(d: dict) -> str:
    bits = [d["space"], d["class"]]
    if "period" in d:
        bits.append(f"period {d['period']}")
    if "k" in d:
        bits.append(f"angle {d['k']}/{d['n']}")
    if d.get("fixed_point"):
        bits.append(f"fixed point {_fmt_pt(d['fixed_point'])}")
    if d.get("fixed_points"):
        bits.append("fixed points "
                    + ", ".join(_fmt_pt(p) for p in d["fixed_points"]))
    if d.get("fixed_arc_endpoints"):
        bits.append("fixed arc endpoints "
                    + " and ".join(_fmt_pt(p)
                                   for p in d["fixed_arc_endpoints"]))
    if d.get("fixed_set"):
        bits.append(f"fixed set: {d['fixed_set']}")
    return ", ".join(str(b) for b in bits)


def cmd_analyze(args) -> int:
    space, f, _, _ = pio.instance_from_dict(pio.load_json(args.path))
    d = _analysis_dict(space, f, args.n_max)
    if args.format == "json":
        sys.stdout.write(pio.dumps(d))
    else:
        print(_analysis_text(d))
    return 0


def cmd_conjugate(args) -> int:
    space, f, _, _ = pio.instance_from_dict(pio.load_json(args.path))
    if space == "circle":
        cert = conjugate_circle_to_model(f, args.n_max)
        pio.save_json(args.out, pio.circle_certificate_to_dict(
            cert.kind, cert.klass, cert.h))
        print(f"wrote {args.out} (exact)")
        return 0
    if space == "interval":
        cls = classify_interval(f, declared_periodic=False)
        body = {"model": {"space": space, "kind": cls.kind},
                "h": pio.interval_to_dict(cls.h) if cls.h else None,
                "exact": True}
        pio.save_json(args.out, body)
        print(f"wrote {args.out} (exact)")
        return 0
    if space == "line":
        cls = classify_line(f, declared_periodic=False)
        body = {"model": {"space": space, "kind": cls.kind},
                "h": pio.line_to_dict(cls.h) if cls.h else None,
                "exact": True}
        pio.save_json(args.out, body)
        print(f"wrote {args.out} (exact)")
        return 0
    cert = _conjugate_map(space, f, args.n_max)
    pio.save_json(args.out, pio.certificate_to_dict(cert))
    print(f"wrote {args.out} ({'exact' if cert.exact else 'INEXACT'})")
    return 0


def _conjugate_map(space, f, n_max) -> Certificate:
    if space == DISC:
        ana = analyze_disc(f, n_max)
        if ana.kind == "reflection":
            return build_conjugacy_reflection(f, n_max, analysis=ana)
        return build_conjugacy_rotation(f, n_max, analysis=ana)
    ana = analyze_sphere(f, n_max)
    if ana.kind == "rotoreflection":
        return build_conjugacy_free(f, n_max, analysis=ana)
    return build_conjugacy_fixedpoint(f, n_max, analysis=ana)


def cmd_verify(args) -> int:
    space, f, _, _ = pio.instance_from_dict(pio.load_json(args.instance))
    data = pio.load_json(args.certificate)
    if space == "circle":
        return _verify_circle(f, data)
    if space in ("interval", "line"):
        return _verify_onedim(space, f, data)
    cert = pio.certificate_from_dict(data)
    problems = validate_homeo(cert.h)
    if problems:
        print("certificate invalid: " + "; ".join(problems))
        return 1
    lhs = compose(f, cert.h)
    rhs = compose(cert.h, cert.model.as_map())
    if map_equal(lhs, rhs):
        print("certificate verified: h o f = model o h exactly")
        return 0
    w = first_disagreement(lhs, rhs)
    print(f"certificate REJECTED: first disagreement at "
          f"({fmt_rat(w[0])}, {fmt_rat(w[1])})")
    return 1


def _verify_circle(f, data) -> int:
    try:
        h = pio.circle_from_dict(data["h"])
        model = data["model"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad circle certificate: {exc}")
    from .circle import circle_reflection, circle_rotation, circle_identity
    kind = model.get("kind")
    if kind == "rotation":
        target = circle_rotation(Q(model["k"], model["n"]))
    elif kind == "reflection":
        target = circle_reflection()
    else:
        target = circle_identity()
    lhs = compose_circle(f, h)
    rhs = compose_circle(h, target)
    if lhs.equals(rhs):
        print("certificate verified: h o f = model o h exactly")
        return 0
    print("certificate REJECTED")
    return 1


def _verify_onedim(space, f, data) -> int:
    kind = data.get("model", {}).get("kind")
    if kind == "identity":
        ok = all(f(x) == x for x, _ in
                 (f.breaks if space == "interval" else f.breaks))
        print("verified" if ok else "REJECTED")
        return 0 if ok else 1
    if space == "interval":
        h = pio.interval_from_dict(data["h"])
        xs = {x for x, _ in f.breaks} | {x for x, _ in h.breaks}
        ok = all(h(f(x)) == 1 - h(x) for x in xs)
    else:
        h = pio.line_from_dict(data["h"])
        xs = {x for x, _ in f.breaks} | {x for x, _ in h.breaks}
        xs = sorted(xs)
        xs = [xs[0] - 2, xs[0] - 1] + xs + [xs[-1] + 1, xs[-1] + 2]
        ok = all(h(f(x)) == 1 - h(x) for x in xs)
    print("verified" if ok else "REJECTED")
    return 0 if ok else 1


def cmd_render(args) -> int:
    from .svg import render_map
    space, f, _, _ = pio.instance_from_dict(pio.load_json(args.path))
    if space not in (DISC, SPHERE):
        raise ParseError("render supports disc and sphere instances")
    arcs = None
    orbit = None
    extra = None
    try:
        arcs, orbit, extra = _render_decorations(space, f, args.n_max)
    except PLHomeoError:
        pass  # draw the bare map when the analysis fails
    svg = render_map(f, arcs=arcs, orbit=orbit, extra_curves=extra)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _render_decorations(space, f, n_max):
    if space == DISC:
        ana = analyze_disc(f, n_max)
        if ana.kind == "rotation":
            from .disc import sector_decomposition
            from .maps import power
            j = pow(ana.k, -1, ana.n)
            g = power(f, j) if j > 1 else f
            dec = sector_decomposition(g, ana.n)
            k = dec.complex
            arcs = [[k.verts[v] for v in arc] for arc in dec.arcs]
            return arcs, None, None
        return None, None, None
    ana = analyze_sphere(f, n_max)
    if ana.kind == "rotoreflection":
        from .sphere import free_structure
        from .eqcomplex import _pullback_levels
        from .maps import inverse
        fp, conj, t0, orbit_fp, _ = free_structure(f, ana.n)
        if conj is None:
            curve = [[(Q(i, 64), t0) for i in range(65)]]
            orbit = orbit_fp
        else:
            hinv = inverse(conj.h)
            segs = _pullback_levels(conj.h, [t0])
            curve = [[(p[0] % 1, p[1]) for p in seg] for seg in segs]
            orbit = [evaluate(hinv, p) for p in orbit_fp]
        image_curve = []
        for seg in curve:
            image_curve.append([evaluate(f, p) for p in seg])
        extra = [(c, "#cc7700") for c in curve] \
            + [(c, "#7700cc") for c in image_curve]
        return None, orbit, extra
    return None, None, None


# ---------------------------------------------------------------------------
# selftest battery


def _class_matrix(quick: bool):
    from math import gcd
    out = []
    if quick:
        out = [
            (DISC, "rotation", 1, 3), (DISC, "rotation", 2, 5),
            (DISC, "reflection", 0, 2),
            (SPHERE, "rotation", 1, 3), (SPHERE, "reflection", 0, 2),
            (SPHERE, "rotoreflection", 1, 4),
        ]
        return out
    for n in range(2, 9):
        for k in range(1, n):
            if gcd(k, n) == 1:
                out.append((DISC, "rotation", k, n))
                out.append((SPHERE, "rotation", k, n))
    out.append((DISC, "reflection", 0, 2))
    out.append((SPHERE, "reflection", 0, 2))
    for n in (2, 4, 6, 8):
        for k in range(1, n):
            if gcd(2 * k, n) == 2:
                out.append((SPHERE, "rotoreflection", k, n))
    return out


def _run_case(case):
    space, kind, k, n, seed, moves, corrupt = case
    t0 = time.time()
    try:
        f, h, r = make_instance(space, kind, k, n, seed, moves)
        d = _analysis_dict(space, f, 64)
        want = {"identity": "identity", "rotation": "rotation",
                "reflection": "reflection",
                "rotoreflection": "rotoreflection"}[kind]
        if d["class"] != want or (kind in ("rotation", "rotoreflection")
                                  and (d["k"], d["n"]) != (k, n)):
            return (case, False, "class mismatch", time.time() - t0)
        cert = _conjugate_map(space, f, 64)
        if corrupt:
            cert = _corrupt(cert)
        lhs = compose(f, cert.h)
        rhs = compose(cert.h, cert.model.as_map())
        ok = map_equal(lhs, rhs)
        if corrupt:
            return (case, not ok, "corruption detected" if not ok
                    else "corruption NOT detected", time.time() - t0)
        if not ok:
            return (case, False, "certificate inexact", time.time() - t0)
        return (case, True, "ok", time.time() - t0)
    except PLHomeoError as exc:
        return (case, False, f"{type(exc).__name__}: {exc}",
                time.time() - t0)


def _corrupt(cert: Certificate) -> Certificate:
    from .maps import CellMap
    cells = list(cert.h.cells)
    for idx, c in enumerate(cells):
        img = list(c.img)
        for j, (x, y) in enumerate(img):
            if 0 < y < 1 and abs(y) != 1:
                img[j] = (x, y + (1 - y) / 7)
                cells[idx] = CellMap(c.poly, tuple(img))
                return Certificate(cert.model, PLMap2(cert.h.model, cells),
                                   cert.exact, cert.pins)
    return cert


def cmd_selftest(args) -> int:
    cases = []
    for (space, kind, k, n) in _class_matrix(args.quick):
        for s in range(args.seeds):
            cases.append((space, kind, k, n, 100 + s, args.moves, False))
    if args.inject_corruption:
        cases.append((DISC, "rotation", 1, 3, 999, args.moves, True))
    results = []
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_case, cases))
    else:
        results = [_run_case(c) for c in cases]
    failures = 0
    for (case, ok, msg, dt) in results:
        space, kind, k, n, seed, moves, corrupt = case
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        tag = f"{space} {kind} k={k} n={n} seed={seed}"
        if corrupt:
            tag += " [corrupted]"
        print(f"{status} {tag}: {msg} ({dt:.1f}s)")
    print(f"{len(results) - failures}/{len(results)} cases passed")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
