"""JSON (de)serialization: instances, maps, certificates, answer keys.

All rationals travel as "p/q" strings (q > 0, lowest terms); output is
deterministic (sorted keys, fixed separators).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .circle import CirclePL, IntervalPL, LinePL
from .conjugacy import Certificate, ModelIsometry
from .errors import ParseError
from .exact import fmt_rat, parse_rat
from .maps import PLMap2, from_complex, serializable_parts
from .suspension import DISC, SPHERE, SuspensionComplex

SPACES = ("interval", "line", "circle", "disc", "sphere")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def map2_to_dict(f: PLMap2) -> dict:
    cx, img_verts, img_lifts = serializable_parts(f)
    return {
        "model": f.model,
        "vertices": [[fmt_rat(t), fmt_rat(s)] for t, s in cx.verts],
        "triangles": [list(t) for t in cx.tris],
        "lifts": [list(l) for l in cx.lifts],
        "images": [[fmt_rat(t), fmt_rat(s)] for t, s in img_verts],
        "image_lifts": [list(l) for l in img_lifts],
    }


def map2_from_dict(data: dict) -> PLMap2:
    try:
        model = data["model"]
        if model not in (DISC, SPHERE):
            raise ParseError(f"unknown model {model!r}")
        verts = [(parse_rat(t), parse_rat(s)) for t, s in data["vertices"]]
        tris = [tuple(t) for t in data["triangles"]]
        lifts = [tuple(l) for l in data["lifts"]]
        imgs = [(parse_rat(t), parse_rat(s)) for t, s in data["images"]]
        img_lifts = [tuple(l) for l in data["image_lifts"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad map payload: {exc}") from exc
    cx = SuspensionComplex(model, verts, tris, lifts)
    return from_complex(cx, imgs, img_lifts)


def circle_to_dict(f: CirclePL) -> dict:
    return {"type": "circle_pl",
            "lift": [[fmt_rat(t), fmt_rat(u)] for t, u in f.breaks]}


def circle_from_dict(data: dict) -> CirclePL:
    try:
        breaks = tuple((parse_rat(t), parse_rat(u)) for t, u in data["lift"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad circle payload: {exc}") from exc
    us = [u for _, u in breaks]
    if len(us) == 1:
        sign = 1 if data.get("orientation", 1) >= 0 else -1
        if "orientation" not in data:
            raise ParseError("single-breakpoint circle map needs an "
                             "explicit orientation")
    else:
        sign = 1 if us[1] > us[0] else -1
    return CirclePL(breaks, sign)


def circle_to_dict_oriented(f: CirclePL) -> dict:
    d = circle_to_dict(f)
    if len(f.breaks) == 1:
        d["orientation"] = f.orientation
    return d


def interval_to_dict(f: IntervalPL) -> dict:
    return {"type": "interval_pl",
            "breakpoints": [[fmt_rat(x), fmt_rat(y)] for x, y in f.breaks]}


def interval_from_dict(data: dict) -> IntervalPL:
    try:
        return IntervalPL(tuple((parse_rat(x), parse_rat(y))
                                for x, y in data["breakpoints"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad interval payload: {exc}") from exc


def line_to_dict(f: LinePL) -> dict:
    return {"type": "line_pl",
            "breakpoints": [[fmt_rat(x), fmt_rat(y)] for x, y in f.breaks],
            "left_slope": fmt_rat(f.left_slope),
            "right_slope": fmt_rat(f.right_slope)}


def line_from_dict(data: dict) -> LinePL:
    try:
        return LinePL(tuple((parse_rat(x), parse_rat(y))
                            for x, y in data["breakpoints"]),
                      parse_rat(data["left_slope"]),
                      parse_rat(data["right_slope"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad line payload: {exc}") from exc


def instance_to_dict(space: str, payload, declared_period=None,
                     marked_points=None) -> dict:
    if space not in SPACES:
        raise ParseError(f"unknown space {space!r}")
    if space in (DISC, SPHERE):
        body = map2_to_dict(payload)
    elif space == "circle":
        body = circle_to_dict_oriented(payload)
    elif space == "interval":
        body = interval_to_dict(payload)
    else:
        body = line_to_dict(payload)
    out = {"space": space, "map": body}
    if declared_period is not None:
        out["declared_period"] = declared_period
    if marked_points:
        out["marked_points"] = marked_points
    return out


def instance_from_dict(data: dict):
    try:
        space = data["space"]
        body = data["map"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"instance file needs 'space' and 'map': {exc}")
    if space not in SPACES:
        raise ParseError(f"unknown space {space!r}")
    if space in (DISC, SPHERE):
        f = map2_from_dict(body)
        if f.model != space:
            raise ParseError("space tag and map model disagree")
    elif space == "circle":
        f = circle_from_dict(body)
    elif space == "interval":
        f = interval_from_dict(body)
    else:
        f = line_from_dict(body)
    return space, f, data.get("declared_period"), data.get("marked_points")


def model_to_dict(m: ModelIsometry) -> dict:
    return {"space": m.model, "kind": m.kind, "k": m.k, "n": m.n}


def model_from_dict(data: dict) -> ModelIsometry:
    try:
        return ModelIsometry(data["space"], data["kind"],
                             data.get("k", 0), data.get("n", 1))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad model payload: {exc}") from exc


def certificate_to_dict(cert: Certificate) -> dict:
    return {"model": model_to_dict(cert.model),
            "h": map2_to_dict(cert.h),
            "exact": cert.exact,
            "pins": cert.pins}


def certificate_from_dict(data: dict) -> Certificate:
    try:
        model = model_from_dict(data["model"])
        h = map2_from_dict(data["h"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad certificate payload: {exc}") from exc
    return Certificate(model, h, bool(data.get("exact", False)),
                       dict(data.get("pins", {})))


def circle_certificate_to_dict(kind: str, klass, h: CirclePL) -> dict:
    model = {"space": "circle", "kind": kind}
    if klass is not None:
        model["k"], model["n"] = klass.k, klass.n
    return {"model": model, "h": circle_to_dict_oriented(h), "exact": True}


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def save_json(path: str, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
