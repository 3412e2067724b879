"""JSON schemas for the exchange formats.

Every number travels as an exact rational string ("3", "-7/2"); nothing is
ever rendered as a float.  Emission is deterministic: keys are sorted and
term lists are emitted in sorted exponent order.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .modules import DiffModule, RadiiMultiset
from .polyhedral import AffineFunctional, PolyFunc, TRPSet
from .profiles import ProfileCell, RadiusProfile
from .twisted import NewtonPolygon, TwistedPoly
from .valued import LaurentElement, ValuationConfig

__all__ = [
    "frac_str",
    "parse_frac",
    "dumps",
    "laurent_to_obj",
    "laurent_from_obj",
    "config_from_obj",
    "module_to_obj",
    "module_from_obj",
    "poly_to_obj",
    "poly_from_obj",
    "polygon_to_obj",
    "multiset_to_obj",
    "multiset_from_obj",
    "profile_to_obj",
    "profile_from_obj",
    "trp_from_obj",
    "trp_to_obj",
    "polyfunc_from_obj",
    "polyfunc_to_obj",
]


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s)
    raise ValueError(f"expected an exact rational string, got {s!r}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def laurent_to_obj(x: LaurentElement) -> dict:
    terms = []
    for (e, i), c in sorted(x.terms.items()):
        terms.append({"c": frac_str(c), "u": list(e), "t": list(i)})
    return {"terms": terms}


def laurent_from_obj(config: ValuationConfig, obj: dict) -> LaurentElement:
    terms = {}
    for t in obj["terms"]:
        key = (tuple(t.get("u", [0] * config.m_base)), tuple(t.get("t", [0] * config.n_geom)))
        terms[key] = terms.get(key, Fraction(0)) + parse_frac(t["c"])
    return LaurentElement(config, terms)


def config_from_obj(obj: dict) -> ValuationConfig:
    p = int(obj["p"])
    u_weights = [parse_frac(w) for w in obj.get("u_weights", [])]
    if "n_geom" in obj:
        n_geom = int(obj["n_geom"])
    else:
        tkeys = [k for k in obj.get("matrices", {}) if k.startswith("t")]
        n_geom = max((int(k[1:]) for k in tkeys), default=1)
    return ValuationConfig(p, u_weights, n_geom)


def module_to_obj(M: DiffModule) -> dict:
    cfg = M.config
    return {
        "rank": M.rank,
        "p": cfg.p,
        "u_weights": [frac_str(w) for w in cfg.u_weights],
        "n_geom": cfg.n_geom,
        "matrices": {
            a: [[laurent_to_obj(x) for x in row] for row in mat]
            for a, mat in M.matrices.items()
        },
    }


def module_from_obj(obj: dict) -> DiffModule:
    cfg = config_from_obj(obj)
    mats = {
        a: [[laurent_from_obj(cfg, x) for x in row] for row in mat]
        for a, mat in obj["matrices"].items()
    }
    return DiffModule(cfg, int(obj["rank"]), mats)


def poly_to_obj(P: TwistedPoly) -> dict:
    coeffs = []
    for c in P.coeffs:
        if not isinstance(c, LaurentElement):
            raise ValueError("only polynomial coefficients serialize")
        coeffs.append(laurent_to_obj(c))
    return {"derivation": P.axis, "coeffs": coeffs}


def poly_from_obj(config: ValuationConfig, obj: dict) -> TwistedPoly:
    coeffs = [laurent_from_obj(config, c) for c in obj["coeffs"]]
    return TwistedPoly(config, obj["derivation"], coeffs)


def polygon_to_obj(np_: NewtonPolygon) -> dict:
    return {
        "vertices": [[x, frac_str(y)] for x, y in np_.vertices],
        "slopes": [[frac_str(s), m] for s, m in np_.slopes],
    }


def multiset_to_obj(ms: RadiiMultiset) -> dict:
    vis = sorted((v, m) for v, m, c in ms.entries if not c)
    out = {"kind": ms.kind, "entries": [[frac_str(v), m] for v, m in vis]}
    capped = sorted((v, m) for v, m, c in ms.entries if c)
    if capped:
        out["capped"] = [[frac_str(v), m] for v, m in capped]
    return out


def multiset_from_obj(obj: dict) -> RadiiMultiset:
    kind = obj.get("kind", "intrinsic")
    entries = [(parse_frac(v), int(m), False) for v, m in obj.get("entries", [])]
    entries += [(parse_frac(v), int(m), True) for v, m in obj.get("capped", [])]
    return RadiiMultiset.make(entries, kind)


def profile_to_obj(profile: RadiusProfile) -> dict:
    return {
        "axis": profile.axis,
        "kind": profile.kind,
        "p": profile.p,
        "rank": profile.rank,
        "window": [frac_str(profile.window[0]), frac_str(profile.window[1])],
        "axis_weight": None
        if profile.axis_weight is None
        else frac_str(profile.axis_weight),
        "cells": [
            {
                "lo": frac_str(c.lo),
                "hi": frac_str(c.hi),
                "visible": [[frac_str(s), frac_str(v)] for s, v in c.visible],
                "capped": c.capped,
                "cap": [frac_str(c.cap[0]), frac_str(c.cap[1])],
            }
            for c in profile.cells
        ],
    }


def profile_from_obj(obj: dict) -> RadiusProfile:
    cells = tuple(
        ProfileCell(
            parse_frac(c["lo"]),
            parse_frac(c["hi"]),
            tuple((parse_frac(s), parse_frac(v)) for s, v in c["visible"]),
            int(c.get("capped", 0)),
            (parse_frac(c["cap"][0]), parse_frac(c["cap"][1]))
            if "cap" in c
            else (Fraction(0), Fraction(0)),
        )
        for c in obj["cells"]
    )
    weight = obj.get("axis_weight")
    return RadiusProfile(
        obj["axis"],
        obj["kind"],
        int(obj["p"]),
        int(obj["rank"]),
        (parse_frac(obj["window"][0]), parse_frac(obj["window"][1])),
        cells,
        None if weight is None else parse_frac(weight),
    )


def trp_to_obj(C: TRPSet) -> dict:
    return {
        "dim": C.dim,
        "constraints": [
            {"slope": list(c.slope), "const": frac_str(c.const)} for c in C.constraints
        ],
    }


def trp_from_obj(obj: dict) -> TRPSet:
    cs = [
        AffineFunctional(tuple(c["slope"]), parse_frac(c["const"]))
        for c in obj["constraints"]
    ]
    return TRPSet.make(cs, int(obj["dim"]))


def polyfunc_to_obj(F: PolyFunc) -> dict:
    return {
        "functionals": [
            {"slope": list(f.slope), "const": frac_str(f.const)} for f in F.functionals
        ]
    }


def polyfunc_from_obj(obj: dict) -> PolyFunc:
    return PolyFunc.make(
        [
            AffineFunctional(tuple(f["slope"]), parse_frac(f["const"]))
            for f in obj["functionals"]
        ]
    )
