"""JSON encoding for the exact types the command-line tools exchange.

Conventions: rationals are strings "p/q" (just "p" when the denominator is
1), matrices are row-major lists of rational strings, Weyl group elements
are index words, and composite objects are tagged records carrying "kind"
plus rank/arity fields.  parse(print(x)) == x on canonical forms, which is
what every constructor in this package produces; decoding always goes
through the canonicalizing constructors, so hand-edited input is normalized
rather than trusted.
"""

import json
from fractions import Fraction
from typing import Any, List, Sequence

from .cells import FnPoint, TFnPoint, canonicalize_Fn, canonicalize_TFn
from .groupcore import GroupElt, TorusElt
from .groupoids import (
    C2nArrow,
    CellRep,
    FoTArrow,
    GammaArrow,
    GdbuArrow,
    GmnPoint,
    NegPoint,
    _reps,
    gamma_arrow,
    neg_point,
)
from .leaves import LeafDescriptor, TorusCoset
from .rootdata import WeylElt

__all__ = [
    "rat_str",
    "parse_rat",
    "encode",
    "decode",
    "dumps",
    "loads",
    "dump_file",
    "load_file",
]


# --------------------------------------------------------------- scalars


def rat_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s)
    raise ValueError(f"not a rational: {s!r}")


def _rows_doc(g: GroupElt) -> List[List[str]]:
    return [[rat_str(x) for x in row] for row in g.rows]


def _parse_rows(doc) -> GroupElt:
    return GroupElt([[parse_rat(x) for x in row] for row in doc])


def _word_doc(w: WeylElt) -> List[int]:
    return list(w.word)


# --------------------------------------------------------------- encode


def encode(obj) -> Any:
    """Tagged-record document for any exchanged value."""
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, GroupElt):
        return {"kind": "matrix", "rank": obj.rank, "rows": _rows_doc(obj)}
    if isinstance(obj, TorusElt):
        return {
            "kind": "torus",
            "rank": obj.rank,
            "vals": [rat_str(v) for v in obj.vals],
        }
    if isinstance(obj, WeylElt):
        return {"kind": "weyl", "rank": obj.rank, "word": _word_doc(obj)}
    if isinstance(obj, FnPoint):
        return {
            "kind": "flag-tuple",
            "rank": obj.rank,
            "n": obj.n,
            "slots": [_rows_doc(c) for c in obj.c],
        }
    if isinstance(obj, TFnPoint):
        return {
            "kind": "decorated-tuple",
            "rank": obj.rank,
            "n": obj.n,
            "slots": [_rows_doc(c) for c in _reps(obj)],
        }
    if isinstance(obj, NegPoint):
        gs = [obj.b_minus @ obj.c[0]] + list(obj.c[1:])
        return {
            "kind": "mirrored-tuple",
            "rank": obj.rank,
            "n": obj.n,
            "slots": [_rows_doc(c) for c in gs],
        }
    if isinstance(obj, GammaArrow):
        return {
            "kind": "arrow",
            "model": "gamma",
            "rank": obj.rank,
            "n": obj.n,
            "slots": [_rows_doc(c) for c in _reps(obj.point)],
        }
    if isinstance(obj, C2nArrow):
        return {
            "kind": "arrow",
            "model": "c2n",
            "rank": obj.flags[0].rank,
            "n": obj.n,
            "flags": [encode(f) for f in obj.flags],
            "b_minus": _rows_doc(obj.b_minus),
        }
    if isinstance(obj, FoTArrow):
        return {
            "kind": "arrow",
            "model": "fot",
            "rank": obj.p.rank,
            "n": obj.n // 2,
            "point": encode(obj.p),
            "torus": encode(obj.t),
        }
    if isinstance(obj, GdbuArrow):
        return {
            "kind": "arrow",
            "model": "gdbu",
            "rank": obj.rep.rank,
            "n": obj.n,
            "cells": [_word_doc(w) for w in obj.rep.w],
            "twists": [encode(t) for t in obj.rep.t],
            "c": [_rows_doc(x) for x in obj.c],
            "b": _rows_doc(obj.b),
            "b_minus": _rows_doc(obj.b_minus),
            "cprime": [_rows_doc(x) for x in obj.cprime],
        }
    if isinstance(obj, GmnPoint):
        return {
            "kind": "two-sided",
            "rank": obj.x.rank,
            "m": obj.m,
            "n": obj.n,
            "upper": encode(obj.x),
            "lower": encode(obj.y),
        }
    if isinstance(obj, CellRep):
        return {
            "kind": "cell-rep",
            "rank": obj.rank,
            "n": obj.n,
            "cells": [_word_doc(w) for w in obj.w],
            "twists": [encode(t) for t in obj.t],
        }
    if isinstance(obj, TorusCoset):
        return {
            "kind": "torus-coset",
            "rank": obj.rep.rank,
            "rep": encode(obj.rep),
            "ann": [list(chi) for chi in obj.ann],
        }
    if isinstance(obj, LeafDescriptor):
        return {
            "kind": "leaf",
            "model": obj.kind,
            "label": _encode_label(obj.label),
            "level": encode(obj.level),
            "residual": encode(obj.residual),
        }
    if isinstance(obj, (tuple, list)):
        return {"kind": "list", "items": [encode(x) for x in obj]}
    raise TypeError(f"no JSON encoding for {type(obj).__name__}")


def _encode_label(label):
    if isinstance(label, WeylElt):
        return encode(label)
    if isinstance(label, (tuple, list)):
        return [_encode_label(x) for x in label]
    return label


def _decode_label(doc):
    if isinstance(doc, dict):
        return decode(doc)
    if isinstance(doc, list):
        return tuple(_decode_label(x) for x in doc)
    return doc


# --------------------------------------------------------------- decode


def _decode_arrow(doc):
    model = doc["model"]
    if model == "gamma":
        return gamma_arrow([_parse_rows(r) for r in doc["slots"]])
    if model == "c2n":
        flags = tuple(decode(f) for f in doc["flags"])
        return C2nArrow(flags, _parse_rows(doc["b_minus"]))
    if model == "fot":
        return FoTArrow(decode(doc["point"]), decode(doc["torus"]))
    if model == "gdbu":
        rank = doc["rank"]
        rep = CellRep(
            tuple(WeylElt.from_word(rank, w) for w in doc["cells"]),
            tuple(decode(t) for t in doc["twists"]),
        )
        return GdbuArrow(
            rep,
            tuple(_parse_rows(x) for x in doc["c"]),
            _parse_rows(doc["b"]),
            _parse_rows(doc["b_minus"]),
            tuple(_parse_rows(x) for x in doc["cprime"]),
        )
    raise ValueError(f"unknown arrow model: {model!r}")


def decode(doc):
    """Inverse of encode on tagged records (canonicalizing on the way in)."""
    if isinstance(doc, str):
        return parse_rat(doc)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError(f"not a tagged record: {doc!r}")
    kind = doc["kind"]
    if kind == "matrix":
        return _parse_rows(doc["rows"])
    if kind == "torus":
        return TorusElt(doc["rank"], tuple(parse_rat(v) for v in doc["vals"]))
    if kind == "weyl":
        return WeylElt.from_word(doc["rank"], doc["word"])
    if kind == "flag-tuple":
        return canonicalize_Fn([_parse_rows(r) for r in doc["slots"]])
    if kind == "decorated-tuple":
        return canonicalize_TFn([_parse_rows(r) for r in doc["slots"]])
    if kind == "mirrored-tuple":
        return neg_point([_parse_rows(r) for r in doc["slots"]])
    if kind == "arrow":
        return _decode_arrow(doc)
    if kind == "two-sided":
        return GmnPoint(decode(doc["upper"]), decode(doc["lower"]))
    if kind == "cell-rep":
        rank = doc["rank"]
        return CellRep(
            tuple(WeylElt.from_word(rank, w) for w in doc["cells"]),
            tuple(decode(t) for t in doc["twists"]),
        )
    if kind == "torus-coset":
        return TorusCoset(
            decode(doc["rep"]), tuple(tuple(chi) for chi in doc["ann"])
        )
    if kind == "leaf":
        return LeafDescriptor(
            doc["model"],
            _decode_label(doc["label"]),
            decode(doc["level"]),
            decode(doc["residual"]),
        )
    if kind == "list":
        return tuple(decode(x) for x in doc["items"])
    raise ValueError(f"unknown record kind: {kind!r}")


# --------------------------------------------------------------- files


def dumps(doc) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline.
    Identical documents always serialize to identical bytes."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str):
    return json.loads(text)


def dump_file(doc, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(doc))


def load_file(path: str):
    with open(path) as fh:
        return json.load(fh)
