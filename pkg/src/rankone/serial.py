"""JSON documents for sequences, witnesses and reports.

Group elements use each group's text encoding; rationals are written as
``"p/q"`` strings (``"p"`` for integers). Output is canonical: sorted keys,
two-space indentation and a trailing newline, so equal inputs give equal bytes.
"""
from __future__ import annotations

import json
import re
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Any

from .errors import FormatError, RankOneError
from .groups import Group, group_from_dict
from .params import CFSequence, FiniteSubset

_RATIONAL = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?")


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    if not text.strip():
        raise FormatError("empty document")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def read(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def rational_str(x) -> str:
    return str(Fraction(x))


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise FormatError(f"bad rational {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.fullmatch(x):
        value = Fraction(x)
        if str(value) != x:
            raise FormatError(f"rational {x!r} is not in lowest terms")
        return value
    raise FormatError(f"bad rational {x!r}")


def _expect(doc, kind: str) -> dict:
    if not isinstance(doc, dict):
        raise FormatError(f"expected a {kind} object")
    if doc.get("type") != kind:
        raise FormatError(f"expected document type {kind!r}, got {doc.get('type')!r}")
    return doc


def _field(doc: dict, key: str):
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    return doc[key]


def _int_list(value, key: str) -> list:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise FormatError(f"field {key!r} must be a list of integers")
    return value


def encode_set(group: Group, s) -> list:
    items = s.elements if isinstance(s, FiniteSubset) else sorted(s)
    return [group.encode(x) for x in items]


def decode_element(group: Group, text):
    if not isinstance(text, str):
        raise FormatError(f"element encodings are strings, got {text!r}")
    x = group.decode(text)
    if group.encode(x) != text:
        raise FormatError(f"non-canonical element encoding {text!r}")
    return x


def decode_set(group: Group, items) -> FiniteSubset:
    if not isinstance(items, list):
        raise FormatError("a finite set is written as a list of element encodings")
    elements = [decode_element(group, t) for t in items]
    if len(set(elements)) != len(elements):
        raise FormatError(f"duplicate elements in {items!r}")
    return FiniteSubset(group, elements)


def _group(doc: dict) -> Group:
    return group_from_dict(_field(doc, "group"))


# sequences -----------------------------------------------------------------------

def sequence_to_doc(seq: CFSequence) -> dict:
    g = seq.group
    return {
        "type": "cf-sequence",
        "group": g.to_dict(),
        "F": [encode_set(g, s) for s in seq.F],
        "C": [encode_set(g, s) for s in seq.C],
    }


def sequence_from_doc(doc) -> CFSequence:
    doc = _expect(doc, "cf-sequence")
    g = _group(doc)
    F, C = _field(doc, "F"), _field(doc, "C")
    if not isinstance(F, list) or not isinstance(C, list):
        raise FormatError("F and C must be lists")
    try:
        return CFSequence(g, [decode_set(g, s) for s in F], [decode_set(g, s) for s in C])
    except RankOneError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc


# witnesses ---------------------------------------------------------------------

def iso_witness_to_doc(group: Group, w) -> dict:
    return {
        "type": "iso-witness",
        "group": group.to_dict(),
        "k": list(w.k),
        "l": list(w.l),
        "J": [encode_set(group, s) for s in w.J],
        "Jt": [encode_set(group, s) for s in w.Jt],
        "eps": [rational_str(e) for e in w.eps],
    }


def iso_witness_from_doc(doc):
    from .iso import IsoWitness

    doc = _expect(doc, "iso-witness")
    g = _group(doc)
    k, l = _int_list(_field(doc, "k"), "k"), _int_list(_field(doc, "l"), "l")
    J = [decode_set(g, s) for s in _field(doc, "J")]
    Jt = [decode_set(g, s) for s in _field(doc, "Jt")]
    eps = [parse_rational(e) for e in doc["eps"]] if "eps" in doc else None
    try:
        return g, IsoWitness(k, l, Jt, J, eps)
    except RankOneError as exc:
        raise FormatError(str(exc)) from exc


def factor_witness_to_doc(group: Group, w) -> dict:
    return {
        "type": "factor-witness",
        "group": group.to_dict(),
        "k": list(w.k),
        "J": [encode_set(group, s) for s in w.J],
        "eps": [rational_str(e) for e in w.eps],
    }


def factor_witness_from_doc(doc):
    from .factor import FactorWitness

    doc = _expect(doc, "factor-witness")
    g = _group(doc)
    k = _int_list(_field(doc, "k"), "k")
    J = [decode_set(g, s) for s in _field(doc, "J")]
    eps = [parse_rational(e) for e in doc["eps"]] if "eps" in doc else None
    try:
        return g, FactorWitness(k, J, eps)
    except RankOneError as exc:
        raise FormatError(str(exc)) from exc


def odometer_to_doc(odo) -> dict:
    return {"type": "odometer", "d": list(odo.d)}


def odometer_from_doc(doc):
    from .factor import OdometerSpec

    doc = _expect(doc, "odometer")
    try:
        return OdometerSpec(_int_list(_field(doc, "d"), "d"))
    except RankOneError as exc:
        raise FormatError(str(exc)) from exc


def quotient_data_from_doc(doc):
    doc = _expect(doc, "quotient-data")
    g = _group(doc)
    k = _int_list(_field(doc, "k"), "k")
    A = [decode_set(g, s) for s in _field(doc, "A")]
    return g, k, A


def quotient_data_to_doc(group: Group, k, A) -> dict:
    return {"type": "quotient-data", "group": group.to_dict(), "k": list(k), "A": [encode_set(group, s) for s in A]}


def transform_params_from_doc(doc, group: Group) -> dict:
    """``{"type": "transform", "op": ..., ...}`` with ``l`` (ints), ``z`` (elements) or ``A`` (sets)."""
    doc = _expect(doc, "transform")
    op = _field(doc, "op")
    if op == "telescope":
        return {"op": op, "l": _int_list(_field(doc, "l"), "l")}
    if op == "calibrate":
        z = _field(doc, "z")
        if not isinstance(z, list):
            raise FormatError("z must be a list of element encodings")
        return {"op": op, "z": [decode_element(group, t) for t in z]}
    if op == "reduce":
        return {"op": op, "A": [decode_set(group, s) for s in _field(doc, "A")]}
    raise FormatError(f"unknown transform op {op!r}")


def search_bounds_from_doc(doc) -> dict:
    from .iso import SearchBounds

    doc = _expect(doc, "search-bounds")
    steps = _field(doc, "steps")
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        raise FormatError("steps must be a positive integer")
    kwargs = {}
    for key in ("max_level", "max_subset", "exhaustive_threshold", "budget"):
        if key in doc and doc[key] is not None:
            if not isinstance(doc[key], int) or isinstance(doc[key], bool) or doc[key] < 0:
                raise FormatError(f"{key} must be a nonnegative integer")
            kwargs[key] = doc[key]
    eps = [parse_rational(e) for e in doc["eps"]] if "eps" in doc else None
    return {"steps": steps, "eps": eps, "bounds": SearchBounds(**kwargs)}


# reports -----------------------------------------------------------------------

def to_plain(obj: Any, group: Group | None = None) -> Any:
    """Recursively turn report dataclasses into JSON-ready values."""
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, FiniteSubset):
        return encode_set(obj.group, obj) if group is None else encode_set(group, obj)
    if isinstance(obj, CFSequence):
        return sequence_to_doc(obj)
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name), group) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v, group) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, group) for v in obj]
    return repr(obj)
