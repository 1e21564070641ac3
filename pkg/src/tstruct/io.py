"""JSON reading and writing for spaces, support data and complexes.

Formats::

    space    {"points": [{"id": "eta", "codim": 0}, ...], "specializations": [["eta", "x"], ...]}
    datum    {"space": "<file>", "p": {"eta": 0, "x": 2}}
             {"levels": {"2": ["x"]}, "full_below": 0}
    complex  {"field": "F2",
              "terms": {"0": {"stalks": {"eta": 1, "x": 0}, "transitions": {"x->eta": [[...]]}}},
              "differentials": {"0": {"eta": [[...]], ...}}}

A transition ``"x->eta"`` is the map from the stalk at ``x`` to the stalk at the
more generic point ``eta``.  Matrices are row-major integer lists.
"""
from __future__ import annotations

import json
import os
from typing import Any

import numpy as np

from .complexes import ChainComplex, make_complex
from .errors import ComplexError, SpaceMismatch, TStructError
from .linalg import Field
from .sheaves import Sheaf, SheafMorphism, make_sheaf
from .space import NAMED_SPACES, SpaceModel, validate_space
from .supports import SupportDatum, datum_from_levels, family_from_points


class ParseError(TStructError):
    pass


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, compact separators, integers only."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return data


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{what} must be an integer, got {v!r}")
    return v


# -- spaces ------------------------------------------------------------------------


def space_from_json(data: dict) -> SpaceModel:
    try:
        pts = data["points"]
        ids = [p["id"] for p in pts]
        codim = {p["id"]: _int(p["codim"], f"codim of {p['id']}") for p in pts}
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed space: {e}") from None
    edges = [tuple(e) for e in data.get("specializations", [])]
    if any(len(e) != 2 for e in edges):
        raise ParseError("specializations must be [generic, special] pairs")
    return validate_space(ids, edges, codim)


def space_to_json(space: SpaceModel) -> dict:
    return space.to_json()


def load_space(ref: str, base: str | None = None) -> SpaceModel:
    """A named space (``SIER``, ``CHAIN3``, ``VSPACE``, ``point``) or a JSON file."""
    path = ref if base is None or os.path.isabs(ref) else os.path.join(base, ref)
    if not os.path.exists(path) and ref in NAMED_SPACES:
        return NAMED_SPACES[ref]()
    return space_from_json(_load(path))


def _space_for(data: dict, path: str, space: SpaceModel | None) -> SpaceModel:
    if space is not None:
        return space
    ref = data.get("space")
    if ref is None:
        raise ParseError(f"{path}: no space given (use --space or a \"space\" field)")
    return load_space(ref, os.path.dirname(path))


# -- support data ------------------------------------------------------------------------


def datum_from_json(data: dict, space: SpaceModel) -> SupportDatum:
    if "p" in data:
        p = data["p"]
        if not isinstance(p, dict):
            raise ParseError("\"p\" must map point ids to integers")
        return SupportDatum.from_map(space, {k: _int(v, f"p({k})") for k, v in p.items()})
    if "levels" in data:
        raw = {int(k): v for k, v in data["levels"].items()}
        if not raw:
            raise ParseError("no levels given")
        lo = _int(data.get("full_below", min(raw) - 1), "full_below")
        hi = max(raw)
        if lo >= min(raw):
            raise ParseError("full_below must lie below every given level")
        levels = {lo: family_from_points(space, space.ids)}
        nxt: list[str] = []
        # an omitted level copies the nearest given level above it
        for n in range(hi, lo, -1):
            if n in raw:
                nxt = list(raw[n])
            levels[n] = family_from_points(space, nxt)
        levels[hi + 1] = family_from_points(space, [])
        return datum_from_levels(space, levels)
    raise ParseError("datum needs \"p\" or \"levels\"")


def datum_to_json(phi: SupportDatum) -> dict:
    return {"p": phi.as_map()}


def load_datum(path: str, space: SpaceModel | None = None) -> SupportDatum:
    data = _load(path)
    return datum_from_json(data, _space_for(data, path, space))


# -- complexes ------------------------------------------------------------------------------


def _matrix(fld: Field, rows, shape: tuple[int, int], what: str) -> np.ndarray:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ParseError(f"{what} must be a list of rows")
    m, n = shape
    if m == 0 or n == 0:
        if any(len(r) for r in rows) or (rows and len(rows) != m):
            raise ParseError(f"{what} must be empty for shape {shape}")
        return fld.zeros(m, n)
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ParseError(f"{what} has the wrong shape, expected {m}x{n}")
    try:
        return fld.matrix(rows, shape)
    except ValueError as e:
        raise ParseError(f"{what}: {e}") from None


def sheaf_from_json(data: dict, space: SpaceModel, fld: Field, what: str = "sheaf") -> Sheaf:
    stalks = data.get("stalks", {})
    for x in stalks:
        space.idx(x)
    dims = [_int(stalks.get(x, 0), f"stalk {x}") for x in space.ids]
    if any(d < 0 for d in dims):
        raise ParseError(f"{what}: negative stalk dimension")
    cover = {}
    for key, rows in data.get("transitions", {}).items():
        if "->" not in key:
            raise ParseError(f"{what}: transition key {key!r} must look like 'special->generic'")
        a, b = key.split("->", 1)
        p, q = space.idx(a.strip()), space.idx(b.strip())
        if p == q or not space.closure_masks[q] >> p & 1:
            raise ParseError(f"{what}: {b} does not specialize to {a}")
        cover[(p, q)] = _matrix(fld, rows, (dims[q], dims[p]), f"{what} transition {key}")
    try:
        return make_sheaf(space, fld, dims, cover)
    except ComplexError as e:
        raise ParseError(f"{what}: {e}") from None


def complex_from_json(data: dict, space: SpaceModel, fld: Field | None = None) -> ChainComplex:
    if fld is None:
        fld = Field.parse(data.get("field", "F2"))
    elif "field" in data and Field.parse(data["field"]) != fld:
        raise ParseError(f"complex field {data['field']} differs from --field {fld.name}")
    terms = {int(k): sheaf_from_json(v, space, fld, f"term {k}") for k, v in data.get("terms", {}).items()}
    zero = lambda n: terms.get(n) or make_sheaf(space, fld, [0] * space.n, {})
    diffs = {}
    for k, per_point in data.get("differentials", {}).items():
        n = int(k)
        src, tgt = zero(n), zero(n + 1)
        for x in per_point:
            space.idx(x)
        mats = []
        for i, x in enumerate(space.ids):
            shape = (tgt.dims[i], src.dims[i])
            mats.append(_matrix(fld, per_point[x], shape, f"d^{n} at {x}") if x in per_point else fld.zeros(*shape))
        terms.setdefault(n, src)
        terms.setdefault(n + 1, tgt)
        diffs[n] = SheafMorphism(src, tgt, tuple(mats))
    try:
        return make_complex(space, fld, terms, diffs)
    except ComplexError as e:
        raise ParseError(str(e)) from None


def load_complex(path: str, space: SpaceModel | None = None, fld: Field | None = None) -> ChainComplex:
    data = _load(path)
    return complex_from_json(data, _space_for(data, path, space), fld)


def _rows(m: np.ndarray) -> list[list[int]]:
    return [[_entry(v) for v in row] for row in m.tolist()] if m.size else []


def _entry(v) -> int | str:
    from fractions import Fraction

    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return int(v)


def sheaf_to_json(F: Sheaf) -> dict:
    sp = F.space
    return {
        "stalks": {x: F.dims[i] for i, x in enumerate(sp.ids)},
        "transitions": {f"{sp.ids[p]}->{sp.ids[q]}": _rows(F.res(p, q)) for q, p in sp.cover_pairs},
    }


def complex_to_json(C: ChainComplex) -> dict:
    sp = C.space
    return {
        "field": C.field.name,
        "terms": {str(n): sheaf_to_json(C.term(n)) for n in C.degrees},
        "differentials": {
            str(n): {x: _rows(C.d(n).mats[i]) for i, x in enumerate(sp.ids)}
            for n in C.degrees
            if n + 1 in C.degrees and not C.d(n).is_zero()
        },
    }


def cohomology_to_json(C: ChainComplex) -> dict:
    from .complexes import cohomology_dims

    return {str(n): {x: d for x, d in zip(C.space.ids, dims)} for n, dims in cohomology_dims(C).items()}
