"""JSON readers and writers for matroids, polynomials, polytopes, brick regions and atlases.

Every reader raises InputError with a message naming the file and the
offending position (line/column for syntax errors, a JSON path otherwise).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from . import linalg
from .atlas import Atlas, AtlasError, atlas_from_json
from .lorentzian import HomogeneousPolynomial, PolynomialError
from .matroid import ComplexError, SimplicialComplex, elems_of, graphic, popcount


class InputError(ValueError):
    pass


def load_json(path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 at byte {exc.start}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _need(obj, key, typ, where, path):
    if not isinstance(obj, dict):
        raise InputError(f"{path}: {where or 'top level'} must be an object")
    if key not in obj:
        raise InputError(f"{path}: {where}{'.' if where else ''}{key} is missing")
    val = obj[key]
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise InputError(f"{path}: {where}{'.' if where else ''}{key} must be an integer")
    if typ is list and not isinstance(val, list):
        raise InputError(f"{path}: {where}{'.' if where else ''}{key} must be a list")
    if typ is str and not isinstance(val, str):
        raise InputError(f"{path}: {where}{'.' if where else ''}{key} must be a string")
    return val


def _int_list(val, where, path):
    if not isinstance(val, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in val):
        raise InputError(f"{path}: {where} must be a list of integers")
    return val


def _num_list(val, where, path):
    if not isinstance(val, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in val):
        raise InputError(f"{path}: {where} must be a list of numbers")
    return [float(x) for x in val]


# ---------------------------------------------------------------------------
# matroids


def parse_matroid(obj, path="<input>") -> SimplicialComplex:
    n = _need(obj, "n", int, "", path)
    kind = _need(obj, "kind", str, "", path)
    sets = _need(obj, "sets", list, "", path)
    if n < 0:
        raise InputError(f"{path}: n must be nonnegative")
    lists = [_int_list(s, f"sets[{i}]", path) for i, s in enumerate(sets)]
    try:
        if kind == "graph":
            for i, e in enumerate(lists):
                if len(e) != 2:
                    raise InputError(f"{path}: sets[{i}] must be an edge [u, v]")
                if any(not 0 <= v < n for v in e):
                    raise InputError(f"{path}: sets[{i}] has a vertex outside range({n})")
            return graphic([tuple(e) for e in lists])
        for i, s in enumerate(lists):
            if any(not 0 <= x < n for x in s):
                raise InputError(f"{path}: sets[{i}] has an element outside range({n})")
            if len(set(s)) != len(s):
                raise InputError(f"{path}: sets[{i}] repeats an element")
        if kind == "bases":
            return SimplicialComplex.closure(n, lists)
        if kind == "independent":
            return SimplicialComplex(n, [tuple(s) for s in lists] or [()])
    except ComplexError as exc:
        raise InputError(f"{path}: {exc}") from exc
    raise InputError(f"{path}: kind must be 'independent', 'bases' or 'graph', got {kind!r}")


def matroid_to_json(c: SimplicialComplex) -> dict:
    faces = sorted(c.faces, key=lambda f: (popcount(f), elems_of(f)))
    return {"n": c.n, "kind": "independent", "sets": [list(elems_of(f)) for f in faces]}


def read_matroid(path) -> SimplicialComplex:
    return parse_matroid(load_json(path), str(path))


# ---------------------------------------------------------------------------
# polynomials


def parse_polynomial(obj, path="<input>") -> HomogeneousPolynomial:
    n = _need(obj, "n", int, "", path)
    d = _need(obj, "degree", int, "", path)
    terms = _need(obj, "terms", list, "", path)
    acc: dict = {}
    for i, t in enumerate(terms):
        where = f"terms[{i}]"
        exp = _int_list(_need(t, "exp", list, where, path), f"{where}.exp", path)
        if len(exp) != n:
            raise InputError(f"{path}: {where}.exp has length {len(exp)}, expected n = {n}")
        raw = _need(t, "coeff", None, where, path)
        if isinstance(raw, float):
            raise InputError(f"{path}: {where}.coeff must be exact (integer or \"p/q\" string)")
        try:
            c = linalg.to_fraction(raw)
        except linalg.LinalgError as exc:
            raise InputError(f"{path}: {where}.coeff: {exc}") from exc
        if sum(exp) != d:
            raise InputError(f"{path}: {where}.exp has degree {sum(exp)}, expected {d}")
        acc[tuple(exp)] = acc.get(tuple(exp), 0) + c
    try:
        return HomogeneousPolynomial(n, d, acc)
    except PolynomialError as exc:
        raise InputError(f"{path}: {exc}") from exc


def polynomial_to_json(f: HomogeneousPolynomial) -> dict:
    return {"n": f.n, "degree": f.degree,
            "terms": [{"coeff": linalg.fraction_str(c), "exp": list(e)} for e, c in f.terms.items()]}


def read_polynomial(path) -> HomogeneousPolynomial:
    return parse_polynomial(load_json(path), str(path))


# ---------------------------------------------------------------------------
# polytopes and bricks


def parse_polytopes(obj, path="<input>") -> dict:
    """{"dim", "normals", "bodies": {name: offsets}} with shapes checked."""
    dim = _need(obj, "dim", int, "", path)
    normals = _need(obj, "normals", list, "", path)
    bodies = _need(obj, "bodies", list, "", path)
    U = [_num_list(u, f"normals[{i}]", path) for i, u in enumerate(normals)]
    for i, u in enumerate(U):
        if len(u) != dim:
            raise InputError(f"{path}: normals[{i}] has length {len(u)}, expected dim = {dim}")
    out = {}
    for k, b in enumerate(bodies):
        where = f"bodies[{k}]"
        name = _need(b, "name", str, where, path)
        offs = _num_list(_need(b, "offsets", list, where, path), f"{where}.offsets", path)
        if len(offs) != len(U):
            raise InputError(f"{path}: {where}.offsets has length {len(offs)}, expected {len(U)}")
        if name in out:
            raise InputError(f"{path}: {where}.name {name!r} is repeated")
        out[name] = offs
    if not out:
        raise InputError(f"{path}: bodies is empty")
    return {"dim": dim, "normals": U, "bodies": out}


def read_polytopes(path) -> dict:
    return parse_polytopes(load_json(path), str(path))


def parse_bricks(obj, path="<input>") -> list:
    bricks = _need(obj, "bricks", list, "", path)
    out = []
    for i, b in enumerate(bricks):
        vals = _num_list(b, f"bricks[{i}]", path)
        if len(vals) != 4:
            raise InputError(f"{path}: bricks[{i}] must be [x1, x2, y1, y2]")
        if not (vals[0] < vals[1] and vals[2] < vals[3]):
            raise InputError(f"{path}: bricks[{i}] needs x1 < x2 and y1 < y2")
        out.append(tuple(vals))
    if not out:
        raise InputError(f"{path}: region is empty")
    return out


def read_bricks(path) -> list:
    return parse_bricks(load_json(path), str(path))


def read_atlas(path) -> Atlas:
    obj = load_json(path)
    try:
        return atlas_from_json(obj)
    except (AtlasError, linalg.LinalgError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed atlas: {exc}") from exc
