"""Combinatorial atlases and mechanical property checkers.

An atlas is a finite acyclic digraph.  Each vertex carries a symmetric
matrix ``M`` and a nonnegative vector ``h``; each out-edge carries a label
``i`` in ``range(r)`` and a linear map ``T``.  The checkers below decide
the local properties exactly on the rational backend and up to a relative
tolerance on the float backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from gmpy2 import mpq
from itertools import combinations_with_replacement
from typing import Any, Hashable, Iterable

import numpy as np

from . import linalg
from .linalg import FLOAT, RATIONAL, SymmetricMatrix, check_ope, inertia, support

PROPERTIES = ("Inh", "Pull", "PullEq", "Irr", "hPos", "Iden", "TInv", "DecSupp")
EDGE_PROPERTIES = {"Inh", "Pull", "PullEq", "Iden", "TInv", "DecSupp"}


class AtlasError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeTransform:
    """Identity when ``matrix`` is None, otherwise a dense r x r map."""

    matrix: Any = None

    @property
    def is_identity(self) -> bool:
        if self.matrix is None:
            return True
        r = len(self.matrix)
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(r) for j in range(r))

    def apply(self, v):
        if self.matrix is None:
            return list(v)
        return [sum((a * b for a, b in zip(row, v)), 0 * v[0]) for row in self.matrix]

    def transpose_apply(self, u):
        if self.matrix is None:
            return list(u)
        r = len(self.matrix)
        return [sum((self.matrix[k][j] * u[k] for k in range(r)), 0 * u[0]) for j in range(r)]


IDENTITY = EdgeTransform()


@dataclass(frozen=True)
class Edge:
    label: int
    target: Hashable
    transform: EdgeTransform = IDENTITY


@dataclass(eq=False)
class AtlasVertex:
    id: Hashable
    M: SymmetricMatrix
    h: tuple
    edges: tuple = ()

    def __post_init__(self):
        self.h = tuple(self.h)
        self.edges = tuple(self.edges)

    @property
    def is_sink(self) -> bool:
        return not self.edges

    def edge(self, label: int) -> Edge | None:
        for e in self.edges:
            if e.label == label:
                return e
        return None


@dataclass
class Atlas:
    dimension: int
    vertices: dict = field(default_factory=dict)

    def add(self, vertex: AtlasVertex) -> AtlasVertex:
        self.vertices[vertex.id] = vertex
        return vertex

    def __getitem__(self, vid) -> AtlasVertex:
        try:
            return self.vertices[vid]
        except KeyError:
            raise AtlasError(f"unknown vertex {vid!r}") from None

    def __contains__(self, vid) -> bool:
        return vid in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def non_sinks(self) -> list:
        return [vid for vid, v in self.vertices.items() if not v.is_sink]

    def sinks(self) -> list:
        return [vid for vid, v in self.vertices.items() if v.is_sink]


@dataclass
class PropertyReport:
    prop: str
    holds: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds

    def as_dict(self) -> dict:
        out = {"property": self.prop, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.details:
            out["details"] = jsonable(self.details)
        return out


def jsonable(x):
    """Convert reports to JSON-ready values; rationals become \"p/q\" strings."""
    if linalg.is_exact(x) and not isinstance(x, int):
        return str(x)
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, PropertyReport):
        return x.as_dict()
    return x


def _ok(prop, **details) -> PropertyReport:
    return PropertyReport(prop, True, None, details)


def _fail(prop, witness, **details) -> PropertyReport:
    return PropertyReport(prop, False, witness, details)


# ---------------------------------------------------------------------------
# scalar comparisons per backend


class _Cmp:
    """Equality and sign tests in the backend of a vertex."""

    def __init__(self, exact: bool, eps: float, scale: float):
        self.exact = exact
        self.tol = eps * max(scale, 1e-300)

    def eq(self, a, b) -> bool:
        if self.exact:
            return a == b
        return abs(float(a) - float(b)) <= self.tol

    def pos(self, a) -> bool:
        return a > 0 if self.exact else float(a) > self.tol

    def nonneg(self, a) -> bool:
        return a >= 0 if self.exact else float(a) >= -self.tol


def _cmp_for(a: Atlas, vertex: AtlasVertex, eps: float) -> _Cmp:
    exact = vertex.M.backend == RATIONAL and all(linalg.is_exact(x) for x in vertex.h)
    if exact:
        return _Cmp(True, eps, 1.0)
    scale = vertex.M.max_abs()
    for e in vertex.edges:
        if e.target in a.vertices:
            scale = max(scale, a.vertices[e.target].M.max_abs())
    hs = max((abs(float(x)) for x in vertex.h), default=0.0)
    return _Cmp(exact, eps, scale * max(hs, 1.0))


# ---------------------------------------------------------------------------
# validation


def validate_atlas(a: Atlas) -> PropertyReport:
    r = a.dimension
    for vid, v in a.vertices.items():
        if v.M.order != r:
            return _fail("valid", {"vertex": vid, "reason": "matrix order", "order": v.M.order})
        if len(v.h) != r:
            return _fail("valid", {"vertex": vid, "reason": "h length", "length": len(v.h)})
        for i in range(r):
            if v.M[i, i] < 0:
                return _fail("valid", {"vertex": vid, "reason": "negative diagonal", "index": i, "value": v.M[i, i]})
        for i, x in enumerate(v.h):
            if x < 0:
                return _fail("valid", {"vertex": vid, "reason": "negative h", "index": i, "value": x})
        labels = set()
        for e in v.edges:
            if not 0 <= e.label < r:
                return _fail("valid", {"vertex": vid, "reason": "label out of range", "label": e.label})
            if e.label in labels:
                return _fail("valid", {"vertex": vid, "reason": "repeated label", "label": e.label})
            labels.add(e.label)
            if e.target not in a.vertices:
                return _fail("valid", {"vertex": vid, "reason": "missing target", "target": e.target})
    # acyclicity by iterative DFS
    state = {}
    for root in a.vertices:
        if root in state:
            continue
        stack = [(root, iter(a.vertices[root].edges))]
        state[root] = 1
        while stack:
            vid, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[vid] = 2
                stack.pop()
                continue
            t = nxt.target
            if state.get(t) == 1:
                return _fail("valid", {"vertex": vid, "reason": "cycle", "target": t})
            if t not in state:
                state[t] = 1
                stack.append((t, iter(a.vertices[t].edges)))
    return _ok("valid", vertices=len(a.vertices))


# ---------------------------------------------------------------------------
# local properties


def _child(a: Atlas, v: AtlasVertex, i: int):
    e = v.edge(i)
    if e is None:
        return None, None
    return a[e.target], e.transform


def _pullback_form(a: Atlas, v: AtlasVertex, supp):
    """sum_{i in supp} h_i T_i^T M<i> T_i as an r x r list of lists."""
    r = a.dimension
    exact = v.M.backend == RATIONAL
    zero = mpq(0) if exact else 0.0
    S = [[zero] * r for _ in range(r)]
    for i in supp:
        child, T = _child(a, v, i)
        if child is None:
            raise AtlasError(f"vertex {v.id!r} has no edge labelled {i}")
        hi = v.h[i]
        if not hi:
            continue
        C = child.M.rows()
        if T.matrix is None:
            for j in range(r):
                for k in range(r):
                    if C[j][k]:
                        S[j][k] += hi * C[j][k]
        else:
            Tm = np.asarray(T.matrix, dtype=object if exact else float)
            Cm = np.asarray(C, dtype=object if exact else float)
            P = Tm.T.dot(Cm).dot(Tm)
            for j in range(r):
                for k in range(r):
                    S[j][k] += hi * P[j][k]
    return S


def check_property(a: Atlas, vid, prop: str, eps: float = linalg.DEFAULT_EPS,
                   distinct_only: bool = False) -> PropertyReport:
    if prop not in PROPERTIES:
        raise AtlasError(f"unknown property {prop!r}")
    v = a[vid]
    if prop in EDGE_PROPERTIES and v.is_sink:
        raise AtlasError(f"{prop} needs a non-sink vertex; {vid!r} is a sink")
    M, h = v.M, v.h
    supp = support(M)
    cmp = _cmp_for(a, v, eps)
    r = a.dimension

    if prop == "Irr":
        if linalg.irreducible_on_support(M):
            return _ok(prop, support=list(supp))
        return _fail(prop, {"support": list(supp)})

    if prop == "hPos":
        Mh = M.matvec(h)
        for i in supp:
            if not cmp.pos(h[i]):
                return _fail(prop, {"index": i, "h": h[i]})
            if not cmp.pos(Mh[i]):
                return _fail(prop, {"index": i, "Mh": Mh[i]})
        return _ok(prop)

    if prop == "Iden":
        for i in supp:
            child, T = _child(a, v, i)
            if child is None:
                return _fail(prop, {"index": i, "reason": "missing edge"})
            if not T.is_identity:
                return _fail(prop, {"index": i})
        return _ok(prop)

    if prop == "DecSupp":
        s = set(supp)
        for i in supp:
            child, _ = _child(a, v, i)
            if child is None:
                return _fail(prop, {"index": i, "reason": "missing edge"})
            extra = set(support(child.M)) - s
            if extra:
                return _fail(prop, {"index": i, "extra": sorted(extra)})
        return _ok(prop)

    if prop == "TInv":
        children = {}
        for i in supp:
            child, _ = _child(a, v, i)
            if child is None:
                return _fail(prop, {"index": i, "reason": "missing edge"})
            children[i] = child.M
        # child matrices are symmetric, so permuting a triple permutes its
        # three values; sorted triples cover every case
        rows = {i: C.rows() if C.backend == RATIONAL else C.to_numpy() for i, C in children.items()}
        eq = (lambda p, q: p == q) if cmp.exact else cmp.eq
        for i, j, k in combinations_with_replacement(supp, 3):
            if distinct_only and len({i, j, k}) < 3:
                continue
            x, y, z = rows[i][j][k], rows[j][k][i], rows[k][i][j]
            if not (eq(x, y) and eq(y, z)):
                return _fail(prop, {"triple": (i, j, k), "values": (x, y, z)})
        return _ok(prop)

    if prop == "Inh":
        for i in supp:
            child, T = _child(a, v, i)
            if child is None:
                return _fail(prop, {"index": i, "reason": "missing edge"})
            Th = T.apply(list(h))
            u = child.M.matvec(Th)
            rhs = T.transpose_apply(u)
            for b in range(r):
                if not cmp.eq(M[i, b], rhs[b]):
                    return _fail(prop, {"index": i, "basis": b, "lhs": M[i, b], "rhs": rhs[b]})
        return _ok(prop)

    S = _pullback_form(a, v, supp)
    if prop == "PullEq":
        for j in range(r):
            for k in range(r):
                if not cmp.eq(S[j][k], M[j, k]):
                    return _fail(prop, {"entry": (j, k), "pullback": S[j][k], "matrix": M[j, k]})
        return _ok(prop)

    # Pull: pullback form minus M must be positive semidefinite
    D = SymmetricMatrix([[S[j][k] - M[j, k] for k in range(r)] for j in range(r)],
                        M.backend, check=False)
    inn = inertia(D, eps)
    if inn.n_neg == 0:
        return _ok(prop, inertia=tuple(inn))
    return _fail(prop, {"inertia": tuple(inn)})


def check_pull_sufficient(a: Atlas, vid, eps: float = linalg.DEFAULT_EPS,
                          distinct_only: bool = False) -> PropertyReport:
    """Inh + Iden + TInv + DecSupp implies PullEq, evaluated at one vertex."""
    premises = {p: check_property(a, vid, p, eps, distinct_only).holds for p in ("Inh", "Iden", "TInv", "DecSupp")}
    conclusion = check_property(a, vid, "PullEq", eps).holds
    triggered = all(premises.values())
    details = {"premises": premises, "PullEq": conclusion, "triggered": triggered}
    if triggered and not conclusion:
        return _fail("PullSufficient", {"PullEq": False}, **details)
    return _ok("PullSufficient", **details)


def verify_local_global(a: Atlas, vid, eps: float = linalg.DEFAULT_EPS) -> PropertyReport:
    """Check the premises and the conclusion of the local-global principle at ``vid``.

    Holds iff every premise holds, M_v has at most one positive
    eigenvalue, and the diagonal rescaling N = D^-1 M fixes h with 1 as
    its only positive eigenvalue on supp(M).
    """
    v = a[vid]
    if v.is_sink:
        raise AtlasError(f"local-global check needs a non-sink vertex; {vid!r} is a sink")
    premises = {}
    premises["Inh"] = check_property(a, vid, "Inh", eps).holds
    pulleq = check_property(a, vid, "PullEq", eps).holds
    premises["Pull"] = pulleq or check_property(a, vid, "Pull", eps).holds
    premises["Irr"] = check_property(a, vid, "Irr", eps).holds
    premises["hPos"] = check_property(a, vid, "hPos", eps).holds
    bad_children = [e.label for e in v.edges if not check_ope(a[e.target].M, eps)]
    premises["children_OPE"] = not bad_children
    conclusion = check_ope(v.M, eps)
    details: dict = {"premises": premises, "PullEq": pulleq, "conclusion_OPE": conclusion}
    if bad_children:
        details["non_hyperbolic_children"] = bad_children

    diag_ok = True
    if premises["hPos"]:
        diag_ok, diag = _perron_diagnostics(v, eps)
        details["diagnostics"] = diag
    failed = [p for p, ok in premises.items() if not ok]
    if failed:
        details["conclusion_asserted"] = False
        return _fail("LocalGlobal", {"failed_premises": failed}, **details)
    details["conclusion_asserted"] = True
    if not conclusion:
        return _fail("LocalGlobal", {"conclusion_OPE": False}, **details)
    if not diag_ok:
        return _fail("LocalGlobal", {"diagnostics": details.get("diagnostics")}, **details)
    return _ok("LocalGlobal", **details)


def _perron_diagnostics(v: AtlasVertex, eps: float):
    M, h = v.M, v.h
    supp = support(M)
    if not supp:
        return True, {"support": []}
    Mh = M.matvec(h)
    Ms = M.restrict(supp)
    if M.backend == RATIONAL and all(linalg.is_exact(x) for x in h):
        D = [mpq(Mh[i]) / h[i] for i in supp]
        N = [[Ms[a, b] / D[a] for b in range(len(supp))] for a in range(len(supp))]
        hs = [mpq(h[i]) for i in supp]
        Nh = [sum((N[a][b] * hs[b] for b in range(len(supp))), mpq(0)) for a in range(len(supp))]
        fixed = Nh == hs
        # N = D^-1 M is congruent (through D^-1/2) to M, so sign counts agree
        n_pos = inertia(Ms).n_pos
        ok = fixed and n_pos == 1 and all(d > 0 for d in D)
        return ok, {"support": list(supp), "D": D, "Nh_equals_h": fixed, "positive_eigenvalues_of_N": n_pos}
    D = np.array([float(Mh[i]) / float(h[i]) for i in supp])
    A = Ms.to_numpy()
    hs = np.array([float(h[i]) for i in supp])
    Nh = (A @ hs) / D
    tol = eps * max(1.0, float(np.abs(hs).max()))
    fixed = bool(np.allclose(Nh, hs, rtol=0, atol=tol * 10))
    Dm = 1.0 / np.sqrt(D)
    lam = np.linalg.eigvalsh(A * np.outer(Dm, Dm))
    top = float(lam[-1])
    second = float(lam[-2]) if len(lam) > 1 else float("-inf")
    ok = fixed and bool(np.all(D > 0)) and abs(top - 1.0) <= 1e-6 and second <= eps * max(1.0, abs(top))
    return ok, {"support": list(supp), "D": D.tolist(), "Nh_equals_h": fixed,
                "top_eigenvalue_of_N": top, "second_eigenvalue_of_N": second}


def verify_all(a: Atlas, eps: float = linalg.DEFAULT_EPS) -> dict:
    """Run the local-global check at every regular non-sink vertex and OPE at every vertex."""
    out = {"vertices": len(a), "ope_failures": [], "local_global_failures": [], "regular": 0}
    for vid, v in a.vertices.items():
        if not check_ope(v.M, eps):
            out["ope_failures"].append(vid)
        if v.is_sink:
            continue
        if check_property(a, vid, "Irr", eps).holds and check_property(a, vid, "hPos", eps).holds:
            out["regular"] += 1
            rep = verify_local_global(a, vid, eps)
            if not rep.holds:
                out["local_global_failures"].append(vid)
    out["holds"] = not out["ope_failures"] and not out["local_global_failures"]
    return out


# ---------------------------------------------------------------------------
# JSON


def _vid_str(vid) -> str:
    return vid if isinstance(vid, str) else repr(vid)


def _scalar_json(x, backend):
    if backend == RATIONAL and linalg.is_exact(x):
        return linalg.fraction_str(x)
    return float(x)


def atlas_to_json(a: Atlas) -> dict:
    verts = []
    for vid, v in a.vertices.items():
        backend = v.M.backend
        edges = []
        for e in v.edges:
            if e.transform.matrix is None:
                tr = "identity"
            else:
                tr = [[_scalar_json(x, backend) for x in row] for row in e.transform.matrix]
            edges.append({"label": e.label, "target": _vid_str(e.target), "transform": tr})
        verts.append({"id": _vid_str(vid), "matrix": linalg.matrix_to_json(v.M),
                      "h": [_scalar_json(x, backend) for x in v.h], "edges": edges})
    return {"dimension": a.dimension, "vertices": verts}


def atlas_from_json(obj: dict) -> Atlas:
    try:
        r = int(obj["dimension"])
        vlist = obj["vertices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise AtlasError(f"malformed atlas: {exc}") from exc
    a = Atlas(r)
    for n, vo in enumerate(vlist):
        try:
            M = linalg.matrix_from_json(vo["matrix"])
            parse = linalg.to_fraction if M.backend == RATIONAL else float
            h = [parse(x) for x in vo["h"]]
            edges = []
            for eo in vo.get("edges", []):
                tr = eo.get("transform", "identity")
                if tr == "identity":
                    T = IDENTITY
                else:
                    T = EdgeTransform(tuple(tuple(parse(x) for x in row) for row in tr))
                edges.append(Edge(int(eo["label"]), str(eo["target"]), T))
            vid = str(vo["id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise AtlasError(f"vertex #{n}: {exc}") from exc
        if vid in a.vertices:
            raise AtlasError(f"vertex #{n}: duplicate id {vid!r}")
        a.add(AtlasVertex(vid, M, h, edges))
    return a


def iter_reachable(a: Atlas, root) -> Iterable:
    seen = {root}
    stack = [root]
    while stack:
        vid = stack.pop()
        yield vid
        for e in a[vid].edges:
            if e.target not in seen:
                seen.add(e.target)
                stack.append(e.target)
