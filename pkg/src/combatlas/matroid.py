"""Matroids and simplicial complexes viewed as languages of feasible words.

Ground-set elements are ``0..n-1``; the special empty letter ``*`` is
index ``n`` in every local matrix.  Faces are stored as bitmasks.

Continuation counts never enumerate words: by the matroid symmetry
property ``|Cnt_k(alpha)| = k! * #{k-sets S disjoint from alpha with
set(alpha) | S a face}``, so everything is computed from face-extension
counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .atlas import IDENTITY, Atlas, AtlasVertex, Edge, PropertyReport
from .linalg import SymmetricMatrix, check_ope, inertia

STAR = "*"


class ComplexError(ValueError):
    pass


class NotAMatroid(ComplexError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for x in elems:
        m |= 1 << x
    return m


def elems_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class SimplicialComplex:
    """Downward-closed family of subsets of ``range(n)`` containing the empty set."""

    def __init__(self, n: int, faces: Iterable, check: bool = True):
        if n < 0:
            raise ComplexError("n must be nonnegative")
        fs = set()
        for f in faces:
            m = f if isinstance(f, int) else mask_of(f)
            if not isinstance(f, int) and len(set(f)) != len(tuple(f)):
                raise ComplexError(f"face {tuple(f)} repeats an element")
            if m >> n:
                raise ComplexError(f"face {elems_of(m)} has elements outside range({n})")
            fs.add(m)
        self.n = n
        self.faces = frozenset(fs)
        if check:
            self._check_hereditary()

    def _check_hereditary(self):
        if 0 not in self.faces:
            raise ComplexError("the empty set must be a face")
        for f in self.faces:
            for x in elems_of(f):
                if f & ~(1 << x) not in self.faces:
                    raise ComplexError(
                        f"not downward closed: {list(elems_of(f))} is a face but "
                        f"{list(elems_of(f & ~(1 << x)))} is not")

    @classmethod
    def closure(cls, n: int, sets: Iterable) -> "SimplicialComplex":
        faces = {0}
        for s in sets:
            m = mask_of(s)
            sub = m
            while True:
                faces.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & m
        return cls(n, faces, check=False)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.n == other.n and self.faces == other.faces

    def __hash__(self):
        return hash((self.n, self.faces))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, faces={len(self.faces)})"

    def is_face(self, elems) -> bool:
        return mask_of(elems) in self.faces

    @cached_property
    def rank(self) -> int:
        return max(popcount(f) for f in self.faces)

    @cached_property
    def _extensions(self) -> dict:
        """ext[U][j] = number of faces F containing U with |F - U| = j."""
        ext: dict[int, list[int]] = {}
        for f in self.faces:
            size = popcount(f)
            sub = f
            while True:
                row = ext.setdefault(sub, [0] * (self.n + 1))
                row[size - popcount(sub)] += 1
                if sub == 0:
                    break
                sub = (sub - 1) & f
        return ext

    def extension_count(self, mask: int, j: int) -> int:
        if j < 0 or j > self.n:
            return 0
        row = self._extensions.get(mask)
        return row[j] if row is not None else 0

    def sorted_faces(self) -> list[int]:
        return sorted(self.faces, key=lambda f: (popcount(f), f))

    def bases(self) -> list[int]:
        rk = self.rank
        return sorted(f for f in self.faces if popcount(f) == rk)

    def restriction(self, subset: Sequence[int]) -> "SimplicialComplex":
        subset = list(subset)
        pos = {x: i for i, x in enumerate(subset)}
        sm = mask_of(subset)
        faces = {mask_of(pos[x] for x in elems_of(f)) for f in self.faces if f & ~sm == 0}
        return type(self)(len(subset), faces)


class Matroid(SimplicialComplex):
    """A simplicial complex whose exchange property has been verified."""

    def __init__(self, n: int, faces: Iterable, check: bool = True):
        super().__init__(n, faces, check)
        bad = augmentation_violation(self)
        if bad is not None:
            S, T = bad
            raise NotAMatroid(f"exchange fails for S={list(elems_of(S))}, T={list(elems_of(T))}", bad)


def augmentation_violation(c: SimplicialComplex):
    """First (S, T) with |T| = |S| + 1 and no x in T - S extending S (None if none).

    For hereditary families this is equivalent to the full exchange axiom.
    """
    by_size: dict[int, list[int]] = {}
    for f in c.faces:
        by_size.setdefault(popcount(f), []).append(f)
    for s, S_list in sorted(by_size.items()):
        for T in by_size.get(s + 1, ()):
            for S in S_list:
                if not any((S | (1 << x)) in c.faces for x in elems_of(T & ~S)):
                    return S, T
    return None


def uniform(n: int, k: int) -> Matroid:
    if not 0 <= k <= n:
        raise ComplexError(f"uniform matroid needs 0 <= k <= n, got k={k}, n={n}")
    return Matroid(n, [f for f in range(1 << n) if popcount(f) <= k], check=False)


def graphic(edges: Sequence[Sequence]) -> Matroid:
    """Cycle matroid of a simple graph; element i is edge ``edges[i]``."""
    seen = set()
    for i, e in enumerate(edges):
        if len(e) != 2:
            raise ComplexError(f"edge #{i} is not a pair: {e!r}")
        u, v = e
        if u == v:
            raise ComplexError(f"edge #{i} is a loop at {u!r}")
        key = frozenset((u, v))
        if key in seen:
            raise ComplexError(f"edge #{i} duplicates {sorted(key, key=repr)}")
        seen.add(key)
    verts = {x for e in edges for x in e}
    index = {v: i for i, v in enumerate(sorted(verts, key=repr))}
    m = len(edges)
    faces = []
    for f in range(1 << m):
        parent = list(range(len(index)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for i in elems_of(f):
            a, b = find(index[edges[i][0]]), find(index[edges[i][1]])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            faces.append(f)
    return Matroid(m, faces, check=False)


def complete_graph_edges(v: int) -> list[tuple[int, int]]:
    return list(combinations(range(v), 2))


def cycle_with_chord_edges() -> list[tuple[int, int]]:
    return [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]


# ---------------------------------------------------------------------------
# words


def is_simple(word: Sequence[int]) -> bool:
    return len(set(word)) == len(word)


def is_feasible(c: SimplicialComplex, word: Sequence[int]) -> bool:
    return is_simple(word) and mask_of(word) in c.faces


def independence_profile(c: SimplicialComplex) -> list[int]:
    out = [0] * (c.rank + 1)
    for f in c.faces:
        out[popcount(f)] += 1
    return out


def cnt(c: SimplicialComplex, word: Sequence[int], k: int) -> int:
    """Number of length-k words beta with word+beta feasible."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not is_feasible(c, word):
        return 0
    return math.factorial(k) * c.extension_count(mask_of(word), k)


def _cnt_mask(c: SimplicialComplex, mask: int, k: int) -> int:
    if mask not in c.faces:
        return 0
    return math.factorial(k) * c.extension_count(mask, k)


def continuations(c: SimplicialComplex, word: Sequence[int]) -> list[int]:
    if not is_feasible(c, word):
        return []
    m = mask_of(word)
    return [x for x in range(c.n) if not m >> x & 1 and (m | 1 << x) in c.faces]


@dataclass(frozen=True)
class WeightProfile:
    """Scalars c_i; the strong profile sets c_{k+1} = 1 + 1/(n-k)."""

    k: int
    n: int
    strong: bool = False

    def c(self, i: int) -> Fraction:
        if self.strong and i == self.k + 1:
            return 1 + Fraction(1, self.n - self.k)
        return Fraction(1)

    @classmethod
    def unweighted(cls, n: int = 0) -> "WeightProfile":
        return cls(k=-10, n=n, strong=False)


def local_matrix(c: SimplicialComplex, word: Sequence[int], m: int,
                 w: WeightProfile | None = None) -> SymmetricMatrix:
    """A(alpha, m) over X + {*}, order n+1, '*' at index n."""
    if m < 1:
        raise ValueError("m must be >= 1")
    w = w or WeightProfile.unweighted(c.n)
    return _local_matrix_cached(c, tuple(sorted(word)) if is_simple(word) else None, m, w)


@lru_cache(maxsize=65536)
def _local_matrix_cached(c, word, m, w) -> SymmetricMatrix:
    n = c.n
    zero = Fraction(0)
    rows = [[zero] * (n + 1) for _ in range(n + 1)]
    if word is None or mask_of(word) not in c.faces:
        return SymmetricMatrix(rows, linalg.RATIONAL, check=False)
    base = mask_of(word)
    ell = len(word)
    cxy, cx, cs = w.c(ell + m + 1), w.c(ell + m), w.c(ell + m - 1)
    cont = [x for x in range(n) if not base >> x & 1 and (base | 1 << x) in c.faces]
    for x in cont:
        bx = base | 1 << x
        rows[x][n] = rows[n][x] = cx * _cnt_mask(c, bx, m - 1)
        for y in cont:
            if y > x:
                val = cxy * _cnt_mask(c, bx | 1 << y, m - 1)
                rows[x][y] = rows[y][x] = val
    rows[n][n] = cs * _cnt_mask(c, base, m - 1)
    return SymmetricMatrix(rows, linalg.RATIONAL, check=False)


def vertex_matrix(c, word, m: int, t, w=None) -> SymmetricMatrix:
    """t A(alpha, m+1) + (1-t) A(alpha, m) for m >= 1; A(alpha, 1) at sinks."""
    t = linalg.to_fraction(t)
    if m == 0:
        return local_matrix(c, word, 1, w)
    if t == 1:
        return local_matrix(c, word, m + 1, w)
    if t == 0:
        return local_matrix(c, word, m, w)
    return local_matrix(c, word, m + 1, w).scale(t) + local_matrix(c, word, m, w).scale(1 - t)


DEFAULT_T_SAMPLES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
ONE = linalg.to_fraction(1)


def vertex_key(c, word, m, t):
    """Canonical atlas id: permutations of a word share matrices, edges and h."""
    canon = tuple(sorted(word)) if is_feasible(c, word) else None
    return (canon, m, linalg.to_fraction(t))


def matroid_atlas(c: SimplicialComplex, k: int, w: WeightProfile | None = None,
                  t_samples: Sequence = DEFAULT_T_SAMPLES) -> Atlas:
    """Finite truncation of the matroid atlas rooted at (empty, k-1, 1).

    Vertex ids are ``(alpha, m, t)`` with ``alpha`` a sorted feasible word,
    or ``None`` for the class of all infeasible words (whose matrices are
    zero).  Non-sink levels are instantiated at every ``t`` in
    ``t_samples`` and at ``t = 1``.
    """
    if not 1 <= k < c.rank:
        raise ValueError(f"k must satisfy 1 <= k < rank = {c.rank}, got {k}")
    w = w or WeightProfile.unweighted(c.n)
    n = c.n
    r = n + 1
    ts = sorted({linalg.to_fraction(t) for t in t_samples} | {ONE})
    if any(not 0 <= t <= 1 for t in ts):
        raise ValueError("t samples must lie in [0, 1]")
    a = Atlas(r)
    faces = c.sorted_faces()
    for m in range(0, k):
        words = [elems_of(f) for f in faces if popcount(f) <= k - 1 - m] + [None]
        for alpha in words:
            for t in (ts if m >= 1 else [ONE]):
                if alpha is None:
                    M = SymmetricMatrix.zeros(r)
                else:
                    M = vertex_matrix(c, alpha, m, t, w)
                h = [linalg.to_fraction(t)] * n + [linalg.to_fraction(1 - t)]
                edges = []
                if m >= 1:
                    for x in range(n):
                        if alpha is None:
                            child = (None, m - 1, ONE)
                        else:
                            child = vertex_key(c, alpha + (x,), m - 1, 1)
                        edges.append(Edge(x, child, IDENTITY))
                    edges.append(Edge(n, (alpha, m - 1, ONE), IDENTITY))
                a.add(AtlasVertex((alpha, m, t), M, h, edges))
    return a


def atlas_root(k: int):
    return ((), k - 1, ONE)


# ---------------------------------------------------------------------------
# sink hyperbolicity via the reduced matrix


def sink_hyperbolic(c: SimplicialComplex, word: Sequence[int], w: WeightProfile | None = None):
    """Decide OPE of A(alpha, 1) directly and along the reduction to B'.

    Returns (holds, diagnostics).  ``holds`` is the direct verdict; the
    diagnostics record the reduced-matrix route and whether they agree.
    """
    w = w or WeightProfile.unweighted(c.n)
    A = local_matrix(c, word, 1, w)
    direct = check_ope(A)
    diag: dict = {"direct": direct}
    if not is_feasible(c, word):
        diag.update(route="infeasible", reduced=True, agree=True)
        return direct, diag
    base = mask_of(word)
    ell = len(word)
    n = c.n
    cont = continuations(c, word)
    related = lambda x, y: x == y or (base | 1 << x | 1 << y) not in c.faces
    parent = {x: x for x in cont}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in combinations(cont, 2):
        if related(x, y):
            parent[find(x)] = find(y)
    classes: dict[int, list[int]] = {}
    for x in cont:
        classes.setdefault(find(x), []).append(x)
    classes_list = sorted(classes.values())
    for cl in classes_list:
        for x, y in combinations(cl, 2):
            if not related(x, y):
                diag.update(route="transitivity-failure", witness=(x, y), reduced=None,
                            agree=None, classes=classes_list)
                return direct, diag
    for cl in classes_list:
        for x in cl[1:]:
            if any(A[x, j] != A[cl[0], j] for j in range(n + 1)):
                diag.update(route="row-mismatch", witness=(cl[0], x), reduced=None, agree=None)
                return direct, diag
    r = len(classes_list)
    reps = [cl[0] for cl in classes_list]
    c0, c1, c2 = w.c(ell), w.c(ell + 1), w.c(ell + 2)
    B = [[(c2 if i != j else 0) for j in range(r)] + [c1] for i in range(r)] + [[c1] * r + [c0]]
    B = SymmetricMatrix(B)
    restricted = A.restrict(reps + [n])
    rho = c2 * c0 / (c1 * c1)
    Bp = SymmetricMatrix([[(1 if i != j else 0) for j in range(r)] + [1] for i in range(r)] + [[1] * r + [rho]])
    det = linalg.determinant(Bp)
    formula = (-1) ** r * (rho * (1 - r) + r)
    mult_minus_one = r + 1 - linalg.rank(Bp + SymmetricMatrix.identity(r + 1))
    sign_ok = det != 0 and (det > 0) == (r % 2 == 0)
    reduced_ope = inertia(Bp).n_pos == 1
    diag.update(
        route="reduced",
        classes=classes_list,
        r=r,
        B_matches=restricted == B,
        rho=rho,
        det=det,
        det_formula_matches=det == formula,
        minus_one_multiplicity=mult_minus_one,
        minus_one_ok=(r == 0) or mult_minus_one == r - 1,
        det_sign_ok=sign_ok,
        congruent=inertia(B) == inertia(Bp),
        reduced=sign_ok and reduced_ope,
    )
    diag["agree"] = (diag["reduced"] == direct and diag["B_matches"] and diag["det_formula_matches"]
                     and diag["minus_one_ok"] and diag["congruent"])
    return direct, diag


def b_matrix(r: int) -> SymmetricMatrix:
    """(r+1) x (r+1) matrix: zero diagonal on the first r, all other entries 1."""
    return SymmetricMatrix([[(0 if i == j and i < r else 1) for j in range(r + 1)] for i in range(r + 1)])


# ---------------------------------------------------------------------------
# Mason inequalities


def mason_factor(n: int, k: int, strong: bool) -> Fraction:
    f = 1 + Fraction(1, k)
    if strong:
        f *= 1 + Fraction(1, n - k)
    return f


def verify_mason(c: SimplicialComplex, k: int, strong: bool = True) -> PropertyReport:
    """Weak or strong Mason inequality at k, directly and through the root matrix.

    Slack is reported as ``I(k)^2 - factor * I(k-1) I(k+1)``; the atlas
    route's slack is divided by ``(k!)^2`` so the two are comparable.
    """
    if not 1 <= k < c.rank:
        raise ValueError(f"k must satisfy 1 <= k < rank = {c.rank}, got {k}")
    n = c.n
    I = independence_profile(c)
    factor = mason_factor(n, k, strong)
    slack1 = Fraction(I[k] * I[k]) - factor * I[k - 1] * I[k + 1]

    w = WeightProfile(k, n, strong)
    M = vertex_matrix(c, (), k - 1, 1, w)
    v = [1] * n + [0]
    e = [0] * n + [1]
    vv, vw, ww = M.form(v), M.form(v, e), M.form(e)
    ck1 = w.c(k + 1)
    fk = math.factorial
    formulas = (vv == ck1 * fk(k + 1) * I[k + 1], vw == fk(k) * I[k], ww == fk(k - 1) * I[k - 1])
    ope = check_ope(M)
    pair = vw * vw >= vv * ww
    slack2 = (vw * vw - vv * ww) / (fk(k) ** 2)
    agree = slack1 == slack2 and (slack1 >= 0) == pair
    holds = slack1 >= 0 and ope and pair and all(formulas) and agree
    details = {
        "n": n, "k": k, "strong": strong, "profile": I, "factor": factor,
        "direct": {"slack": slack1, "holds": slack1 >= 0},
        "atlas": {"vMv": vv, "vMw": vw, "wMw": ww, "formulas_match": list(formulas),
                  "ope": ope, "pair_holds": pair, "slack": slack2},
        "agree": agree,
        "slack": slack1,
    }
    if holds:
        return PropertyReport("Mason", True, None, details)
    return PropertyReport("Mason", False, {"k": k, "slack": slack1}, details)


# ---------------------------------------------------------------------------
# matroid recognition


def exchange_violation(c: SimplicialComplex):
    """Full exchange axiom by enumeration over all face pairs with |S| < |T|."""
    faces = c.sorted_faces()
    for S in faces:
        s = popcount(S)
        for T in faces:
            if popcount(T) <= s:
                continue
            if not any((S | (1 << x)) in c.faces for x in elems_of(T & ~S)):
                return S, T
    return None


@lru_cache(maxsize=None)
def _ope_rows(rows: tuple) -> bool:
    return check_ope(SymmetricMatrix(rows, linalg.RATIONAL, check=False))


def abs_test_violation(c: SimplicialComplex):
    """First (U, x, y, z, matrix) where A(U,1) on {x,y,z,*} has two positive eigenvalues."""
    n = c.n
    for U in c.sorted_faces():
        cont = [x for x in range(n) if not U >> x & 1 and (U | 1 << x) in c.faces]
        pairs = [(y, z) for y, z in combinations(cont, 2) if (U | 1 << y | 1 << z) in c.faces]
        if not pairs:
            continue
        for x in cont:
            for y, z in pairs:
                if x in (y, z):
                    continue
                idx = (x, y, z)
                rows = []
                for p in idx:
                    row = []
                    for q in idx:
                        row.append(0 if p == q else _cnt_mask(c, U | 1 << p | 1 << q, 0))
                    row.append(_cnt_mask(c, U | 1 << p, 0))
                    rows.append(tuple(row))
                rows.append(tuple(_cnt_mask(c, U | 1 << q, 0) for q in idx) + (_cnt_mask(c, U, 0),))
                rows = tuple(rows)
                if not _ope_rows(rows):
                    return U, x, y, z, [list(r) for r in rows]
    return None


def recognize_matroid(c: SimplicialComplex) -> PropertyReport:
    ex = exchange_violation(c)
    ab = abs_test_violation(c)
    details = {"exchange_route": ex is None, "atlas_route": ab is None, "agree": (ex is None) == (ab is None)}
    if ex is not None:
        details["exchange_witness"] = {"S": list(elems_of(ex[0])), "T": list(elems_of(ex[1]))}
    witness = None
    if ab is not None:
        U, x, y, z, rows = ab
        witness = {"U": list(elems_of(U)), "x": x, "y": y, "z": z, "matrix": rows}
        details["atlas_witness"] = witness
    if not details["agree"]:
        return PropertyReport("Matroid", False, {"disagreement": True, **details}, details)
    if ex is None:
        return PropertyReport("Matroid", True, None, details)
    return PropertyReport("Matroid", False, witness or details["exchange_witness"], details)


def downward_closed_families(n: int):
    """Every downward-closed family on range(n) that contains the empty set."""
    subsets = sorted(range(1, 1 << n), key=lambda f: (popcount(f), f))

    def rec(i, faces):
        if i == len(subsets):
            yield frozenset(faces)
            return
        f = subsets[i]
        yield from rec(i + 1, faces)
        if all((f & ~(1 << x)) in faces for x in elems_of(f)):
            faces.add(f)
            yield from rec(i + 1, faces)
            faces.remove(f)

    for fam in rec(0, {0}):
        yield SimplicialComplex(n, fam, check=False)


# ---------------------------------------------------------------------------
# catalog


def catalog(max_n: int = 8) -> dict[str, SimplicialComplex]:
    out: dict[str, SimplicialComplex] = {}
    for n in range(2, max_n + 1):
        for k in range(2, n + 1):
            out[f"U({k},{n})"] = uniform(n, k)
    out["K4"] = graphic(complete_graph_edges(4))
    out["K5"] = graphic(complete_graph_edges(5))
    out["C5+chord"] = graphic(cycle_with_chord_edges())
    return out


def random_restrictions(base: dict, count: int, seed: int = 0, min_rank: int = 2) -> dict:
    import random

    rng = random.Random(seed)
    names = sorted(base)
    out = {}
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not draw enough restrictions of rank >= 2")
        name = rng.choice(names)
        c = base[name]
        size = rng.randint(2, c.n)
        subset = sorted(rng.sample(range(c.n), size))
        sub = c.restriction(subset)
        if sub.rank < min_rank:
            continue
        out[f"{name}|{subset}"] = Matroid(sub.n, sub.faces, check=False)
    return out
