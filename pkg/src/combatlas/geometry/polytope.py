"""Simple polytopes given by support vectors over a shared list of unit normals.

Facet normals of lower-dimensional faces are kept in ambient coordinates:
the facet normal toward neighbor j inside facet i is
``(u_j - cos(theta_ij) u_i) / sin(theta_ij)``, which lies in the hyperplane
orthogonal to u_i.  Only inner products enter the recursion, so no basis
of that hyperplane is ever chosen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .. import linalg
from ..atlas import Atlas, AtlasVertex, Edge, EdgeTransform, PropertyReport, verify_local_global
from ..linalg import SymmetricMatrix

GEOM_EPS = 1e-9


class GeometryError(ValueError):
    pass


class AType:
    """Combinatorial type of a simple polytope together with its unit normals.

    ``vertex_sets`` lists, for every vertex, the set of facet indices
    through it.  Two simple polytopes over the same normals are strongly
    isomorphic iff these sets coincide.
    """

    def __init__(self, dim: int, normals: np.ndarray, vertex_sets):
        self.dim = dim
        self.normals = np.asarray(normals, dtype=float)
        self.vertex_sets = tuple(sorted((frozenset(s) for s in vertex_sets), key=sorted))
        self._facets: dict[int, tuple] = {}

    @property
    def r(self) -> int:
        return len(self.normals)

    @property
    def J(self) -> set[tuple[int, int]]:
        if self.dim < 2:
            return set()
        return {(i, j) for S in self.vertex_sets for i in S for j in S if i != j}

    def neighbors(self, i: int) -> list[int]:
        if self.dim < 2:
            return []
        return sorted({j for S in self.vertex_sets if i in S for j in S if j != i})

    def cos(self, i: int, j: int) -> float:
        return float(np.clip(self.normals[i] @ self.normals[j], -1.0, 1.0))

    def csc_cot(self, i: int, j: int) -> tuple[float, float]:
        c = self.cos(i, j)
        s = math.sqrt(max(0.0, 1.0 - c * c))
        if s <= GEOM_EPS:
            raise GeometryError(f"normals {i} and {j} are parallel but adjacent")
        return 1.0 / s, c / s

    def facet(self, i: int):
        """(child a-type, neighbor list, csc array, cot array) for facet i."""
        if i in self._facets:
            return self._facets[i]
        if self.dim < 1:
            raise GeometryError("a point has no facets")
        nbrs = self.neighbors(i)
        if self.dim >= 2 and not nbrs:
            raise GeometryError(f"facet {i} has no adjacent facets")
        csc = np.empty(len(nbrs))
        cot = np.empty(len(nbrs))
        normals = []
        for a, j in enumerate(nbrs):
            csc[a], cot[a] = self.csc_cot(i, j)
            c = self.cos(i, j)
            normals.append((self.normals[j] - c * self.normals[i]) * csc[a])
        pos = {j: a for a, j in enumerate(nbrs)}
        child_sets = [frozenset(pos[j] for j in S if j != i) for S in self.vertex_sets if i in S]
        amb = self.normals.shape[1]
        child = AType(self.dim - 1, np.array(normals).reshape(len(nbrs), amb), child_sets)
        self._facets[i] = (child, nbrs, csc, cot)
        return self._facets[i]

    def facet_support(self, h: Sequence[float], i: int) -> np.ndarray:
        """Support vector of facet i: h_j csc - h_i cot over the neighbors j."""
        _, nbrs, csc, cot = self.facet(i)
        h = np.asarray(h, dtype=float)
        return h[nbrs] * csc - h[i] * cot

    def transform(self, i: int) -> np.ndarray:
        """Dense r x r matrix of the facet map, zero outside the neighbors of i."""
        _, nbrs, csc, cot = self.facet(i)
        T = np.zeros((self.r, self.r))
        for a, j in enumerate(nbrs):
            T[j, j] = csc[a]
            T[j, i] -= cot[a]
        return T


def mixed_volume_at(at: AType, hs: Sequence[Sequence[float]]) -> float:
    """V(P_1, ..., P_m) by the facet recursion; hs[k] is the support vector of P_k."""
    if len(hs) != at.dim:
        raise GeometryError(f"need {at.dim} bodies, got {len(hs)}")
    if at.dim == 0:
        return 1.0
    first = np.asarray(hs[0], dtype=float)
    total = 0.0
    for i in range(at.r):
        if first[i] == 0.0:
            continue
        child = at.facet(i)[0]
        total += first[i] * mixed_volume_at(child, [at.facet_support(h, i) for h in hs[1:]])
    return total / at.dim


# ---------------------------------------------------------------------------
# halfspace systems


def normalize_system(normals, offsets):
    U = np.asarray(normals, dtype=float)
    h = np.asarray(offsets, dtype=float)
    if U.ndim != 2 or len(h) != len(U):
        raise GeometryError("normals must be an r x m array with r offsets")
    norms = np.linalg.norm(U, axis=1)
    if np.any(norms <= GEOM_EPS):
        raise GeometryError("zero normal vector")
    return U / norms[:, None], h / norms


def normals_positively_span(U: np.ndarray) -> bool:
    """True iff every polytope with these normals is bounded.

    Checked as: U has full column rank and 0 is a strictly positive
    combination of all normals (max t with sum lam_i u_i = 0, sum lam = 1,
    lam_i >= t).
    """
    r, m = U.shape
    if np.linalg.matrix_rank(U) < m:
        return False
    c = np.zeros(r + 1)
    c[-1] = -1.0
    A_eq = np.vstack([np.hstack([U.T, np.zeros((m, 1))]), np.hstack([np.ones(r), [0.0]])])
    b_eq = np.concatenate([np.zeros(m), [1.0]])
    A_ub = np.hstack([-np.eye(r), np.ones((r, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(r), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * r + [(None, None)], method="highs")
    return res.status == 0 and -res.fun > 1e-12


def is_bounded(U: np.ndarray, h: np.ndarray) -> bool:
    return normals_positively_span(np.asarray(U, dtype=float))


def chebyshev_center(U: np.ndarray, h: np.ndarray):
    """Center and radius of the largest inscribed ball (unit normals)."""
    m = U.shape[1]
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A = np.hstack([U, np.ones((len(U), 1))])
    res = linprog(c, A_ub=A, b_ub=h, bounds=[(None, None)] * m + [(0, None)], method="highs")
    if res.status != 0:
        raise GeometryError(f"Chebyshev center LP failed: {res.message}")
    return res.x[:m], float(res.x[-1])


def vertices_with_facets(U: np.ndarray, h: np.ndarray, eps: float = GEOM_EPS):
    """Brute-force vertex enumeration: [(point, frozenset of tight facets)]."""
    r, m = U.shape
    tol = eps * max(1.0, float(np.abs(h).max()))
    out: dict[frozenset, np.ndarray] = {}
    for S in combinations(range(r), m):
        A = U[list(S)]
        if abs(np.linalg.det(A)) <= 1e-12:
            continue
        x = np.linalg.solve(A, h[list(S)])
        slack = U @ x - h
        if np.all(slack <= tol):
            tight = frozenset(np.nonzero(np.abs(slack) <= tol)[0].tolist())
            out.setdefault(tight, x)
    return [(x, S) for S, x in out.items()]


def polytope_vertices(U, h, eps: float = GEOM_EPS) -> np.ndarray:
    U, h = normalize_system(U, h)
    pts = [x for x, _ in vertices_with_facets(U, h, eps)]
    if not pts:
        raise GeometryError("polytope has no vertices")
    P = np.array(pts)
    # merge numerically coincident vertices of non-simple polytopes
    keep = []
    for p in P:
        if all(np.linalg.norm(p - q) > 1e-9 * max(1.0, np.abs(P).max()) for q in keep):
            keep.append(p)
    return np.array(keep)


# ---------------------------------------------------------------------------
# families


@dataclass
class PolytopeFamily:
    """Strongly isomorphic simple polytopes sharing one a-type.

    ``supports`` holds the (translated) support vectors; ``shifts`` the
    translation applied to each input so that its Chebyshev center sits at
    the origin.
    """

    atype: AType
    supports: dict[str, np.ndarray]
    shifts: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.atype.dim

    @property
    def names(self) -> list[str]:
        return list(self.supports)

    def h(self, x) -> np.ndarray:
        if isinstance(x, str):
            try:
                return self.supports[x]
            except KeyError:
                raise GeometryError(f"unknown body {x!r}") from None
        h = np.asarray(x, dtype=float)
        if h.shape != (self.atype.r,):
            raise GeometryError(f"support vector must have length {self.atype.r}")
        return h


def family_atype(normals, bodies: Mapping[str, Sequence[float]] | Sequence, center: bool = True,
                 eps: float = GEOM_EPS) -> PolytopeFamily:
    """Validate a family of halfspace systems over shared normals.

    ``bodies`` maps names to offset lists (a plain list gets names P0, P1,
    ...).  Each member must be bounded, full-dimensional and simple with
    every facet nonempty, and all members must share the vertex/facet
    incidence structure.
    """
    if not isinstance(bodies, Mapping):
        bodies = {f"P{k}": b for k, b in enumerate(bodies)}
    if not bodies:
        raise GeometryError("family is empty")
    U0 = np.asarray(normals, dtype=float)
    if not normals_positively_span(normalize_system(U0, np.ones(len(U0)))[0]):
        raise GeometryError("normals do not positively span: every member is unbounded")
    ref = None
    supports, shifts = {}, {}
    for name, offsets in bodies.items():
        U, h = normalize_system(U0, offsets)
        r, m = U.shape
        if m < 1:
            raise GeometryError("dimension must be >= 1")
        c, rad = chebyshev_center(U, h)
        scale = max(1.0, float(np.abs(h).max()))
        if rad <= eps * scale:
            raise GeometryError(f"{name}: polytope is not full-dimensional")
        if center:
            h = h - U @ c
            shifts[name] = c
        verts = vertices_with_facets(U, h, eps)
        for x, S in verts:
            if len(S) != m:
                raise GeometryError(f"{name}: not simple, vertex {x.round(9).tolist()} lies on {len(S)} facets")
        sets = frozenset(S for _, S in verts)
        used = set().union(*sets) if sets else set()
        missing = sorted(set(range(r)) - used)
        if missing:
            raise GeometryError(f"{name}: facets {missing} are empty")
        if ref is None:
            ref = sets
        elif sets != ref:
            raise GeometryError(f"{name}: facet adjacency differs from the rest of the family")
        supports[name] = h
    U, _ = normalize_system(U0, np.ones(len(U0)))
    return PolytopeFamily(AType(U.shape[1], U, ref), supports, shifts)


def box_normals(m: int) -> np.ndarray:
    I = np.eye(m)
    return np.vstack([I, -I])


def box_offsets(sides: Sequence[float]) -> list[float]:
    """Offsets for the centered box with the given side lengths."""
    half = [s / 2 for s in sides]
    return half + half


def regular_polygon_normals(k: int, phase: float = 0.0) -> np.ndarray:
    ang = phase + 2 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(ang), np.sin(ang)])


# ---------------------------------------------------------------------------
# volumes and mixed volumes


def facet_support(fam: PolytopeFamily, h, i: int) -> np.ndarray:
    return fam.atype.facet_support(fam.h(h), i)


def volume(fam: PolytopeFamily, h) -> float:
    hv = fam.h(h)
    return mixed_volume_at(fam.atype, [hv] * fam.dim)


def mixed_volume(fam: PolytopeFamily, selection: Sequence) -> float:
    if len(selection) != fam.dim:
        raise GeometryError(f"mixed volume in dimension {fam.dim} needs {fam.dim} bodies")
    return mixed_volume_at(fam.atype, [fam.h(x) for x in selection])


def facet_volumes(fam: PolytopeFamily, h) -> np.ndarray:
    hv = fam.h(h)
    at = fam.atype
    return np.array([mixed_volume_at(at.facet(i)[0], [at.facet_support(hv, i)] * (at.dim - 1))
                     for i in range(at.r)])


def facet_balance(fam: PolytopeFamily, h) -> np.ndarray:
    """sum_i Vol(F_i) u_i, which vanishes for closed polytopes."""
    return facet_volumes(fam, h) @ fam.atype.normals


def _mv_matrix_at(at: AType, hs: Sequence[np.ndarray]) -> np.ndarray:
    m = at.dim
    if m < 2:
        raise GeometryError("mixed volume matrix needs dimension >= 2")
    if len(hs) != m - 2:
        raise GeometryError(f"need {m - 2} bodies, got {len(hs)}")
    r = at.r
    M = np.zeros((r, r))
    fact = math.factorial(m - 2)
    for i in range(r):
        child, nbrs, csc, cot = at.facet(i)
        hi = [at.facet_support(h, i) for h in hs]
        for a, j in enumerate(nbrs):
            face = child.facet(a)[0]
            V = mixed_volume_at(face, [child.facet_support(h, a) for h in hi])
            M[i, j] = fact * csc[a] * V
            M[i, i] -= fact * cot[a] * V
    return M


def mv_matrix(fam: PolytopeFamily, P: Sequence = ()) -> SymmetricMatrix:
    """Mixed volume matrix of the family for bodies P_1..P_{m-2}."""
    M = _mv_matrix_at(fam.atype, [fam.h(x) for x in P])
    # faces ij and ji agree up to translation; average away rounding
    return SymmetricMatrix((M + M.T) / 2, linalg.FLOAT, check=False)


def mv_asymmetry(fam: PolytopeFamily, P: Sequence = ()) -> float:
    M = _mv_matrix_at(fam.atype, [fam.h(x) for x in P])
    return float(np.abs(M - M.T).max())


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def mv_identities(fam: PolytopeFamily, A, B, P: Sequence = (), tol: float = 1e-6) -> PropertyReport:
    at = fam.atype
    m = at.dim
    hA, hB = fam.h(A), fam.h(B)
    hP = [fam.h(x) for x in P]
    M = mv_matrix(fam, P).to_numpy()
    MhA = M @ hA
    dev1 = 0.0
    for i in range(at.r):
        child = at.facet(i)[0]
        rhs = math.factorial(m - 1) * mixed_volume_at(child, [at.facet_support(h, i) for h in [hA] + hP])
        dev1 = max(dev1, _rel(MhA[i], rhs))
    lhs2 = float(hA @ M @ hB)
    rhs2 = math.factorial(m) * mixed_volume_at(at, [hA, hB] + hP)
    dev2 = _rel(lhs2, rhs2)
    details = {"coordinatewise_max_rel_dev": dev1, "inner_product_rel_dev": dev2,
               "inner_product": lhs2, "m_factorial_V": rhs2}
    if dev1 <= tol and dev2 <= tol:
        return PropertyReport("MixedVolumeIdentities", True, None, details)
    return PropertyReport("MixedVolumeIdentities", False, {"max_deviation": max(dev1, dev2)}, details)


# ---------------------------------------------------------------------------
# atlas and AF verification


def af_atlas(fam: PolytopeFamily, P: Sequence) -> Atlas:
    """Source vertex with M(P_1..P_{m-2}) and h = h_{P_1}; one sink per facet."""
    at = fam.atype
    m = at.dim
    if m < 3:
        raise GeometryError("the atlas needs dimension >= 3; use the polygon base case for m = 2")
    if len(P) != m - 2:
        raise GeometryError(f"need {m - 2} bodies, got {len(P)}")
    hP = [fam.h(x) for x in P]
    if np.any(hP[0] <= 0):
        raise GeometryError("origin must be interior to P_1")
    r = at.r
    a = Atlas(r)
    edges = []
    for i in range(r):
        child, nbrs, _, _ = at.facet(i)
        sub = _mv_matrix_at(child, [at.facet_support(h, i) for h in hP[1:]])
        emb = np.zeros((r, r))
        emb[np.ix_(nbrs, nbrs)] = (sub + sub.T) / 2
        a.add(AtlasVertex(("facet", i), SymmetricMatrix(emb, linalg.FLOAT, check=False), [0.0] * r, []))
        edges.append(Edge(i, ("facet", i), EdgeTransform(at.transform(i).tolist())))
    a.add(AtlasVertex("source", mv_matrix(fam, P), hP[0].tolist(), edges))
    return a


def verify_af(fam: PolytopeFamily, A, B, P: Sequence = (), eps: float = GEOM_EPS) -> PropertyReport:
    """Alexandrov-Fenchel for (A, B; P_1..P_{m-2}) by mixed volumes and by the matrix."""
    m = fam.dim
    if m < 2:
        raise GeometryError("dimension must be >= 2")
    if len(P) != m - 2:
        raise GeometryError(f"need {m - 2} bodies, got {len(P)}")
    hA, hB = fam.h(A), fam.h(B)
    sel = list(P)
    vab = mixed_volume(fam, [A, B] + sel)
    vaa = mixed_volume(fam, [A, A] + sel)
    vbb = mixed_volume(fam, [B, B] + sel)
    slack = vab * vab - vaa * vbb
    scale = max(1.0, vab * vab, abs(vaa * vbb))
    direct = bool(slack >= -eps * scale)

    Ms = mv_matrix(fam, P)
    M = Ms.to_numpy()
    ope = linalg.check_ope(Ms, eps)
    pair = linalg.check_hyp_pair(Ms, hA, hB, eps)
    fm = math.factorial(m)
    agree_forms = bool(_rel(float(hA @ M @ hB), fm * vab) <= 1e-6 and _rel(float(hA @ M @ hA), fm * vaa) <= 1e-6
                   and _rel(float(hB @ M @ hB), fm * vbb) <= 1e-6)
    details: dict = {"dim": m, "V_AB": float(vab), "V_AA": float(vaa), "V_BB": float(vbb), "slack": float(slack),
                     "direct": direct, "ope": ope, "pair": pair, "forms_agree": agree_forms}
    if m == 2:
        g = hA if float(hA @ M @ hA) > 0 else hB
        details["ndc_at_support"] = linalg.ndc_at(Ms, g, eps)
        structural = details["ndc_at_support"]
    else:
        lg = verify_local_global(af_atlas(fam, P), "source", eps)
        details["local_global"] = lg.holds
        details["local_global_premises"] = lg.details.get("premises")
        structural = lg.holds
    matrix_route = ope and pair and structural
    details["matrix_route"] = matrix_route
    details["agree"] = matrix_route == direct and agree_forms
    holds = direct and matrix_route and agree_forms
    if holds:
        return PropertyReport("AF", True, None, details)
    return PropertyReport("AF", False, {"slack": slack, "ope": ope, "pair": pair}, details)


# ---------------------------------------------------------------------------
# perturbation bridge


def _hull_points(P: np.ndarray) -> np.ndarray:
    try:
        return P[ConvexHull(P).vertices]
    except QhullError as exc:
        raise GeometryError(f"degenerate point set: {exc}") from exc


def minkowski_vertices(*vertex_sets: np.ndarray) -> np.ndarray:
    acc = np.asarray(vertex_sets[0], dtype=float)
    for V in vertex_sets[1:]:
        acc = _hull_points((acc[:, None, :] + np.asarray(V)[None, :, :]).reshape(-1, acc.shape[1]))
    return _hull_points(acc)


def hull_normals(P: np.ndarray) -> np.ndarray:
    """Distinct outer unit facet normals of conv(P)."""
    eq = ConvexHull(P).equations[:, :-1]
    eq = eq / np.linalg.norm(eq, axis=1)[:, None]
    out: list[np.ndarray] = []
    for u in eq:
        if all(np.linalg.norm(u - v) > 1e-9 for v in out):
            out.append(u)
    return np.array(sorted(out, key=lambda u: tuple(np.round(u, 12))))


def support_of(vertices: np.ndarray, normals: np.ndarray) -> np.ndarray:
    return (np.asarray(normals) @ np.asarray(vertices).T).max(axis=1)


def hull_volume(vertices: np.ndarray) -> float:
    return float(ConvexHull(vertices).volume)


def mixed_volume_polarization(vertex_sets: Sequence[np.ndarray]) -> float:
    """V(K_1..K_m) = (1/m!) sum_S (-1)^{m-|S|} Vol(sum_{i in S} K_i), from hull volumes."""
    m = len(vertex_sets)
    total = 0.0
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if mask >> i & 1]
        V = hull_volume(minkowski_vertices(*[vertex_sets[i] for i in idx]))
        total += (-1) ** (m - len(idx)) * V
    return total / math.factorial(m)


def random_zonotope(m: int, k: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    segs = rng.normal(size=(k, m))
    segs *= scale / np.linalg.norm(segs, axis=1)[:, None]
    pts = np.array([sum(s * segs[i] for i, s in enumerate(signs)) / 2 for signs in product((-1, 1), repeat=k)])
    return _hull_points(pts)


def perturb_family(bodies: Mapping[str, tuple], eps: float, seed: int = 0, max_retries: int = 8,
                   zonotope_segments: int | None = None) -> PolytopeFamily:
    """Family {X + eps Q} with Q the Minkowski sum of all inputs.

    ``bodies`` maps names to (normals, offsets) pairs with possibly
    different normals.  If the sum is not simple, Q is replaced by Q + Z
    for a random zonotope Z and the attempt is repeated.
    """
    if eps <= 0:
        raise GeometryError("eps must be positive")
    verts = {name: polytope_vertices(U, h) for name, (U, h) in bodies.items()}
    dims = {V.shape[1] for V in verts.values()}
    if len(dims) != 1:
        raise GeometryError("bodies live in different dimensions")
    m = dims.pop()
    Q = minkowski_vertices(*verts.values())
    rng = np.random.default_rng(seed)
    k = zonotope_segments or m
    last = None
    for attempt in range(max_retries + 1):
        normals = hull_normals(Q)
        hQ = support_of(Q, normals)
        offsets = {name: support_of(V, normals) + eps * hQ for name, V in verts.items()}
        try:
            fam = family_atype(normals, offsets)
            fam.shifts["_retries"] = np.array([attempt])
            return fam
        except GeometryError as exc:
            last = exc
            diam = float(np.ptp(Q, axis=0).max())
            Q = minkowski_vertices(Q, random_zonotope(m, k, rng, 0.1 * diam))
    raise GeometryError(f"no simple common refinement after {max_retries} retries: {last}")


# ---------------------------------------------------------------------------
# polygons


def polygon_vertices(U, h) -> np.ndarray:
    """Vertices of a 2D halfspace system in counterclockwise order."""
    P = polytope_vertices(U, h)
    if P.shape[1] != 2:
        raise GeometryError("polygon expected")
    if len(P) < 3:
        raise GeometryError("degenerate polygon")
    c = P.mean(axis=0)
    order = np.argsort(np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0]))
    return P[order]


def polygon_area(P: np.ndarray) -> float:
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_minkowski_sum(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Sum of two convex CCW polygons by merging edges in angle order."""
    def start(V):
        k = min(range(len(V)), key=lambda i: (V[i][1], V[i][0]))
        return np.roll(V, -k, axis=0)

    P, Q = start(P), start(Q)
    n, m = len(P), len(Q)
    P2, Q2 = np.vstack([P, P[:2]]), np.vstack([Q, Q[:2]])
    out = []
    i = j = 0
    while i < n or j < m:
        out.append(P2[i] + Q2[j])
        e1, e2 = P2[i + 1] - P2[i], Q2[j + 1] - Q2[j]
        cross = e1[0] * e2[1] - e1[1] * e2[0]
        if j >= m or (i < n and cross > 0):
            i += 1
        elif i >= n or cross < 0:
            j += 1
        else:
            i += 1
            j += 1
    return np.array(out)


def polygon_mixed_area(A: tuple, B: tuple) -> float:
    """V(A, B) = (area(A+B) - area(A) - area(B)) / 2 for halfspace systems A, B."""
    PA, PB = polygon_vertices(*A), polygon_vertices(*B)
    S = polygon_minkowski_sum(PA, PB)
    return (polygon_area(S) - polygon_area(PA) - polygon_area(PB)) / 2


# ---------------------------------------------------------------------------
# random families for property checks


def random_normals(m: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """r random unit normals in R^m that positively span (so the polytope is bounded)."""
    while True:
        if m == 2:
            ang = np.sort(rng.uniform(0, 2 * np.pi, r))
            gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
            if gaps.max() >= 0.9 * np.pi:
                continue
            U = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            U = rng.normal(size=(r, m))
            U /= np.linalg.norm(U, axis=1)[:, None]
        if min(np.linalg.norm(U[a] - U[b]) for a, b in combinations(range(r), 2)) < 0.05:
            continue
        if normals_positively_span(U):
            return U


def random_family(m: int, r: int, members: int, rng: np.random.Generator, noise: float = 0.05,
                  names: Sequence[str] | None = None) -> PolytopeFamily:
    """Members h = c * (1 + noise * xi) around the polytope circumscribed about the unit ball."""
    names = list(names or [f"P{k}" for k in range(members)])
    for _ in range(200):
        U = random_normals(m, r, rng)
        try:
            base = family_atype(U, {"base": np.ones(r)}, center=False)
        except GeometryError:
            continue
        for _ in range(20):
            offs = {nm: rng.uniform(0.5, 2.0) * (1 + noise * rng.uniform(-1, 1, r)) for nm in names}
            try:
                fam = family_atype(U, offs)
            except GeometryError:
                continue
            if fam.atype.vertex_sets == base.atype.vertex_sets:
                return fam
    raise GeometryError("could not draw a random family")
