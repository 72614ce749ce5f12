"""End-to-end acceptance checks, one timed PASS/FAIL line per criterion."""

import math
import random
from fractions import Fraction
from itertools import permutations

import numpy as np
import sympy

from combatlas import linalg
from combatlas.atlas import check_property, verify_local_global
from combatlas.geometry import bricks as bk
from combatlas.geometry import polytope as pg
from combatlas.lorentzian import (basis_polynomial, derivative, euler_residual, hessian, is_lorentzian,
                                  HomogeneousPolynomial, simplex_points)
from combatlas.matroid import (SimplicialComplex, WeightProfile, abs_test_violation, b_matrix, catalog,
                               downward_closed_families, exchange_violation, matroid_atlas,
                               random_restrictions, recognize_matroid, uniform, verify_mason)
from combatlas.linalg import SymmetricMatrix, mpq


# ---------------------------------------------------------------------------
# 1. hyperbolicity equivalences


def _random_symmetric(rng: random.Random, r: int):
    """Half the draws are congruent to diag(+, -, ..., -, 0) so OPE is well represented."""
    if rng.random() < 0.5:
        rows = [[0] * r for _ in range(r)]
        for i in range(r):
            for j in range(i, r):
                rows[i][j] = rows[j][i] = mpq(rng.randint(-6, 6), rng.randint(1, 3))
        return SymmetricMatrix(rows)
    n_pos = rng.choice([0, 1, 1])
    d = [1] * n_pos + [-rng.randint(1, 3) for _ in range(r - n_pos)]
    for i in range(rng.randint(0, 1)):
        d[-1 - i] = 0
    P = np.array([[rng.randint(-2, 2) for _ in range(r)] for _ in range(r)], dtype=object)
    D = np.diag([mpq(x) for x in d])
    return SymmetricMatrix((P.T @ D @ P).tolist())


def test_criterion_1_hyperbolicity_equivalence(criterion):
    with criterion(1, "OPE = NDC and sampled (Hyp) on 1000 rational matrices", 10) as c:
        rng = random.Random(0)
        n_ope = 0
        for trial in range(1000):
            M = _random_symmetric(rng, rng.randint(1, 6))
            ope = linalg.check_ope(M)
            assert ope == linalg.check_ndc(M), f"OPE/NDC disagree on trial {trial}"
            lam = np.linalg.eigvalsh(M.to_numpy().astype(float))
            tol = 1e-9 * max(1.0, float(np.abs(lam).max()))
            assert linalg.inertia(M).n_pos == int(np.sum(lam > tol)), f"inertia oracle mismatch, trial {trial}"
            if ope:
                n_ope += 1
                holds, pair = linalg.hyp_pair_batch(M, n_random=12, seed=trial)
                assert holds, f"(Hyp) violated by {pair} on trial {trial}"
        c.note(f"{n_ope} matrices with OPE")


# ---------------------------------------------------------------------------
# 2. strong Mason


def test_criterion_2_strong_mason(criterion):
    with criterion(2, "strong Mason on catalog + 200 restrictions, both routes", 60) as c:
        mats = catalog()
        mats.update(random_restrictions(catalog(), 200, seed=0))
        checked = 0
        for name, m in mats.items():
            for k in range(1, m.rank):
                rep = verify_mason(m, k, strong=True)
                d = rep.details
                assert rep.holds, f"{name} k={k}: {rep.witness}"
                assert d["agree"] and d["direct"]["slack"] == d["atlas"]["slack"], f"{name} k={k} routes disagree"
                # brute-force oracle for the profile
                I = [0] * (m.rank + 1)
                for f in m.faces:
                    I[bin(f).count("1")] += 1
                assert I == d["profile"]
                checked += 1
        rep = verify_mason(uniform(4, 2), 1, strong=True)
        assert rep.details["slack"] == 0 and rep.details["atlas"]["slack"] == 0
        c.note(f"{len(mats)} matroids, {checked} (matroid, k) pairs; U(2,4) k=1 slack 0")


# ---------------------------------------------------------------------------
# 3. atlas properties


def test_criterion_3_atlas_properties(criterion):
    with criterion(3, "Inh/TInv/DecSupp/Iden, regularity, local-global on the catalog atlases", 120) as c:
        mats = catalog()
        inner = {Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)}
        vertices = regular = 0
        for name, m in mats.items():
            for k in range(1, m.rank):
                a = matroid_atlas(m, k, WeightProfile.unweighted(m.n))
                for vid, v in a.vertices.items():
                    vertices += 1
                    if v.is_sink:
                        continue
                    for prop in ("Inh", "TInv", "DecSupp", "Iden"):
                        rep = check_property(a, vid, prop)
                        assert rep.holds, f"{name} k={k} {vid}: {prop} {rep.witness}"
                    if vid[2] in inner:
                        for prop in ("Irr", "hPos"):
                            rep = check_property(a, vid, prop)
                            assert rep.holds, f"{name} k={k} {vid}: {prop} {rep.witness}"
                    if check_property(a, vid, "Irr").holds and check_property(a, vid, "hPos").holds:
                        regular += 1
                        rep = verify_local_global(a, vid)
                        assert rep.holds, f"{name} k={k} {vid}: local-global {rep.witness}"
        c.note(f"{len(mats)} matroids, {vertices} vertices, {regular} regular")


# ---------------------------------------------------------------------------
# 4. B matrix


def test_criterion_4_b_matrix(criterion):
    with criterion(4, "B has eigenvalue -1 (mult r-1), det (-1)^r, one positive eigenvalue", 1) as c:
        for r in range(1, 11):
            B = b_matrix(r)
            assert linalg.inertia(B).n_pos == 1
            assert linalg.determinant(B) == (-1) ** r
            shifted = B + SymmetricMatrix.identity(r + 1)  # B + I has corank r-1
            assert linalg.rank(shifted) == (r + 1) - (r - 1)
        # exact oracle on the characteristic polynomial for small r
        lam = sympy.Symbol("lam")
        for r in range(1, 6):
            cp = sympy.Matrix(b_matrix(r).rows()).applyfunc(sympy.Rational).charpoly(lam).as_expr()
            mult = sympy.roots(sympy.Poly(cp, lam)).get(-1, 0)
            assert mult == r - 1
        c.note("r = 1..10 exact; charpoly oracle r <= 5")


# ---------------------------------------------------------------------------
# 5. matroid recognition


def test_criterion_5_recognition(criterion):
    with criterion(5, "exchange and atlas test agree on all complexes n <= 5", 300) as c:
        total = matroids = 0
        for n in range(0, 6):
            for cx in downward_closed_families(n):
                total += 1
                ex = exchange_violation(cx) is None
                ab = abs_test_violation(cx) is None
                assert ex == ab, f"disagreement on n={n} faces={sorted(cx.faces)}"
                matroids += ex
        witness = SimplicialComplex(4, [(), (0,), (1,), (2,), (3,), (0, 1), (2, 3)])
        rep = recognize_matroid(witness)
        assert not rep.holds
        w = rep.details["atlas_witness"]
        assert [[int(x) for x in row] for row in w["matrix"]] == [[0, 0, 0, 1], [0, 0, 1, 1], [0, 1, 0, 1],
                                                                  [1, 1, 1, 1]]
        c.note(f"{total} complexes, {matroids} matroids; witness matrix exact")


# ---------------------------------------------------------------------------
# 6. Lorentzian


def test_criterion_6_lorentzian(criterion):
    with criterion(6, "U(k,n) basis polynomials certify; Hessians OPE; Euler exact", 60) as c:
        rng = random.Random(0)
        certified = []
        for n in range(2, 8):
            for k in range(2, n + 1):
                f = basis_polynomial(uniform(n, k))
                rep = is_lorentzian(f)
                assert rep.holds, f"U({k},{n}): {rep.witness}"
                certified.append(f)
        bad = HomogeneousPolynomial(2, 2, {(2, 0): 1, (0, 2): 1})
        rep = is_lorentzian(bad)
        assert not rep.holds and rep.witness["reason"] == "support not M-convex"
        for f in certified:
            for _ in range(20):
                w = [mpq(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(f.n)]
                H = hessian(f, w)
                assert linalg.check_ope(H)
                lam = np.linalg.eigvalsh(H.to_numpy().astype(float))
                assert np.sum(lam > 1e-9 * max(1.0, np.abs(lam).max())) <= 1
        for s in range(100):
            f = certified[s % len(certified)]
            w = [mpq(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(f.n)]
            m = next(iter(simplex_points(f.n, rng.randint(0, f.degree - 1))))
            g = derivative(f, m)
            if g.degree >= 1:
                assert euler_residual(g, w) == 0
        c.note(f"{len(certified)} polynomials certified, w1^2+w2^2 rejected")


# ---------------------------------------------------------------------------
# 7. mixed volumes


def _permanent(A):
    n = len(A)
    return sum(math.prod(A[i][p[i]] for i in range(n)) for p in permutations(range(n)))


def test_criterion_7_mixed_volumes(criterion):
    with criterion(7, "closed forms and mixed-volume invariants on 100 random families", 60) as c:
        rng = np.random.default_rng(0)
        worst = 0.0
        # boxes in dimensions 2..4: m! V = permanent of the side matrix
        for trial in range(50):
            m = 2 + trial % 3
            sides = rng.uniform(0.5, 3.0, size=(m, m))
            fam = pg.family_atype(pg.box_normals(m), {f"P{i}": pg.box_offsets(sides[i]) for i in range(m)})
            V = pg.mixed_volume(fam, fam.names)
            assert abs(math.factorial(m) * V - _permanent(sides.tolist())) <= 1e-9 * max(1.0, V)
            if m == 2:
                (a1, a2), (b1, b2) = sides
                assert abs(V - (a1 * b2 + a2 * b1) / 2) <= 1e-9
            worst = max(worst, _invariants(fam, rng))
        # random polygons, cross-checked by explicit Minkowski sums
        for trial in range(50):
            fam = pg.random_family(2, int(rng.integers(3, 9)), 3, rng)
            U = fam.atype.normals
            V = pg.mixed_volume(fam, ["P0", "P1"])
            oracle = pg.polygon_mixed_area((U, fam.h("P0")), (U, fam.h("P1")))
            assert abs(V - oracle) <= 1e-9 * max(1.0, V)
            worst = max(worst, _invariants(fam, rng))
        c.note(f"worst invariant deviation {worst:.2e}")


def _invariants(fam, rng) -> float:
    at, m = fam.atype, fam.dim
    names = fam.names
    sel = [names[i % len(names)] for i in range(m)]
    hs = [fam.h(x) for x in sel]
    base = pg.mixed_volume_at(at, hs)
    scale = max(1.0, abs(base))
    dev = 0.0
    for p in permutations(range(m)):
        dev = max(dev, abs(pg.mixed_volume_at(at, [hs[i] for i in p]) - base) / scale)
    lam, lam2 = 0.7, 1.9
    other = fam.h(names[-1])
    mixed = pg.mixed_volume_at(at, [lam * hs[0] + lam2 * other] + hs[1:])
    lin = lam * base + lam2 * pg.mixed_volume_at(at, [other] + hs[1:])
    dev = max(dev, abs(mixed - lin) / max(1.0, abs(lin)))
    t = rng.uniform(-0.3, 0.3, m)
    moved = pg.mixed_volume_at(at, [hs[0] + at.normals @ t] + hs[1:])
    dev = max(dev, abs(moved - base) / scale)
    assert base > 0
    for x in names:
        dev = max(dev, float(np.abs(pg.facet_balance(fam, x)).max()))
    assert dev <= 1e-8, dev
    P = sel[2:]
    rep = pg.mv_identities(fam, sel[0], names[-1], P)
    assert rep.holds, rep.details
    return dev


# ---------------------------------------------------------------------------
# 8. Alexandrov-Fenchel


def test_criterion_8_alexandrov_fenchel(criterion):
    with criterion(8, "AF on 200 polygon pairs and 50 3-polytope families; perturbation bridge", 300) as c:
        rng = np.random.default_rng(1)
        min_slack = math.inf
        for _ in range(200):
            fam = pg.random_family(2, int(rng.integers(3, 10)), 2, rng)
            rep = pg.verify_af(fam, "P0", "P1")
            assert rep.holds and rep.details["agree"] and rep.details["ope"], rep.details
            min_slack = min(min_slack, rep.details["slack"])
            eq = pg.verify_af(fam, "P0", "P0")
            assert abs(eq.details["slack"]) <= 1e-9 * max(1.0, eq.details["V_AB"] ** 2)
        for _ in range(50):
            fam = pg.random_family(3, int(rng.integers(5, 10)), 3, rng)
            rep = pg.verify_af(fam, "P0", "P1", ["P2"])
            assert rep.holds and rep.details["agree"] and rep.details["ope"], rep.details
            verts = [pg.polytope_vertices(fam.atype.normals, fam.h(x)) for x in ("P0", "P1", "P2")]
            oracle = pg.mixed_volume_polarization(verts)
            assert abs(rep.details["V_AB"] - oracle) <= 1e-6 * max(1.0, oracle)
            min_slack = min(min_slack, rep.details["slack"])
            eq = pg.verify_af(fam, "P0", "P0", ["P2"])
            assert abs(eq.details["slack"]) <= 1e-9 * max(1.0, eq.details["V_AB"] ** 2)
        c.note(f"min slack {min_slack:.3e}")
        c.note(_perturbation_bridge())


def _perturbation_bridge() -> str:
    # square and diamond: fans differ, so the family only exists after perturbation
    sq = (pg.box_normals(2), [1.0] * 4)
    dia = (pg.regular_polygon_normals(4, np.pi / 4), [1.0] * 4)
    V0 = pg.polygon_mixed_area(sq, dia)
    A2 = pg.polygon_area(pg.polygon_vertices(*sq))
    B2 = pg.polygon_area(pg.polygon_vertices(*dia))
    # with Q = A + B: V(A+eQ, B+eQ) = V(A,B) + e (V(A,Q) + V(B,Q)) + e^2 V(Q,Q)
    vAQ = A2 + V0
    vBQ = V0 + B2
    vQQ = A2 + 2 * V0 + B2
    errs = []
    for eps in (0.1, 0.01, 0.001):
        fam = pg.perturb_family({"A": sq, "B": dia}, eps)
        assert fam.atype.r == 8
        V = pg.mixed_volume(fam, ["A", "B"])
        assert pg.verify_af(fam, "A", "B").holds
        expected = V0 + eps * (vAQ + vBQ) + eps ** 2 * vQQ
        assert abs(V - expected) <= 1e-9 * max(1.0, V)
        err = abs(V - V0)
        assert err <= eps * (vAQ + vBQ + vQQ)
        errs.append(err)
    # 3-D: box and a rotated box, against hull-volume polarization
    Rz = np.array([[np.cos(0.4), -np.sin(0.4), 0], [np.sin(0.4), np.cos(0.4), 0], [0, 0, 1]])
    bodies = {"A": (pg.box_normals(3), [1.0, 0.6, 0.8] * 2), "B": (pg.box_normals(3) @ Rz.T, [0.7] * 6),
              "C": (pg.box_normals(3), [0.5, 1.0, 0.4] * 2)}
    verts = [pg.polytope_vertices(*bodies[x]) for x in "ABC"]
    W0 = pg.mixed_volume_polarization(verts)
    errs3 = []
    for eps in (0.1, 0.01, 0.001):
        fam = pg.perturb_family(bodies, eps)
        W = pg.mixed_volume(fam, ["A", "B", "C"])
        assert pg.verify_af(fam, "A", "B", ["C"]).holds
        errs3.append(abs(W - W0))
    for e in (errs, errs3):
        assert e[1] <= 0.2 * e[0] and e[2] <= 0.2 * e[1], e
    return "bridge errors 2D " + ", ".join(f"{x:.2e}" for x in errs) + "; 3D " + ", ".join(f"{x:.2e}" for x in errs3)


# ---------------------------------------------------------------------------
# 9. bricks


def _sweep_union_area(R) -> float:
    """Union area by a vertical sweep with merged y-intervals (independent of coordinate compression)."""
    xs = sorted({v for b in R for v in b[:2]})
    total = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        iv = sorted((b[2], b[3]) for b in R if b[0] <= x0 and b[1] >= x1)
        cover, cur = 0.0, None
        for lo, hi in iv:
            if cur is None or lo > cur[1]:
                if cur:
                    cover += cur[1] - cur[0]
                cur = [lo, hi]
            else:
                cur[1] = max(cur[1], hi)
        if cur:
            cover += cur[1] - cur[0]
        total += cover * (x1 - x0)
    return total


def test_criterion_9_bricks(criterion):
    with criterion(9, "Brunn-Minkowski on 1000 brick pairs, equality iff homothetic, split trace", 30) as c:
        rng = np.random.default_rng(0)
        equalities = 0
        for trial in range(1000):
            if trial % 10 == 0:
                # homothetic single bricks, possibly cut into pieces
                w, h, s = rng.uniform(0.5, 3), rng.uniform(0.5, 3), rng.uniform(0.3, 3)
                A = [(0.0, w / 2, 0.0, h), (w / 2, w, 0.0, h)] if trial % 20 == 0 else [(0.0, w, 0.0, h)]
                B = [(1.0, 1.0 + s * w, 2.0, 2.0 + s * h)]
            else:
                A, B = bk.random_brick_region(rng), bk.random_brick_region(rng)
            rep = bk.bm_verify(A, B)
            d = rep.details
            assert rep.holds, f"trial {trial}: slack {d['slack']}"
            sAB = _sweep_union_area(bk.brick_minkowski_sum(A, B))
            assert abs(sAB - d["area_sum"]) <= 1e-9 * max(1.0, sAB)
            assert d["equality"] == d["homothetic_bricks"], f"trial {trial}: equality/homothety mismatch"
            equalities += d["equality"]
            tr = bk.bm_split_trace(A, B)
            assert tr["holds"], f"trial {trial}: split trace node fails"
        c.note(f"{equalities} equality cases, all homothetic")
