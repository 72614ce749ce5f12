"""Sparse homogeneous polynomials, M-convex supports and Lorentzian certification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from . import linalg
from .atlas import IDENTITY, Atlas, AtlasVertex, Edge, PropertyReport, verify_all
from .linalg import SymmetricMatrix, check_ope, inertia


class PolynomialError(ValueError):
    pass


class NotLorentzian(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


Exponent = tuple


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Polynomial in ``n`` variables with every monomial of total degree ``degree``."""

    n: int
    degree: int
    terms: Mapping[Exponent, object]

    def __post_init__(self):
        clean = {}
        for i, (e, c) in enumerate(self.terms.items()):
            e = tuple(int(x) for x in e)
            if len(e) != self.n:
                raise PolynomialError(f"term {i}: exponent has length {len(e)}, expected {self.n}")
            if any(x < 0 for x in e):
                raise PolynomialError(f"term {i}: negative exponent {e}")
            if sum(e) != self.degree:
                raise PolynomialError(f"term {i}: exponent {e} has degree {sum(e)}, expected {self.degree}")
            c = linalg.to_fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        object.__setattr__(self, "terms", {e: c for e, c in sorted(clean.items()) if c})

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[object, Sequence[int]]], degree: int | None = None):
        terms = list(terms)
        if degree is None:
            if not terms:
                raise PolynomialError("degree of the zero polynomial must be given")
            degree = sum(terms[0][1])
        acc: dict = {}
        for c, e in terms:
            e = tuple(e)
            acc[e] = acc.get(e, 0) + linalg.to_fraction(c)
        return cls(n, degree, acc)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set:
        return set(self.terms)

    def __call__(self, w: Sequence):
        exact = all(linalg.is_exact(x) for x in w)
        w = [linalg.to_fraction(x) for x in w] if exact else [float(x) for x in w]
        if len(w) != self.n:
            raise PolynomialError(f"point has {len(w)} coordinates, expected {self.n}")
        total = linalg.to_fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for wi, k in zip(w, e):
                if k:
                    term *= wi ** k
            total += term
        return total

    def scale(self, c) -> "HomogeneousPolynomial":
        c = linalg.to_fraction(c)
        return HomogeneousPolynomial(self.n, self.degree, {e: c * v for e, v in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"w{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def _falling(a: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= a - j
    return out


def derivative(f: HomogeneousPolynomial, m: Sequence[int]) -> HomogeneousPolynomial:
    """Iterated partial derivative d^m f."""
    m = tuple(m)
    if len(m) != f.n:
        raise PolynomialError(f"derivative multi-index has length {len(m)}, expected {f.n}")
    deg = f.degree - sum(m)
    if deg < 0:
        return HomogeneousPolynomial(f.n, 0, {})
    out = {}
    for e, c in f.terms.items():
        if all(a >= b for a, b in zip(e, m)):
            factor = 1
            for a, b in zip(e, m):
                factor *= _falling(a, b)
            out[tuple(a - b for a, b in zip(e, m))] = c * factor
    return HomogeneousPolynomial(f.n, deg, out)


def partial(f: HomogeneousPolynomial, i: int) -> HomogeneousPolynomial:
    return derivative(f, unit(f.n, i))


def unit(n: int, i: int) -> tuple:
    return tuple(int(j == i) for j in range(n))


def multiset_to_exponent(n: int, word: Iterable[int]) -> tuple:
    e = [0] * n
    for x in word:
        e[x] += 1
    return tuple(e)


def simplex_points(n: int, d: int):
    """All exponent vectors in N^n with total degree d (stars and bars)."""
    for word in combinations_with_replacement(range(n), d):
        yield multiset_to_exponent(n, word)


def is_m_convex(J: Iterable[Sequence[int]]):
    """Exchange axiom for a set of exponent vectors; returns (holds, witness)."""
    J = {tuple(m) for m in J}
    degrees = {sum(m) for m in J}
    if len(degrees) > 1:
        raise PolynomialError(f"support mixes total degrees {sorted(degrees)}")
    pts = sorted(J, reverse=True)
    for a in pts:
        for b in pts:
            for i in range(len(a)):
                if a[i] <= b[i]:
                    continue
                ok = False
                for j in range(len(a)):
                    if a[j] < b[j]:
                        c = list(a)
                        c[i] -= 1
                        c[j] += 1
                        if tuple(c) in J:
                            ok = True
                            break
                if not ok:
                    return False, {"m": a, "n": b, "i": i}
    return True, None


def hessian(f: HomogeneousPolynomial, w: Sequence) -> SymmetricMatrix:
    """Matrix of second partials at w; exact when f and w are rational."""
    if len(w) != f.n:
        raise PolynomialError(f"point has {len(w)} coordinates, expected {f.n}")
    exact = all(linalg.is_exact(x) for x in w)
    n = f.n
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            val = derivative(f, e)(w) if f.degree >= 2 else 0
            rows[i][j] = rows[j][i] = val
    if exact:
        return SymmetricMatrix(rows, linalg.RATIONAL, check=False)
    return SymmetricMatrix([[float(x) for x in row] for row in rows], linalg.FLOAT, check=False)


def _quadratic_hessian(q: HomogeneousPolynomial) -> SymmetricMatrix:
    """Constant Hessian of a degree-2 form, read off its coefficients."""
    n = q.n
    rows = [[0] * n for _ in range(n)]
    for e, c in q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            rows[i][i] += 2 * c
        else:
            rows[i][j] += c
            rows[j][i] += c
    return SymmetricMatrix(rows, linalg.RATIONAL, check=False)


def is_lorentzian(f: HomogeneousPolynomial) -> PropertyReport:
    if f.is_zero:
        raise PolynomialError("the zero polynomial is not classified")
    if f.degree < 2:
        raise PolynomialError(f"degree {f.degree} < 2 is not classified")
    for e, c in f.terms.items():
        if c < 0:
            return PropertyReport("Lorentzian", False, {"reason": "negative coefficient", "exp": e, "coeff": c})
    ok, wit = is_m_convex(f.terms)
    if not ok:
        return PropertyReport("Lorentzian", False, {"reason": "support not M-convex", **wit})
    checked = 0
    for m in simplex_points(f.n, f.degree - 2):
        q = derivative(f, m)
        H = _quadratic_hessian(q)
        checked += 1
        if not check_ope(H):
            return PropertyReport("Lorentzian", False,
                                  {"reason": "Hessian has two positive eigenvalues", "m": m,
                                   "inertia": tuple(inertia(H))}, {"hessians_checked": checked})
    return PropertyReport("Lorentzian", True, None, {"hessians_checked": checked})


def _require_positive(w):
    if any(x <= 0 for x in w):
        raise PolynomialError("evaluation point must be strictly positive")


def lorentzian_atlas(f: HomogeneousPolynomial, w: Sequence) -> Atlas:
    """Atlas whose vertex alpha (a sorted multiset of letters) carries H(d^alpha f)(w).

    Level m holds the words of length d-2-m; non-sinks get h = w/m.
    """
    if f.degree < 3:
        raise PolynomialError(f"atlas needs degree >= 3, got {f.degree}")
    if len(w) != f.n:
        raise PolynomialError(f"point has {len(w)} coordinates, expected {f.n}")
    _require_positive(w)
    exact = all(linalg.is_exact(x) for x in w)
    w = [linalg.to_fraction(x) for x in w] if exact else [float(x) for x in w]
    n, d = f.n, f.degree
    a = Atlas(n)
    for m in range(d - 2, -1, -1):
        for word in combinations_with_replacement(range(n), d - 2 - m):
            g = derivative(f, multiset_to_exponent(n, word))
            M = hessian(g, w)
            if m >= 1:
                h = [x / m for x in w]
                edges = [Edge(x, tuple(sorted(word + (x,))), IDENTITY) for x in range(n)]
            else:
                h = list(w)
                edges = []
            a.add(AtlasVertex(word, M, h, edges))
    return a


def verify_hessian_hyp(f: HomogeneousPolynomial, w: Sequence, eps: float = linalg.DEFAULT_EPS) -> PropertyReport:
    cert = is_lorentzian(f)
    if not cert.holds:
        raise NotLorentzian(f"input is not Lorentzian: {cert.witness}", cert.witness)
    _require_positive(w)
    H = hessian(f, w)
    direct = check_ope(H, eps)
    details = {"direct": direct, "inertia": tuple(inertia(H, eps))}
    holds = direct
    if f.degree >= 3:
        summary = verify_all(lorentzian_atlas(f, w), eps)
        details["atlas"] = {k: summary[k] for k in ("vertices", "regular", "holds")}
        details["atlas"]["failures"] = [list(v) for v in summary["local_global_failures"] + summary["ope_failures"]]
        details["agree"] = summary["holds"] == direct
        holds = holds and summary["holds"]
    if holds:
        return PropertyReport("HessianHyp", True, None, details)
    return PropertyReport("HessianHyp", False, {"inertia": details["inertia"]}, details)


def basis_polynomial(c) -> HomogeneousPolynomial:
    """Sum over bases B of prod_{x in B} w_x."""
    from .matroid import elems_of

    bases = c.bases()
    if not bases:
        raise PolynomialError("complex has no bases")
    terms = {}
    for B in bases:
        terms[multiset_to_exponent(c.n, elems_of(B))] = 1
    return HomogeneousPolynomial(c.n, c.rank, terms)


def elementary_symmetric(n: int, k: int) -> HomogeneousPolynomial:
    return HomogeneousPolynomial(n, k, {multiset_to_exponent(n, s): 1 for s in combinations(range(n), k)})


def euler_residual(g: HomogeneousPolynomial, w: Sequence):
    """g(w) - (1/deg) sum_i w_i d_i g(w); exactly zero for rational input."""
    if g.degree < 1:
        raise PolynomialError("Euler identity needs degree >= 1")
    s = sum((w[i] * partial(g, i)(w) for i in range(g.n)), linalg.to_fraction(0))
    return g(w) - s / g.degree


def factorial_vector(e: Sequence[int]) -> int:
    return math.prod(math.factorial(x) for x in e)
