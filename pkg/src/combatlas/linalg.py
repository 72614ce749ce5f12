"""Symmetric matrices over an exact-rational or float backend.

Everything the atlas machinery needs reduces to sign counting, so the
rational backend computes inertia by symmetric congruence (an
M-orthogonal basis built with 1x1 and 2x2 pivots) and never touches an
eigensolver.  The float backend uses eigenvalues with a relative zero
threshold.
"""

from __future__ import annotations

import random
from fractions import Fraction

from gmpy2 import mpq
from functools import lru_cache
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np

RATIONAL = "rational"
FLOAT = "float"

DEFAULT_EPS = 1e-9


class LinalgError(ValueError):
    pass


def to_fraction(x):
    """Parse an exact scalar (int, Fraction, mpq or a "p/q" string) into an mpq."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, bool):
        raise LinalgError(f"not a rational scalar: {x!r}")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return mpq(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise LinalgError(f"bad rational literal {x!r}") from exc
    raise LinalgError(f"not a rational scalar: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


def fraction_str(x) -> str:
    return str(to_fraction(x))


class Inertia(NamedTuple):
    n_pos: int
    n_neg: int
    n_zero: int


class SymmetricMatrix:
    """Immutable dense symmetric matrix.

    ``backend`` is ``"rational"`` (entries are gmpy2 mpq rationals, stored as a
    tuple of tuples) or ``"float"`` (a read-only numpy array).
    """

    __slots__ = ("_rows", "_arr", "backend", "order")

    def __init__(self, rows, backend: str | None = None, check: bool = True):
        if backend is None:
            backend = FLOAT if isinstance(rows, np.ndarray) and rows.dtype.kind == "f" else RATIONAL
        if backend == RATIONAL:
            data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
            r = len(data)
            if r == 0 or any(len(row) != r for row in data):
                raise LinalgError("matrix must be square with order >= 1")
            if check:
                for i in range(r):
                    for j in range(i):
                        if data[i][j] != data[j][i]:
                            raise LinalgError(f"not symmetric at ({i},{j})")
            self._rows = data
            self._arr = None
        elif backend == FLOAT:
            arr = np.array(rows, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
                raise LinalgError("matrix must be square with order >= 1")
            if check and not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(arr).max())):
                raise LinalgError("not symmetric")
            arr = (arr + arr.T) / 2.0
            arr.flags.writeable = False
            self._arr = arr
            self._rows = None
            r = arr.shape[0]
        else:
            raise LinalgError(f"unknown backend {backend!r}")
        self.backend = backend
        self.order = r

    # construction helpers
    @classmethod
    def zeros(cls, r: int, backend: str = RATIONAL) -> "SymmetricMatrix":
        if backend == FLOAT:
            return cls(np.zeros((r, r)), FLOAT)
        return cls([[0] * r for _ in range(r)], RATIONAL, check=False)

    @classmethod
    def identity(cls, r: int, backend: str = RATIONAL) -> "SymmetricMatrix":
        if backend == FLOAT:
            return cls(np.eye(r), FLOAT)
        return cls([[int(i == j) for j in range(r)] for i in range(r)], RATIONAL, check=False)

    @classmethod
    def diag(cls, values, backend: str = RATIONAL) -> "SymmetricMatrix":
        r = len(values)
        if backend == FLOAT:
            return cls(np.diag(np.asarray(values, dtype=float)), FLOAT)
        return cls([[values[i] if i == j else 0 for j in range(r)] for i in range(r)], RATIONAL, check=False)

    # access
    def __getitem__(self, ij):
        i, j = ij
        if self._rows is not None:
            return self._rows[i][j]
        return float(self._arr[i, j])

    def rows(self) -> list[list]:
        if self._rows is not None:
            return [list(row) for row in self._rows]
        return self._arr.tolist()

    def to_numpy(self) -> np.ndarray:
        if self._arr is not None:
            return self._arr
        return np.array([[float(x) for x in row] for row in self._rows])

    def as_float(self) -> "SymmetricMatrix":
        return self if self.backend == FLOAT else SymmetricMatrix(self.to_numpy(), FLOAT, check=False)

    def __eq__(self, other):
        if not isinstance(other, SymmetricMatrix) or other.order != self.order:
            return NotImplemented
        if self.backend == RATIONAL and other.backend == RATIONAL:
            return self._rows == other._rows
        return bool(np.array_equal(self.to_numpy(), other.to_numpy()))

    def __hash__(self):
        if self._rows is not None:
            return hash(self._rows)
        return hash(self._arr.tobytes())

    def __repr__(self):
        return f"SymmetricMatrix({self.rows()!r}, backend={self.backend!r})"

    # arithmetic
    def matvec(self, v: Sequence) -> list:
        if len(v) != self.order:
            raise LinalgError("dimension mismatch")
        if self._rows is not None:
            v = [to_fraction(x) for x in v]
            return [sum((a * b for a, b in zip(row, v) if a and b), mpq(0)) for row in self._rows]
        return list(self._arr @ np.asarray(v, dtype=float))

    def form(self, v: Sequence, w: Sequence | None = None):
        """Bilinear form <v, M w> (quadratic form when ``w`` is omitted)."""
        if w is None:
            w = v
        mw = self.matvec(w)
        if len(v) != self.order:
            raise LinalgError("dimension mismatch")
        if self._rows is not None:
            return sum((to_fraction(a) * b for a, b in zip(v, mw)), mpq(0))
        return float(np.dot(np.asarray(v, dtype=float), mw))

    def restrict(self, idx: Sequence[int]) -> "SymmetricMatrix":
        idx = list(idx)
        if self._rows is not None:
            return SymmetricMatrix([[self._rows[i][j] for j in idx] for i in idx], RATIONAL, check=False)
        return SymmetricMatrix(self._arr[np.ix_(idx, idx)], FLOAT, check=False)

    def scale(self, c) -> "SymmetricMatrix":
        if self._rows is not None:
            c = to_fraction(c)
            return SymmetricMatrix([[c * x for x in row] for row in self._rows], RATIONAL, check=False)
        return SymmetricMatrix(self._arr * float(c), FLOAT, check=False)

    def __add__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        if other.order != self.order:
            raise LinalgError("dimension mismatch")
        if self.backend == RATIONAL and other.backend == RATIONAL:
            return SymmetricMatrix(
                [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._rows, other._rows)], RATIONAL, check=False
            )
        return SymmetricMatrix(self.to_numpy() + other.to_numpy(), FLOAT, check=False)

    def __sub__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        return self + other.scale(-1)

    def congruent(self, S) -> "SymmetricMatrix":
        """S^T M S for a square or rectangular S (rows indexed like M)."""
        if self._rows is not None:
            S = [[to_fraction(x) for x in row] for row in S]
            if len(S) != self.order:
                raise LinalgError("dimension mismatch")
            k = len(S[0])
            MS = [[sum((self._rows[i][l] * S[l][j] for l in range(self.order)), mpq(0)) for j in range(k)]
                  for i in range(self.order)]
            return SymmetricMatrix(
                [[sum((S[l][a] * MS[l][b] for l in range(self.order)), mpq(0)) for b in range(k)]
                 for a in range(k)], RATIONAL, check=False)
        S = np.asarray(S, dtype=float)
        return SymmetricMatrix(S.T @ self._arr @ S, FLOAT, check=False)

    def max_abs(self) -> float:
        if self._rows is not None:
            return float(max(abs(x) for row in self._rows for x in row))
        return float(np.abs(self._arr).max())


# ---------------------------------------------------------------------------
# exact congruence reduction


def _orthogonal_blocks(rows, want_vectors: bool):
    """Split a rational symmetric matrix into M-orthogonal 1x1/2x2 blocks.

    Returns (blocks, n_zero) where each block is (gram, vectors): ``gram``
    is the 1x1 or 2x2 Gram matrix of ``vectors`` under M.  ``vectors`` is
    None unless requested.
    """
    r = len(rows)
    G = [list(row) for row in rows]
    basis = [[mpq(int(i == j)) for j in range(r)] for i in range(r)] if want_vectors else None
    alive = list(range(r))
    blocks = []
    while alive:
        # any nonzero pivot is exact; the first one keeps the scan cheap
        piv = next((k for k in alive if G[k][k] != 0), None)
        if piv is not None:
            d = G[piv][piv]
            alive.remove(piv)
            blocks.append(((d,), [basis[piv]] if want_vectors else None))
            for j in alive:
                f = G[j][piv] / d
                if f:
                    for l in alive:
                        G[j][l] -= f * G[piv][l]
                    if want_vectors:
                        bj, bp = basis[j], basis[piv]
                        basis[j] = [x - f * y for x, y in zip(bj, bp)]
            continue
        pair = next(((j, k) for j in alive for k in alive if j < k and G[j][k] != 0), None)
        if pair is None:
            break
        j, k = pair
        b = G[j][k]
        # diagonal entries vanish here, so the block is [[0,b],[b,0]]
        alive.remove(j)
        alive.remove(k)
        blocks.append(((mpq(0), b, mpq(0)),
                       [basis[j], basis[k]] if want_vectors else None))
        for l in alive:
            gj, gk = G[l][j], G[l][k]
            if not gj and not gk:
                continue
            # solve [[0,b],[b,0]] (x, y) = (gj, gk)
            x, y = gk / b, gj / b
            for q in alive:
                G[l][q] -= x * G[j][q] + y * G[k][q]
            if want_vectors:
                basis[l] = [c - x * p - y * s for c, p, s in zip(basis[l], basis[j], basis[k])]
    n_zero = len(alive)
    return blocks, n_zero


@lru_cache(maxsize=1 << 16)
def _rational_inertia(rows) -> Inertia:
    blocks, n_zero = _orthogonal_blocks(rows, False)
    pos = neg = 0
    for gram, _ in blocks:
        if len(gram) == 1:
            if gram[0] > 0:
                pos += 1
            else:
                neg += 1
        else:
            pos += 1
            neg += 1
    return Inertia(pos, neg, n_zero)


def eigenvalues(M: SymmetricMatrix) -> np.ndarray:
    return np.linalg.eigvalsh(M.to_numpy())


def inertia(M: SymmetricMatrix, eps: float = DEFAULT_EPS) -> Inertia:
    """Counts of positive, negative and zero eigenvalues.

    Exact on the rational backend.  On the float backend an eigenvalue
    counts as zero when ``|lam| <= eps * max|M_ij|``.
    """
    if M.backend == RATIONAL:
        return _rational_inertia(M._rows)
    lam = eigenvalues(M)
    tol = eps * M.max_abs()
    pos = int(np.sum(lam > tol))
    neg = int(np.sum(lam < -tol))
    return Inertia(pos, neg, M.order - pos - neg)


def check_ope(M: SymmetricMatrix, eps: float = DEFAULT_EPS) -> bool:
    """At most one positive eigenvalue."""
    return inertia(M, eps).n_pos <= 1


def _positive_direction_rational(M: SymmetricMatrix):
    r = M.order
    for i in range(r):
        if M[i, i] > 0:
            return [mpq(int(k == i)) for k in range(r)]
    blocks, _ = _orthogonal_blocks(M._rows, True)
    for gram, vecs in blocks:
        if len(gram) == 1:
            if gram[0] > 0:
                return vecs[0]
        else:
            b = gram[1]
            # q(x, 1) = 2 b x > 0 for x = sign(b)
            s = 1 if b > 0 else -1
            return [s * p + q for p, q in zip(vecs[0], vecs[1])]
    return None


def ndc_witness(M: SymmetricMatrix, eps: float = DEFAULT_EPS):
    """Decide (NDC); returns (holds, g)."""
    r = M.order
    if M.backend == RATIONAL:
        if _rational_inertia(M._rows).n_pos == 0:
            return True, [mpq(0)] * r
        g = _positive_direction_rational(M)
        a = M.matvec(g)
        p = next(i for i, x in enumerate(a) if x != 0)
        basis = []
        for j in range(r):
            if j == p:
                continue
            col = [mpq(0)] * r
            col[j] = mpq(1)
            col[p] = -a[j] / a[p]
            basis.append(col)
        if not basis:
            return True, g
        S = [[basis[c][i] for c in range(len(basis))] for i in range(r)]
        return _rational_inertia(M.congruent(S)._rows).n_pos == 0, g
    arr = M.to_numpy()
    lam, vec = np.linalg.eigh(arr)
    tol = eps * M.max_abs()
    if lam[-1] <= tol:
        return True, np.zeros(r)
    g = vec[:, -1]
    if float(g @ arr @ g) <= tol:
        g = None
        for i in range(r):
            if arr[i, i] > tol:
                g = np.eye(r)[i]
                break
    return _nsd_on_complement(arr, g, tol), g


def _nsd_on_complement(arr: np.ndarray, g, tol: float) -> bool:
    """Is the form negative semidefinite on {x : <x, M g> = 0}?"""
    r = arr.shape[0]
    a = arr @ np.asarray(g, dtype=float)
    p = int(np.argmax(np.abs(a)))
    basis = [np.eye(r)[j] - (a[j] / a[p]) * np.eye(r)[p] for j in range(r) if j != p]
    if not basis:
        return True
    # orthonormalize the hyperplane basis so the eps threshold stays meaningful
    Q, _ = np.linalg.qr(np.array(basis).T)
    lam = np.linalg.eigvalsh(Q.T @ arr @ Q)
    return bool(lam.max() <= tol)


def ndc_at(M: SymmetricMatrix, g, eps: float = DEFAULT_EPS) -> bool:
    """(NDC) with a prescribed direction g; requires <g, M g> > 0."""
    if len(g) != M.order:
        raise LinalgError("dimension mismatch")
    if M.backend == RATIONAL:
        g = [to_fraction(x) for x in g]
        if M.form(g) <= 0:
            raise LinalgError("<g, M g> must be positive")
        a = M.matvec(g)
        p = next(i for i, x in enumerate(a) if x != 0)
        basis = []
        for j in range(M.order):
            if j != p:
                col = [mpq(0)] * M.order
                col[j] = mpq(1)
                col[p] = -a[j] / a[p]
                basis.append(col)
        if not basis:
            return True
        S = [[basis[c][i] for c in range(len(basis))] for i in range(M.order)]
        return _rational_inertia(M.congruent(S)._rows).n_pos == 0
    arr = M.to_numpy()
    tol = eps * M.max_abs()
    if float(np.asarray(g, dtype=float) @ arr @ np.asarray(g, dtype=float)) <= tol:
        raise LinalgError("<g, M g> must be positive")
    return _nsd_on_complement(arr, g, tol)


def check_ndc(M: SymmetricMatrix, eps: float = DEFAULT_EPS) -> bool:
    return ndc_witness(M, eps)[0]


def check_hyp_pair(M: SymmetricMatrix, v, w, eps: float = DEFAULT_EPS) -> bool:
    """<v,Mw>^2 >= <v,Mv><w,Mw>, vacuously true when <w,Mw> <= 0."""
    if len(v) != M.order or len(w) != M.order:
        raise LinalgError("dimension mismatch")
    ww = M.form(w)
    if ww <= 0:
        return True
    vw = M.form(v, w)
    vv = M.form(v)
    if M.backend == RATIONAL:
        return vw * vw >= vv * ww
    scale = max(1.0, abs(vw) ** 2, abs(vv * ww))
    return vw * vw >= vv * ww - eps * scale


def structured_vectors(r: int):
    yield [1] * r
    for i in range(r):
        yield [int(k == i) for k in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            e = [0] * r
            e[i], e[j] = 1, 1
            yield e
            e = list(e)
            e[j] = -1
            yield e


def random_rational_vector(rng: random.Random, r: int, bound: int = 5, max_den: int = 4):
    return [mpq(rng.randint(-bound, bound), rng.randint(1, max_den)) for _ in range(r)]


def hyp_pair_batch(M: SymmetricMatrix, n_random: int = 64, seed: int = 0, eps: float = DEFAULT_EPS):
    """Sampled (Hyp) test; returns (holds, witness pair or None).

    Sampling can only miss violations, so a True verdict is advisory;
    :func:`check_ope` is the authoritative test.
    """
    rng = random.Random(seed)
    r = M.order
    vecs = list(structured_vectors(r))
    vecs += [random_rational_vector(rng, r) for _ in range(n_random)]
    if M.backend == FLOAT:
        vecs = [[float(x) for x in v] for v in vecs]
    images = [M.matvec(v) for v in vecs]
    if M.backend == RATIONAL:
        dot = lambda a, b: sum((x * y for x, y in zip(a, b)), mpq(0))
    else:
        dot = lambda a, b: float(np.dot(a, b))
    diag = [dot(v, mv) for v, mv in zip(vecs, images)]
    for b, w in enumerate(vecs):
        if diag[b] <= 0:
            continue
        for a, v in enumerate(vecs):
            vw = dot(v, images[b])
            lhs, rhs = vw * vw, diag[a] * diag[b]
            if M.backend == RATIONAL:
                ok = lhs >= rhs
            else:
                ok = lhs >= rhs - eps * max(1.0, abs(lhs), abs(rhs))
            if not ok:
                return False, (v, w)
    return True, None


def support(M: SymmetricMatrix) -> tuple[int, ...]:
    """Indices whose row contains a nonzero entry."""
    if M.backend == RATIONAL:
        return tuple(i for i, row in enumerate(M._rows) if any(row))
    return tuple(int(i) for i in np.flatnonzero(np.any(M._arr != 0, axis=1)))


def vector_support(h) -> tuple[int, ...]:
    return tuple(i for i, x in enumerate(h) if x != 0)


def irreducible_on_support(M: SymmetricMatrix) -> bool:
    """Whether the graph {i,j : M_ij != 0} on supp(M) is connected."""
    supp = support(M)
    if not supp:
        return True
    seen = {supp[0]}
    stack = [supp[0]]
    while stack:
        i = stack.pop()
        for j in supp:
            if j not in seen and M[i, j] != 0:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(supp)


class ConvergenceError(RuntimeError):
    pass


def jacobi_eigenvalues(M: SymmetricMatrix, eps: float = 1e-12, max_sweeps: int = 100) -> list[float]:
    """Cyclic Jacobi rotations until the off-diagonal norm is below eps*||M||."""
    A = np.array(M.to_numpy(), dtype=float)
    n = A.shape[0]
    norm = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= eps * norm:
            return sorted(float(x) for x in np.diag(A))
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def determinant(M: SymmetricMatrix):
    """Exact determinant (rational backend) by fraction-free elimination."""
    if M.backend == FLOAT:
        return float(np.linalg.det(M.to_numpy()))
    A = M.rows()
    n = len(A)
    det = mpq(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return mpq(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                for j in range(c, n):
                    A[i][j] -= f * A[c][j]
    return det


def rank(M: SymmetricMatrix) -> int:
    if M.backend == FLOAT:
        return int(np.linalg.matrix_rank(M.to_numpy()))
    inn = _rational_inertia(M._rows)
    return inn.n_pos + inn.n_neg


# ---------------------------------------------------------------------------
# JSON


def matrix_to_json(M: SymmetricMatrix) -> dict:
    if M.backend == RATIONAL:
        rows = [[fraction_str(x) for x in row] for row in M._rows]
    else:
        rows = M.to_numpy().tolist()
    return {"order": M.order, "rows": rows, "backend": M.backend}


def matrix_from_json(obj: dict) -> SymmetricMatrix:
    try:
        backend = obj.get("backend", RATIONAL)
        rows = obj["rows"]
        order = obj.get("order", len(rows))
    except (AttributeError, KeyError) as exc:
        raise LinalgError(f"malformed matrix object: missing {exc}") from exc
    if len(rows) != order:
        raise LinalgError(f"matrix declares order {order} but has {len(rows)} rows")
    if backend == FLOAT:
        return SymmetricMatrix(np.array(rows, dtype=float), FLOAT)
    return SymmetricMatrix(rows, RATIONAL)
