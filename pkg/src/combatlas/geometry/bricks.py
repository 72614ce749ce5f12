"""Brick regions (finite unions of axis-parallel rectangles) and planar Brunn-Minkowski."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..atlas import PropertyReport

Brick = tuple  # (x1, x2, y1, y2)
BM_TOL = 1e-9


class BrickError(ValueError):
    pass


def validate_region(R: Sequence[Sequence[float]], disjoint: bool = True) -> list[Brick]:
    if not R:
        raise BrickError("empty region")
    out = []
    for k, b in enumerate(R):
        if len(b) != 4:
            raise BrickError(f"brick #{k} must be [x1, x2, y1, y2]")
        x1, x2, y1, y2 = (float(v) for v in b)
        if not (x1 < x2 and y1 < y2):
            raise BrickError(f"brick #{k} needs x1 < x2 and y1 < y2, got {list(b)}")
        out.append((x1, x2, y1, y2))
    if disjoint:
        for a in range(len(out)):
            for c in range(a):
                if _overlap(out[a], out[c]) > 0:
                    raise BrickError(f"bricks #{c} and #{a} overlap in their interiors")
    return out


def _overlap(p: Brick, q: Brick) -> float:
    w = min(p[1], q[1]) - max(p[0], q[0])
    h = min(p[3], q[3]) - max(p[2], q[2])
    return w * h if w > 0 and h > 0 else 0.0


def brick_area(R) -> float:
    """Area of the union by coordinate compression (overlaps allowed)."""
    R = validate_region(R, disjoint=False)
    xs = sorted({v for b in R for v in b[:2]})
    ys = sorted({v for b in R for v in b[2:]})
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    cover = np.zeros((len(xs) - 1, len(ys) - 1), dtype=bool)
    for x1, x2, y1, y2 in R:
        cover[xi[x1]:xi[x2], yi[y1]:yi[y2]] = True
    w = np.diff(xs)
    h = np.diff(ys)
    return float(w @ cover @ h)


def brick_minkowski_sum(A, B) -> list[Brick]:
    """Bricks whose union is A + B (pairwise sums; they may overlap)."""
    A, B = validate_region(A, False), validate_region(B, False)
    return [(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]) for a in A for b in B]


def bounding_box(R) -> Brick:
    return (min(b[0] for b in R), max(b[1] for b in R), min(b[2] for b in R), max(b[3] for b in R))


def is_single_brick(R, tol: float = BM_TOL) -> bool:
    bb = bounding_box(R)
    box = (bb[1] - bb[0]) * (bb[3] - bb[2])
    return abs(brick_area(R) - box) <= tol * max(1.0, box)


def homothetic_bricks(A, B, tol: float = BM_TOL) -> bool:
    """Both regions fill their bounding boxes and the boxes have equal aspect ratio."""
    if not (is_single_brick(A, tol) and is_single_brick(B, tol)):
        return False
    a, b = bounding_box(A), bounding_box(B)
    aw, ah = a[1] - a[0], a[3] - a[2]
    bw, bh = b[1] - b[0], b[3] - b[2]
    return abs(aw * bh - ah * bw) <= tol * max(1.0, aw * bh, ah * bw)


def bm_values(A, B):
    sA, sB = brick_area(A), brick_area(B)
    sAB = brick_area(brick_minkowski_sum(A, B))
    lhs = math.sqrt(sAB)
    rhs = math.sqrt(sA) + math.sqrt(sB)
    return lhs, rhs, sA, sB, sAB


def bm_verify(A, B, tol: float = BM_TOL) -> PropertyReport:
    A, B = validate_region(A), validate_region(B)
    lhs, rhs, sA, sB, sAB = bm_values(A, B)
    slack = lhs - rhs
    scale = max(1.0, lhs)
    details = {"sqrt_area_sum": lhs, "sum_sqrt_areas": rhs, "area_A": sA, "area_B": sB, "area_sum": sAB,
               "slack": slack, "equality": abs(slack) <= tol * scale,
               "homothetic_bricks": homothetic_bricks(A, B, tol)}
    if slack >= -tol * scale:
        return PropertyReport("BrunnMinkowski", True, None, details)
    return PropertyReport("BrunnMinkowski", False, {"slack": slack}, details)


# ---------------------------------------------------------------------------
# the splitting recursion


def _separating_line(R: list[Brick]):
    """(axis, c) with some brick entirely on each side of the line coordinate = c.

    Exists for two or more interior-disjoint bricks: if every brick met
    the line at the smallest right edge in both axes, the bricks would
    share an open box.
    """
    for axis in (0, 1):
        lo, hi = 2 * axis, 2 * axis + 1
        c = min(b[hi] for b in R)
        if any(b[lo] >= c for b in R):
            return axis, c
    raise BrickError("no separating axis line; bricks overlap")


def _cut(R: list[Brick], axis: int, c: float):
    lo, hi = 2 * axis, 2 * axis + 1
    left, right = [], []
    for b in R:
        if b[hi] <= c:
            left.append(b)
        elif b[lo] >= c:
            right.append(b)
        else:
            bl, br = list(b), list(b)
            bl[hi] = c
            br[lo] = c
            left.append(tuple(bl))
            right.append(tuple(br))
    return left, right


def _shift(R, axis: int, d: float):
    out = []
    for b in R:
        b = list(b)
        b[2 * axis] -= d
        b[2 * axis + 1] -= d
        out.append(tuple(b))
    return out


def _split_at_ratio(R: list[Brick], axis: int, theta: float) -> float:
    """Coordinate s with area(R on the low side of s) = theta * area(R)."""
    lo, hi = 2 * axis, 2 * axis + 1
    other = 2 * (1 - axis)
    total = sum((b[hi] - b[lo]) * (b[other + 1] - b[other]) for b in R)
    target = theta * total
    points = sorted({v for b in R for v in (b[lo], b[hi])})

    def below(s):
        return sum((min(max(s, b[lo]), b[hi]) - b[lo]) * (b[other + 1] - b[other]) for b in R)

    prev = points[0]
    for p in points[1:]:
        fp = below(p)
        if fp >= target:
            fprev = below(prev)
            slope = (fp - fprev) / (p - prev)
            return prev + (target - fprev) / slope if slope > 0 else p
        prev = p
    return points[-1]


def _node_record(A, B, depth, tol):
    lhs, rhs, sA, sB, sAB = bm_values(A, B)
    return {"depth": depth, "bricks_A": len(A), "bricks_B": len(B), "area_A": sA, "area_B": sB,
            "area_sum": sAB, "lhs": lhs, "rhs": rhs, "holds": lhs >= rhs - tol * max(1.0, lhs)}


def bm_split_trace(A, B, tol: float = BM_TOL) -> dict:
    """Replay the induction on brick counts, recording the inequality at every node.

    The region with two or more bricks (A first) is cut by an axis line;
    the other region is slid along that axis so the line divides its area
    in the same ratio.  Base case: two single bricks.
    """
    A, B = validate_region(A), validate_region(B)
    nodes: list[dict] = []

    def rec(A, B, depth):
        rec_ = _node_record(A, B, depth, tol)
        nodes.append(rec_)
        if len(A) == 1 and len(B) == 1:
            (a,), (b,) = A, B
            a1, a2 = a[1] - a[0], a[3] - a[2]
            b1, b2 = b[1] - b[0], b[3] - b[2]
            rec_["base"] = {"lhs": math.sqrt((a1 + b1) * (a2 + b2)), "rhs": math.sqrt(a1 * a2) + math.sqrt(b1 * b2)}
            return depth
        swapped = len(A) < 2
        X, Y = (B, A) if swapped else (A, B)
        axis, c = _separating_line(X)
        X1, X2 = _cut(_shift(X, axis, c), axis, 0.0)
        theta = sum(_area(b) for b in X1) / sum(_area(b) for b in X)
        s = _split_at_ratio(Y, axis, theta)
        Y1, Y2 = _cut(_shift(Y, axis, s), axis, 0.0)
        Y1 = [b for b in Y1 if _area(b) > 0]
        Y2 = [b for b in Y2 if _area(b) > 0]
        pairs = [(X1, Y1), (X2, Y2)]
        if swapped:
            pairs = [(y, x) for x, y in pairs]
        (A1, B1), (A2, B2) = pairs
        s1 = brick_area(brick_minkowski_sum(A1, B1))
        s2 = brick_area(brick_minkowski_sum(A2, B2))
        rec_.update(axis="xy"[axis], theta=theta, split_sum=s1 + s2,
                    superadditive=rec_["area_sum"] >= (s1 + s2) - tol * max(1.0, rec_["area_sum"]))
        return max(rec(A1, B1, depth + 1), rec(A2, B2, depth + 1))

    depth = rec(A, B, 0)
    ok = all(n["holds"] and n.get("superadditive", True) for n in nodes)
    return {"holds": ok, "max_depth": depth, "nodes": nodes}


def _area(b: Brick) -> float:
    return (b[1] - b[0]) * (b[3] - b[2])


def random_brick_region(rng: np.random.Generator, max_bricks: int = 4, grid: int = 6) -> list[Brick]:
    """Interior-disjoint bricks with corners on a random non-uniform grid."""
    xs = np.cumsum(rng.uniform(0.2, 1.5, grid + 1))
    ys = np.cumsum(rng.uniform(0.2, 1.5, grid + 1))
    k = int(rng.integers(1, max_bricks + 1))
    out: list[Brick] = []
    for _ in range(50 * k):
        if len(out) == k:
            break
        i1, i2 = sorted(rng.choice(grid + 1, 2, replace=False))
        j1, j2 = sorted(rng.choice(grid + 1, 2, replace=False))
        b = (float(xs[i1]), float(xs[i2]), float(ys[j1]), float(ys[j2]))
        if all(_overlap(b, q) == 0 for q in out):
            out.append(b)
    return out
