"""Metrics on oriented loops and loop collections, the simple-collection
predicate, and the loops-to-crossed-annuli map with its diagnostics.

Loop distance is the cyclic discrete Frechet distance over orientation-
preserving alignments; collection distance is the bottleneck matching
value with unmatched loops charged half their diameter, solved exactly by
threshold search over candidate costs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .annuli import (
    CrossingFingerprint,
    DyadicFamily,
    PolyAnnulus,
    fingerprint,
    loop_circulates,
    point_strictly_in_poly,
    segment_touches_poly,
)
from .lattice import DiscreteLoop, Orientation

PointSeq = Sequence[tuple[float, float]]


def _as_cycle(loop, n: int | None = None) -> list[tuple[float, float]]:
    if isinstance(loop, DiscreteLoop):
        if n is None:
            raise ValueError("mesh parameter required for a DiscreteLoop")
        return [(v[0] / (2 * n), v[1] / (2 * n)) for v in loop.vertices]
    pts = [(float(p[0]), float(p[1])) for p in loop]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    return pts


def loop_diameter(loop, n: int | None = None) -> float:
    pts = _as_cycle(loop, n)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]))
    return best


def _linear_dfd(P: np.ndarray, Q: np.ndarray) -> float:
    """Discrete Frechet distance of two open point sequences."""
    d = np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).sum(-1))
    p, q = d.shape
    acc = np.empty((p, q))
    acc[0, 0] = d[0, 0]
    for j in range(1, q):
        acc[0, j] = max(acc[0, j - 1], d[0, j])
    for i in range(1, p):
        acc[i, 0] = max(acc[i - 1, 0], d[i, 0])
        row, prev = acc[i], acc[i - 1]
        di = d[i]
        for j in range(1, q):
            row[j] = max(min(prev[j], prev[j - 1], row[j - 1]), di[j])
    return float(acc[-1, -1])


def loop_distance(l, l2, n: int | None = None) -> float:
    """Cyclic discrete Frechet distance over orientation-preserving cyclic
    alignments: minimum over rotations of the closed linear distance."""
    A = _as_cycle(l, n)
    B = _as_cycle(l2, n)
    if not A or not B:
        raise ValueError("loop distance needs nonempty loops")
    if len(A) == 1 and len(B) == 1:
        return math.hypot(A[0][0] - B[0][0], A[0][1] - B[0][1])
    P = np.array(A + [A[0]]) if len(A) > 1 else np.array(A)
    best = math.inf
    Bn = np.array(B)
    for r in range(len(B)):
        rot = np.roll(Bn, -r, axis=0)
        Q = np.vstack([rot, rot[:1]]) if len(B) > 1 else rot
        best = min(best, _linear_dfd(P, Q))
    return best


def refine_cycle(points: PointSeq, step: float) -> list[tuple[float, float]]:
    """Insert points along each segment so consecutive gaps are <= step;
    makes the discrete distance exact on rectilinear loops."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    out: list[tuple[float, float]] = []
    m = len(pts)
    for i in range(m):
        a, b = pts[i], pts[(i + 1) % m]
        out.append(a)
        dist = math.hypot(b[0] - a[0], b[1] - a[1])
        extra = int(math.ceil(dist / step)) - 1
        for t in range(1, extra + 1):
            f = t / (extra + 1)
            out.append((a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])))
    return out


# ---------------------------------------------------------------------------
# collection distance: bottleneck matching with half-diameter dummies


def _feasible(threshold: float, dmat: np.ndarray, diam_i: list[float], diam_j: list[float]) -> bool:
    """Is there a matching covering every loop whose half-diameter exceeds
    the threshold, using only pairs with distance <= threshold?

    Augmenting paths may terminate by unmatching a loop that is allowed to
    stay unmatched at this threshold.
    """
    need_i = [i for i, d in enumerate(diam_i) if d / 2 > threshold]
    need_j = [j for j, d in enumerate(diam_j) if d / 2 > threshold]
    if not need_i and not need_j:
        return True
    match_j: dict[int, int] = {}
    match_i: dict[int, int] = {}
    adj = {i: [j for j in range(len(diam_j)) if dmat[i, j] <= threshold]
           for i in range(len(diam_i))}

    def augment_i(i0: int, seen: set[int]) -> bool:
        for j in adj[i0]:
            if j in seen:
                continue
            seen.add(j)
            i_old = match_j.get(j)
            if i_old is None or diam_i[i_old] / 2 <= threshold or augment_i(i_old, seen):
                if i_old is not None and match_i.get(i_old) == j:
                    del match_i[i_old]
                match_j[j] = i0
                match_i[i0] = j
                return True
        return False

    def augment_j(j0: int, seen: set[int]) -> bool:
        for i in range(len(diam_i)):
            if dmat[i, j0] > threshold or i in seen:
                continue
            seen.add(i)
            j_old = match_i.get(i)
            if j_old is None or diam_j[j_old] / 2 <= threshold or augment_j(j_old, seen):
                if j_old is not None and match_j.get(j_old) == i:
                    del match_j[j_old]
                match_i[i] = j0
                match_j[j0] = i
                return True
        return False

    for i in need_i:
        if i not in match_i and not augment_i(i, set()):
            return False
    for j in need_j:
        if j not in match_j and not augment_j(j, set()):
            return False
    return True


def collection_distance(L, L2, n: int | None = None) -> float:
    """Bottleneck matching distance: min over matchings of the max of the
    matched loop distances and half-diameters of unmatched loops."""
    A = list(L)
    B = list(L2)
    if not A and not B:
        return 0.0
    diam_i = [loop_diameter(l, n) for l in A]
    diam_j = [loop_diameter(l, n) for l in B]
    if not A:
        return max(d / 2 for d in diam_j)
    if not B:
        return max(d / 2 for d in diam_i)
    dmat = np.array([[loop_distance(a, b, n) for b in B] for a in A])
    candidates = sorted(set([d / 2 for d in diam_i] + [d / 2 for d in diam_j] +
                            [float(x) for x in dmat.ravel()]))
    lo, hi = 0, len(candidates) - 1
    if not _feasible(candidates[hi], dmat, diam_i, diam_j):
        raise RuntimeError("bottleneck search: largest candidate infeasible")
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(candidates[mid], dmat, diam_i, diam_j):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


# ---------------------------------------------------------------------------
# simple-collection predicate


def _poly_of(loop) -> tuple[tuple[Fraction, Fraction], ...]:
    pts = [(Fraction(p[0]).limit_denominator(10 ** 9), Fraction(p[1]).limit_denominator(10 ** 9))
           for p in loop]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    return tuple(pts)


def _loop_is_simple(poly) -> bool:
    m = len(poly)
    if m < 4:
        return False
    segs = [(poly[i], poly[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                continue  # adjacent segments share an endpoint by design
            from .annuli import _seg_points_intersect

            if _seg_points_intersect(segs[i], segs[j]):
                return False
    # adjacent segments must meet only at the shared endpoint
    for i in range(m):
        a, b = segs[i]
        c, d = segs[(i + 1) % m]
        if a == d:
            return False
    return True


def _signed_area(poly) -> Fraction:
    s = Fraction(0)
    m = len(poly)
    for i in range(m):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % m]
        s += x0 * y1 - x1 * y0
    return s


def _loops_disjoint(p1, p2) -> bool:
    from .annuli import _seg_points_intersect

    segs1 = [(p1[i], p1[(i + 1) % len(p1)]) for i in range(len(p1))]
    segs2 = [(p2[i], p2[(i + 1) % len(p2)]) for i in range(len(p2))]
    return not any(_seg_points_intersect(s1, s2) for s1 in segs1 for s2 in segs2)


def is_smpl(L, domain_boundary=None, n: int | None = None) -> bool:
    """Loops pairwise disjoint, simple, away from the domain boundary, and
    oriented clockwise exactly at odd nesting level."""
    polys = []
    orients = []
    for l in L:
        if isinstance(l, DiscreteLoop):
            if n is None:
                raise ValueError("mesh parameter required for DiscreteLoops")
            poly = tuple((Fraction(v[0], 2 * n), Fraction(v[1], 2 * n)) for v in l.vertices)
            orients.append(l.orientation)
        else:
            poly = _poly_of(l)
            area = _signed_area(poly)
            orients.append(Orientation.CCW if area > 0 else Orientation.CW)
        polys.append(poly)
    for p in polys:
        if not _loop_is_simple(p):
            return False
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if not _loops_disjoint(polys[i], polys[j]):
                return False
    if domain_boundary is not None:
        bnd = _poly_of(domain_boundary)
        for p in polys:
            segs = [(p[i], p[(i + 1) % len(p)]) for i in range(len(p))]
            if any(segment_touches_poly(s, bnd) for s in segs):
                return False
    for i, p in enumerate(polys):
        level = 1 + sum(1 for j, q in enumerate(polys)
                        if j != i and point_strictly_in_poly(p[0], q))
        want = Orientation.CW if level % 2 == 1 else Orientation.CCW
        if orients[i] is not want:
            return False
    return True


# ---------------------------------------------------------------------------
# loops -> crossed annuli


def F_fingerprint(loops, family: DyadicFamily, n: int) -> CrossingFingerprint:
    """Bit set iff some loop of the collection crosses the annulus."""
    ds = [ll.loop if hasattr(ll, "loop") else ll for ll in loops]
    return fingerprint((ds, n), family)


def separation_fingerprint(loops, family: DyadicFamily, n: int) -> CrossingFingerprint:
    """Diagnostic sibling: bit set iff some loop separates the annulus
    (circulates it without touching either boundary)."""
    bits = np.zeros(len(family), dtype=bool)
    polys = []
    for ll in loops:
        l = ll.loop if hasattr(ll, "loop") else ll
        if isinstance(l, DiscreteLoop):
            polys.append(tuple((Fraction(v[0], 2 * n), Fraction(v[1], 2 * n)) for v in l.vertices))
        else:
            polys.append(_poly_of(l))
    for i in range(len(family)):
        a = family.annulus(i)
        for p in polys:
            if loop_circulates(p, a) and not _touches_boundary(p, a):
                bits[i] = True
                break
    return CrossingFingerprint(family, bits)


def _touches_boundary(poly, a: PolyAnnulus) -> bool:
    segs = [(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly))]
    return any(segment_touches_poly(s, a.inner) or segment_touches_poly(s, a.outer)
               for s in segs)


def continuity_defect(fp1: CrossingFingerprint, fp2: CrossingFingerprint) -> int:
    """Diagnostic count of differing bits with no family neighbour (one grid
    step in either direction) crossed by both fingerprints.

    Nearby collections should disagree only along the shared crossing
    frontier; the caller chooses a tolerance for the count.
    """
    nb = fp1.family.one_step_easier()
    inverse: dict[int, list[int]] = {}
    for a in range(len(nb)):
        for b in nb[a]:
            if b >= 0:
                inverse.setdefault(int(b), []).append(a)
    diff = fp1.bits ^ fp2.bits
    both = fp1.bits & fp2.bits
    defects = 0
    for a in np.nonzero(diff)[0]:
        neighbours = [int(i) for i in nb[a] if i >= 0] + inverse.get(int(a), [])
        if not any(both[i] for i in neighbours):
            defects += 1
    return int(defects)
