"""Polygonal annuli: crossing, separation, circulation order, dyadic
families and hereditary crossing fingerprints.

All geometry here is rectilinear and exact (Fractions end to end).  The
reference crossing test clips edge fragments to the closed annulus and
runs union-find over them; family fingerprints use an equivalent
component-level criterion that vectorizes: a connected set crosses an
annulus iff it meets the closed hole and is not confined to the interior
of the outer boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .lattice import DiscreteLoop
from .percolation import Config

Point = tuple[Fraction, Fraction]
Segment = tuple[Point, Point]


class FamilyTooLargeError(ValueError):
    pass


def _frac_point(p) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


def _poly_edges(corners: Sequence[Point]) -> list[Segment]:
    m = len(corners)
    out = []
    for i in range(m):
        a, b = corners[i], corners[(i + 1) % m]
        if a[0] != b[0] and a[1] != b[1]:
            raise ValueError("polygon must be rectilinear")
        out.append((a, b))
    return out


def point_on_poly(p: Point, corners: Sequence[Point]) -> bool:
    for (a, b) in _poly_edges(corners):
        if a[0] == b[0] == p[0] and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
            return True
        if a[1] == b[1] == p[1] and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]):
            return True
    return False


def point_strictly_in_poly(p: Point, corners: Sequence[Point]) -> bool:
    if point_on_poly(p, corners):
        return False
    count = 0
    for (a, b) in _poly_edges(corners):
        if a[0] == b[0] and a[0] > p[0]:
            lo, hi = min(a[1], b[1]), max(a[1], b[1])
            if lo <= p[1] < hi:
                count += 1
    return count % 2 == 1


@dataclass(frozen=True)
class PolyAnnulus:
    """Closed annular region between two rectilinear simple polygons."""

    inner: tuple[Point, ...]
    outer: tuple[Point, ...]
    resolution: int | None = None

    def __post_init__(self) -> None:
        for c in self.inner:
            if not (point_strictly_in_poly(c, self.outer)):
                raise ValueError("inner boundary must be strictly inside the outer one")

    @staticmethod
    def rect_pair(inner_rect, outer_rect, resolution: int | None = None) -> "PolyAnnulus":
        """Nested axis-aligned rectangles given as (x1, y1, x2, y2)."""
        def corners(r):
            x1, y1, x2, y2 = (Fraction(c) for c in r)
            if not (x1 < x2 and y1 < y2):
                raise ValueError("degenerate rectangle")
            return ((x1, y1), (x2, y1), (x2, y2), (x1, y2))
        return PolyAnnulus(corners(inner_rect), corners(outer_rect), resolution)

    def is_rect_pair(self) -> bool:
        return len(self.inner) == 4 and len(self.outer) == 4

    def inner_rect(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [c[0] for c in self.inner]
        ys = [c[1] for c in self.inner]
        return min(xs), min(ys), max(xs), max(ys)

    def outer_rect(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [c[0] for c in self.outer]
        ys = [c[1] for c in self.outer]
        return min(xs), min(ys), max(xs), max(ys)

    def contains_point(self, p: Point) -> bool:
        """Closed-region membership: inside-or-on outer, not strictly in inner."""
        if point_strictly_in_poly(p, self.inner):
            return False
        return point_on_poly(p, self.outer) or point_strictly_in_poly(p, self.outer)


# ---------------------------------------------------------------------------
# converting inputs to plane segments


def config_segments(k: Config) -> list[Segment]:
    n = k.support.geometry.n
    segs = []
    for (a, b) in sorted(k.open_edges):
        segs.append(((Fraction(a[0], 2 * n), Fraction(a[1], 2 * n)),
                     (Fraction(b[0], 2 * n), Fraction(b[1], 2 * n))))
    return segs


def loop_segments(loop, n: int | None = None) -> list[Segment]:
    """Segments of a DiscreteLoop (doubled coords, needs n) or of a plain
    cyclic point sequence."""
    if isinstance(loop, DiscreteLoop):
        if n is None:
            raise ValueError("mesh parameter required for a DiscreteLoop")
        pts = [(Fraction(v[0], 2 * n), Fraction(v[1], 2 * n)) for v in loop.closed()]
    else:
        pts = [_frac_point(p) for p in loop]
        if pts[0] != pts[-1]:
            pts.append(pts[0])
    return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1) if pts[i] != pts[i + 1]]


def as_segments(s, n: int | None = None) -> list[Segment]:
    if isinstance(s, Config):
        return config_segments(s)
    if isinstance(s, DiscreteLoop):
        return loop_segments(s, n)
    if isinstance(s, (list, tuple)) and s and isinstance(s[0], (list, tuple)) and len(s[0]) == 2 \
            and not isinstance(s[0][0], (list, tuple)):
        return loop_segments(s)  # one cyclic point sequence
    out: list[Segment] = []
    for item in s:
        out.extend(as_segments(item, n))
    return out


# ---------------------------------------------------------------------------
# exact segment utilities


def _seg_points_intersect(s1: Segment, s2: Segment) -> bool:
    (a1, b1), (a2, b2) = s1, s2
    h1 = a1[1] == b1[1]
    h2 = a2[1] == b2[1]
    if h1 and h2:
        if a1[1] != a2[1]:
            return False
        lo1, hi1 = sorted((a1[0], b1[0]))
        lo2, hi2 = sorted((a2[0], b2[0]))
        return lo1 <= hi2 and lo2 <= hi1
    if not h1 and not h2:
        if a1[0] != a2[0]:
            return False
        lo1, hi1 = sorted((a1[1], b1[1]))
        lo2, hi2 = sorted((a2[1], b2[1]))
        return lo1 <= hi2 and lo2 <= hi1
    if h1:
        h, v = s1, s2
    else:
        h, v = s2, s1
    hx_lo, hx_hi = sorted((h[0][0], h[1][0]))
    vy_lo, vy_hi = sorted((v[0][1], v[1][1]))
    return hx_lo <= v[0][0] <= hx_hi and vy_lo <= h[0][1] <= vy_hi


def segment_touches_poly(seg: Segment, corners: Sequence[Point]) -> bool:
    return any(_seg_points_intersect(seg, pe) for pe in _poly_edges(corners))


def clip_segment_to_annulus(seg: Segment, a: PolyAnnulus) -> list[Segment]:
    """Sub-segments of seg inside the closed annular region."""
    (p, q) = seg
    if p[0] != q[0] and p[1] != q[1]:
        raise ValueError(f"segments must be axis-aligned, got {seg}")
    horizontal = p[1] == q[1]
    cuts = {Fraction(0), Fraction(1)}
    length_x = q[0] - p[0]
    length_y = q[1] - p[1]
    for poly in (a.inner, a.outer):
        for (u, v) in _poly_edges(poly):
            if horizontal and u[0] == v[0] and length_x != 0:
                t = (u[0] - p[0]) / length_x
                if 0 < t < 1:
                    cuts.add(t)
            if not horizontal and u[1] == v[1] and length_y != 0:
                t = (u[1] - p[1]) / length_y
                if 0 < t < 1:
                    cuts.add(t)
    ts = sorted(cuts)
    out = []
    run_start: Fraction | None = None
    for i in range(len(ts) - 1):
        t0, t1 = ts[i], ts[i + 1]
        tm = (t0 + t1) / 2
        mid = (p[0] + tm * length_x, p[1] + tm * length_y)
        if a.contains_point(mid):
            if run_start is None:
                run_start = t0
        else:
            if run_start is not None:
                out.append(_sub_seg(p, length_x, length_y, run_start, t0))
                run_start = None
    if run_start is not None:
        out.append(_sub_seg(p, length_x, length_y, run_start, Fraction(1)))
    return out


def _sub_seg(p: Point, dx: Fraction, dy: Fraction, t0: Fraction, t1: Fraction) -> Segment:
    return ((p[0] + t0 * dx, p[1] + t0 * dy), (p[0] + t1 * dx, p[1] + t1 * dy))


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _clipped_components(segments: Iterable[Segment], a: PolyAnnulus) -> list[list[Segment]]:
    frags: list[Segment] = []
    for seg in segments:
        frags.extend(clip_segment_to_annulus(seg, a))
    if not frags:
        return []
    uf = _UnionFind(len(frags))
    for i in range(len(frags)):
        for j in range(i + 1, len(frags)):
            if _seg_points_intersect(frags[i], frags[j]):
                uf.union(i, j)
    comps: dict[int, list[Segment]] = {}
    for i, f in enumerate(frags):
        comps.setdefault(uf.find(i), []).append(f)
    return list(comps.values())


def crosses(s, a: PolyAnnulus, n: int | None = None) -> bool:
    """True iff the clipped point set has a connected component meeting
    both boundaries.  Union-find over clipped edge fragments."""
    for comp in _clipped_components(as_segments(s, n), a):
        touches_inner = any(segment_touches_poly(f, a.inner) for f in comp)
        if touches_inner and any(segment_touches_poly(f, a.outer) for f in comp):
            return True
    return False


def connects_thickened(s, a: PolyAnnulus, r, n: int | None = None) -> bool:
    """Some component of s clipped to a meets the sup-norm r-thickenings of
    both boundaries.  Rectangle-pair annuli only."""
    if not a.is_rect_pair():
        raise ValueError("thickened connection implemented for rectangle pairs")
    r = Fraction(r)
    inner = a.inner_rect()
    outer = a.outer_rect()
    for comp in _clipped_components(as_segments(s, n), a):
        if any(_seg_touches_frame(f, inner, r) for f in comp) and \
           any(_seg_touches_frame(f, outer, r) for f in comp):
            return True
    return False


def _seg_touches_frame(seg: Segment, rect, r: Fraction) -> bool:
    """Segment meets the closed r-thickening of a rectangle's boundary."""
    x1, y1, x2, y2 = rect
    big = (x1 - r, y1 - r, x2 + r, y2 + r)
    if not _seg_meets_closed_rect(seg, big):
        return False
    if x2 - x1 <= 2 * r or y2 - y1 <= 2 * r:
        return True  # thickening swallows the hole
    small = (x1 + r, y1 + r, x2 - r, y2 - r)
    return not _seg_within_open_rect(seg, small)


def _seg_meets_closed_rect(seg: Segment, rect) -> bool:
    x1, y1, x2, y2 = rect
    (ax, ay), (bx, by) = seg
    lox, hix = min(ax, bx), max(ax, bx)
    loy, hiy = min(ay, by), max(ay, by)
    return lox <= x2 and hix >= x1 and loy <= y2 and hiy >= y1


def _seg_within_open_rect(seg: Segment, rect) -> bool:
    x1, y1, x2, y2 = rect
    (ax, ay), (bx, by) = seg
    lox, hix = min(ax, bx), max(ax, bx)
    loy, hiy = min(ay, by), max(ay, by)
    return x1 < lox and hix < x2 and y1 < loy and hiy < y2


# ---------------------------------------------------------------------------
# separation


def separates(s, a: PolyAnnulus, n: int | None = None) -> bool:
    """True iff some clipped component disconnects the two boundaries in
    the plane.  Cell-graph connectivity on a refinement grid."""
    comps = _clipped_components(as_segments(s, n), a)
    return any(_component_separates(comp, a) for comp in comps)


def _component_separates(comp: list[Segment], a: PolyAnnulus) -> bool:
    xs = {c[0] for c in a.inner} | {c[0] for c in a.outer}
    ys = {c[1] for c in a.inner} | {c[1] for c in a.outer}
    for (p, q) in comp:
        xs.update((p[0], q[0]))
        ys.update((p[1], q[1]))
    xs = sorted(xs)
    ys = sorted(ys)
    if len(xs) < 2 or len(ys) < 2:
        return False
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    covered_v: set[tuple[int, int]] = set()  # vertical walls (x index, y cell index)
    covered_h: set[tuple[int, int]] = set()
    for (p, q) in comp:
        if p[0] == q[0] and p[0] in xi:
            lo, hi = sorted((p[1], q[1]))
            for j in range(yi.get(lo, 0), yi.get(hi, 0)):
                covered_v.add((xi[p[0]], j))
        elif p[1] == q[1] and p[1] in yi:
            lo, hi = sorted((p[0], q[0]))
            for i in range(xi.get(lo, 0), xi.get(hi, 0)):
                covered_h.add((i, yi[p[1]]))

    nx, ny = len(xs) - 1, len(ys) - 1

    def cell_kind(i: int, j: int) -> str:
        mid = ((xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2)
        if point_strictly_in_poly(mid, a.inner):
            return "hole"
        if a.contains_point(mid):
            return "band"
        return "out"

    kinds = [[cell_kind(i, j) for j in range(ny)] for i in range(nx)]
    uf = _UnionFind(nx * ny + 2)
    HOLE = nx * ny
    OUT = nx * ny + 1
    for i in range(nx):
        for j in range(ny):
            idx = i * ny + j
            kind = kinds[i][j]
            if kind == "hole":
                uf.union(idx, HOLE)
            elif kind == "out":
                uf.union(idx, OUT)
            if i + 1 < nx and (i + 1, j) not in covered_v:
                uf.union(idx, (i + 1) * ny + j)
            if j + 1 < ny and (i, j + 1) not in covered_h:
                uf.union(idx, i * ny + (j + 1))
    # outermost ring of cells borders the unbounded component
    for i in range(nx):
        for j in (0, ny - 1):
            uf.union(i * ny + j, OUT)
    for j in range(ny):
        for i in (0, nx - 1):
            uf.union(i * ny + j, OUT)
    return uf.find(HOLE) != uf.find(OUT)


# ---------------------------------------------------------------------------
# circulation order


def loop_circulates(corners: Sequence[Point], a: PolyAnnulus) -> bool:
    """The loop sits in a's closed annular region with a's hole inside it."""
    for c in corners:
        if not a.contains_point(c):
            return False
    for (u, v) in _poly_edges(corners):
        mid = ((u[0] + v[0]) / 2, (u[1] + v[1]) / 2)
        if not a.contains_point(mid):
            return False
    for c in a.inner:
        if not (point_on_poly(c, corners) or point_strictly_in_poly(c, corners)):
            return False
    return True


def leq_crs(a1: PolyAnnulus, a2: PolyAnnulus) -> bool:
    """a1 is below a2 in the crossing order iff a1 circulates a2."""
    return loop_circulates(a1.inner, a2) and loop_circulates(a1.outer, a2)


def erode_inner(a: PolyAnnulus, eps) -> PolyAnnulus:
    """Shrink the hole side: inner boundary pushed outward by eps (sup-norm
    dilation of the hole).  Rectangle pairs only."""
    if not a.is_rect_pair():
        raise ValueError("erosion helper implemented for rectangle pairs")
    eps = Fraction(eps)
    x1, y1, x2, y2 = a.inner_rect()
    grown = (x1 - eps, y1 - eps, x2 + eps, y2 + eps)
    return PolyAnnulus.rect_pair(grown, a.outer_rect())


def annulus_distance(a1: PolyAnnulus, a2: PolyAnnulus) -> float:
    """Max over the two boundaries of the cyclic Frechet distance."""
    from .loopmetric import loop_distance

    d0 = loop_distance([tuple(map(float, c)) for c in a1.inner],
                       [tuple(map(float, c)) for c in a2.inner])
    d1 = loop_distance([tuple(map(float, c)) for c in a1.outer],
                       [tuple(map(float, c)) for c in a2.outer])
    return max(d0, d1)


# ---------------------------------------------------------------------------
# dyadic rectangle-pair family and fingerprints

K_MAX_DEFAULT = 4


class DyadicFamily:
    """Nested axis-aligned rectangle pairs with corners on the 2^-k grid,
    strictly inside the window.  Enumeration order: ascending
    (ox1, oy1, ox2, oy2, ix1, iy1, ix2, iy2) in grid units; pinned by tests.
    """

    def __init__(self, k: int, window=(0, 0, 1, 1), k_max: int = K_MAX_DEFAULT) -> None:
        if k > k_max:
            raise FamilyTooLargeError(f"resolution {k} beyond cap {k_max}")
        self.k = k
        self.window = tuple(Fraction(w) for w in window)
        wx0, wy0, wx1, wy1 = self.window
        step = Fraction(1, 2 ** k)
        xs = [wx0 + j * step for j in range(1, int((wx1 - wx0) / step))]
        ys = [wy0 + j * step for j in range(1, int((wy1 - wy0) / step))]
        self.grid_x = xs
        self.grid_y = ys
        quads = []
        m, my = len(xs), len(ys)
        for ox1 in range(m):
            for ox2 in range(ox1 + 2, m):
                for oy1 in range(my):
                    for oy2 in range(oy1 + 2, my):
                        for ix1 in range(ox1 + 1, ox2):
                            for ix2 in range(ix1 + 1, ox2):
                                for iy1 in range(oy1 + 1, oy2):
                                    for iy2 in range(iy1 + 1, oy2):
                                        quads.append((ox1, oy1, ox2, oy2, ix1, iy1, ix2, iy2))
        quads.sort()
        self.quads = np.array(quads, dtype=np.int64) if quads else np.zeros((0, 8), np.int64)
        self._index = {tuple(q): i for i, q in enumerate(quads)}
        self._neighbors: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.quads)

    def annulus(self, i: int) -> PolyAnnulus:
        ox1, oy1, ox2, oy2, ix1, iy1, ix2, iy2 = self.quads[i]
        gx, gy = self.grid_x, self.grid_y
        return PolyAnnulus.rect_pair(
            (gx[ix1], gy[iy1], gx[ix2], gy[iy2]),
            (gx[ox1], gy[oy1], gx[ox2], gy[oy2]),
            resolution=self.k,
        )

    def one_step_easier(self) -> np.ndarray:
        """Index of the annulus after each of the 8 one-step moves that make
        crossing easier (grow inner / shrink outer); -1 when invalid."""
        if self._neighbors is not None:
            return self._neighbors
        moves = []
        for q in map(tuple, self.quads):
            ox1, oy1, ox2, oy2, ix1, iy1, ix2, iy2 = q
            row = []
            for cand in (
                (ox1, oy1, ox2, oy2, ix1 - 1, iy1, ix2, iy2),
                (ox1, oy1, ox2, oy2, ix1, iy1 - 1, ix2, iy2),
                (ox1, oy1, ox2, oy2, ix1, iy1, ix2 + 1, iy2),
                (ox1, oy1, ox2, oy2, ix1, iy1, ix2, iy2 + 1),
                (ox1 + 1, oy1, ox2, oy2, ix1, iy1, ix2, iy2),
                (ox1, oy1 + 1, ox2, oy2, ix1, iy1, ix2, iy2),
                (ox1, oy1, ox2 - 1, oy2, ix1, iy1, ix2, iy2),
                (ox1, oy1, ox2, oy2 - 1, ix1, iy1, ix2, iy2),
            ):
                row.append(self._index.get(cand, -1))
            moves.append(row)
        self._neighbors = np.array(moves, dtype=np.int64) if moves else np.zeros((0, 8), np.int64)
        return self._neighbors


@dataclass(frozen=True)
class CrossingFingerprint:
    family: DyadicFamily
    bits: np.ndarray  # bool, len(family)

    @property
    def k(self) -> int:
        return self.family.k

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossingFingerprint):
            return NotImplemented
        return self.family.k == other.family.k and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.family.k, self.bits.tobytes()))

    def hereditary_violations(self) -> int:
        nb = self.family.one_step_easier()
        if len(self.bits) == 0:
            return 0
        total = 0
        for m in range(8):
            idx = nb[:, m]
            valid = idx >= 0
            total += int(np.count_nonzero(self.bits[valid] & ~self.bits[idx[valid]]))
        return total

    def is_hereditary(self) -> bool:
        return self.hereditary_violations() == 0

    def to_json(self) -> dict:
        return {"k": self.family.k, "hex": np.packbits(self.bits.astype(np.uint8)).tobytes().hex()}

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))


def _flo(q: Fraction) -> int:
    return q.numerator // q.denominator


def _cei(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class _FamilyBounds:
    """Integer index bounds per family annulus for one mesh parameter n.

    H-edges are keyed by (i, j) with the segment [i, i+1]/n x {j/n}; V-edges
    by (i, j) with {i/n} x [j, j+1]/n.  All bounds derived by exact Fraction
    arithmetic, then used through numpy prefix sums.
    """

    def __init__(self, family: DyadicFamily, n: int) -> None:
        self.family = family
        self.n = n
        gx = family.grid_x
        gy = family.grid_y
        q = family.quads
        nn = Fraction(n)

        def arr(vals):
            return np.array(vals, dtype=np.int64)

        if len(q) == 0:
            zero = np.zeros(0, dtype=np.int64)
            self.hole_h = (zero,) * 4
            self.hole_v = (zero,) * 4
            self.outer_h = (zero,) * 4
            self.outer_v = (zero,) * 4
            return

        ix1 = arr([_cei(gx[c] * nn) for c in q[:, 4]])
        iy1 = arr([_cei(gy[c] * nn) for c in q[:, 5]])
        ix2 = arr([_flo(gx[c] * nn) for c in q[:, 6]])
        iy2 = arr([_flo(gy[c] * nn) for c in q[:, 7]])
        # closed-hole overlap: H-edge needs j in [ceil(b1 n), floor(b2 n)],
        # i in [ceil(a1 n) - 1, floor(a2 n)]
        self.hole_h = (ix1 - 1, ix2, iy1, iy2)
        self.hole_v = (ix1, ix2, iy1 - 1, iy2)

        sx1 = arr([_flo(gx[c] * nn) + 1 for c in q[:, 0]])
        sy1 = arr([_flo(gy[c] * nn) + 1 for c in q[:, 1]])
        sx2 = arr([_cei(gx[c] * nn) - 1 for c in q[:, 2]])
        sy2 = arr([_cei(gy[c] * nn) - 1 for c in q[:, 3]])
        # strictly inside outer: H-edge needs i >= sx1, i + 1 <= sx2, j in (sy1-1, sy2+1)
        self.outer_h = (sx1, sx2 - 1, sy1, sy2)
        self.outer_v = (sx1, sx2, sy1, sy2 - 1)


_bounds_cache: dict[tuple[int, int, tuple], _FamilyBounds] = {}


def _family_bounds(family: DyadicFamily, n: int) -> _FamilyBounds:
    key = (id(family), n, family.window)
    fb = _bounds_cache.get(key)
    if fb is None:
        fb = _FamilyBounds(family, n)
        _bounds_cache[key] = fb
    return fb


def _prefix(hist: np.ndarray) -> np.ndarray:
    ps = np.zeros((hist.shape[0] + 1, hist.shape[1] + 1), dtype=np.int64)
    ps[1:, 1:] = hist.cumsum(0).cumsum(1)
    return ps


def _rect_count(ps: np.ndarray, x_lo, x_hi, y_lo, y_hi) -> np.ndarray:
    nx, ny = ps.shape[0] - 1, ps.shape[1] - 1
    xl = np.clip(x_lo, 0, nx)
    xh = np.clip(x_hi + 1, 0, nx)
    yl = np.clip(y_lo, 0, ny)
    yh = np.clip(y_hi + 1, 0, ny)
    xh = np.maximum(xh, xl)
    yh = np.maximum(yh, yl)
    return ps[xh, yh] - ps[xl, yh] - ps[xh, yl] + ps[xl, yl]


def _component_bits(h_edges: np.ndarray, v_edges: np.ndarray, fb: _FamilyBounds) -> np.ndarray:
    """Crossing bits of one connected edge set against the whole family.

    A connected set crosses (I, O) iff it intersects the closed hole I and
    has a point outside the open interior of O.
    """
    n = fb.n
    hh = np.zeros((n + 1, n + 2), dtype=np.int64)
    vv = np.zeros((n + 2, n + 1), dtype=np.int64)
    if len(h_edges):
        np.add.at(hh, (h_edges[:, 0], h_edges[:, 1]), 1)
    if len(v_edges):
        np.add.at(vv, (v_edges[:, 0], v_edges[:, 1]), 1)
    ps_h = _prefix(hh)
    ps_v = _prefix(vv)
    total = len(h_edges) + len(v_edges)
    touch_hole = (_rect_count(ps_h, *fb.hole_h) + _rect_count(ps_v, *fb.hole_v)) > 0
    inside_outer = (_rect_count(ps_h, *fb.outer_h) + _rect_count(ps_v, *fb.outer_v)) == total
    return touch_hole & ~inside_outer


def _edges_to_arrays(edges) -> tuple[np.ndarray, np.ndarray]:
    h, v = [], []
    for (a, b) in edges:
        if a[1] == b[1]:
            h.append((min(a[0], b[0]) // 2, a[1] // 2))
        else:
            v.append((a[0] // 2, min(a[1], b[1]) // 2))
    return (np.array(h, dtype=np.int64).reshape(-1, 2),
            np.array(v, dtype=np.int64).reshape(-1, 2))


def _rect_pair_thresholds(a: PolyAnnulus, n: int) -> tuple[int, ...]:
    """Integer doubled-coordinate thresholds for exact crossing tests."""
    s = 2 * n
    ax1, ay1, ax2, ay2 = (Fraction(c) * s for c in a.inner_rect())
    ox1, oy1, ox2, oy2 = (Fraction(c) * s for c in a.outer_rect())
    return (_cei(ax1), _cei(ay1), _flo(ax2), _flo(ay2),
            _flo(ox1) + 1, _flo(oy1) + 1, _cei(ox2) - 1, _cei(oy2) - 1)


_threshold_cache: dict[tuple, tuple[int, ...]] = {}


def crosses_rect_fast(k: Config, a: PolyAnnulus) -> bool:
    """Exact crossing for a rectangle-pair annulus via the component
    criterion (meets the closed hole, escapes the open outer interior).

    Integer thresholds and vectorized per-component reductions; agrees with
    the clipped union-find route bit for bit.
    """
    if not a.is_rect_pair():
        raise ValueError("fast path requires a rectangle pair")
    if not k.open_edges:
        return False
    n = k.support.geometry.n
    key = (id(a), n)
    th = _threshold_cache.get(key)
    if th is None:
        th = _rect_pair_thresholds(a, n)
        _threshold_cache[key] = th
    ax1, ay1, ax2, ay2, sx1, sy1, sx2, sy2 = th

    edges = sorted(k.open_edges)
    labels = _component_labels(edges)
    arr = np.array(edges, dtype=np.int64).reshape(len(edges), 4)
    lox = np.minimum(arr[:, 0], arr[:, 2])
    hix = np.maximum(arr[:, 0], arr[:, 2])
    loy = np.minimum(arr[:, 1], arr[:, 3])
    hiy = np.maximum(arr[:, 1], arr[:, 3])
    touch = (lox <= ax2) & (hix >= ax1) & (loy <= ay2) & (hiy >= ay1)
    inside = (lox >= sx1) & (hix <= sx2) & (loy >= sy1) & (hiy <= sy2)
    ncomp = labels.max() + 1
    touch_comp = np.bincount(labels[touch], minlength=ncomp) > 0
    escape_comp = np.bincount(labels[~inside], minlength=ncomp) > 0
    return bool((touch_comp & escape_comp).any())


def _component_labels(edges: list) -> np.ndarray:
    parent: dict = {}

    def find(x):
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for (u, v) in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
    roots = {}
    out = np.empty(len(edges), dtype=np.int64)
    for i, (u, _) in enumerate(edges):
        r = find(u)
        out[i] = roots.setdefault(r, len(roots))
    return out


def _open_edge_components(k: Config) -> list[frozenset]:
    adj: dict = {}
    for a, b in k.open_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen: set = set()
    comps = []
    for root in sorted(adj):
        if root in seen:
            continue
        stack = [root]
        seen.add(root)
        verts = {root}
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    verts.add(w)
                    stack.append(w)
        comps.append(frozenset(e for e in k.open_edges if e[0] in verts))
    return comps


def fingerprint(s, family: DyadicFamily) -> CrossingFingerprint:
    """Crossed-annulus bits over the family for a Config or a decomposition's
    loops; hereditary by construction of the crossing event.

    Works on sourced configs too: the bits only need the connected
    components of the open-edge set, not a loop structure.
    """
    if isinstance(s, Config):
        n = s.support.geometry.n
        comps = _open_edge_components(s)
    else:
        loops, n = s
        loops = [ll.loop if hasattr(ll, "loop") else ll for ll in loops]
        if loops and not isinstance(loops[0], DiscreteLoop):
            return _fingerprint_point_loops(loops, family)
        comps = [l.edge_set() for l in loops]
    fb = _family_bounds(family, n)
    bits = np.zeros(len(family), dtype=bool)
    for comp in comps:
        h, v = _edges_to_arrays(comp)
        if len(h) and not (0 <= h.min() and h[:, 0].max() < n and h[:, 1].max() <= n):
            raise ValueError("config extends outside the family window")
        if len(v) and not (0 <= v.min() and v[:, 0].max() <= n and v[:, 1].max() < n):
            raise ValueError("config extends outside the family window")
        bits |= _component_bits(h, v, fb)
    return CrossingFingerprint(family, bits)


def _fingerprint_point_loops(loops, family: DyadicFamily) -> CrossingFingerprint:
    """Crossing bits for polygonal point loops: a connected loop crosses iff
    it meets the closed hole and escapes the open outer interior.  Exact for
    dyadic coordinates (binary floats)."""
    bits = np.zeros(len(family), dtype=bool)
    if len(family) == 0:
        return CrossingFingerprint(family, bits)
    gx = np.array([float(v) for v in family.grid_x])
    gy = np.array([float(v) for v in family.grid_y])
    q = family.quads
    ix1, iy1 = gx[q[:, 4]], gy[q[:, 5]]
    ix2, iy2 = gx[q[:, 6]], gy[q[:, 7]]
    ox1, oy1 = gx[q[:, 0]], gy[q[:, 1]]
    ox2, oy2 = gx[q[:, 2]], gy[q[:, 3]]
    for loop in loops:
        segs = loop_segments(loop)
        lox = np.array([min(float(a[0]), float(b[0])) for a, b in segs])
        hix = np.array([max(float(a[0]), float(b[0])) for a, b in segs])
        loy = np.array([min(float(a[1]), float(b[1])) for a, b in segs])
        hiy = np.array([max(float(a[1]), float(b[1])) for a, b in segs])
        touch = ((lox[:, None] <= ix2) & (hix[:, None] >= ix1)
                 & (loy[:, None] <= iy2) & (hiy[:, None] >= iy1)).any(0)
        inside = ((lox[:, None] > ox1) & (hix[:, None] < ox2)
                  & (loy[:, None] > oy1) & (hiy[:, None] < oy2)).all(0)
        bits |= touch & ~inside
    return CrossingFingerprint(family, bits)
