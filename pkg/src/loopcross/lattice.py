"""Square-lattice geometry in doubled integer coordinates.

The mesh 1/n is represented by storing every coordinate as an integer in
units of 1/(2n): primal vertices are (even, even) pairs, dual vertices
(odd, odd) pairs.  All topology predicates below are exact integer
arithmetic; nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]

# doubled-unit steps between lattice neighbours
STEPS: tuple[Vertex, ...] = ((2, 0), (-2, 0), (0, 2), (0, -2))


class LoopClass(Enum):
    SIMPLE = "simple"
    WEAKLY_SIMPLE = "weakly_simple"
    NON_SELF_CROSSING = "non_self_crossing"
    GENERAL = "general"


class Orientation(Enum):
    CW = "CW"
    CCW = "CCW"
    UNDEFINED = "undefined"


class MalformedLoopError(ValueError):
    pass


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GridGeometry:
    """Mesh parameter n (spacing 1/n); coordinates live in 1/(2n) units."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GeometryError(f"mesh parameter must be >= 1, got {self.n}")

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.n)

    @staticmethod
    def is_primal(v: Vertex) -> bool:
        return v[0] % 2 == 0 and v[1] % 2 == 0

    @staticmethod
    def is_dual(v: Vertex) -> bool:
        return v[0] % 2 == 1 and v[1] % 2 == 1

    def to_plane(self, v: Vertex) -> tuple[Fraction, Fraction]:
        return Fraction(v[0], 2 * self.n), Fraction(v[1], 2 * self.n)


def neighbors(v: Vertex) -> tuple[Vertex, ...]:
    return tuple((v[0] + dx, v[1] + dy) for dx, dy in STEPS)


def are_neighbors(u: Vertex, v: Vertex) -> bool:
    return abs(u[0] - v[0]) + abs(u[1] - v[1]) == 2 and (u[0] == v[0] or u[1] == v[1])


def edge(u: Vertex, v: Vertex) -> Edge:
    """Canonical (lexicographically sorted) edge id."""
    if not are_neighbors(u, v):
        raise GeometryError(f"{u} and {v} are not lattice neighbours")
    return (u, v) if u <= v else (v, u)


def edge_midpoint(e: Edge) -> Vertex:
    # odd in exactly one coordinate
    return ((e[0][0] + e[1][0]) // 2, (e[0][1] + e[1][1]) // 2)


def dual_edge(e: Edge) -> Edge:
    """The unique dual-lattice edge crossing e; an involution."""
    (ax, ay), (bx, by) = e
    mx, my = (ax + bx) // 2, (ay + by) // 2
    if ay == by:  # horizontal edge -> vertical dual through the midpoint
        return edge((mx, my - 1), (mx, my + 1))
    if ax == bx:
        return edge((mx - 1, my), (mx + 1, my))
    raise GeometryError(f"not an axis-aligned lattice edge: {e}")


@dataclass(frozen=True)
class Subgraph:
    """A loosely coupled (vertex set, edge set) pair on one lattice.

    Edge endpoints are not required to be members of `vertices`; several
    derived objects (incident-edge hulls, graph differences) are exactly
    of that dangling form.
    """

    geometry: GridGeometry
    vertices: frozenset[Vertex]
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for e in self.edges:
            if not are_neighbors(*e) or e[0] > e[1]:
                raise GeometryError(f"non-canonical or malformed edge {e}")

    @staticmethod
    def empty(geometry: GridGeometry) -> "Subgraph":
        return Subgraph(geometry, frozenset(), frozenset())

    def union(self, other: "Subgraph") -> "Subgraph":
        return Subgraph(self.geometry, self.vertices | other.vertices, self.edges | other.edges)

    def difference(self, other: "Subgraph") -> "Subgraph":
        return Subgraph(self.geometry, self.vertices - other.vertices, self.edges - other.edges)

    def is_edge_subset_of(self, other: "Subgraph") -> bool:
        return self.edges <= other.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def block(geometry: GridGeometry, x0: int, y0: int, x1: int, y1: int) -> Subgraph:
    """Full primal block on doubled coordinates [x0,x1] x [y0,y1] (all even)."""
    vs = set()
    es = set()
    for x in range(x0, x1 + 1, 2):
        for y in range(y0, y1 + 1, 2):
            vs.add((x, y))
            if x + 2 <= x1:
                es.add(edge((x, y), (x + 2, y)))
            if y + 2 <= y1:
                es.add(edge((x, y), (x, y + 2)))
    return Subgraph(geometry, frozenset(vs), frozenset(es))


def boundary(g: Subgraph) -> set[Vertex]:
    """Vertices of g with at least one lattice neighbour outside V(g)."""
    return {v for v in g.vertices if any(w not in g.vertices for w in neighbors(v))}


# ---------------------------------------------------------------------------
# loops


@dataclass(frozen=True)
class DiscreteLoop:
    """Closed lattice walk, stored without the repeated final vertex.

    Two loops are equal when one cyclic rotation matches the other; the
    traversal direction is part of the identity.
    """

    vertices: tuple[Vertex, ...]
    loop_class: LoopClass
    orientation: Orientation

    def __post_init__(self) -> None:
        if not self.vertices:
            raise MalformedLoopError("empty loop")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteLoop):
            return NotImplemented
        a, b = self.vertices, other.vertices
        if len(a) != len(b):
            return False
        if len(a) == 1:
            return a == b
        doubled = b + b
        return any(doubled[k : k + len(a)] == a for k in range(len(b)))

    def __hash__(self) -> int:
        # rotation-invariant: pick the lexicographically least rotation
        a = self.vertices
        if len(a) == 1:
            return hash(a)
        doubled = a + a
        best = min(doubled[k : k + len(a)] for k in range(len(a)))
        return hash(best)

    def __len__(self) -> int:
        return len(self.vertices)

    def closed(self) -> tuple[Vertex, ...]:
        return self.vertices + (self.vertices[0],)

    def edge_list(self) -> list[Edge]:
        c = self.closed()
        return [edge(c[i], c[i + 1]) for i in range(len(c) - 1)]

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edge_list())

    def vertex_set(self) -> frozenset[Vertex]:
        return frozenset(self.vertices)

    def same_plane_set(self, other: "DiscreteLoop") -> bool:
        return self.edge_set() == other.edge_set()

    def reversed(self) -> "DiscreteLoop":
        rev = (self.vertices[0],) + tuple(reversed(self.vertices[1:]))
        flip = {Orientation.CW: Orientation.CCW, Orientation.CCW: Orientation.CW}
        return DiscreteLoop(rev, self.loop_class, flip.get(self.orientation, Orientation.UNDEFINED))

    def diameter_sq(self) -> int:
        """Squared Euclidean diameter in doubled units."""
        vs = self.vertices
        best = 0
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                d = (vs[i][0] - vs[j][0]) ** 2 + (vs[i][1] - vs[j][1]) ** 2
                if d > best:
                    best = d
        return best


def signed_area_doubled(cycle: Sequence[Vertex]) -> int:
    """Twice the shoelace area of the closed polyline (doubled coords)."""
    total = 0
    m = len(cycle)
    for i in range(m):
        x0, y0 = cycle[i]
        x1, y1 = cycle[(i + 1) % m]
        total += x0 * y1 - x1 * y0
    return total


def classify_loop(cycle: Sequence[Vertex]) -> tuple[LoopClass, Orientation]:
    """Classify a closed neighbour walk and orient it when meaningful.

    `cycle` may or may not repeat its first vertex at the end.  Orientation
    is the sign of the shoelace area and is reported for weakly simple
    loops only.
    """
    seq = list(cycle)
    if len(seq) >= 2 and seq[0] == seq[-1]:
        seq = seq[:-1]
    if not seq:
        raise MalformedLoopError("empty loop")
    m = len(seq)
    if m == 1:
        return LoopClass.SIMPLE, Orientation.UNDEFINED
    for i in range(m):
        if not are_neighbors(seq[i], seq[(i + 1) % m]):
            raise MalformedLoopError(f"consecutive vertices not neighbours: {seq[i]} {seq[(i + 1) % m]}")

    edges_list = [edge(seq[i], seq[(i + 1) % m]) for i in range(m)]
    edges_distinct = len(set(edges_list)) == m
    oriented = {(seq[i], seq[(i + 1) % m]) for i in range(m)}
    oriented_distinct = len(oriented) == m

    if m == len(set(seq)) and edges_distinct:
        area = signed_area_doubled(seq)
        return LoopClass.SIMPLE, (Orientation.CCW if area > 0 else Orientation.CW)

    # map vertex -> list of visit positions
    visits: dict[Vertex, list[int]] = {}
    for i, v in enumerate(seq):
        visits.setdefault(v, []).append(i)

    def turn_perpendicular(i: int) -> bool:
        prev_v = seq[(i - 1) % m]
        next_v = seq[(i + 1) % m]
        return prev_v[0] != next_v[0] and prev_v[1] != next_v[1]

    if edges_distinct:
        edge_set = set(edges_list)
        weakly = True
        for v, pos in visits.items():
            all_incident_in = all(edge(v, w) in edge_set for w in neighbors(v))
            if all_incident_in and not all(turn_perpendicular(i) for i in pos):
                weakly = False
                break
        if weakly:
            area = signed_area_doubled(seq)
            if area != 0:
                return LoopClass.WEAKLY_SIMPLE, (Orientation.CCW if area > 0 else Orientation.CW)
            return LoopClass.WEAKLY_SIMPLE, Orientation.UNDEFINED

    if oriented_distinct:
        crossing = False
        for v, pos in visits.items():
            straight = [i for i in pos if not turn_perpendicular(i)]
            # two straight passes on orthogonal lines = a transversal crossing
            for a in range(len(straight)):
                for b in range(a + 1, len(straight)):
                    da = seq[(straight[a] + 1) % m][0] - seq[(straight[a] - 1) % m][0]
                    db = seq[(straight[b] + 1) % m][0] - seq[(straight[b] - 1) % m][0]
                    if (da == 0) != (db == 0):
                        crossing = True
            if crossing:
                break
        if not crossing:
            return LoopClass.NON_SELF_CROSSING, Orientation.UNDEFINED

    return LoopClass.GENERAL, Orientation.UNDEFINED


def make_loop(cycle: Sequence[Vertex]) -> DiscreteLoop:
    cls, orient = classify_loop(cycle)
    seq = tuple(cycle)
    if len(seq) >= 2 and seq[0] == seq[-1]:
        seq = seq[:-1]
    return DiscreteLoop(seq, cls, orient)


# ---------------------------------------------------------------------------
# point-in-loop tests (exact: rays cast from off-lattice parities)


def point_inside_loop(p: Vertex, cycle: Sequence[Vertex]) -> bool:
    """Even-odd test for a point strictly off the loop's carrier lines.

    The loop runs on one parity class; p must have the opposite parity in
    at least one coordinate so the ray never meets a loop vertex.
    """
    px, py = p
    seq = list(cycle)
    if seq[0] == seq[-1]:
        seq = seq[:-1]
    m = len(seq)
    if py % 2 != seq[0][1] % 2:
        # horizontal ray to +x crosses vertical segments only
        count = 0
        for i in range(m):
            (x0, y0), (x1, y1) = seq[i], seq[(i + 1) % m]
            if x0 == x1 and x0 > px and min(y0, y1) < py < max(y0, y1):
                count += 1
        return count % 2 == 1
    if px % 2 != seq[0][0] % 2:
        count = 0
        for i in range(m):
            (x0, y0), (x1, y1) = seq[i], seq[(i + 1) % m]
            if y0 == y1 and y0 > py and min(x0, x1) < px < max(x0, x1):
                count += 1
        return count % 2 == 1
    raise GeometryError(f"point {p} shares both carrier parities with the loop")


def point_on_loop(p: Vertex, cycle: Sequence[Vertex]) -> bool:
    seq = list(cycle)
    if seq[0] == seq[-1]:
        seq = seq[:-1]
    m = len(seq)
    for i in range(m):
        (x0, y0), (x1, y1) = seq[i], seq[(i + 1) % m]
        if x0 == x1 == p[0] and min(y0, y1) <= p[1] <= max(y0, y1):
            return True
        if y0 == y1 == p[1] and min(x0, x1) <= p[0] <= max(x0, x1):
            return True
    return False


def vertex_inside_or_on(p: Vertex, cycle: Sequence[Vertex]) -> bool:
    return point_on_loop(p, cycle) or _strictly_inside(p, cycle)


def _strictly_inside(p: Vertex, cycle: Sequence[Vertex]) -> bool:
    # a same-parity point not on the loop: perturb via midpoint trick is not
    # needed; cast a horizontal ray counting crossings of vertical segments,
    # treating segment endpoints at the ray height by the half-open rule.
    px, py = p
    seq = list(cycle)
    if seq[0] == seq[-1]:
        seq = seq[:-1]
    m = len(seq)
    count = 0
    for i in range(m):
        (x0, y0), (x1, y1) = seq[i], seq[(i + 1) % m]
        if x0 == x1 and x0 > px:
            lo, hi = min(y0, y1), max(y0, y1)
            if lo <= py < hi:  # half-open: counts each height once
                count += 1
    return count % 2 == 1


def outside_dual_endpoint(e: Edge, cycle: Sequence[Vertex]) -> Vertex:
    """Endpoint of dual_edge(e) lying outside the loop traversing e."""
    d = dual_edge(e)
    a_in = point_inside_loop(d[0], cycle)
    b_in = point_inside_loop(d[1], cycle)
    if a_in == b_in:
        raise GeometryError(f"edge {e} does not separate the sides of the loop")
    return d[1] if a_in else d[0]


def surrounds(dual_loop: DiscreteLoop, primal_loop: DiscreteLoop) -> bool:
    """True iff every loop edge's outside dual endpoint lies on dual_loop."""
    if dual_loop.loop_class is not LoopClass.SIMPLE:
        raise GeometryError("surrounding circuit must be simple")
    if primal_loop.loop_class in (LoopClass.NON_SELF_CROSSING, LoopClass.GENERAL):
        raise GeometryError("surrounded loop must be weakly simple")
    dv = dual_loop.vertex_set()
    cyc = primal_loop.closed()
    return all(outside_dual_endpoint(e, cyc) in dv for e in primal_loop.edge_set())


def outer_contour(loop: DiscreteLoop) -> list[Edge]:
    """Dual edges crossing the outward-pointing lattice edges along a loop.

    For a weakly simple loop these form the immediate surrounding circuit.
    """
    cyc = loop.closed()
    es = loop.edge_set()
    out: set[Edge] = set()
    for v in loop.vertex_set():
        for w in neighbors(v):
            e = edge(v, w)
            if e in es:
                continue
            mid = edge_midpoint(e)
            if not point_inside_loop(mid, cyc):
                out.add(dual_edge(e))
    return sorted(out)


def assemble_circuit(edges_set: Iterable[Edge]) -> DiscreteLoop | None:
    """Assemble a set of edges into one simple circuit, or None."""
    adj: dict[Vertex, list[Vertex]] = {}
    count = 0
    for a, b in edges_set:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
        count += 1
    if count == 0 or any(len(v) != 2 for v in adj.values()):
        return None
    start = min(adj)
    seq = [start]
    prev = None
    cur = start
    while True:
        nxt = [w for w in adj[cur] if w != prev]
        if not nxt:
            return None
        prev, cur = cur, nxt[0] if nxt[0] != prev else nxt[-1]
        if cur == start:
            break
        seq.append(cur)
        if len(seq) > count:
            return None
    if len(seq) != count:
        return None  # disconnected: leftover edges elsewhere
    cls, orient = classify_loop(seq)
    if cls is not LoopClass.SIMPLE:
        return None
    return DiscreteLoop(tuple(seq), cls, orient)


# ---------------------------------------------------------------------------
# discs, annuli, domain discretization


def trace_outer_boundary(g: Subgraph) -> list[Vertex]:
    """Outer-face walk of a connected subgraph, outside kept on the right."""
    if not g.vertices:
        raise GeometryError("empty subgraph has no boundary walk")
    start = min(g.vertices)
    incident = {v: [] for v in g.vertices}
    for a, b in g.edges:
        incident[a].append(b)
        incident[b].append(a)
    if not incident[start]:
        return [start]
    # directions ordered so "try right of incoming, then straight, then left,
    # then back" walks the outer face with the region on the left
    order = {(2, 0): [(0, -2), (2, 0), (0, 2), (-2, 0)],
             (0, 2): [(2, 0), (0, 2), (-2, 0), (0, -2)],
             (-2, 0): [(0, 2), (-2, 0), (0, -2), (2, 0)],
             (0, -2): [(-2, 0), (0, -2), (2, 0), (0, 2)]}
    # start heading east if possible (bottom-left corner: E or N exist)
    for d0 in ((2, 0), (0, 2), (-2, 0), (0, -2)):
        if (start[0] + d0[0], start[1] + d0[1]) in incident[start]:
            break
    walk = [start]
    cur, d = start, d0
    es = {frozenset(e) for e in g.edges}
    while True:
        nxt = (cur[0] + d[0], cur[1] + d[1])
        walk.append(nxt)
        cur = nxt
        for cand in order[d]:
            if frozenset((cur, (cur[0] + cand[0], cur[1] + cand[1]))) in es:
                d = cand
                break
        else:
            raise GeometryError("boundary walk stuck (dangling edge?)")
        if cur == start and d == d0:
            break
    return walk[:-1]


@dataclass(frozen=True)
class DiscreteDisc:
    """Subgraph whose inner boundary is traversed by a non-self-crossing loop."""

    graph: Subgraph
    boundary_loop: DiscreteLoop

    @property
    def geometry(self) -> GridGeometry:
        return self.graph.geometry


@dataclass(frozen=True)
class DiscreteAnnulus:
    graph: Subgraph
    inner_loop: DiscreteLoop
    outer_loop: DiscreteLoop

    def __post_init__(self) -> None:
        cyc = self.outer_loop.closed()
        for v in self.inner_loop.vertices:
            if not (point_on_loop(v, cyc) or _strictly_inside(v, cyc)):
                raise GeometryError("inner boundary loop is not inside the outer one")


def certify_disc(g: Subgraph) -> DiscreteDisc:
    """Check that g is a disc and return it with its traced boundary loop."""
    if not g.vertices:
        raise GeometryError("empty subgraph is not a disc")
    walk = trace_outer_boundary(g)
    if len(walk) == 1:
        loop = DiscreteLoop((walk[0],), LoopClass.SIMPLE, Orientation.UNDEFINED)
        if boundary_set_of(g) != {walk[0]} or len(g.vertices) != 1:
            raise GeometryError("isolated boundary walk on a larger graph")
        return DiscreteDisc(g, loop)
    cls, orient = classify_loop(walk)
    if cls is LoopClass.GENERAL:
        raise GeometryError("boundary walk self-crosses; not a disc")
    # the walk may pass through reflex corners whose four neighbours are all
    # inside; it must still cover every boundary vertex (holes leave an
    # inner boundary component unvisited)
    if not boundary_set_of(g) <= set(walk):
        raise GeometryError("boundary walk misses boundary vertices (hole?)")
    return DiscreteDisc(g, DiscreteLoop(tuple(walk), cls, orient))


def boundary_set_of(g: Subgraph) -> set[Vertex]:
    return boundary(g)


def disc_of_loop(gamma: DiscreteLoop, ambient: Subgraph) -> Subgraph:
    """[gamma]: the part of the ambient graph inside-or-on gamma."""
    cyc = gamma.closed()
    gamma_edges = gamma.edge_set()
    vs = {v for v in ambient.vertices if point_on_loop(v, cyc) or _strictly_inside(v, cyc)}
    es = set()
    for e in ambient.edges:
        if e in gamma_edges:
            es.add(e)
            continue
        mid = edge_midpoint(e)
        if point_on_loop(mid, cyc) or point_inside_loop(mid, cyc):
            es.add(e)
    return Subgraph(ambient.geometry, frozenset(vs), frozenset(es))


def dual_disc(disc: DiscreteDisc) -> DiscreteDisc:
    """Dual disc: centres of all faces whose closure meets V(disc)."""
    faces: set[Vertex] = set()
    for (x, y) in disc.graph.vertices:
        for dx in (-1, 1):
            for dy in (-1, 1):
                faces.add((x + dx, y + dy))
    es = set()
    for (x, y) in faces:
        if (x + 2, y) in faces:
            es.add(edge((x, y), (x + 2, y)))
        if (x, y + 2) in faces:
            es.add(edge((x, y), (x, y + 2)))
    g = Subgraph(disc.geometry, frozenset(faces), frozenset(es))
    return certify_disc(g)


def _rect_to_doubled(rect: tuple, n: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    x0, y0, x1, y1 = (Fraction(c) for c in rect)
    if not (x0 < x1 and y0 < y1):
        raise GeometryError("degenerate rectangle spec")
    return x0, y0, x1, y1


def discretize_domain(domain_spec, n: int) -> DiscreteDisc:
    """Largest mesh-1/n disc contained in an axis-aligned rectangle or
    rectilinear polygon (corner list, dyadic coordinates).

    Built from the unit cells wholly contained in the domain; the largest
    edge-connected cell component is kept.
    """
    geom = GridGeometry(n)
    if isinstance(domain_spec, tuple) and len(domain_spec) == 4 and not isinstance(domain_spec[0], tuple):
        x0, y0, x1, y1 = _rect_to_doubled(domain_spec, n)
        inside = lambda px, py: x0 <= px and px <= x1 and y0 <= py and py <= y1  # noqa: E731
        bounds = (x0, y0, x1, y1)
    else:
        corners = [(Fraction(a), Fraction(b)) for a, b in domain_spec]
        xs = [c[0] for c in corners]
        ys = [c[1] for c in corners]
        bounds = (min(xs), min(ys), max(xs), max(ys))

        def inside(px: Fraction, py: Fraction) -> bool:
            return _point_in_rectilinear(px, py, corners)

    delta = Fraction(1, n)
    ix0 = int(bounds[0] / delta) - 1
    ix1 = int(bounds[2] / delta) + 1
    iy0 = int(bounds[1] / delta) - 1
    iy1 = int(bounds[3] / delta) + 1
    cells = set()
    for i in range(ix0, ix1 + 1):
        for j in range(iy0, iy1 + 1):
            corners4 = [(i * delta, j * delta), ((i + 1) * delta, j * delta),
                        ((i + 1) * delta, (j + 1) * delta), (i * delta, (j + 1) * delta)]
            if all(inside(px, py) for px, py in corners4):
                cells.add((i, j))
    if not cells:
        raise GeometryError("domain too small to contain a lattice cell")
    comp = _largest_cell_component(cells)
    vs = set()
    es = set()
    for (i, j) in comp:
        q = [(2 * i, 2 * j), (2 * i + 2, 2 * j), (2 * i + 2, 2 * j + 2), (2 * i, 2 * j + 2)]
        vs.update(q)
        for k in range(4):
            es.add(edge(q[k], q[(k + 1) % 4]))
    return certify_disc(Subgraph(geom, frozenset(vs), frozenset(es)))


def _largest_cell_component(cells: set[tuple[int, int]]) -> set[tuple[int, int]]:
    remaining = set(cells)
    best: set[tuple[int, int]] = set()
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            i, j = stack.pop()
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in remaining:
                    remaining.remove(nb)
                    comp.add(nb)
                    stack.append(nb)
        if len(comp) > len(best):
            best = comp
    return best


def _point_in_rectilinear(px: Fraction, py: Fraction, corners: list) -> bool:
    """Closed-region membership for a rectilinear simple polygon."""
    m = len(corners)
    for i in range(m):
        (ax, ay), (bx, by) = corners[i], corners[(i + 1) % m]
        if ax == bx == px and min(ay, by) <= py <= max(ay, by):
            return True
        if ay == by == py and min(ax, bx) <= px <= max(ax, bx):
            return True
    count = 0
    for i in range(m):
        (ax, ay), (bx, by) = corners[i], corners[(i + 1) % m]
        if ax == bx and ax > px:
            lo, hi = min(ay, by), max(ay, by)
            if lo <= py < hi:
                count += 1
    return count % 2 == 1
