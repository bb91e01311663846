"""Decomposition of sourceless configurations into levelled oriented loops.

Works in two passes: peel loops level by level from the outside (levels
are certified by connectivity to the dual boundary through closed edges),
then concatenate each level's non-seed loops into the outmost seeds so the
final loops are pairwise vertex-disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import (
    DiscreteDisc,
    DiscreteLoop,
    Edge,
    LoopClass,
    Orientation,
    Vertex,
    assemble_circuit,
    classify_loop,
    dual_disc,
    dual_edge,
    edge,
    neighbors,
    outer_contour,
    surrounds,
)
from .percolation import Config, source_set


class SourcedConfigError(ValueError):
    pass


class DecompositionError(RuntimeError):
    pass


@dataclass(frozen=True)
class LevelledLoop:
    loop: DiscreteLoop
    level: int

    @property
    def orientation(self) -> Orientation:
        return self.loop.orientation

    def __post_init__(self) -> None:
        want = Orientation.CW if self.level % 2 == 1 else Orientation.CCW
        if self.loop.orientation is not want:
            raise DecompositionError(
                f"level {self.level} loop must be {want.value}, got {self.loop.orientation.value}"
            )


@dataclass(frozen=True)
class LoopDecomposition:
    loops: tuple[LevelledLoop, ...]
    source_config: Config
    max_level: int
    seed_loops: tuple[DiscreteLoop, ...] = ()  # outmost seed of each chain

    def edge_sets(self) -> list[frozenset[Edge]]:
        return [ll.loop.edge_set() for ll in self.loops]


def dual_config_edges(k: Config, dual: DiscreteDisc) -> set[Edge]:
    """Open dual edges: complements of open primal support edges, plus every
    dual edge whose primal counterpart is outside the support."""
    out = set()
    for e in dual.graph.edges:
        pe = dual_edge(e)
        if pe in k.support.edges:
            if pe not in k.open_edges:
                out.add(e)
        else:
            out.add(e)
    return out


def _dual_reach_order(open_dual: set[Edge], dual: DiscreteDisc) -> dict[Vertex, int]:
    """BFS over open dual edges from the dual boundary; discovery ranks
    resolve traversal ties deterministically."""
    adj: dict[Vertex, list[Vertex]] = {}
    for a, b in open_dual:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v in adj:
        adj[v].sort()
    start = sorted(dual.boundary_loop.vertex_set())
    order: dict[Vertex, int] = {}
    queue: list[Vertex] = []
    for v in start:
        order[v] = len(order)
        queue.append(v)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for w in adj.get(v, ()):
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    return order


def _exposed_edges(open_edges: set[Edge], reach: dict[Vertex, int]) -> set[Edge]:
    out = set()
    for e in open_edges:
        d = dual_edge(e)
        if d[0] in reach or d[1] in reach:
            out.add(e)
    return out


def _walk_loop(start_edge: Edge, open_edges: set[Edge],
               reach: dict[Vertex, int]) -> list[Vertex]:
    """Trace one peeled loop starting on the smallest exposed edge.

    At straight-degree-2 vertices the continuation is forced; at degree-4
    vertices the walk turns perpendicular toward the dual endpoint of the
    incoming edge that the boundary BFS discovered first.
    """
    x0, x1 = start_edge
    seq = [x0, x1]
    while True:
        prev, cur = seq[-2], seq[-1]
        incident = [w for w in neighbors(cur) if edge(cur, w) in open_edges]
        if len(incident) == 2:
            nxt = incident[0] if incident[1] == prev else incident[1]
        elif len(incident) == 4:
            d_in = dual_edge(edge(prev, cur))
            ranked = sorted((reach[p], p) for p in d_in if p in reach)
            if not ranked:
                raise DecompositionError("incoming edge lost dual exposure mid-walk")
            y = ranked[0][1]
            cand = [w for w in incident
                    if w != prev and y in dual_edge(edge(cur, w))]
            if len(cand) != 1:
                raise DecompositionError("ambiguous perpendicular continuation")
            nxt = cand[0]
        else:
            raise DecompositionError(f"odd open degree at {cur}; configuration has a source")
        if nxt == seq[0]:
            return seq
        seq.append(nxt)


def peel_levels(k: Config, disc: DiscreteDisc) -> tuple[list[list[DiscreteLoop]], list[Config]]:
    """Peel the boundary-exposed loops off level by level.

    Returns the per-level loop collections (already oriented by level
    parity) and the residual configs after each level.
    """
    if source_set(k, disc.graph):
        raise SourcedConfigError("peeling requires a sourceless configuration")
    dual = dual_disc(disc)
    levels: list[list[DiscreteLoop]] = []
    residuals: list[Config] = []
    remaining = set(k.open_edges)
    level = 0
    while remaining:
        level += 1
        open_dual = dual_config_edges(Config(k.support, frozenset(remaining)), dual)
        reach = _dual_reach_order(open_dual, dual)
        exposed = _exposed_edges(remaining, reach)
        if not exposed:
            raise DecompositionError("open edges left but nothing is exposed")
        this_level: list[DiscreteLoop] = []
        peeled: set[Edge] = set()
        while True:
            fresh = sorted(exposed - peeled)
            if not fresh:
                break
            seq = _walk_loop(fresh[0], remaining, reach)
            loop = _orient_for_level(seq, level)
            this_level.append(loop)
            peeled |= loop.edge_set()
        bad = peeled - exposed
        if bad:
            raise DecompositionError(f"walk consumed unexposed edges: {sorted(bad)[:3]}")
        levels.append(this_level)
        remaining -= peeled
        residuals.append(Config(k.support, frozenset(remaining)))
    return levels, residuals


def _orient_for_level(seq: list[Vertex], level: int) -> DiscreteLoop:
    cls, orient = classify_loop(seq)
    if cls in (LoopClass.NON_SELF_CROSSING, LoopClass.GENERAL):
        raise DecompositionError("peeled walk is not weakly simple")
    want = Orientation.CW if level % 2 == 1 else Orientation.CCW
    loop = DiscreteLoop(tuple(seq), cls, orient)
    return loop if orient is want else loop.reversed()


def is_outmost(loop: DiscreteLoop, k: Config) -> bool:
    """Outmost: no open edge of k touches the loop from its outside.

    Equivalently the loop's immediate outer dual contour runs on closed
    edges only.  When that contour assembles into a simple circuit it is
    verified with the surround predicate; chords and one-cell notches can
    make the contour branch, in which case the contour circuit degenerates
    but the untouched-from-outside property is still exactly what the seed
    selection needs.
    """
    contour = outer_contour(loop)
    open_edges = k.open_edges
    for d in contour:
        pe = dual_edge(d)
        if pe in k.support.edges and pe in open_edges:
            return False
    if loop.loop_class is LoopClass.SIMPLE:
        # for simple loops the outside of every edge is unambiguous and the
        # assembled contour must surround; self-touching loops can enclose
        # pockets where the limit definition of "outside" is not unique
        circuit = assemble_circuit(contour)
        if circuit is not None and not surrounds(circuit, loop):
            raise DecompositionError("contour circuit fails the surround predicate")
    return True


def concat_condition_holds(l: DiscreteLoop, l2: DiscreteLoop, z: Vertex) -> bool:
    """Shared vertex z admits splicing: predecessor triple and successor
    triple each lie on one straight line."""
    try:
        k = l.vertices.index(z)
        k2 = l2.vertices.index(z)
    except ValueError:
        return False
    n, n2 = len(l.vertices), len(l2.vertices)
    pa, sa = l.vertices[(k - 1) % n], l.vertices[(k + 1) % n]
    pb, sb = l2.vertices[(k2 - 1) % n2], l2.vertices[(k2 + 1) % n2]
    col = lambda u, v, w: (u[0] == v[0] == w[0]) or (u[1] == v[1] == w[1])  # noqa: E731
    return col(pa, z, pb) and col(sa, z, sb)


def concatenate(l: DiscreteLoop, l2: DiscreteLoop, start_vertex: Vertex) -> DiscreteLoop:
    """Splice two weakly disjoint weakly simple loops into one.

    Walk l from start_vertex to the first shared vertex where the straight-
    line condition holds, run all of l2 from there, then finish l.
    """
    if l.edge_set() & l2.edge_set():
        raise DecompositionError("loops are not weakly disjoint")
    if start_vertex not in l.vertex_set():
        raise DecompositionError("start vertex not on the first loop")
    s = l.vertices.index(start_vertex)
    a = l.vertices[s:] + l.vertices[:s]
    shared = l.vertex_set() & l2.vertex_set()
    if not shared:
        raise DecompositionError("loops share no vertex")
    k = next((i for i, v in enumerate(a) if v in shared and concat_condition_holds(l, l2, v)), None)
    if k is None:
        raise DecompositionError("no shared vertex satisfies the splice condition")
    z = a[k]
    k2 = l2.vertices.index(z)
    b = l2.vertices[k2:] + l2.vertices[:k2]  # b[0] == z
    merged = a[: k + 1] + b[1:] + (z,) + a[k + 1 :]
    cls, orient = classify_loop(merged)
    if cls in (LoopClass.NON_SELF_CROSSING, LoopClass.GENERAL):
        raise DecompositionError("concatenation is not weakly simple")
    return DiscreteLoop(tuple(merged), cls, orient)


def decompose(k: Config, disc: DiscreteDisc) -> LoopDecomposition:
    """Full decomposition: peel, pick outmost seeds, concatenate inward.

    A chain starts at each outmost peeled loop; every non-seed loop of the
    next level that shares a vertex with a chain is spliced into it, in
    peel order, starting each splice at the chain's smallest vertex.
    """
    if source_set(k, disc.graph):
        raise SourcedConfigError("decomposition requires a sourceless configuration")
    levels, _residuals = peel_levels(k, disc)
    chains: list[tuple[int, DiscreteLoop, DiscreteLoop]] = []  # (level, seed, accumulated)
    for i, level_loops in enumerate(levels, start=1):
        seeds = [is_outmost(loop, k) for loop in level_loops]
        for loop, seed in zip(level_loops, seeds):
            if seed:
                continue
            hosts = [idx for idx, (_, _, acc) in enumerate(chains)
                     if acc.vertex_set() & loop.vertex_set()]
            if len(hosts) != 1:
                raise DecompositionError(
                    f"level-{i} loop touches {len(hosts)} chains; expected exactly one")
            lvl, sd, acc = chains[hosts[0]]
            chains[hosts[0]] = (lvl, sd, concatenate(acc, loop, min(acc.vertex_set())))
        for loop, seed in zip(level_loops, seeds):
            if seed:
                chains.append((i, loop, loop))
    out = []
    seed_loops = []
    covered: set[Edge] = set()
    for lvl, sd, loop in chains:
        want = Orientation.CW if lvl % 2 == 1 else Orientation.CCW
        if loop.orientation is not want:
            raise DecompositionError("concatenation changed the seed orientation")
        out.append(LevelledLoop(loop, lvl))
        seed_loops.append(sd)
        covered |= loop.edge_set()
    if covered != k.open_edges:
        raise DecompositionError("decomposition does not cover the open edges")
    seen: set[Vertex] = set()
    for ll in out:
        vs = ll.loop.vertex_set()
        if vs & seen:
            raise DecompositionError("decomposition loops are not disjoint")
        seen |= vs
    return LoopDecomposition(tuple(out), k, len(levels), tuple(seed_loops))


def component_oracle(k: Config) -> list[frozenset[Edge]]:
    """Independent oracle: connected components of the open-edge set as
    planar subsets, each required to be Eulerian."""
    deg: dict[Vertex, int] = {}
    for a, b in k.open_edges:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    odd = [v for v, d in deg.items() if d % 2 == 1]
    if odd:
        raise SourcedConfigError(f"odd open degree at {sorted(odd)[:3]}: not sourceless")
    adj: dict[Vertex, list[Vertex]] = {}
    for a, b in k.open_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen: set[Vertex] = set()
    comps: list[frozenset[Edge]] = []
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
