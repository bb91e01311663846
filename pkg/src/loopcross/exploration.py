"""Static exploration of a sourceless configuration from outside a loop.

The explored region is the outside of [gamma] together with the incident-
edge hulls of the loops that stick out of it; successful states are those
whose own loops regenerate the region.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import (
    DiscreteDisc,
    DiscreteLoop,
    Subgraph,
    Vertex,
    certify_disc,
    disc_of_loop,
    edge,
)
from .percolation import Config, SupportError, extend_trivially, restrict, source_set
from .loopdecomp import SourcedConfigError, decompose


class AdmissibilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Exploration:
    gamma: DiscreteLoop
    region: Subgraph
    state: Config

    def __post_init__(self) -> None:
        if self.state.support != self.region:
            raise AdmissibilityError("state must be supported on the explored region")


def l_plus(l: DiscreteLoop, disc: DiscreteDisc) -> Subgraph:
    """The loop's graph with every disc edge incident to it added."""
    vs = l.vertex_set()
    es = set(l.edge_set())
    for e in disc.graph.edges:
        if e[0] in vs or e[1] in vs:
            es.add(e)
    return Subgraph(disc.geometry, vs, frozenset(es))


def outside_of(gamma: DiscreteLoop, disc: DiscreteDisc) -> Subgraph:
    return disc.graph.difference(disc_of_loop(gamma, disc.graph))


def _touches(l: DiscreteLoop, outside: Subgraph) -> bool:
    return bool(l.vertex_set() & outside.vertices) or bool(l.edge_set() & outside.edges)


def region_of(loops, gamma: DiscreteLoop, disc: DiscreteDisc) -> Subgraph:
    """U(L): outside of [gamma] plus the hulls of loops meeting it."""
    out = outside_of(gamma, disc)
    region = out
    for l in loops:
        if _touches(l, out):
            region = region.union(l_plus(l, disc))
    return region


def explore_outside(k: Config, gamma: DiscreteLoop, disc: DiscreteDisc) -> Exploration:
    """Reveal everything outside gamma plus the loops sticking out of it."""
    if source_set(k, disc.graph):
        raise SourcedConfigError("exploration requires a sourceless configuration")
    bar = extend_trivially(k, disc.graph)
    dec = decompose(bar, disc)
    region = region_of([ll.loop for ll in dec.loops], gamma, disc)
    state = restrict(bar, region)
    return Exploration(gamma, region, state)


def is_admissible(region: Subgraph, state: Config, gamma: DiscreteLoop, disc: DiscreteDisc) -> bool:
    """True iff the state is sourceless on the region and its own loops
    regenerate exactly this region."""
    if state.support != region:
        return False
    if source_set(state, region):
        return False
    try:
        bar = extend_trivially(state, disc.graph)
        dec = decompose(bar, disc)
    except (SourcedConfigError, SupportError):
        return False
    regen = region_of([ll.loop for ll in dec.loops], gamma, disc)
    return regen.vertices == region.vertices and regen.edges == region.edges


def unexplored_discs(x: Exploration, disc: DiscreteDisc) -> list[DiscreteDisc]:
    """Connected pieces of the disc minus the region, each certified."""
    rest = disc.graph.difference(x.region)
    comps = _components(rest)
    out = []
    for vs in comps:
        es = frozenset(e for e in rest.edges if e[0] in vs and e[1] in vs)
        piece = Subgraph(disc.geometry, vs, es)
        out.append(certify_disc(piece))  # raises if a piece is not a disc
    return out


def _components(g: Subgraph) -> list[frozenset[Vertex]]:
    adj: dict[Vertex, list[Vertex]] = {v: [] for v in g.vertices}
    for a, b in g.edges:
        if a in adj and b in adj:
            adj[a].append(b)
            adj[b].append(a)
    seen: set[Vertex] = set()
    comps = []
    for root in sorted(g.vertices):
        if root in seen:
            continue
        stack = [root]
        seen.add(root)
        comp = {root}
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps
