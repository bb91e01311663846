"""Exact finite-volume laws and seeded samplers at the self-dual point.

Exact enumeration covers the plus-boundary spin law on a dual disc, the
even-subgraph law on the primal disc, and truncated integer-flux laws;
Monte Carlo sampling is a single-cluster update with the boundary ring
frozen.  The interface map and the Bernoulli overlay tie the three
together, and every sampler is deterministic in its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .lattice import (
    DiscreteDisc,
    DiscreteLoop,
    Edge,
    Orientation,
    Subgraph,
    Vertex,
    dual_disc,
    dual_edge,
)
from .percolation import BernoulliField, Config, overlay, sample_bernoulli, source_set
from .util import philox_stream


@dataclass(frozen=True)
class CriticalConstants:
    beta_c: float
    tanh_beta_c: float
    t_c: float
    t_star: float


def critical_constants() -> CriticalConstants:
    beta_c = 0.5 * math.log(1.0 + math.sqrt(2.0))
    return CriticalConstants(
        beta_c=beta_c,
        tanh_beta_c=math.sqrt(2.0) - 1.0,
        t_c=1.0 - 1.0 / math.cosh(beta_c),
        t_star=3.0 - 2.0 * math.sqrt(2.0),
    )


# ---------------------------------------------------------------------------
# exact laws


@dataclass(frozen=True)
class ExactLaw:
    """Finite distribution over configurations, keyed by open-edge set."""

    support: Subgraph
    probs: dict[frozenset[Edge], float]

    def tv(self, other: "ExactLaw") -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.probs.get(k, 0.0) - other.probs.get(k, 0.0)) for k in keys)

    def prob_of(self, open_edges) -> float:
        return self.probs.get(frozenset(open_edges), 0.0)


def _spanning_tree_cycle_basis(sub: Subgraph) -> list[frozenset[Edge]]:
    parent: dict[Vertex, Vertex | None] = {}
    parent_edge: dict[Vertex, Edge] = {}
    adj: dict[Vertex, list[tuple[Vertex, Edge]]] = {v: [] for v in sub.vertices}
    for e in sorted(sub.edges):
        a, b = e
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    tree_edges: set[Edge] = set()
    for root in sorted(adj):
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            v = stack.pop()
            for w, e in adj[v]:
                if w not in parent:
                    parent[w] = v
                    parent_edge[w] = e
                    tree_edges.add(e)
                    stack.append(w)

    def path_to_root(v: Vertex) -> set[Edge]:
        out = set()
        while parent[v] is not None:
            out.add(parent_edge[v])
            v = parent[v]
        return out

    basis = []
    for e in sorted(sub.edges):
        if e in tree_edges:
            continue
        a, b = e
        cyc = path_to_root(a) ^ path_to_root(b)
        cyc.add(e)
        basis.append(frozenset(cyc))
    return basis


def sourceless_configs(sub: Subgraph) -> list[frozenset[Edge]]:
    """All even open-edge sets of the subgraph (its cycle space)."""
    basis = _spanning_tree_cycle_basis(sub)
    if len(basis) > 24:
        raise ValueError(f"cycle space dimension {len(basis)} exceeds the enumeration cap")
    out = [frozenset()]
    for b in basis:
        out += [c ^ b for c in out]
    return out


def enumerate_ht_law(sub: Subgraph, edge_weight: float | Fraction | None = None) -> ExactLaw:
    """Even-subgraph law with product weights w(cfg) = x^{#open}.

    The default weight is tanh(beta_c); any per-edge constant in (0, 1]
    can be substituted (Fractions stay exact until normalization).
    """
    x = critical_constants().tanh_beta_c if edge_weight is None else edge_weight
    configs = sourceless_configs(sub)
    weights = [x ** len(c) for c in configs]
    z = sum(weights)
    return ExactLaw(sub, {c: float(w / z) for c, w in zip(configs, weights)})


@dataclass(frozen=True)
class SpinLaw:
    """Exact plus-boundary spin law on a dual disc."""

    dual: DiscreteDisc
    free_vertices: tuple[Vertex, ...]
    probs: dict[tuple[int, ...], float]  # free-spin assignment -> probability


def enumerate_ising_plus(dual: DiscreteDisc, beta: float | None = None) -> SpinLaw:
    beta = critical_constants().beta_c if beta is None else beta
    bnd = dual.boundary_loop.vertex_set()
    free = tuple(sorted(dual.graph.vertices - bnd))
    f = len(free)
    if f > 24:
        raise ValueError(f"{f} free spins exceed the enumeration cap")
    idx = {v: i for i, v in enumerate(free)}
    spins = 1 - 2 * ((np.arange(2 ** f, dtype=np.int64)[:, None]
                      >> np.arange(f, dtype=np.int64)[None, :]) & 1)
    energy = np.zeros(2 ** f, dtype=np.float64)
    const = 0
    for a, b in sorted(dual.graph.edges):
        ia, ib = idx.get(a), idx.get(b)
        if ia is None and ib is None:
            const += 1
        elif ia is None:
            energy += spins[:, ib]
        elif ib is None:
            energy += spins[:, ia]
        else:
            energy += spins[:, ia] * spins[:, ib]
    weights = np.exp(beta * (energy + const))
    weights /= weights.sum()
    probs = {tuple(int(s) for s in spins[m]): float(weights[m]) for m in range(2 ** f)}
    return SpinLaw(dual, free, probs)


@dataclass(frozen=True)
class IsingState:
    """Spin assignment on a dual disc with the boundary ring frozen to +1."""

    dual: DiscreteDisc
    vertices: tuple[Vertex, ...]
    spins: np.ndarray  # int8, aligned with vertices

    def __post_init__(self) -> None:
        bnd = self.dual.boundary_loop.vertex_set()
        lookup = {v: i for i, v in enumerate(self.vertices)}
        if any(self.spins[lookup[v]] != 1 for v in bnd):
            raise ValueError("boundary spins must all be +1")

    def spin_of(self) -> dict[Vertex, int]:
        return {v: int(s) for v, s in zip(self.vertices, self.spins)}

    def magnetization(self) -> float:
        return float(self.spins.mean())


def state_from_assignment(dual: DiscreteDisc, law: SpinLaw, assign: tuple[int, ...]) -> IsingState:
    verts = tuple(sorted(dual.graph.vertices))
    lookup = dict(zip(law.free_vertices, assign))
    spins = np.array([lookup.get(v, 1) for v in verts], dtype=np.int8)
    return IsingState(dual, verts, spins)


class InterfaceExtractor:
    """Vectorized disagreement-edge extraction for repeated sampling."""

    def __init__(self, primal: DiscreteDisc, dual: DiscreteDisc) -> None:
        self.primal = primal
        dual_index = {v: i for i, v in enumerate(sorted(dual.graph.vertices))}
        self.edges = sorted(primal.graph.edges)
        pairs = [tuple(dual_index[w] for w in dual_edge(e)) for e in self.edges]
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        self.ia, self.ib = arr[:, 0], arr[:, 1]

    def extract(self, state: IsingState) -> Config:
        mask = state.spins[self.ia] != state.spins[self.ib]
        opened = frozenset(self.edges[i] for i in np.nonzero(mask)[0])
        return Config(self.primal.graph, opened)


def interface_of(state: IsingState, primal: DiscreteDisc) -> Config:
    """Open exactly on primal edges whose dual endpoints disagree."""
    spin = {v: int(s) for v, s in zip(state.vertices, state.spins)}
    opened = set()
    for e in primal.graph.edges:
        a, b = dual_edge(e)
        if spin[a] != spin[b]:
            opened.add(e)
    cfg = Config(primal.graph, frozenset(opened))
    if source_set(cfg, primal.graph):
        raise RuntimeError("interface has sources; dual disc inconsistent with primal")
    return cfg


def pushforward_interface_law(law: SpinLaw, primal: DiscreteDisc) -> ExactLaw:
    """Law of the disagreement configuration under the spin law."""
    items = list(law.probs.items())
    assigns = np.array([a for a, _ in items], dtype=np.int8)
    p_vec = np.array([p for _, p in items])
    idx = {v: i for i, v in enumerate(law.free_vertices)}
    edges = sorted(primal.graph.edges)
    if len(edges) > 62:
        raise ValueError("pushforward packing supports up to 62 edges")
    m = len(items)
    bits = np.zeros((m, len(edges)), dtype=bool)
    ones = np.ones(m, dtype=np.int8)
    for j, e in enumerate(edges):
        a, b = dual_edge(e)
        sa = assigns[:, idx[a]] if a in idx else ones
        sb = assigns[:, idx[b]] if b in idx else ones
        bits[:, j] = sa != sb
    keys = bits @ (1 << np.arange(len(edges), dtype=np.int64))
    uniq, inverse = np.unique(keys, return_inverse=True)
    mass = np.bincount(inverse, weights=p_vec, minlength=len(uniq))
    probs: dict[frozenset[Edge], float] = {}
    for key, p in zip(uniq, mass):
        opened = frozenset(e for j, e in enumerate(edges) if (int(key) >> j) & 1)
        probs[opened] = float(p)
    return ExactLaw(primal.graph, probs)


# ---------------------------------------------------------------------------
# truncated integer-flux law


@dataclass(frozen=True)
class TraceLaw:
    law: ExactLaw
    n_max: int
    truncation_tail: float  # per-edge mass above n_max, before normalization


def flux_tail(beta: float, n_max: int) -> float:
    return sum(beta ** m / math.factorial(m) for m in range(n_max + 1, n_max + 40))


def enumerate_current_trace(sub: Subgraph, n_max: int = 8, beta: float | None = None) -> TraceLaw:
    """Marginal law of the nonzero-flux indicator under the sourceless
    integer-flux measure, truncated at n_max per edge."""
    beta = critical_constants().beta_c if beta is None else beta
    edges = sorted(sub.edges)
    if (n_max + 1) ** len(edges) > 2 ** 24:
        raise ValueError("flux state space exceeds the enumeration cap")
    probs: dict[frozenset[Edge], float] = {}
    z = 0.0
    fact = [math.factorial(m) for m in range(n_max + 1)]
    for fluxes in product(range(n_max + 1), repeat=len(edges)):
        deg: dict[Vertex, int] = {}
        for e, m in zip(edges, fluxes):
            if m:
                for v in e:
                    deg[v] = deg.get(v, 0) + m
        if any(d % 2 for d in deg.values()):
            continue
        w = 1.0
        for m in fluxes:
            w *= beta ** m / fact[m]
        z += w
        key = frozenset(e for e, m in zip(edges, fluxes) if m)
        probs[key] = probs.get(key, 0.0) + w
    return TraceLaw(ExactLaw(sub, {k: v / z for k, v in probs.items()}), n_max, flux_tail(beta, n_max))


def overlay_law(base: ExactLaw, t: float) -> ExactLaw:
    """Exact law of (sample from base) v (independent Bernoulli(t))."""
    edges = sorted(base.support.edges)
    probs: dict[frozenset[Edge], float] = {}
    for cfg, p in base.probs.items():
        rest = [e for e in edges if e not in cfg]
        for extra in product((0, 1), repeat=len(rest)):
            q = p
            added = set()
            for e, bit in zip(rest, extra):
                if bit:
                    q *= t
                    added.add(e)
                else:
                    q *= 1.0 - t
            key = cfg | frozenset(added)
            probs[key] = probs.get(key, 0.0) + q
    return ExactLaw(base.support, probs)


# ---------------------------------------------------------------------------
# Wolff sampling with a frozen plus boundary


class WolffChain:
    """Single-cluster dynamics on a dual disc; the boundary ring never flips.

    Clusters grow from a free seed through aligned bonds with probability
    1 - exp(-2 beta); a cluster containing any boundary site is left in
    place, which is the single-cluster form of the constrained
    cluster-resampling step and keeps the plus-boundary law invariant.
    """

    def __init__(self, dual: DiscreteDisc, seed: int, beta: float | None = None,
                 replica: int = 0) -> None:
        self.dual = dual
        self.beta = critical_constants().beta_c if beta is None else beta
        self.p_add = 1.0 - math.exp(-2.0 * self.beta)
        self.vertices = tuple(sorted(dual.graph.vertices))
        index = {v: i for i, v in enumerate(self.vertices)}
        nsite = len(self.vertices)
        adj = -np.ones((nsite, 4), dtype=np.int64)
        for a, b in dual.graph.edges:
            ia, ib = index[a], index[b]
            for i, j in ((ia, ib), (ib, ia)):
                row = adj[i]
                row[np.argmax(row < 0)] = j
        self.adj = adj
        bnd = dual.boundary_loop.vertex_set()
        self.is_boundary = np.array([v in bnd for v in self.vertices])
        self.free_idx = np.nonzero(~self.is_boundary)[0]
        self.spins = np.ones(nsite, dtype=np.int8)
        self.rng = philox_stream(seed, "wolff", replica)
        self.updates_done = 0

    def update(self) -> int:
        """One cluster update; returns the cluster size."""
        if len(self.free_idx) == 0:
            return 0
        seed_site = int(self.free_idx[self.rng.integers(len(self.free_idx))])
        s0 = self.spins[seed_site]
        in_cluster = np.zeros(len(self.vertices), dtype=bool)
        in_cluster[seed_site] = True
        frontier = np.array([seed_site])
        while frontier.size:
            nb = self.adj[frontier].ravel()
            nb = nb[nb >= 0]
            nb = nb[(~in_cluster[nb]) & (self.spins[nb] == s0)]
            if nb.size == 0:
                break
            accept = nb[self.rng.random(nb.size) < self.p_add]
            accept = np.unique(accept)
            accept = accept[~in_cluster[accept]]
            in_cluster[accept] = True
            frontier = accept
        self.updates_done += 1
        if not bool((in_cluster & self.is_boundary).any()):
            self.spins[in_cluster] *= -1
        return int(in_cluster.sum())

    def run(self, updates: int) -> None:
        for _ in range(updates):
            self.update()

    def state(self) -> IsingState:
        return IsingState(self.dual, self.vertices, self.spins.copy())


def default_burn_in(dual: DiscreteDisc) -> int:
    side = int(math.isqrt(len(dual.graph.vertices)))
    return 20 * side * side


def default_thinning(dual: DiscreteDisc) -> int:
    side = int(math.isqrt(len(dual.graph.vertices)))
    return side * side


def sample_ising_plus(dual: DiscreteDisc, seed: int, sweeps: int | None = None,
                      burn_in: int | None = None, beta: float | None = None) -> IsingState:
    """One approximate plus-boundary sample; conservative defaults, both
    counts overridable (batch work should use WolffChain directly)."""
    chain = WolffChain(dual, seed, beta)
    chain.run(default_burn_in(dual) if burn_in is None else burn_in)
    chain.run(0 if sweeps is None else sweeps)
    return chain.state()


def sample_interfaces(primal: DiscreteDisc, count: int, seed: int,
                      burn_in: int | None = None, thin: int = 8,
                      chain_count: int = 4, replica_offset: int = 0):
    """Yield `count` interface configs from thinned parallel-safe chains.

    Replica r is produced by chain r % chain_count at its (r // chain_count)-th
    thinned step, so the output is independent of any worker scheduling.
    """
    dual = dual_disc(primal)
    side = int(math.isqrt(len(dual.graph.vertices)))
    burn = 30 * side if burn_in is None else burn_in
    chains = [WolffChain(dual, seed, replica=replica_offset + c) for c in range(chain_count)]
    for c in chains:
        c.run(burn)
    produced = [0] * chain_count
    for r in range(count):
        c = r % chain_count
        chains[c].run(thin)
        produced[c] += 1
        yield interface_of(chains[c].state(), primal)


def sample_current_trace(primal: DiscreteDisc, seed: int, burn_in: int | None = None,
                         sweeps: int | None = None) -> tuple[Config, Config]:
    """Coupled (interface, trace) pair: trace = interface v Bernoulli(t_c)."""
    dual = dual_disc(primal)
    state = sample_ising_plus(dual, seed, sweeps=sweeps, burn_in=burn_in)
    eta = interface_of(state, primal)
    t_c = critical_constants().t_c
    b = sample_bernoulli(BernoulliField(primal.graph, t_c), seed ^ 0x5EED, replica=1)
    return eta, overlay(eta, b)


# ---------------------------------------------------------------------------
# Ising loops from the spin side

_CCW_OFF = {(2, 0): (0, 1), (0, 2): (-1, 0), (-2, 0): (0, -1), (0, -2): (1, 0)}


def _left_face(a: Vertex, b: Vertex) -> Vertex:
    d = (b[0] - a[0], b[1] - a[1])
    off = _CCW_OFF[d]
    mid = ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)
    return (mid[0] + off[0], mid[1] + off[1])


@dataclass(frozen=True)
class IsingLoopLevels:
    loops: tuple[DiscreteLoop, ...]
    levels: tuple[int, ...]
    side_most: tuple[bool, ...]  # leftmost at odd levels, rightmost at even

    def by_level(self) -> dict[int, list[DiscreteLoop]]:
        out: dict[int, list[DiscreteLoop]] = {}
        for l, lv in zip(self.loops, self.levels):
            out.setdefault(lv, []).append(l)
        return out

    def most_by_level(self) -> dict[int, list[DiscreteLoop]]:
        out: dict[int, list[DiscreteLoop]] = {}
        for l, lv, m in zip(self.loops, self.levels, self.side_most):
            if m:
                out.setdefault(lv, []).append(l)
        return out


def ising_loop_levels(state: IsingState, primal: DiscreteDisc) -> IsingLoopLevels:
    """Canonical spin-boundary loops with levels from the nesting of strong
    spin clusters, plus the side-most flags.

    Each disagreement edge is oriented with the +1 spin on its left; the
    successor at a four-way meeting keeps the same left face, so loops hug
    one cluster and never cross.  The level of a loop is the tree depth of
    its inner cluster, rooted at the boundary cluster.
    """
    spin = {v: int(s) for v, s in zip(state.vertices, state.spins)}
    eta = interface_of(state, primal)

    oriented: dict[tuple[Vertex, Vertex], Vertex] = {}
    for (a, b) in eta.open_edges:
        for (u, v) in ((a, b), (b, a)):
            lf = _left_face(u, v)
            if spin.get(lf, 1) == 1:
                oriented[(u, v)] = lf
    if len(oriented) != len(eta.open_edges):
        raise RuntimeError("orientation rule failed to orient each edge once")

    out_of: dict[Vertex, list[tuple[Vertex, Vertex]]] = {}
    for (u, v) in oriented:
        out_of.setdefault(u, []).append((u, v))

    def successor(e: tuple[Vertex, Vertex]) -> tuple[Vertex, Vertex]:
        u, v = e
        leaving = out_of[v]
        if len(leaving) == 1:
            return leaving[0]
        lf = oriented[e]
        match = [f for f in leaving if oriented[f] == lf]
        if len(match) != 1:
            raise RuntimeError("ambiguous continuation at a four-way meeting")
        return match[0]

    unused = set(oriented)
    loops: list[DiscreteLoop] = []
    while unused:
        start = min(unused)
        cyc = [start]
        unused.discard(start)
        cur = successor(start)
        while cur != start:
            cyc.append(cur)
            unused.discard(cur)
            cur = successor(cur)
        verts = tuple(e[0] for e in cyc)
        from .lattice import classify_loop, LoopClass

        cls, orient = classify_loop(verts)
        if cls in (LoopClass.NON_SELF_CROSSING, LoopClass.GENERAL):
            raise RuntimeError("canonical spin loop is not weakly simple")
        loops.append(DiscreteLoop(verts, cls, orient))

    cluster_of, parent_depth = _cluster_depths(state, eta)

    levels = []
    side_most = []
    for loop in loops:
        a, b = loop.vertices[0], loop.vertices[1]
        lf = _left_face(a, b)
        rf = _right_face(a, b)
        inner = rf if loop.orientation is Orientation.CW else lf
        level = parent_depth[cluster_of[inner]]
        levels.append(level)
        side_most.append(_is_side_most(loop, spin, level))
    return IsingLoopLevels(tuple(loops), tuple(levels), tuple(side_most))


def _right_face(a: Vertex, b: Vertex) -> Vertex:
    d = (b[0] - a[0], b[1] - a[1])
    off = _CCW_OFF[d]
    mid = ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)
    return (mid[0] - off[0], mid[1] - off[1])


def _cluster_depths(state: IsingState, eta: Config) -> tuple[dict[Vertex, int], dict[int, int]]:
    """Strong (4-adjacent, equal-spin) clusters and their nesting depth from
    the boundary cluster; depth counts disagreement-loop crossings."""
    spin = {v: int(s) for v, s in zip(state.vertices, state.spins)}
    verts = state.vertices
    index = {v: i for i, v in enumerate(verts)}
    parent = list(range(len(verts)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for (a, b) in state.dual.graph.edges:
        if spin[a] == spin[b]:
            union(index[a], index[b])
    cluster_of = {v: find(index[v]) for v in verts}

    # adjacency between clusters across disagreement edges, then BFS depth
    adj: dict[int, set[int]] = {}
    for (a, b) in state.dual.graph.edges:
        if spin[a] != spin[b]:
            ca, cb = cluster_of[a], cluster_of[b]
            adj.setdefault(ca, set()).add(cb)
            adj.setdefault(cb, set()).add(ca)
    root = cluster_of[next(iter(state.dual.boundary_loop.vertex_set()))]
    depth = {root: 0}
    queue = [root]
    head = 0
    while head < len(queue):
        c = queue[head]
        head += 1
        for d in sorted(adj.get(c, ())):
            if d not in depth:
                depth[d] = depth[c] + 1
                queue.append(d)
    for v in verts:
        depth.setdefault(cluster_of[v], 0)
    return cluster_of, depth


def _is_side_most(loop: DiscreteLoop, spin: dict[Vertex, int], level: int) -> bool:
    """Leftmost at odd level (strong +1 ring on the left), rightmost at even
    (strong -1 ring on the right): every outward turn's corner face must
    carry the flanking sign."""
    want_left = level % 2 == 1
    sign = 1 if want_left else -1
    cyc = loop.closed()
    m = len(loop.vertices)
    for i in range(m):
        a, v, b = cyc[i - 1] if i else loop.vertices[-1], cyc[i], cyc[i + 1]
        d_in = (v[0] - a[0], v[1] - a[1])
        d_out = (b[0] - v[0], b[1] - v[1])
        cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
        outward_turn = cross < 0 if want_left else cross > 0
        if not outward_turn:
            continue
        if want_left:
            off_in, off_out = _CCW_OFF[d_in], _CCW_OFF[d_out]
        else:
            off_in = tuple(-x for x in _CCW_OFF[d_in])
            off_out = tuple(-x for x in _CCW_OFF[d_out])
        corner = (v[0] + off_in[0] + off_out[0], v[1] + off_in[1] + off_out[1])
        if spin.get(corner, 1) != sign:
            return False
    return True
