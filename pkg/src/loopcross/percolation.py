"""Percolation configurations: bit-per-edge fields over a subgraph.

Supports restriction, trivial extension, source sets, the edgewise-max
overlay and seeded Bernoulli sampling.  Configs are immutable; equality
includes the support.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .lattice import Edge, GridGeometry, Subgraph, Vertex
from .util import philox_stream


class SupportError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    support: Subgraph
    open_edges: frozenset[Edge]

    def __post_init__(self) -> None:
        if not self.open_edges <= self.support.edges:
            raise SupportError("open edges outside the support")

    @staticmethod
    def empty(support: Subgraph) -> "Config":
        return Config(support, frozenset())

    @staticmethod
    def full(support: Subgraph) -> "Config":
        return Config(support, frozenset(support.edges))

    def is_open(self, e: Edge) -> bool:
        return e in self.open_edges

    def open_count(self) -> int:
        return len(self.open_edges)

    def open_vertex_degrees(self) -> dict[Vertex, int]:
        deg: dict[Vertex, int] = {}
        for a, b in self.open_edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        return deg


def restrict(k: Config, r: Subgraph) -> Config:
    if not r.edges <= k.support.edges:
        raise SupportError("restriction target is not an edge-subgraph of the support")
    return Config(r, frozenset(e for e in k.open_edges if e in r.edges))


def extend_trivially(k: Config, window: Subgraph) -> Config:
    """Config on `window` open exactly on the open edges of k."""
    return Config(window, frozenset(e for e in k.open_edges if e in window.edges))


def source_set(k: Config, r: Subgraph) -> set[Vertex]:
    """Vertices with odd open degree counted over the edges of r.

    Uses the trivial extension of k, so r need not relate to the support.
    """
    deg: dict[Vertex, int] = {}
    for e in r.edges:
        if e in k.open_edges:
            for v in e:
                deg[v] = deg.get(v, 0) + 1
    return {v for v, d in deg.items() if d % 2 == 1}


def overlay(a: Config, b: Config) -> Config:
    if a.support != b.support:
        raise SupportError("overlay requires identical supports")
    return Config(a.support, a.open_edges | b.open_edges)


class BernoulliField:
    """Per-edge open probabilities over a support; caches the canonical edge
    order and probability vector for fast repeated sampling."""

    def __init__(self, support: Subgraph, t: dict[Edge, float] | float) -> None:
        self.support = support
        self.t = t
        self._edges = support.sorted_edges()
        probs = np.array([self.probability(e) for e in self._edges]) if self._edges else np.zeros(0)
        self._probs = probs

    def probability(self, e: Edge) -> float:
        p = self.t if isinstance(self.t, (int, float)) else self.t[e]
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of range for edge {e}: {p}")
        return float(p)


def sample_bernoulli(field: BernoulliField, seed: int, replica: int = 0) -> Config:
    """Independent bits, edge e open with probability t_e; deterministic in
    (field, seed, replica)."""
    edges = field._edges
    if not edges:
        return Config.empty(field.support)
    rng = philox_stream(seed, "bernoulli", replica)
    u = rng.random(len(edges))
    opened = frozenset(edges[i] for i in np.nonzero(u < field._probs)[0])
    return Config(field.support, opened)


# ---------------------------------------------------------------------------
# serialization: header + run-length-encoded bitset (layout in docs/formats.md)

_MAGIC = b"LXC1"


def config_to_bytes(k: Config) -> bytes:
    edges = k.support.sorted_edges()
    verts = sorted(k.support.vertices)
    out = bytearray()
    out += _MAGIC
    out += struct.pack("<III", k.support.geometry.n, len(verts), len(edges))
    for v in verts:
        out += struct.pack("<ii", *v)
    for e in edges:
        out += struct.pack("<iiii", e[0][0], e[0][1], e[1][0], e[1][1])
    # RLE over the canonical edge order: alternating run lengths, closed bit first
    bits = [1 if e in k.open_edges else 0 for e in edges]
    runs: list[int] = []
    cur, run = 0, 0
    for b in bits:
        if b == cur:
            run += 1
        else:
            runs.append(run)
            cur, run = b, 1
    runs.append(run)
    out += struct.pack("<I", len(runs))
    for r in runs:
        out += struct.pack("<I", r)
    return bytes(out)


def config_from_bytes(data: bytes) -> Config:
    if data[:4] != _MAGIC:
        raise ValueError("bad magic in serialized config")
    n, nv, ne = struct.unpack_from("<III", data, 4)
    off = 16
    verts = []
    for _ in range(nv):
        verts.append(struct.unpack_from("<ii", data, off))
        off += 8
    edges = []
    for _ in range(ne):
        x0, y0, x1, y1 = struct.unpack_from("<iiii", data, off)
        edges.append(((x0, y0), (x1, y1)))
        off += 16
    (nruns,) = struct.unpack_from("<I", data, off)
    off += 4
    runs = []
    for _ in range(nruns):
        runs.append(struct.unpack_from("<I", data, off)[0])
        off += 4
    bits: list[int] = []
    cur = 0
    for r in runs:
        bits.extend([cur] * r)
        cur ^= 1
    support = Subgraph(GridGeometry(n), frozenset(verts), frozenset(edges))
    opened = frozenset(e for e, b in zip(sorted(edges), bits) if b)
    return Config(support, opened)
