"""Estimators and empirical condition checks: crossing probabilities, the
perturbation stability gap, symmetric-difference crossings, and the
Markov / crossing-approximation / boundary-connectivity suite.

Monte Carlo replicas are deterministic functions of (config, seed): chain
c out of a fixed chain count produces replicas c, c + C, c + 2C, ... so
results do not depend on worker scheduling; aggregation uses a fixed
pairwise-summation tree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .annuli import PolyAnnulus, crosses_rect_fast, erode_inner
from .lattice import DiscreteDisc, Subgraph, Vertex, discretize_domain, dual_disc
from .models import (
    InterfaceExtractor,
    WolffChain,
    critical_constants,
    enumerate_ht_law,
    sourceless_configs,
)
from .percolation import BernoulliField, Config, overlay, sample_bernoulli
from .util import mean_and_stderr

UNIT_SQUARE = (0, 0, 1, 1)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    replicas: int
    seed: int

    def joint_stderr(self, other: "Estimate") -> float:
        return math.hypot(self.stderr, other.stderr)


def _aggregate(flags: list[float], replicas: int, seed: int) -> Estimate:
    mean, se = mean_and_stderr(flags)
    return Estimate(mean, se, replicas, seed)


# ---------------------------------------------------------------------------
# replica engines


def bernoulli_replicas(n: int, t: float, replicas: int, seed: int,
                       domain=UNIT_SQUARE) -> list[Config]:
    primal = discretize_domain(domain, n)
    field = BernoulliField(primal.graph, t)
    return [sample_bernoulli(field, seed, replica=r) for r in range(replicas)]


class InterfaceEngine:
    """Thinned parallel chains producing interface replicas in a fixed
    replica-to-chain assignment."""

    def __init__(self, n: int, seed: int, domain=UNIT_SQUARE, chain_count: int = 8,
                 thin: int | None = None, burn_in: int | None = None) -> None:
        self.primal = discretize_domain(domain, n)
        self.dual = dual_disc(self.primal)
        self.extractor = InterfaceExtractor(self.primal, self.dual)
        side = int(math.isqrt(len(self.dual.graph.vertices)))
        self.thin = max(4, side // 8) if thin is None else thin
        self.burn_in = 30 * side if burn_in is None else burn_in
        self.seed = seed
        self.chain_count = chain_count

    def _chain_run(self, c: int, count: int):
        chain = WolffChain(self.dual, self.seed, replica=c)
        chain.run(self.burn_in)
        out = []
        for i in range(count):
            chain.run(self.thin)
            out.append((c + i * self.chain_count, self.extractor.extract(chain.state())))
        return out

    def interfaces(self, replicas: int, threads: int = 1) -> list[Config]:
        counts = [(replicas - c + self.chain_count - 1) // self.chain_count
                  for c in range(self.chain_count)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                chunks = list(pool.map(self._chain_run, range(self.chain_count), counts))
        else:
            chunks = [self._chain_run(c, k) for c, k in zip(range(self.chain_count), counts)]
        ordered: list[Config | None] = [None] * replicas
        for chunk in chunks:
            for rid, cfg in chunk:
                if rid < replicas:
                    ordered[rid] = cfg
        assert all(cfg is not None for cfg in ordered)
        return ordered  # type: ignore[return-value]

    def coupled(self, replicas: int, t: float, threads: int = 1) -> list[tuple[Config, Config]]:
        etas = self.interfaces(replicas, threads)
        field = BernoulliField(self.primal.graph, t)
        out = []
        for r, eta in enumerate(etas):
            b = sample_bernoulli(field, self.seed ^ 0xB00B5, replica=r)
            out.append((eta, overlay(eta, b)))
        return out


def _samples_for_model(model: dict, n: int, replicas: int, seed: int,
                       threads: int = 1, domain=UNIT_SQUARE) -> list[Config]:
    kind = model.get("type", "ising_interface")
    if kind == "bernoulli":
        return bernoulli_replicas(n, float(model["t"]), replicas, seed, domain)
    engine = InterfaceEngine(n, seed, domain,
                             chain_count=int(model.get("chains", 8)),
                             thin=model.get("thin"), burn_in=model.get("burn_in"))
    if kind == "ising_interface":
        return engine.interfaces(replicas, threads)
    if kind == "current_trace":
        t = float(model.get("t", critical_constants().t_c))
        return [omega for _, omega in engine.coupled(replicas, t, threads)]
    raise ValueError(f"unknown model type {kind!r}")


# ---------------------------------------------------------------------------
# estimators


def estimate_crossing_prob(model: dict, annulus: PolyAnnulus, n: int, replicas: int,
                           seed: int, threads: int = 1, domain=UNIT_SQUARE) -> Estimate:
    samples = _samples_for_model(model, n, replicas, seed, threads, domain)
    flags = [1.0 if crosses_rect_fast(cfg, annulus) else 0.0 for cfg in samples]
    return _aggregate(flags, replicas, seed)


def symdiff_crossing(annulus: PolyAnnulus, n: int, replicas: int, seed: int,
                     t: float | None = None, threads: int = 1,
                     domain=UNIT_SQUARE) -> Estimate:
    """P(omega crosses but eta does not) under the monotone coupling."""
    t = critical_constants().t_c if t is None else t
    engine = InterfaceEngine(n, seed, domain)
    flags = []
    for eta, omega in engine.coupled(replicas, t, threads):
        c_eta = crosses_rect_fast(eta, annulus)
        c_omega = crosses_rect_fast(omega, annulus)
        if c_eta and not c_omega:
            raise RuntimeError("coupling monotonicity violated")
        flags.append(1.0 if (c_omega and not c_eta) else 0.0)
    return _aggregate(flags, replicas, seed)


def stability_gap(annulus: PolyAnnulus, r, n: int, replicas: int, seed: int,
                  t: float | None = None, threads: int = 1,
                  domain=UNIT_SQUARE) -> Estimate:
    """P(thickened boundaries connected by omega inside the annulus, while
    eta does not cross it)."""
    if not annulus.is_rect_pair():
        raise ValueError("stability gap implemented for rectangle pairs")
    r = Fraction(r)
    ix1, iy1, ix2, iy2 = annulus.inner_rect()
    if 2 * r >= min(ix2 - ix1, iy2 - iy1):
        raise ValueError("thickening radius exceeds the hole size")
    t = critical_constants().t_c if t is None else t
    engine = InterfaceEngine(n, seed, domain)
    flags = []
    for eta, omega in engine.coupled(replicas, t, threads):
        if crosses_rect_fast(eta, annulus):
            flags.append(0.0)
            continue
        flags.append(1.0 if _thickened_connected(omega, annulus, r) else 0.0)
    return _aggregate(flags, replicas, seed)


def _band_components(cfg: Config, annulus: PolyAnnulus) -> list[list]:
    """Components of the open edges clipped to the closed annulus, for
    lattice-aligned rectangle pairs (edges never cross the walls)."""
    n = cfg.support.geometry.n
    s = 2 * n
    ax1, ay1, ax2, ay2 = (c * s for c in annulus.inner_rect())
    ox1, oy1, ox2, oy2 = (c * s for c in annulus.outer_rect())
    for c in (ax1, ay1, ax2, ay2, ox1, oy1, ox2, oy2):
        if Fraction(c).denominator not in (1, 2):
            raise ValueError("annulus walls must lie on the lattice for the aligned path")
    band = []
    for e in cfg.open_edges:
        (ux, uy), (vx, vy) = e
        mx, my = (ux + vx) / 2, (uy + vy) / 2
        inside_outer = ox1 <= mx <= ox2 and oy1 <= my <= oy2
        in_hole = ax1 < mx < ax2 and ay1 < my < ay2
        if inside_outer and not in_hole:
            band.append(e)
    parent: dict[Vertex, Vertex] = {}

    def find(x):
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for (a, b) in band:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    comps: dict[Vertex, list] = {}
    for e in band:
        comps.setdefault(find(e[0]), []).append(e)
    return list(comps.values())


def _thickened_connected(cfg: Config, annulus: PolyAnnulus, r: Fraction) -> bool:
    n = cfg.support.geometry.n
    s = 2 * n
    rr = r * s
    inner = tuple(c * s for c in annulus.inner_rect())
    outer = tuple(c * s for c in annulus.outer_rect())
    for comp in _band_components(cfg, annulus):
        if any(_edge_meets_frame(e, inner, rr) for e in comp) and \
           any(_edge_meets_frame(e, outer, rr) for e in comp):
            return True
    return False


def _edge_meets_frame(e, rect, r) -> bool:
    x1, y1, x2, y2 = rect
    (ux, uy), (vx, vy) = e
    lox, hix = (ux, vx) if ux <= vx else (vx, ux)
    loy, hiy = (uy, vy) if uy <= vy else (vy, uy)
    if hix < x1 - r or lox > x2 + r or hiy < y1 - r or loy > y2 + r:
        return False
    if x2 - x1 <= 2 * r or y2 - y1 <= 2 * r:
        return True
    return not (x1 + r < lox and hix < x2 - r and y1 + r < loy and hiy < y2 - r)


# ---------------------------------------------------------------------------
# ladders


def ladder(fn, n_values: list[int], **kwargs) -> dict[int, Estimate]:
    return {n: fn(n=n, **kwargs) for n in n_values}


def ladder_monotone_within(est: dict[int, Estimate], slack_sigmas: float = 2.0) -> bool:
    """Flag (not fail): largest-n value should not exceed smallest-n value
    by more than the joint error allowance."""
    ns = sorted(est)
    lo, hi = est[ns[0]], est[ns[-1]]
    return hi.value <= lo.value + slack_sigmas * lo.joint_stderr(hi)


# ---------------------------------------------------------------------------
# condition suite


@dataclass(frozen=True)
class ConditionReport:
    markov_exact_tv: float
    markov_float_tv: float
    crossing_approx_table: list[tuple[float, Estimate]]
    boundary_conn_table: list[tuple[str, float, Estimate]]


def markov_property_check(n_small: int = 2) -> tuple[float, float]:
    """Exact conditional-law equality on an enumerable disc: conditioning on
    a sourceless outside, the inside law equals the free inside law.

    Returns (max TV with rational weights, max TV with the critical weight);
    the first is exact arithmetic and must be 0.
    """
    from .lattice import GridGeometry, block, certify_disc, edge

    g = GridGeometry(n_small)
    size = 2 * n_small
    whole = certify_disc(block(g, 0, 0, size, size))
    inner = Subgraph(g, frozenset([(2, 2)]), frozenset())
    # inner disc: the central cell when n_small = 2
    cell = [(2, 2), (4, 2), (4, 4), (2, 4)]
    inner = Subgraph(g, frozenset(cell),
                     frozenset(edge(cell[i], cell[(i + 1) % 4]) for i in range(4)))
    outside = whole.graph.difference(inner)

    worst = {True: 0.0, False: 0.0}
    for exact in (True, False):
        x = Fraction(1, 3) if exact else critical_constants().tanh_beta_c
        all_cfgs = sourceless_configs(whole.graph)
        inner_cfgs = sourceless_configs(inner)
        # free law on the inner disc
        free_w = {c: x ** len(c) for c in inner_cfgs}
        z_free = sum(free_w.values())
        for outside_bits in sourceless_configs(outside):
            cond_w = {}
            for c in all_cfgs:
                if frozenset(e for e in c if e in outside.edges) != outside_bits:
                    continue
                key = frozenset(e for e in c if e in inner.edges)
                cond_w[key] = cond_w.get(key, x * 0) + x ** len(c)
            if not cond_w:
                continue
            z = sum(cond_w.values())
            tv = sum(abs(cond_w.get(c, x * 0) / z - free_w[c] / z_free) for c in inner_cfgs) / 2
            worst[exact] = max(worst[exact], float(tv))
    return worst[True], worst[False]


def crossing_approx_table(annulus: PolyAnnulus, eps_values, n: int, replicas: int,
                          seed: int, threads: int = 1) -> list[tuple[float, Estimate]]:
    """P(crossing the eroded annulus but not the annulus) per epsilon."""
    engine = InterfaceEngine(n, seed)
    etas = engine.interfaces(replicas, threads)
    out = []
    for eps in eps_values:
        if eps == 0:
            a_eps = annulus
        else:
            a_eps = erode_inner(annulus, eps)
        flags = []
        for eta in etas:
            c_eps = crosses_rect_fast(eta, a_eps)
            c_a = crosses_rect_fast(eta, annulus)
            flags.append(1.0 if (c_eps and not c_a) else 0.0)
        out.append((float(eps), _aggregate(flags, replicas, seed)))
    return out


def boundary_connectivity_table(R, r_values, n: int, replicas: int, seed: int,
                                threads: int = 1) -> list[tuple[str, float, Estimate]]:
    """P(central square connected to the r-neighbourhood of the disc
    boundary by the perturbed configuration), over a disc family with
    [-2R,2R]^2 inside but [-3R,3R]^2 not containing the disc."""
    R = Fraction(R)
    t_c = critical_constants().t_c
    domains = {
        "offset": (-Fraction(5, 2) * R, -Fraction(5, 2) * R, Fraction(7, 2) * R, Fraction(5, 2) * R),
        "wide": (-4 * R, -Fraction(5, 2) * R, 4 * R, Fraction(5, 2) * R),
        "ell": [(-Fraction(5, 2) * R, -Fraction(5, 2) * R), (4 * R, -Fraction(5, 2) * R),
                (4 * R, Fraction(5, 2) * R), (Fraction(5, 2) * R, Fraction(5, 2) * R),
                (Fraction(5, 2) * R, 4 * R), (-Fraction(5, 2) * R, 4 * R)],
    }
    out = []
    for name, spec in domains.items():
        primal = discretize_domain(spec, n)
        _check_disc_window(primal, R, n)
        engine = InterfaceEngine(n, seed, domain=spec)
        pairs = engine.coupled(replicas, t_c, threads)
        for r in r_values:
            rr = Fraction(r)
            flags = [1.0 if _square_to_boundary(omega, primal, R, rr) else 0.0
                     for _, omega in pairs]
            out.append((name, float(r), _aggregate(flags, replicas, seed)))
    return out


def _check_disc_window(primal: DiscreteDisc, R: Fraction, n: int) -> None:
    s = 2 * n
    xs = [v[0] for v in primal.graph.vertices]
    ys = [v[1] for v in primal.graph.vertices]
    if not (min(xs) <= -2 * R * s and max(xs) >= 2 * R * s
            and min(ys) <= -2 * R * s and max(ys) >= 2 * R * s):
        raise ValueError("disc must contain the doubled window")
    if min(xs) >= -3 * R * s and max(xs) <= 3 * R * s \
            and min(ys) >= -3 * R * s and max(ys) <= 3 * R * s:
        raise ValueError("disc must escape the tripled window")


def _square_to_boundary(omega: Config, primal: DiscreteDisc, R: Fraction, r: Fraction) -> bool:
    """Component of omega meeting both x+[-R,R]^2 and the r-neighbourhood of
    the disc boundary (sup-norm)."""
    n = primal.geometry.n
    s = 2 * n
    Rs = R * s
    rs = r * s
    bnd = primal.boundary_loop.closed()
    bnd_segs = [(bnd[i], bnd[i + 1]) for i in range(len(bnd) - 1)]

    def near_boundary(e) -> bool:
        (ux, uy), (vx, vy) = e
        lox, hix = (ux, vx) if ux <= vx else (vx, ux)
        loy, hiy = (uy, vy) if uy <= vy else (vy, uy)
        for (a, b) in bnd_segs:
            sx_lo, sx_hi = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
            sy_lo, sy_hi = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
            gap_x = max(sx_lo - hix, lox - sx_hi, 0)
            gap_y = max(sy_lo - hiy, loy - sy_hi, 0)
            if max(gap_x, gap_y) <= rs:
                return True
        return False

    def in_window(e) -> bool:
        (ux, uy), (vx, vy) = e
        lox, hix = (ux, vx) if ux <= vx else (vx, ux)
        loy, hiy = (uy, vy) if uy <= vy else (vy, uy)
        return lox <= Rs and hix >= -Rs and loy <= Rs and hiy >= -Rs

    parent: dict[Vertex, Vertex] = {}

    def find(x):
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for (a, b) in omega.open_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    hits_window: set = set()
    hits_boundary: set = set()
    for e in omega.open_edges:
        root = find(e[0])
        if root not in hits_window and in_window(e):
            hits_window.add(root)
        if root not in hits_boundary and near_boundary(e):
            hits_boundary.add(root)
        if root in hits_window and root in hits_boundary:
            return True
    return bool(hits_window & hits_boundary)


def condition_suite(n_small: int = 2, n_mc: int = 16, replicas: int = 400,
                    seed: int = 7, threads: int = 1) -> ConditionReport:
    tv_exact, tv_float = markov_property_check(n_small)
    annulus = PolyAnnulus.rect_pair(
        (Fraction(3, 8), Fraction(3, 8), Fraction(5, 8), Fraction(5, 8)),
        (Fraction(1, 4), Fraction(1, 4), Fraction(3, 4), Fraction(3, 4)))
    eps_ladder = [0, Fraction(1, 32), Fraction(1, 16)]
    h1 = crossing_approx_table(annulus, eps_ladder, n_mc, replicas, seed, threads)
    h2 = boundary_connectivity_table(Fraction(1, 4), [0, Fraction(1, 16), Fraction(1, 8)],
                                     n_mc, max(replicas // 2, 50), seed, threads)
    return ConditionReport(tv_exact, tv_float, h1, h2)
