"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each.  Run with `pytest tests/test_acceptance.py -s`."""

import json
import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from loopcross.annuli import DyadicFamily, PolyAnnulus, crosses, fingerprint, leq_crs
from loopcross.experiments import InterfaceEngine, symdiff_crossing
from loopcross.lattice import (
    GridGeometry,
    LoopClass,
    Orientation,
    Subgraph,
    block,
    certify_disc,
    dual_disc,
    edge,
    make_loop,
    vertex_inside_or_on,
)
from loopcross.loopdecomp import component_oracle, decompose, peel_levels
from loopcross.loopmetric import F_fingerprint, collection_distance
from loopcross.models import (
    critical_constants,
    enumerate_current_trace,
    enumerate_ht_law,
    enumerate_ising_plus,
    overlay_law,
    pushforward_interface_law,
)
from loopcross.percolation import restrict

from conftest import all_sourceless
from test_loopdecomp import _connected_even_subsets, _traversal_of, certified_outmost

DATA = Path(__file__).parent / "data"
GRID = GridGeometry(1)


def _report(num: int, ok: bool, elapsed: float, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num} {status} ({elapsed:.1f}s): {detail}")


def central_annulus():
    return PolyAnnulus.rect_pair(
        (Fraction(3, 8), Fraction(3, 8), Fraction(5, 8), Fraction(5, 8)),
        (Fraction(1, 4), Fraction(1, 4), Fraction(3, 4), Fraction(3, 4)))


@pytest.fixture(scope="module")
def sampled_interfaces_32():
    engine = InterfaceEngine(32, 4242)
    return engine.interfaces(100, threads=8), engine


def test_criterion_1_kramers_wannier():
    t0 = time.time()
    worst = 0.0
    try:
        for size in (2, 4, 6, 8):  # up to 16 free dual spins
            primal = certify_disc(block(GRID, 0, 0, size, size))
            law = enumerate_ising_plus(dual_disc(primal))
            assert len(law.free_vertices) <= 16
            tv = pushforward_interface_law(law, primal).tv(enumerate_ht_law(primal.graph))
            worst = max(worst, tv)
            assert tv < 1e-12
        sq = certify_disc(block(GRID, 0, 0, 2, 2))
        p_loop = enumerate_ht_law(sq.graph).prob_of(sq.graph.edges)
        x4 = (math.sqrt(2) - 1) ** 4
        assert p_loop == pytest.approx(x4 / (1 + x4), abs=1e-12)
        assert p_loop == pytest.approx(0.0285955, abs=5e-7)
        elapsed = time.time() - t0
        assert elapsed < 10.0
    except AssertionError:
        _report(1, False, time.time() - t0, "interface pushforward vs even-subgraph law")
        raise
    _report(1, True, elapsed,
            f"interface pushforward = even-subgraph law, max TV {worst:.2e} < 1e-12")


def test_criterion_2_coupling():
    t0 = time.time()
    cc = critical_constants()
    try:
        e = edge((0, 0), (2, 0))
        single = Subgraph(GRID, frozenset(e), frozenset([e]))
        square = certify_disc(block(GRID, 0, 0, 2, 2)).graph
        tvs = []
        for sub in (single, square):
            trace = enumerate_current_trace(sub, n_max=8)
            coupled = overlay_law(enumerate_ht_law(sub), cc.t_c)
            tvs.append(coupled.tv(trace.law))
            assert tvs[-1] < 1e-4
        p1 = enumerate_current_trace(single, n_max=8).law.prob_of(single.edges)
        assert abs(p1 - cc.t_c) < 1e-6
        assert cc.t_c == pytest.approx(0.0898201, abs=1e-6)
        elapsed = time.time() - t0
        assert elapsed < 5.0
    except AssertionError:
        _report(2, False, time.time() - t0, "overlay law vs truncated flux law")
        raise
    _report(2, True, elapsed,
            f"overlay(t_c) = truncated flux law, TVs {tvs[0]:.2e}, {tvs[1]:.2e} < 1e-4")


def test_criterion_3_loop_decomposition():
    t0 = time.time()
    checked = 0
    try:
        for size in (2, 4, 6):  # vertex grids 2x2, 3x3, 4x4
            disc = certify_disc(block(GRID, 0, 0, size, size))
            for k in all_sourceless(disc.graph):
                dec = decompose(k, disc)
                checked += 1
                # edge property: loops partition the open edges
                union = set()
                for es in dec.edge_sets():
                    assert not (es & union)
                    union |= es
                assert union == set(k.open_edges)
                seen_v = set()
                for ll, seed in zip(dec.loops, dec.seed_loops):
                    assert ll.loop.loop_class in (LoopClass.SIMPLE, LoopClass.WEAKLY_SIMPLE)
                    want = Orientation.CW if ll.level % 2 else Orientation.CCW
                    assert ll.orientation is want
                    vs = ll.loop.vertex_set()
                    assert not (vs & seen_v)
                    seen_v |= vs
                    # diameter and containment relative to the outmost seed
                    assert ll.loop.diameter_sq() == seed.diameter_sq()
                    cyc = seed.closed()
                    assert all(vertex_inside_or_on(v, cyc) for v in ll.loop.vertices)
                # uniqueness up to planar identification
                assert sorted(map(sorted, dec.edge_sets())) == \
                    sorted(map(sorted, component_oracle(k)))
                # level sandwich: outmost supports appear at their peel level
                if k.open_edges:
                    levels, _ = peel_levels(k, disc)
                    peel_sets = {i + 1: {l.edge_set() for l in lv}
                                 for i, lv in enumerate(levels)}
                    lvl_of = {}
                    for i, lv in enumerate(levels, 1):
                        for l in lv:
                            for e in l.edge_set():
                                lvl_of[e] = i
                    for subset in _connected_even_subsets(k.open_edges):
                        loop = _traversal_of(subset)
                        if loop is None or not certified_outmost(loop, k):
                            continue
                        assert subset in peel_sets[min(lvl_of[e] for e in subset)]
        elapsed = time.time() - t0
        assert elapsed < 60.0
    except AssertionError:
        _report(3, False, time.time() - t0, "loop decomposition soundness")
        raise
    _report(3, True, elapsed,
            f"decomposition sound on {checked} exhaustive configs (grids to 4x4)")


def test_criterion_4_exploration():
    t0 = time.time()
    try:
        from loopcross.exploration import explore_outside, is_admissible, unexplored_discs
        from loopcross.models import sourceless_configs

        disc = certify_disc(block(GRID, 0, 0, 6, 6))
        gamma = make_loop([(2, 2), (4, 2), (4, 4), (2, 4)])
        configs = all_sourceless(disc.graph)
        realized = {}
        for k in configs:
            x = explore_outside(k, gamma, disc)
            assert is_admissible(x.region, x.state, gamma, disc)  # coverage: P(B)=1
            unexplored_discs(x, disc)  # certified or raises
            realized[(x.region.vertices, x.region.edges)] = x
        cache = {}
        for k in configs:  # efficiency: exactly one admissible realized pair
            hits = 0
            for key, x in realized.items():
                st = restrict(k, x.region)
                ck = (key, st.open_edges)
                if ck not in cache:
                    cache[ck] = is_admissible(x.region, st, gamma, disc)
                hits += cache[ck]
            assert hits == 1
        # conditional law on each unexplored disc equals the free law (exact)
        weight = Fraction(1, 3)
        worst = Fraction(0)
        for x in realized.values():
            cond = [c for c in configs
                    if frozenset(e for e in c.open_edges if e in x.region.edges)
                    == x.state.open_edges]
            z = sum(weight ** len(c.open_edges) for c in cond)
            for piece in unexplored_discs(x, disc):
                marg = {}
                for c in cond:
                    kk = frozenset(e for e in c.open_edges if e in piece.graph.edges)
                    marg[kk] = marg.get(kk, Fraction(0)) + weight ** len(c.open_edges)
                free_sets = sourceless_configs(piece.graph)
                zf = sum(weight ** len(s) for s in free_sets)
                tv = sum(abs(marg.get(s, Fraction(0)) / z - weight ** len(s) / zf)
                         for s in free_sets) / 2
                worst = max(worst, tv)
        assert float(worst) < 1e-12
        elapsed = time.time() - t0
        assert elapsed < 120.0
    except AssertionError:
        _report(4, False, time.time() - t0, "exploration process")
        raise
    _report(4, True, elapsed,
            f"exploration admissible, efficient, disc-certified; conditional TV {float(worst):.1e}")


def test_criterion_5_annulus_order(sampled_interfaces_32):
    t0 = time.time()
    try:
        import random

        from test_annuli import TestOrderEquivalence, _open_path_segments

        rng = random.Random(2029)
        trials = 0
        while trials < 1000:
            v = sorted(set(Fraction(rng.randint(-8, 8), 2) for _ in range(8)))
            if len(v) < 8:
                continue
            a1 = PolyAnnulus.rect_pair((v[2], v[2], v[5], v[5]), (v[1], v[1], v[6], v[6]))
            a2 = PolyAnnulus.rect_pair((v[3], v[3], v[4], v[4]), (v[0], v[0], v[7], v[7]))
            if rng.random() < 0.5:
                a1, a2 = a2, a1
            trials += 1
            if leq_crs(a1, a2):
                path = TestOrderEquivalence._bfs_path(a2, None, None)
                assert path is not None and crosses(_open_path_segments(path), a1)
            else:
                w1 = TestOrderEquivalence._bfs_path(a2, a1.inner_rect(), None)
                ok = w1 is not None and not crosses(_open_path_segments(w1), a1)
                if not ok:
                    w2 = TestOrderEquivalence._bfs_path(a2, None, a1.outer_rect())
                    ok = w2 is not None and not crosses(_open_path_segments(w2), a1)
                assert ok
        samples, _engine = sampled_interfaces_32
        fam = DyadicFamily(3)
        violations = 0
        for eta in samples:
            violations += fingerprint(eta, fam).hereditary_violations()
        assert violations == 0
        elapsed = time.time() - t0
        assert elapsed < 30.0
    except AssertionError:
        _report(5, False, time.time() - t0, "annulus order coherence")
        raise
    _report(5, True, elapsed,
            "1000 order-equivalence pairs agree; 100 fingerprints hereditary, 0 violations")


def test_criterion_6_crossing_loop_identity(sampled_interfaces_32):
    t0 = time.time()
    try:
        fam = DyadicFamily(3)
        g2 = GridGeometry(2)
        win = certify_disc(block(g2, 0, 0, 4, 4))  # 3x3 vertex grid on the unit window
        for k in all_sourceless(win.graph):
            dec = decompose(k, win)
            assert fingerprint(k, fam) == F_fingerprint(dec.loops, fam, 2)
        samples, engine = sampled_interfaces_32
        for eta in samples:
            dec = decompose(eta, engine.primal)
            assert fingerprint(eta, fam) == F_fingerprint(dec.loops, fam, 32)
        elapsed = time.time() - t0
        assert elapsed < 60.0
    except AssertionError:
        _report(6, False, time.time() - t0, "config fingerprint vs loop fingerprint")
        raise
    _report(6, True, elapsed,
            "crossing bits of configs equal crossing bits of their loops, bit-exact")


def test_criterion_7_metric_axioms():
    t0 = time.time()
    try:
        import itertools
        import random

        sq2 = [(0, 0), (2, 0), (2, 2), (0, 2)]
        assert collection_distance([sq2], []) == pytest.approx(math.sqrt(2), abs=1e-9)
        sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
        sq_off = [(3, 0), (4, 0), (4, 1), (3, 1)]
        assert collection_distance([sq], [sq_off]) == pytest.approx(math.sqrt(2) / 2, abs=1e-9)

        rng = random.Random(12)

        def rand_loop():
            x0, y0 = rng.uniform(0, 3), rng.uniform(0, 3)
            w, h = rng.uniform(0.2, 2), rng.uniform(0.2, 2)
            return [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)]

        pool = [[rand_loop() for _ in range(rng.randint(0, 4))] for _ in range(26)]
        dist = {}
        for i in range(len(pool)):
            for j in range(i, len(pool)):
                dist[(i, j)] = collection_distance(pool[i], pool[j])
                assert abs(dist[(i, j)] - collection_distance(pool[j], pool[i])) < 1e-12

        def d(i, j):
            return dist[(min(i, j), max(i, j))] if i != j else 0.0

        triples = 0
        for a, b, c in itertools.permutations(range(len(pool)), 3):
            assert d(a, c) <= d(a, b) + d(b, c) + 1e-9
            triples += 1
            if triples >= 10000:
                break
        assert triples >= 10000
        elapsed = time.time() - t0
        assert elapsed < 30.0
    except AssertionError:
        _report(7, False, time.time() - t0, "collection metric axioms")
        raise
    _report(7, True, elapsed,
            "10^4 random triangle inequalities and both worked examples to 1e-9")


def test_criterion_8_stability_ladder():
    t0 = time.time()
    try:
        golden = json.loads((DATA / "golden_symdiff.json").read_text())
        a = central_annulus()
        ladder = {}
        for n in (16, 32, 64):
            ladder[n] = symdiff_crossing(a, n, golden["replicas"], golden["seed"], threads=8)
        for n in (16, 32, 64):
            g = golden["ladder"][str(n)]
            assert ladder[n].value == pytest.approx(g["value"], abs=1e-12)
            assert ladder[n].stderr == pytest.approx(g["stderr"], abs=1e-12)
        joint = ladder[16].joint_stderr(ladder[64])
        assert ladder[64].value <= ladder[16].value + 2 * joint
        elapsed = time.time() - t0
        assert elapsed < 900.0
    except AssertionError:
        _report(8, False, time.time() - t0, "stability ladder")
        raise
    vals = ", ".join(f"n={n}: {ladder[n].value:.4f}" for n in (16, 32, 64))
    _report(8, True, elapsed,
            f"symdiff ladder ({vals}) matches golden; n=64 within 2 joint stderr of n=16")


def test_criterion_9_reproducibility(tmp_path):
    t0 = time.time()
    try:
        cfg = {"command": "stability", "seed": 9, "replicas": 100,
               "n_values": [16], "mode": "symdiff"}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        blobs = []
        for name, threads in (("r1", "1"), ("r2", "1"), ("r8", "8")):
            out = tmp_path / name
            r = subprocess.run([sys.executable, "-m", "loopcross.cli",
                                "--config", str(cfg_path), "--out", str(out),
                                "--threads", threads],
                               capture_output=True, text=True)
            assert r.returncode == 0, r.stderr
            blobs.append((out / "stability.csv").read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]
        elapsed = time.time() - t0
    except AssertionError:
        _report(9, False, time.time() - t0, "CSV reproducibility")
        raise
    _report(9, True, elapsed,
            "stability CSV byte-identical across two runs and thread counts 1 and 8")
