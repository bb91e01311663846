import math

import numpy as np
import pytest

from loopcross.lattice import (
    Orientation,
    Subgraph,
    block,
    certify_disc,
    dual_disc,
    edge,
)
from loopcross.loopdecomp import decompose, is_outmost, peel_levels
from loopcross.models import (
    WolffChain,
    critical_constants,
    enumerate_current_trace,
    enumerate_ht_law,
    enumerate_ising_plus,
    flux_tail,
    interface_of,
    ising_loop_levels,
    overlay_law,
    pushforward_interface_law,
    sample_current_trace,
    sample_ising_plus,
    state_from_assignment,
)
from loopcross.percolation import source_set

CC = critical_constants()
SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def square_disc(grid1):
    return certify_disc(block(grid1, 0, 0, 2, 2))


@pytest.fixture(scope="module")
def single_edge(grid1):
    e = edge((0, 0), (2, 0))
    return Subgraph(grid1, frozenset(e), frozenset([e]))


class TestConstants:
    def test_beta_c(self):
        assert CC.beta_c == pytest.approx(0.5 * math.log(1 + SQRT2), abs=0)
        assert CC.beta_c == pytest.approx(0.44068679350977147, abs=1e-15)

    def test_tanh(self):
        assert CC.tanh_beta_c == pytest.approx(SQRT2 - 1, abs=1e-15)
        assert math.tanh(CC.beta_c) == pytest.approx(CC.tanh_beta_c, abs=1e-12)

    def test_t_c_closed_forms(self):
        assert CC.t_c == pytest.approx(1 - 1 / math.cosh(CC.beta_c), abs=1e-15)
        assert CC.t_c == pytest.approx(1 - math.sqrt(2 * SQRT2 - 2), abs=1e-12)
        assert CC.t_c == pytest.approx(0.0898201, abs=1e-6)

    def test_t_star_and_ordering(self):
        assert CC.t_star == pytest.approx(3 - 2 * SQRT2, abs=1e-15)
        assert CC.t_star == pytest.approx(CC.tanh_beta_c ** 2, abs=1e-12)
        assert 0 < CC.t_c < CC.t_star < 1


class TestEnumerateLaws:
    def test_ht_square(self, square_disc):
        law = enumerate_ht_law(square_disc.graph)
        x4 = (SQRT2 - 1) ** 4
        assert law.prob_of(frozenset()) == pytest.approx(1 / (1 + x4), abs=1e-12)
        assert law.prob_of(square_disc.graph.edges) == pytest.approx(x4 / (1 + x4), abs=1e-12)
        assert law.prob_of(frozenset()) == pytest.approx(0.971404, abs=1e-6)
        assert law.prob_of(square_disc.graph.edges) == pytest.approx(0.028596, abs=1e-6)

    def test_ising_single_free_spin(self, square_disc):
        dd = dual_disc(square_disc)
        law = enumerate_ising_plus(dd)
        assert len(law.free_vertices) == 1
        p_minus = sum(p for a, p in law.probs.items() if a[0] == -1)
        assert p_minus == pytest.approx(1 / (1 + (1 + SQRT2) ** 4), abs=1e-12)
        assert p_minus == pytest.approx(0.028596, abs=1e-6)

    def test_current_trace_single_edge(self, single_edge):
        tl = enumerate_current_trace(single_edge, n_max=8)
        p1 = tl.law.prob_of(single_edge.edges)
        assert abs(p1 - CC.t_c) < 1e-6
        assert tl.truncation_tail == pytest.approx(flux_tail(CC.beta_c, 8), abs=0)
        assert tl.truncation_tail < 3e-6


class TestKramersWannier:
    @pytest.mark.parametrize("size", [2, 4, 6, 8])
    def test_pushforward_equals_ht(self, grid1, size):
        primal = certify_disc(block(grid1, 0, 0, size, size))
        dd = dual_disc(primal)
        law = enumerate_ising_plus(dd)
        assert len(law.free_vertices) <= 16
        push = pushforward_interface_law(law, primal)
        ht = enumerate_ht_law(primal.graph)
        assert push.tv(ht) < 1e-12


class TestCoupling:
    def test_single_edge(self, single_edge):
        trace = enumerate_current_trace(single_edge, n_max=8)
        coupled = overlay_law(enumerate_ht_law(single_edge), CC.t_c)
        assert coupled.tv(trace.law) < 1e-4
        assert coupled.prob_of(single_edge.edges) == pytest.approx(CC.t_c, abs=1e-12)

    def test_square(self, square_disc):
        trace = enumerate_current_trace(square_disc.graph, n_max=8)
        coupled = overlay_law(enumerate_ht_law(square_disc.graph), CC.t_c)
        assert coupled.tv(trace.law) < 1e-4


class TestInterface:
    def test_all_plus_empty(self, square_disc):
        dd = dual_disc(square_disc)
        law = enumerate_ising_plus(dd)
        st = state_from_assignment(dd, law, (1,))
        assert interface_of(st, square_disc).open_edges == frozenset()

    def test_single_minus_square(self, square_disc):
        dd = dual_disc(square_disc)
        law = enumerate_ising_plus(dd)
        st = state_from_assignment(dd, law, (-1,))
        assert interface_of(st, square_disc).open_edges == square_disc.graph.edges

    def test_sampled_interfaces_sourceless_and_decomposable(self, grid1):
        primal = certify_disc(block(grid1, 0, 0, 10, 10))
        dd = dual_disc(primal)
        chain = WolffChain(dd, seed=5)
        chain.run(300)
        for _ in range(20):
            chain.run(10)
            eta = interface_of(chain.state(), primal)
            assert source_set(eta, primal.graph) == set()
            decompose(eta, primal)  # raises on any violation


class TestWolff:
    def test_single_spin_matches_exact(self, square_disc):
        dd = dual_disc(square_disc)
        law = enumerate_ising_plus(dd)
        p_minus = sum(p for a, p in law.probs.items() if a[0] == -1)
        chain = WolffChain(dd, seed=7)
        chain.run(200)
        free = int(chain.free_idx[0])
        hits = 0
        n = 30000
        for _ in range(n):
            chain.update()
            hits += chain.spins[free] == -1
        phat = hits / n
        sigma = math.sqrt(p_minus * (1 - p_minus) / n)
        assert abs(phat - p_minus) < 5 * sigma + 0.002

    def test_all_boundary_disc_stays_plus(self, grid1):
        # dual disc of a single edge has no free spins
        e = edge((0, 0), (2, 0))
        sub = Subgraph(grid1, frozenset(e), frozenset([e]))
        dd = dual_disc(certify_disc(Subgraph(grid1, frozenset(e), frozenset([e]))))
        st = sample_ising_plus(dd, seed=1, burn_in=10)
        assert (st.spins == 1).all()

    def test_positive_magnetization(self, grid1):
        primal = certify_disc(block(grid1, 0, 0, 12, 12))
        dd = dual_disc(primal)
        chain = WolffChain(dd, seed=3)
        chain.run(500)
        total = 0.0
        for _ in range(200):
            chain.run(5)
            total += chain.state().magnetization()
        assert total / 200 > 0

    def test_deterministic(self, square_disc):
        dd = dual_disc(square_disc)
        a = sample_ising_plus(dd, seed=11, burn_in=50, sweeps=10)
        b = sample_ising_plus(dd, seed=11, burn_in=50, sweeps=10)
        assert (a.spins == b.spins).all()


class TestSampleCurrentTrace:
    def test_eta_subset_trace(self, grid1):
        primal = certify_disc(block(grid1, 0, 0, 8, 8))
        for seed in range(5):
            eta, trace = sample_current_trace(primal, seed, burn_in=100)
            assert eta.open_edges <= trace.open_edges
            assert source_set(eta, primal.graph) == set()

    def test_single_edge_domain(self, grid1, single_edge):
        # eta is forced empty (no sourceless nonempty config on one edge);
        # the trace law is Bernoulli(t_c)
        disc = certify_disc(single_edge)
        hits = 0
        n = 2000
        for r in range(n):
            eta, trace = sample_current_trace(disc, 1000 + r, burn_in=5)
            assert eta.open_edges == frozenset()
            hits += bool(trace.open_edges)
        sigma = math.sqrt(CC.t_c * (1 - CC.t_c) / n)
        assert abs(hits / n - CC.t_c) < 4 * sigma


class TestIsingLoopLevels:
    def test_single_minus_spin(self, grid1):
        primal = certify_disc(block(grid1, 0, 0, 4, 4))
        dd = dual_disc(primal)
        law = enumerate_ising_plus(dd)
        target = {(3, 3)}
        assign = tuple(-1 if v in target else 1 for v in law.free_vertices)
        st = state_from_assignment(dd, law, assign)
        ill = ising_loop_levels(st, primal)
        assert len(ill.loops) == 1
        assert ill.levels == (1,)
        assert ill.side_most == (True,)
        assert ill.loops[0].orientation is Orientation.CW

    def test_nested_island(self, grid1):
        # 7x7 dual (5x5 free): minus region with a plus island inside
        from loopcross.models import IsingState

        primal = certify_disc(block(grid1, 0, 0, 10, 10))
        dd = dual_disc(primal)
        verts = tuple(sorted(dd.graph.vertices))
        bnd = dd.boundary_loop.vertex_set()
        island = {(5, 5)}
        spins = np.array([
            -1 if (v not in bnd and v not in island) else 1 for v in verts
        ], dtype=np.int8)
        st = IsingState(dd, verts, spins)
        ill = ising_loop_levels(st, primal)
        assert sorted(ill.levels) == [1, 2]
        by = ill.most_by_level()
        assert set(by.keys()) == {1, 2}
        for l, lv in zip(ill.loops, ill.levels):
            want = Orientation.CW if lv % 2 else Orientation.CCW
            assert l.orientation is want

    def test_exhaustive_matches_peeling(self, grid1):
        # all 4x4-dual states (2x2 free spins) plus the 5x5-dual family:
        # spin-side levels and side-most flags equal peel levels and
        # outmost flags
        for size in (2, 4):
            primal = certify_disc(block(grid1, 0, 0, size, size))
            dd = dual_disc(primal)
            law = enumerate_ising_plus(dd)
            for assign in law.probs:
                st = state_from_assignment(dd, law, assign)
                eta = interface_of(st, primal)
                ill = ising_loop_levels(st, primal)
                levels, _ = peel_levels(eta, primal)
                spin_sets = {}
                for l, lv in zip(ill.loops, ill.levels):
                    spin_sets.setdefault(lv, set()).update(l.edge_set())
                peel_sets = {}
                for i, lv in enumerate(levels, 1):
                    for l in lv:
                        peel_sets.setdefault(i, set()).update(l.edge_set())
                assert spin_sets == peel_sets
                spin_most = {}
                for l, lv, m in zip(ill.loops, ill.levels, ill.side_most):
                    if m:
                        spin_most.setdefault(lv, set()).add(l.edge_set())
                peel_most = {}
                for i, lv in enumerate(levels, 1):
                    for l in lv:
                        if is_outmost(l, eta):
                            peel_most.setdefault(i, set()).add(l.edge_set())
                assert spin_most == peel_most
