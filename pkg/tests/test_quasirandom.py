import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_discrepancy
from subramsey.bigraph import BipartiteGraph, edge_count_between, format_edge_list
from subramsey.quasirandom import QuasiParams, check_density, check_discrepancy, density_window, sample_host


class TestSampling:
    def test_extremes(self):
        assert sample_host(10, 1.0, 0).num_edges == 100
        assert sample_host(10, 1e-12, 0).num_edges == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_edge_count_near_mean(self, seed):
        # mean N^2 p = 2048, sd 32
        assert 1920 <= sample_host(64, 0.5, seed).num_edges <= 2176

    def test_frozen_counts(self):
        assert [sample_host(64, 0.5, s).num_edges for s in range(3)] == [2050, 2055, 2026]

    def test_parallel_matches_sequential(self):
        a = format_edge_list(sample_host(50, 0.2, 123))
        b = format_edge_list(sample_host(50, 0.2, 123, jobs=3))
        assert a == b

    def test_seeds_differ(self):
        assert format_edge_list(sample_host(30, 0.5, 1)) != format_edge_list(sample_host(30, 0.5, 2))

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            QuasiParams(10, 0.0)


class TestDensity:
    def test_window_example(self):
        lo, hi = density_window(QuasiParams(64, 0.5, 0.25), 64)
        assert lo == pytest.approx(1323.9, abs=0.05)
        assert hi == pytest.approx(2772.1, abs=0.05)

    def test_complete_and_empty(self):
        q = QuasiParams(8, 1.0, 0.1)
        ok, e, _ = check_density(BipartiteGraph.complete(8, 8), q, 8)
        assert ok and e == 64
        assert not check_density(BipartiteGraph(8, 8), QuasiParams(8, 0.5, 0.25), 8)[0]

    def test_verdict_is_direct_count(self):
        g = sample_host(64, 0.5, 0)
        q = QuasiParams(64, 0.5, 0.25)
        ok, e, (lo, hi) = check_density(g, q, 64)
        assert e == g.num_edges and ok == (lo <= e <= hi)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 0.5), st.floats(0.05, 0.5))
    def test_monotone_in_epsilon(self, e1, e2):
        g = sample_host(20, 0.5, 4)
        small, big = sorted((e1, e2))
        if check_density(g, QuasiParams(20, 0.5, small), 20)[0]:
            assert check_density(g, QuasiParams(20, 0.5, big), 20)[0]


class TestDiscrepancy:
    def test_complete(self):
        rep = check_discrepancy(BipartiteGraph.complete(6, 6), QuasiParams(6, 1.0, c3n=2))
        assert rep.passed and rep.max_relative_deviation == 0

    def test_edgeless(self):
        # every pair deviates by exactly 1; a threshold below 1 fails
        q = QuasiParams(6, 0.5, delta=0.9, c3n=2)
        rep = check_discrepancy(BipartiteGraph(6, 6), q)
        assert rep.max_relative_deviation == 1.0 and not rep.passed

    def test_agrees_with_brute_force(self):
        g = sample_host(12, 0.5, 3)
        rep = check_discrepancy(g, QuasiParams(12, 0.5, c3n=6))
        best, (U, W) = oracle_discrepancy(g, 0.5, 6)
        assert rep.max_relative_deviation == pytest.approx(best, abs=1e-12)
        assert rep.worst_U.members == U and rep.worst_W.members == W
        # frozen
        assert best == pytest.approx(2 / 3)
        assert U == (1, 2, 4, 5, 7, 11) and W == (1, 2, 3, 4, 5, 9)

    def test_worst_pair_attains_maximum(self):
        g = sample_host(10, 0.3, 8)
        rep = check_discrepancy(g, QuasiParams(10, 0.3, c3n=4))
        u, w = len(rep.worst_U), len(rep.worst_W)
        e = edge_count_between(g, rep.worst_U, rep.worst_W)
        assert abs(e - 0.3 * u * w) / (0.3 * u * w) == pytest.approx(rep.max_relative_deviation)

    def test_sampled_is_lower_bound(self):
        g = sample_host(10, 0.5, 2)
        q = QuasiParams(10, 0.5, c3n=3)
        exact = check_discrepancy(g, q)
        sampled = check_discrepancy(g, q, "sampled", trials=300, seed=1)
        assert sampled.max_relative_deviation <= exact.max_relative_deviation + 1e-12
        assert sampled.to_json() == check_discrepancy(g, q, "sampled", trials=300, seed=1).to_json()
