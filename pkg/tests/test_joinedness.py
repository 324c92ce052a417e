from fractions import Fraction
from math import floor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_alpha_joined, oracle_extraction_bullets
from subramsey.bigraph import BipartiteGraph, VertexSet, edge_count_between
from subramsey.errors import EnumerationBudgetExceeded, InsufficientYSpace, RemovalOverflow
from subramsey.goodembed import verify_good
from subramsey.joinedness import (
    alpha_size,
    extract_expander,
    initial_null_embedding,
    is_alpha_joined,
    verify_extraction,
)
from subramsey.quasirandom import sample_host


def without_block(N, A, B):
    return BipartiteGraph.from_edges(N, N, [(i, j) for i in range(N) for j in range(N) if not (i in A and j in B)])


@st.composite
def square_graphs(draw, max_n=10):
    N = draw(st.integers(1, max_n))
    p = draw(st.floats(0.3, 1.0))
    seed = draw(st.integers(0, 2**32))
    return sample_host(N, p, seed)


class TestAlphaSize:
    def test_ceiling(self):
        assert alpha_size(Fraction(1, 6), 18) == 3
        assert alpha_size(Fraction(1, 6), 19) == 4
        assert alpha_size(0.25, 12) == 3


class TestIsAlphaJoined:
    @pytest.mark.parametrize("N", [1, 5, 12])
    def test_complete(self, N):
        assert is_alpha_joined(BipartiteGraph.complete(N, N), Fraction(1, 4))

    def test_planted_hole(self):
        v = is_alpha_joined(without_block(12, {0, 1, 2}, {0, 1, 2}), Fraction(1, 4))
        assert not v
        assert v.witness_A.members == (0, 1, 2) and v.witness_B.members == (0, 1, 2)

    def test_edgeless(self):
        v = is_alpha_joined(BipartiteGraph(8, 8), Fraction(1, 8))
        assert not v.joined
        assert (v.witness_A.members, v.witness_B.members) == ((0,), (0,))

    def test_witness_is_empty_pair(self):
        g = sample_host(12, 0.6, 5)
        v = is_alpha_joined(g, Fraction(1, 4))
        if not v:
            assert len(v.witness_A) == len(v.witness_B) == 3
            assert edge_count_between(g, v.witness_A, v.witness_B) == 0

    def test_budget(self):
        with pytest.raises(EnumerationBudgetExceeded):
            is_alpha_joined(sample_host(40, 0.5, 1), Fraction(1, 4), budget=1000)

    def test_json(self):
        d = is_alpha_joined(BipartiteGraph(4, 4), Fraction(1, 4)).to_json()
        assert d["joined"] is False and d["witness_A"] == [0]

    @settings(max_examples=120, deadline=None)
    @given(square_graphs(), st.sampled_from([Fraction(1, 5), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]))
    def test_exact_size_suffices(self, g, alpha):
        assert is_alpha_joined(g, alpha).joined == oracle_alpha_joined(g, alpha)


class TestExtraction:
    @pytest.mark.parametrize("N", [6, 12, 18])
    def test_complete_host(self, N):
        res = extract_expander(BipartiteGraph.complete(N, N), Fraction(1, 6))
        assert not res.removed1.members and not res.removed2.members
        assert len(res.kept1) == len(res.kept2) == N
        assert verify_extraction(res.subgraph()[0], Fraction(1, 6), N)

    def test_isolated_vertex_removed(self):
        g = BipartiteGraph.from_edges(18, 18, [(i, j) for i in range(18) for j in range(18) if i != 7])
        res = extract_expander(g, Fraction(1, 6))
        assert 7 in res.removed1.members
        assert len(res.kept1) >= 15 and len(res.kept2) >= 15
        assert res.removal_log[0].removed == VertexSet(1, (7,))
        assert res.removal_log[0].neighborhood_size == 0
        gp = res.subgraph()[0]
        assert verify_extraction(gp, Fraction(1, 6), 18)

    def test_edgeless_overflows(self):
        with pytest.raises(RemovalOverflow) as info:
            extract_expander(BipartiteGraph(12, 12), Fraction(1, 6))
        A, B = info.value.witness
        assert len(A) == len(B) == 2

    def test_y_sets(self):
        res = extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6))
        assert res.Y1.members == tuple(range(6)) and res.Y2prime.members == tuple(range(6))
        seeded = extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6), y_seed=4)
        assert len(seeded.Y1) == 6
        assert seeded.to_json() == extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6), y_seed=4).to_json()

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            extract_expander(BipartiteGraph.complete(10, 10), Fraction(1, 4))

    def test_search_cap_recorded(self):
        res = extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6), max_size=1)
        assert res.search_cap == 1 and res.to_json()["search_cap"] == 1

    @settings(max_examples=40, deadline=None)
    @given(st.integers(6, 12), st.floats(0.75, 1.0), st.integers(0, 2**32))
    def test_removed_within_bound_on_joined(self, N, p, seed):
        g = sample_host(N, p, seed)
        alpha = Fraction(1, 6)
        if not is_alpha_joined(g, alpha):
            return
        a = alpha_size(alpha, N)
        try:
            res = extract_expander(g, alpha)
        except RemovalOverflow:
            # only possible when alpha N is not an integer (see README)
            assert (alpha * N).denominator != 1
            return
        assert len(res.removed1) <= a and len(res.removed2) <= a


class TestVerifyExtraction:
    def test_matching_complement(self):
        N = 12
        g = BipartiteGraph.from_edges(N, N, [(i, j) for i in range(N) for j in range(N) if i != j])
        res = extract_expander(g, Fraction(1, 6))
        gp = res.subgraph()[0]
        assert verify_extraction(gp, Fraction(1, 6), N).ok == (not oracle_extraction_bullets(gp, Fraction(1, 6), N))

    def test_injected_low_degree(self):
        N = 12
        g = BipartiteGraph.from_edges(N, N, [(i, j) for i in range(N) for j in range(N) if i != 0 or j == 0])
        v = verify_extraction(g, Fraction(1, 6), N)
        assert not v
        name, X = v.witness
        assert name == "small_sets" and X == VertexSet(1, (0,))
        assert "small_sets" in oracle_extraction_bullets(g, Fraction(1, 6), N)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(4, 9), st.floats(0.4, 1.0), st.integers(0, 2**32), st.sampled_from([Fraction(1, 6), Fraction(1, 9)]))
    def test_matches_oracle(self, N, p, seed, alpha):
        g = sample_host(N, p, seed)
        got = verify_extraction(g, alpha, N)
        assert got.ok == (not oracle_extraction_bullets(g, alpha, N))
        if not got.ok:
            assert got.witness[0] in oracle_extraction_bullets(g, alpha, N)


class TestInitialNullEmbedding:
    def test_empty(self):
        res = extract_expander(BipartiteGraph.complete(12, 12), Fraction(1, 6))
        emb = initial_null_embedding(res, 0, 0)
        assert len(emb) == 0 and verify_good(emb, 3, 1)

    def test_images_in_Y_prime(self):
        res = extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6))
        emb = initial_null_embedding(res, 3, 3)
        _, map1, map2 = res.subgraph()
        maps = {1: map1, 2: map2}
        Yp = {1: set(res.Y1prime.members), 2: set(res.Y2prime.members)}
        for h in emb.forward.values():
            assert maps[h.part][h.index] in Yp[h.part]
        assert verify_good(emb, 18, 0)

    def test_degree_one_goodness_fails_on_large_sets(self):
        # 13 part-1 vertices see all 18 - 3 fresh vertices but cost 13 + 3
        res = extract_expander(BipartiteGraph.complete(18, 18), Fraction(1, 6))
        v = verify_good(initial_null_embedding(res, 3, 3), 18, 1)
        assert not v
        assert len(v.witness.X) == 13 and v.witness.R_value == -1

    def test_insufficient_space(self):
        res = extract_expander(BipartiteGraph.complete(12, 12), Fraction(1, 6))
        with pytest.raises(InsufficientYSpace):
            initial_null_embedding(res, len(res.Y1prime) + 1, 0)

    @pytest.mark.parametrize("alpha", [Fraction(1, 6), Fraction(1, 9), Fraction(1, 12)])
    @pytest.mark.parametrize("N", [12, 16, 20])
    def test_good_at_extraction_parameters(self, alpha, N):
        for g in (BipartiteGraph.complete(N, N), sample_host(N, 0.9, N)):
            if not is_alpha_joined(g, alpha):
                continue
            a = alpha_size(alpha, N)
            emb = initial_null_embedding(extract_expander(g, alpha), a, a)
            assert verify_good(emb, 6 * a, floor((1 - 4 * alpha) / (6 * alpha)))
