"""DAG representation, ordering, relabeling, and the pattern oracle."""

import itertools
import random

import pytest

from dagiso import (
    CycleError,
    Dag,
    DagError,
    Pattern,
    Permutation,
    apply_permutation,
    markov_equivalent,
    nondescendants,
    pattern,
    pattern_isomorphic,
    relabel_pattern,
    topo_sort,
)
from oracles import all_dags, random_dag, random_permutation

CHAIN = Dag(3, [(0, 1), (1, 2)])
FORK = Dag(3, [(0, 1), (0, 2)])
COLLIDER = Dag(3, [(0, 2), (1, 2)])


class TestConstruction:
    def test_rejects_cycle(self):
        with pytest.raises(CycleError):
            Dag(3, [(0, 1), (1, 2), (2, 0)])

    def test_rejects_two_cycle(self):
        with pytest.raises(CycleError):
            Dag(2, [(0, 1), (1, 0)])

    def test_rejects_self_loop(self):
        with pytest.raises(DagError):
            Dag(2, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(DagError):
            Dag(2, [(0, 2)])

    def test_duplicate_edges_collapse(self):
        assert Dag(2, [(0, 1), (0, 1)]).num_edges == 1

    def test_json_round_trip(self):
        g = Dag(4, [(2, 0), (0, 1), (1, 3)])
        assert Dag.from_json_dict(g.to_json_dict()) == g

    def test_one_based_input(self):
        d = {"n": 3, "edges": [[1, 2], [2, 3]]}
        assert Dag.from_json_dict(d, one_based=True) == CHAIN


class TestTopoSort:
    def test_chain_already_sorted(self):
        assert topo_sort(CHAIN) == (0, 1, 2)

    def test_kahn_by_hand(self):
        assert topo_sort(Dag(3, [(2, 0), (0, 1)])) == (2, 0, 1)

    def test_smallest_id_tie_break(self):
        assert topo_sort(Dag(3, [(1, 0), (2, 0)])) == (1, 2, 0)

    def test_parent_precedes_child_everywhere(self):
        for n in (2, 3, 4):
            for g in all_dags(n):
                order = topo_sort(g)
                pos = {v: k for k, v in enumerate(order)}
                assert all(pos[u] < pos[v] for u, v in g.edges)


class TestNondescendants:
    def test_chain_middle(self):
        assert nondescendants(CHAIN, 1) == frozenset({0})

    def test_collider_source(self):
        assert nondescendants(COLLIDER, 0) == frozenset({1})

    def test_edgeless(self):
        assert nondescendants(Dag(3), 0) == frozenset({1, 2})

    def test_out_of_range(self):
        with pytest.raises(DagError):
            nondescendants(CHAIN, 3)


class TestApplyPermutation:
    def test_swap_on_chain(self):
        g = apply_permutation(CHAIN, Permutation((1, 0, 2)))
        assert g.edges == frozenset({(1, 0), (0, 2)})

    def test_identity(self):
        assert apply_permutation(CHAIN, Permutation.identity(3)) == CHAIN

    def test_three_cycle_on_collider(self):
        g = apply_permutation(COLLIDER, Permutation((1, 2, 0)))
        assert g.edges == frozenset({(1, 0), (2, 0)})

    def test_permutation_validation(self):
        with pytest.raises(DagError):
            Permutation((0, 0, 2))


class TestPattern:
    def test_chain(self):
        p = pattern(CHAIN)
        assert p.skeleton == frozenset({(0, 1), (1, 2)})
        assert p.immoralities == frozenset()

    def test_fork_matches_chain(self):
        p = pattern(FORK)
        assert p.skeleton == frozenset({(0, 1), (0, 2)})
        assert p.immoralities == frozenset()

    def test_collider(self):
        p = pattern(COLLIDER)
        assert p.skeleton == frozenset({(0, 2), (1, 2)})
        assert p.immoralities == frozenset({(0, 2, 1)})

    def test_shielded_collider_is_moral(self):
        g = Dag(3, [(0, 2), (1, 2), (0, 1)])
        assert pattern(g).immoralities == frozenset()

    def test_immorality_validation(self):
        with pytest.raises(DagError):
            Pattern(3, [(0, 2), (1, 2), (0, 1)], [(0, 2, 1)])


class TestPatternIsomorphic:
    def test_chain_fork_swap(self):
        w = pattern_isomorphic(pattern(CHAIN), pattern(FORK))
        assert w is not None
        assert relabel_pattern(pattern(CHAIN), w) == pattern(FORK)

    def test_chain_collider_none(self):
        assert pattern_isomorphic(pattern(CHAIN), pattern(COLLIDER)) is None

    def test_reflexive_identity(self):
        p = pattern(CHAIN)
        assert pattern_isomorphic(p, p) == Permutation.identity(3)

    def test_reflexive_all_n4(self):
        for g in all_dags(4):
            assert pattern_isomorphic(pattern(g), pattern(g)) is not None

    def test_symmetric_witness_inverse_n3(self):
        dags = list(all_dags(3))
        for g1, g2 in itertools.product(dags, repeat=2):
            w = pattern_isomorphic(pattern(g1), pattern(g2))
            back = pattern_isomorphic(pattern(g2), pattern(g1))
            assert (w is None) == (back is None)
            if w is not None:
                assert relabel_pattern(pattern(g2), w.inverse()) == pattern(g1)

    def test_transitive_witness_composition(self):
        rng = random.Random(7)
        dags = list(all_dags(4))
        for _ in range(300):
            g1 = rng.choice(dags)
            p12 = random_permutation(4, rng)
            p23 = random_permutation(4, rng)
            g2 = apply_permutation(g1, Permutation(p12))
            g3 = apply_permutation(g2, Permutation(p23))
            w12 = pattern_isomorphic(pattern(g1), pattern(g2))
            w23 = pattern_isomorphic(pattern(g2), pattern(g3))
            assert w12 is not None and w23 is not None
            composed = w23.compose(w12)
            assert relabel_pattern(pattern(g1), composed) == pattern(g3)


class TestInvariants:
    def test_pattern_commutes_with_relabeling(self):
        rng = random.Random(3)
        cases = [(g, perm) for g in all_dags(3)
                 for perm in itertools.permutations(range(3))]
        cases += [(random_dag(5, rng), random_permutation(5, rng))
                  for _ in range(200)]
        for g, perm in cases:
            p = Permutation(perm)
            assert pattern(apply_permutation(g, p)) \
                == relabel_pattern(pattern(g), p)

    def test_equal_pattern_implies_equal_edge_count(self):
        for g1, g2 in itertools.product(all_dags(3), repeat=2):
            if markov_equivalent(g1, g2):
                assert g1.num_edges == g2.num_edges

    def test_isomorphic_implies_equal_edge_count(self):
        dags = list(all_dags(4))
        for g1, g2 in itertools.product(dags[::7], dags[::11]):
            if pattern_isomorphic(pattern(g1), pattern(g2)) is not None:
                assert g1.num_edges == g2.num_edges

    def test_dag_counts(self):
        assert sum(1 for _ in all_dags(3)) == 25
        assert sum(1 for _ in all_dags(4)) == 543
