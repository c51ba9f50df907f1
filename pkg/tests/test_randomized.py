"""Randomized isomorphism/equivalence decisions and their certificates."""

import itertools
import random
from fractions import Fraction
from math import factorial

import pytest

from dagiso import (
    Dag,
    IsoParams,
    MERSENNE31,
    ParameterError,
    Permutation,
    PrimeField,
    apply_permutation,
    choose_params,
    default_params,
    equivalence_test,
    failure_bound,
    isomorphism_test,
    markov_equivalent,
    pattern,
    pattern_isomorphic,
    perm_witness,
    sample_point,
)
from oracles import all_dags, covered_edge_partner, random_dag

CHAIN = Dag(3, [(0, 1), (1, 2)])
FORK = Dag(3, [(0, 1), (0, 2)])
COLLIDER = Dag(3, [(0, 2), (1, 2)])
M31 = PrimeField(MERSENNE31)


def params_for(g, g2, m=3, seed=0):
    return default_params(g, g2, m=m, seed=seed)


class TestIsomorphismTest:
    def test_chain_fork_yes(self):
        v = isomorphism_test(CHAIN, FORK, params_for(CHAIN, FORK, m=5))
        assert v.answer == "yes"
        assert v.rounds_run == 5
        assert len(v.witnesses) == 5

    def test_chain_collider_no(self):
        v = isomorphism_test(CHAIN, COLLIDER, params_for(CHAIN, COLLIDER, m=5))
        assert v.answer == "no"
        assert v.refuting_round == 1

    def test_fork_collider_no(self):
        v = isomorphism_test(FORK, COLLIDER, params_for(FORK, COLLIDER, m=5))
        assert v.answer == "no"

    def test_relabeling_always_accepted(self):
        rng = random.Random(3)
        for _ in range(40):
            n = rng.randrange(2, 6)
            g = random_dag(n, rng)
            perm = list(range(n))
            rng.shuffle(perm)
            g2 = apply_permutation(g, Permutation(perm))
            v = isomorphism_test(g, g2, params_for(g, g2, seed=rng.random()))
            assert v.answer == "yes"

    def test_one_sided_exhaustive_n_up_to_4(self):
        # every (dag, relabeling) pair must be accepted, in every round
        seed = 0
        for n in (2, 3, 4):
            for g in all_dags(n):
                for perm in itertools.permutations(range(n)):
                    g2 = apply_permutation(g, Permutation(perm))
                    seed += 1
                    assert isomorphism_test(
                        g, g2, params_for(g, g2, m=1, seed=seed)).answer == "yes"

    def test_witnesses_actually_map_between_varieties(self):
        v = isomorphism_test(CHAIN, FORK, params_for(CHAIN, FORK))
        from dagiso import on_variety
        field = PrimeField(v.params.q)
        from dagiso.points import _derive_seed
        for r, (fwd, bwd) in enumerate(v.witnesses, start=1):
            z_g = sample_point(CHAIN, field, _derive_seed(v.params.seed, r, "a"))
            z_g2 = sample_point(FORK, field, _derive_seed(v.params.seed, r, "b"))
            assert on_variety(z_g.relabel(fwd), FORK)
            assert on_variety(z_g2.relabel(bwd), CHAIN)

    def test_node_count_mismatch_is_structural_no(self):
        v = isomorphism_test(CHAIN, Dag(4, [(0, 1)]),
                             IsoParams(m=3, q=MERSENNE31, d_bound=20, seed=0))
        assert v.answer == "no" and v.rounds_run == 0 and v.refuting_round == 0

    def test_edge_count_mismatch_is_structural_no(self):
        g2 = Dag(3, [(0, 1)])
        v = isomorphism_test(CHAIN, g2, params_for(CHAIN, g2))
        assert v.answer == "no" and v.rounds_run == 0

    def test_node_guard(self):
        g = Dag(11, [(0, 1)])
        g2 = Dag(11, [(1, 2)])
        with pytest.raises(ParameterError):
            isomorphism_test(g, g2, params_for(g, g2))

    def test_deterministic_verdict_json(self):
        p = params_for(CHAIN, FORK, seed=99)
        a = isomorphism_test(CHAIN, FORK, p).to_json_dict()
        b = isomorphism_test(CHAIN, FORK, p).to_json_dict()
        assert a == b

    def test_agrees_with_pattern_oracle_sample(self):
        rng = random.Random(17)
        dags = list(all_dags(3))
        for _ in range(150):
            g1, g2 = rng.choice(dags), rng.choice(dags)
            expected = pattern_isomorphic(pattern(g1), pattern(g2)) is not None
            got = isomorphism_test(g1, g2, params_for(g1, g2,
                                                      seed=rng.random()))
            assert got.accepted == expected


class TestPermWitness:
    def test_chain_to_fork_finds_swap(self):
        z = sample_point(CHAIN, M31, seed=1)
        w = perm_witness(z, FORK, source_degrees=CHAIN.skeleton_degrees())
        assert w == Permutation((1, 0, 2))

    def test_chain_to_collider_finds_nothing(self):
        z = sample_point(CHAIN, M31, seed=1)
        assert perm_witness(z, COLLIDER,
                            source_degrees=CHAIN.skeleton_degrees()) is None

    def test_self_witness_is_identity(self):
        rng = random.Random(29)
        for _ in range(10):
            g = random_dag(4, rng)
            z = sample_point(g, M31, seed=rng.randrange(10**6))
            assert perm_witness(z, g, source_degrees=g.skeleton_degrees()) \
                == Permutation.identity(4)

    def test_pruning_never_changes_answer(self):
        rng = random.Random(31)
        for _ in range(60):
            n = rng.randrange(2, 5)
            g1, g2 = random_dag(n, rng), random_dag(n, rng)
            if g1.num_edges != g2.num_edges:
                continue
            z = sample_point(g1, M31, seed=rng.randrange(10**6))
            pruned = perm_witness(z, g2, source_degrees=g1.skeleton_degrees())
            full = perm_witness(z, g2)
            assert (pruned is None) == (full is None)


class TestEquivalenceTest:
    def test_chain_vs_reversed_chain_yes(self):
        rev = Dag(3, [(2, 1), (1, 0)])
        v = equivalence_test(CHAIN, rev, params_for(CHAIN, rev))
        assert v.answer == "yes"

    def test_chain_vs_collider_no(self):
        v = equivalence_test(CHAIN, COLLIDER, params_for(CHAIN, COLLIDER))
        assert v.answer == "no"

    def test_self_equivalence(self):
        rng = random.Random(37)
        for _ in range(20):
            g = random_dag(rng.randrange(2, 7), rng)
            assert equivalence_test(g, g, params_for(g, g)).answer == "yes"

    def test_covered_edge_reversal_equivalent(self):
        rng = random.Random(41)
        found = 0
        while found < 20:
            g = random_dag(rng.randrange(3, 6), rng)
            partner = covered_edge_partner(g, rng)
            if partner is None:
                continue
            found += 1
            assert markov_equivalent(g, partner)
            assert equivalence_test(g, partner,
                                    params_for(g, partner)).answer == "yes"

    def test_agrees_with_pattern_equality_sample(self):
        rng = random.Random(43)
        dags = list(all_dags(3))
        for _ in range(150):
            g1, g2 = rng.choice(dags), rng.choice(dags)
            v = equivalence_test(g1, g2, params_for(g1, g2, seed=rng.random()))
            assert v.accepted == markov_equivalent(g1, g2)

    def test_scales_past_the_factorial_guard(self):
        rng = random.Random(47)
        g = random_dag(30, rng, p=0.1)
        assert equivalence_test(g, g, params_for(g, g, m=1)).answer == "yes"


class TestFailureBound:
    def test_paper_worked_value(self):
        assert failure_bound(3, 2, 101, 1) == Fraction(4, 11)

    def test_exponentiation_in_rounds(self):
        assert failure_bound(3, 2, 101, 2) == Fraction(4, 11) ** 2

    def test_large_modulus_tiny_bound(self):
        exact = failure_bound(6, 100, MERSENNE31, 3)
        assert exact == Fraction(factorial(6) * (6 + 200 - 1),
                                 MERSENNE31 - 100) ** 3
        assert failure_bound(6, 100, MERSENNE31, 3,
                             with_permutations=False) < Fraction(1, 10**15)

    def test_rejects_small_modulus(self):
        with pytest.raises(ParameterError):
            failure_bound(3, 101, 101, 1)

    def test_strictly_decreasing_in_q_and_m(self):
        rng = random.Random(53)
        primes = [x for x in range(10**4, 10**5) if _is_prime_slow(x)]
        for _ in range(100):
            n = rng.randrange(1, 9)
            d = rng.randrange(1, 200)
            q1, q2 = sorted(rng.sample(primes, 2))
            m = rng.randrange(1, 5)
            assert failure_bound(n, d, q2, m) < failure_bound(n, d, q1, m)
            base_small = failure_bound(n, d, MERSENNE31, 1)
            assert base_small < 1
            assert failure_bound(n, d, MERSENNE31, m + 1) \
                < failure_bound(n, d, MERSENNE31, m)

    def test_vacuous_flagged(self):
        v = failure_bound(8, 50, 1009, 1)
        assert v >= 1  # 8! dominates a thousand-sized modulus


def _is_prime_slow(x):
    return x > 1 and all(x % p for p in range(2, int(x ** 0.5) + 1))


class TestChooseParams:
    def test_meets_target(self):
        p = choose_params(4, 6, Fraction(1, 10**9))
        assert p.q == MERSENNE31
        assert failure_bound(4, p.d_bound, p.q, p.m) <= Fraction(1, 10**9)

    def test_eps_one_needs_single_round(self):
        assert choose_params(4, 6, Fraction(1)).m == 1

    def test_tight_target_large_n(self):
        p = choose_params(10, 20, Fraction(1, 10**12))
        assert failure_bound(10, p.d_bound, p.q, p.m) <= Fraction(1, 10**12)

    def test_unreachable_with_small_modulus(self):
        with pytest.raises(ParameterError):
            choose_params(8, 20, Fraction(1, 10**9), q=101)

    def test_rejects_nonpositive_eps(self):
        with pytest.raises(ParameterError):
            choose_params(4, 6, Fraction(0))


class TestIsoParams:
    def test_validation(self):
        with pytest.raises(ParameterError):
            IsoParams(m=0, q=101, d_bound=2, seed=0)
        with pytest.raises(ParameterError):
            IsoParams(m=1, q=101, d_bound=101, seed=0)

    def test_verdict_json_shape(self):
        v = isomorphism_test(CHAIN, FORK, params_for(CHAIN, FORK))
        d = v.to_json_dict()
        assert d["answer"] == "yes"
        assert d["params"]["q"] == MERSENNE31
        assert d["certificate"]["heuristic"] is True
        assert d["certificate"]["vacuous"] is False
        num, den = d["certificate"]["failure_bound"].split("/")
        assert Fraction(int(num), int(den)) == v.failure_bound
