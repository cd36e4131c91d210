import math
from itertools import product

import numpy as np
import pytest

from gqtsp.errors import NoHamiltonianCycleError
from gqtsp.tsp import (
    INF,
    AdjacencyLists,
    TspGraph,
    brute_force_best,
    build_adjacency_lists,
    cost,
    decode_successor,
    is_hamiltonian_theorem1,
    is_hamiltonian_theorem2,
    is_single_cycle,
    load_graph,
    normalize_phases,
    proper_divisors,
    random_euclidean_graph,
    random_integer_graph,
    ranked_undirected,
    sample_valid_cycles,
    save_graph,
    sigma0,
    tour_to_word,
    value_to_word,
    word_to_tour,
    word_to_value,
)


def complete_graph(n, weight=1.0):
    costs = np.full((n, n), weight)
    np.fill_diagonal(costs, INF)
    return TspGraph(costs)


def bowtie_costs():
    """Two triangles sharing city 0: degrees >= 2 but no Hamiltonian cycle."""
    costs = np.full((5, 5), INF)
    for i, j in [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]:
        costs[i, j] = costs[j, i] = 1.0
    return costs


# the worked 6-city encoding example: word, successor row and the tour it encodes
EXAMPLE_WORD = (2, 3, 1, 4, 0, 2)
EXAMPLE_SUCCESSORS = (3, 4, 1, 5, 0, 2)
EXAMPLE_TOUR = [0, 3, 5, 2, 1, 4]

# six cities arranged as two disjoint triangles 0-1-2 and 3-4-5
TWO_TRIANGLES_WORD = (0, 1, 0, 3, 4, 3)


class TestAdjacencyLists:
    def test_complete_n6(self):
        lists = build_adjacency_lists(complete_graph(6))
        assert lists.lists[0] == (1, 2, 3, 4, 5)
        assert lists.lists[1] == (0, 2, 3, 4, 5)
        assert lists.lists[5] == (0, 1, 2, 3, 4)
        assert lists.degree == 5 and lists.choice_bits == 3

    def test_complete_n3(self):
        lists = build_adjacency_lists(complete_graph(3))
        assert lists.lists == ((1, 2), (0, 2), (0, 1))

    def test_sparse_filtering(self):
        g = random_euclidean_graph(6, 4, seed=5)
        lists = build_adjacency_lists(g)
        for i, row in enumerate(lists.lists):
            assert 2 <= len(row) <= 4
            assert list(row) == sorted(row)
            for j in row:
                assert math.isfinite(g.costs[i, j])

    def test_degree_below_two_rejected(self):
        costs = np.full((3, 3), INF)
        costs[0, 1] = costs[1, 0] = 1.0
        with pytest.raises(ValueError):
            TspGraph(costs)


class TestDecodeSuccessor:
    def test_worked_example_row(self):
        lists = build_adjacency_lists(complete_graph(6))
        assert decode_successor(lists, EXAMPLE_WORD, 0) == 3
        assert decode_successor(lists, EXAMPLE_WORD, 3) == 5
        for i in range(6):
            assert decode_successor(lists, EXAMPLE_WORD, i) == EXAMPLE_SUCCESSORS[i]

    def test_choice_zero_is_smallest_neighbor(self):
        lists = build_adjacency_lists(complete_graph(5))
        word = (0,) * 5
        for i in range(5):
            assert decode_successor(lists, word, i) == (0 if i > 0 else 1)

    def test_worked_example_tour(self):
        lists = build_adjacency_lists(complete_graph(6))
        assert word_to_tour(lists, EXAMPLE_WORD) == EXAMPLE_TOUR

    def test_out_of_range_signals_none(self):
        lists = build_adjacency_lists(complete_graph(3))
        assert decode_successor(lists, (3, 0, 0), 0) is None


class TestCost:
    def test_triangle_unit_weights(self):
        g = complete_graph(3)
        lists = build_adjacency_lists(g)
        for word in product(range(2), repeat=3):
            assert cost(g, lists, word) == pytest.approx(3.0)

    def test_worked_example_unit_weights(self):
        g = complete_graph(6)
        lists = build_adjacency_lists(g)
        assert cost(g, lists, EXAMPLE_WORD) == pytest.approx(6.0)

    def test_against_path_walk_oracle(self):
        g = random_euclidean_graph(4, 3, seed=12)
        lists = build_adjacency_lists(g)
        _, _, ranked = brute_force_best(g)
        for entry in ranked:
            tour = entry.tour
            walked = sum(g.costs[tour[p], tour[(p + 1) % 4]] for p in range(4))
            assert cost(g, lists, entry.word) == pytest.approx(walked)

    def test_out_of_range_word_undefined(self):
        g = complete_graph(3)
        lists = build_adjacency_lists(g)
        assert cost(g, lists, (2, 0, 0)) is None


class TestTheorems:
    def test_worked_example_is_hamiltonian(self):
        lists = build_adjacency_lists(complete_graph(6))
        assert is_hamiltonian_theorem1(lists, EXAMPLE_WORD)
        assert is_hamiltonian_theorem2(lists, EXAMPLE_WORD)

    def test_early_return_to_zero(self):
        # 0 -> 1 -> 0 closes a 2-cycle: pi^2(0) = 0
        lists = build_adjacency_lists(complete_graph(6))
        word = (0, 0, 0, 0, 0, 0)
        assert decode_successor(lists, word, 0) == 1
        assert decode_successor(lists, word, 1) == 0
        assert not is_hamiltonian_theorem1(lists, word)

    def test_two_disjoint_triangles(self):
        lists = build_adjacency_lists(complete_graph(6))
        word = TWO_TRIANGLES_WORD
        assert decode_successor(lists, word, 0) == 1
        assert decode_successor(lists, word, 2) == 0
        assert decode_successor(lists, word, 5) == 3
        assert not is_hamiltonian_theorem1(lists, word)
        # j = 3 divides 6 and pi^3(0) = 0, so theorem 2 must also reject
        assert not is_hamiltonian_theorem2(lists, word)

    def test_valid_cycle_passes_theorem2(self):
        lists = build_adjacency_lists(complete_graph(5))
        word = tour_to_word(lists, (0, 2, 4, 1, 3))
        assert is_hamiltonian_theorem2(lists, word)

    @pytest.mark.parametrize("n,seed", [(4, 1), (6, 2)])
    def test_theorems_match_single_cycle_oracle_exhaustive(self, n, seed):
        g = random_euclidean_graph(n, min(4, n - 1), seed=seed)
        lists = build_adjacency_lists(g)
        m = 2
        for value in range(1 << (m * n)):
            word = value_to_word(value, n, m)
            expected = is_single_cycle(lists, word)
            assert is_hamiltonian_theorem1(lists, word) == expected
            assert is_hamiltonian_theorem2(lists, word) == expected


class TestDivisors:
    def test_sixteen(self):
        assert sigma0(16) == 5
        assert proper_divisors(16) == [1, 2, 4, 8]

    def test_prime_needs_two_checks(self):
        # proper divisors {1} plus the final step: two checks in total
        assert sigma0(17) == 2
        assert proper_divisors(17) == [1]
        assert proper_divisors(5) == [1]

    def test_one(self):
        assert sigma0(1) == 1
        assert proper_divisors(1) == []


class TestBruteForce:
    def test_triangle(self):
        _, best_cost, ranked = brute_force_best(complete_graph(3))
        assert len(ranked) == 2
        assert ranked[0].cost == pytest.approx(ranked[1].cost)
        assert best_cost == pytest.approx(3.0)

    def test_n4_complete_six_directed(self):
        _, _, ranked = brute_force_best(complete_graph(4))
        assert len(ranked) == 6
        assert len(ranked_undirected(ranked)) == 3

    def test_ranked_costs_nondecreasing(self):
        _, _, ranked = brute_force_best(random_euclidean_graph(6, 4, seed=3))
        costs = [r.cost for r in ranked]
        assert costs == sorted(costs)

    def test_optimum_bounded_by_all(self):
        best_word, best_cost, ranked = brute_force_best(
            random_euclidean_graph(5, 4, seed=8))
        assert all(best_cost <= r.cost + 1e-12 for r in ranked)
        assert ranked[0].word == best_word

    def test_no_cycle_graph_empty_result(self):
        # two triangles sharing city 0: every tour would visit 0 twice
        g = TspGraph(bowtie_costs())
        best_word, best_cost, ranked = brute_force_best(g)
        assert best_word is None and best_cost is None and ranked == []

    def test_word_tour_roundtrip(self):
        g = random_euclidean_graph(6, 4, seed=4)
        lists = build_adjacency_lists(g)
        _, _, ranked = brute_force_best(g)
        for entry in ranked:
            assert word_to_tour(lists, entry.word) == list(entry.tour)
            assert tour_to_word(lists, entry.tour) == entry.word


class TestEncoding:
    def test_value_roundtrip_exhaustive_n4(self):
        for value in range(1 << 8):
            word = value_to_word(value, 4, 2)
            assert word_to_value(word, 2) == value

    def test_city0_least_significant(self):
        assert word_to_value((3, 0, 0, 0), 2) == 3
        assert word_to_value((0, 1, 0, 0), 2) == 4


class TestNormalizePhases:
    def test_unit_weight_graph_all_same_bucket(self):
        g = complete_graph(4)
        phases = normalize_phases(g, t=6)
        _, _, ranked = brute_force_best(g)
        buckets = {phases.quantize(r.word) for r in ranked}
        assert buckets == {0}  # every edge is the max edge: all shifts zero

    def test_padding_rows_exact_zero(self):
        g = random_euclidean_graph(6, 4, seed=5)
        lists = build_adjacency_lists(g)
        phases = normalize_phases(g, t=6)
        for j, row in enumerate(lists.lists):
            for k in range(len(row), 1 << lists.choice_bits):
                assert phases.tables[j][k] == 0.0

    def test_integer_graph_exact(self):
        g = random_integer_graph(4, seed=2)
        phases = normalize_phases(g, t=6)
        assert phases.exact
        lists = build_adjacency_lists(g)
        _, _, ranked = brute_force_best(g)
        for r in ranked:
            phase = phases.word_phase(r.word)
            scaled = phase / (2 * math.pi) * 64
            assert abs(scaled - round(scaled)) < 1e-9

    def test_total_phase_below_2pi_for_in_range_words(self):
        g = random_euclidean_graph(5, 4, seed=9)
        lists = build_adjacency_lists(g)
        phases = normalize_phases(g, t=6)
        rng = np.random.default_rng(0)
        for _ in range(500):
            word = tuple(int(rng.integers(0, len(lists.lists[j])))
                         for j in range(5))
            assert phases.word_phase(word) < 2 * math.pi

    def test_quantize_dequantize_roundtrip(self):
        g = random_euclidean_graph(5, 4, seed=10)
        graph_lists = build_adjacency_lists(g)
        phases = normalize_phases(g, t=6)
        bucket_width = phases.denominator / (1 << 6)
        _, _, ranked = brute_force_best(g)
        rng = np.random.default_rng(1)
        words = [r.word for r in ranked]
        words += [tuple(int(rng.integers(0, len(graph_lists.lists[j])))
                        for j in range(5)) for _ in range(1000)]
        for word in words:
            c = cost(g, graph_lists, word)
            approx = phases.dequantize(phases.quantize(word))
            assert abs(approx - c) <= bucket_width + 1e-9

    def test_bucket_of_cost_agrees_with_quantize(self):
        g = random_integer_graph(4, seed=6)
        lists = build_adjacency_lists(g)
        phases = normalize_phases(g, t=6)
        _, _, ranked = brute_force_best(g)
        for r in ranked:
            assert phases.bucket_of_cost(r.cost) == phases.quantize(r.word)


class TestRandomGraph:
    def test_deterministic_in_seed(self):
        a = random_euclidean_graph(6, 4, seed=7)
        b = random_euclidean_graph(6, 4, seed=7)
        assert np.array_equal(a.costs, b.costs)
        assert np.array_equal(a.coords, b.coords)

    def test_complete_when_d_max(self):
        g = random_euclidean_graph(5, 4, seed=1)
        assert g.degree == 4
        assert np.isfinite(g.costs).sum() == 5 * 4

    def test_pruned_degrees(self):
        for seed in range(6):
            g = random_euclidean_graph(7, 4, seed=seed)
            assert g.degree <= 4
            assert min(g.degrees) >= 2

    def test_squared_metric_flag(self):
        a = random_euclidean_graph(4, 3, seed=2, squared=False)
        b = random_euclidean_graph(4, 3, seed=2, squared=True)
        finite = np.isfinite(a.costs)
        assert np.allclose(b.costs[finite], a.costs[finite] ** 2)

    def test_sample_valid_cycles(self):
        g = random_euclidean_graph(5, 4, seed=3)
        lists = build_adjacency_lists(g)
        rng = np.random.default_rng(0)
        words = sample_valid_cycles(g, 8, rng)
        assert len(words) == 8
        for word in words:
            assert is_single_cycle(lists, word)

    def test_sample_valid_cycles_no_cycle(self):
        with pytest.raises(NoHamiltonianCycleError):
            sample_valid_cycles(TspGraph(bowtie_costs()), 4,
                                np.random.default_rng(0), max_attempts=50)


class TestGraphFile:
    def test_roundtrip_lossless(self, tmp_path):
        g = random_euclidean_graph(6, 4, seed=11)
        path = tmp_path / "g.txt"
        save_graph(g, path)
        loaded = load_graph(path)
        assert np.array_equal(g.costs, loaded.costs)
        assert np.array_equal(g.coords, loaded.coords)
        path2 = tmp_path / "g2.txt"
        save_graph(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("hello\n")
        with pytest.raises(ValueError):
            load_graph(path)
