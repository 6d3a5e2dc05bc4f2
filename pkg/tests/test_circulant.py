import math

import numpy as np
import pytest

from bandedge.circulant import (
    CirculantGraph,
    adjacency_eigenvalues,
    nb_walk_count,
    symbol_f,
    walk_asymptotics,
    walk_count_dp,
    walk_count_fourier,
    walk_count_fourier_all,
)
from bandedge.errors import BudgetError


def brute_walk_counts(graph, n):
    """Independent oracle: enumerate every n-step walk from 0."""
    counts = [0] * graph.n_sites
    stack = [(0, 0)]
    while stack:
        u, depth = stack.pop()
        if depth == n:
            counts[u] += 1
            continue
        for v in graph.neighbors(u):
            stack.append((v, depth + 1))
    return counts


class TestAdjacencyEigenvalues:
    def test_k0_is_one(self):
        assert adjacency_eigenvalues(CirculantGraph(5, 2))[0] == pytest.approx(1.0, abs=1e-14)

    def test_complete_graph_k5(self):
        # K_5: normalised eigenvalue -1/(2W) = -0.25 away from k=0
        a = adjacency_eigenvalues(CirculantGraph(5, 2))
        assert a[1] == pytest.approx(-0.25, abs=1e-14)

    def test_cycle_reduces_to_cosine(self):
        a = adjacency_eigenvalues(CirculantGraph(8, 1))
        assert a[2] == pytest.approx(0.0, abs=1e-14)
        k = np.arange(8)
        np.testing.assert_allclose(a, np.cos(2 * np.pi * k / 8), atol=1e-14)

    @pytest.mark.parametrize("n,w", [(64, 5), (17, 3), (8, 4), (12, 6), (2, 1)])
    def test_against_dense_adjacency_spectrum(self, n, w):
        # independent oracle: eigendecompose the explicit adjacency matrix
        graph = CirculantGraph(n, w)
        adj = np.zeros((n, n))
        for u in range(n):
            for v in graph.neighbors(u):
                adj[u, v] = 1.0
        dense = np.sort(np.linalg.eigvalsh(adj / graph.degree))
        np.testing.assert_allclose(np.sort(adjacency_eigenvalues(graph)), dense, atol=1e-12)

    def test_mirror_symmetry_exact(self):
        a = adjacency_eigenvalues(CirculantGraph(63, 7))
        for k in range(1, 63):
            assert a[k] == a[63 - k]

    def test_bounded_by_one(self):
        a = adjacency_eigenvalues(CirculantGraph(97, 11))
        assert np.all(np.abs(a) <= 1.0 + 1e-12)


class TestSymbol:
    def test_removable_singularity_at_zero(self):
        f = symbol_f(CirculantGraph(64, 5), 0.0)
        assert f == pytest.approx(1.0, abs=1e-14)

    def test_integer_points_equal_one(self):
        graph = CirculantGraph(64, 5)
        for z in (1.0, -1.0, 2.0, -3.0):
            assert symbol_f(graph, z) == pytest.approx(1.0, abs=1e-12)

    def test_matches_adjacency_eigenvalues(self):
        graph = CirculantGraph(64, 5)
        a = adjacency_eigenvalues(graph)
        for k in range(64):
            assert symbol_f(graph, k / 64).real == pytest.approx(a[k], abs=1e-12)
            assert abs(symbol_f(graph, k / 64).imag) < 1e-12

    def test_period_one(self):
        graph = CirculantGraph(64, 5)
        for z in (0.1, 0.37 + 0.05j, -0.2 + 0.01j):
            assert abs(symbol_f(graph, z + 1) - symbol_f(graph, z)) < 1e-12

    @pytest.mark.parametrize("y", [0.01, 0.1])
    def test_horizontal_decay(self, y):
        # |f(x+iy)| <= |f(iy)| on the fundamental strip (decay diagnostic;
        # the exponential rate constant is not asserted)
        graph = CirculantGraph(64, 5)
        top = abs(symbol_f(graph, 1j * y))
        for x in np.linspace(-0.5, 0.5, 41):
            assert abs(symbol_f(graph, x + 1j * y)) <= top * (1 + 1e-12)


class TestWalkCountFourier:
    def test_cycle_return_probability(self):
        # 2 of the 4 two-step walks on the 8-cycle return to the start
        assert walk_count_fourier(CirculantGraph(8, 1), 2, 0) == pytest.approx(0.5, abs=1e-12)

    def test_cycle_three_steps(self):
        # +-1 step sequences of length 3 summing to 1 mod 8: 3 of 8
        assert walk_count_fourier(CirculantGraph(8, 1), 3, 1) == pytest.approx(0.375, abs=1e-12)

    def test_out_of_band_single_step(self):
        assert walk_count_fourier(CirculantGraph(12, 2), 1, 5) == pytest.approx(0.0, abs=1e-12)

    def test_normalisation(self):
        graph = CirculantGraph(24, 3)
        for n in (1, 2, 5, 10):
            assert walk_count_fourier_all(graph, n).sum() == pytest.approx(1.0, abs=1e-9)

    def test_displacement_symmetry_exact(self):
        graph = CirculantGraph(31, 4)
        for n in (1, 3, 8):
            for r in range(31):
                assert walk_count_fourier(graph, n, r) == walk_count_fourier(graph, n, 31 - r)

    def test_all_matches_single(self):
        graph = CirculantGraph(20, 3)
        allv = walk_count_fourier_all(graph, 7)
        for r in range(20):
            assert allv[r] == pytest.approx(walk_count_fourier(graph, 7, r), abs=1e-12)


class TestWalkCountDP:
    def test_cycle_two_steps(self):
        assert walk_count_dp(CirculantGraph(8, 1), 2) == [2, 0, 1, 0, 0, 0, 1, 0]

    def test_cycle_one_step(self):
        assert walk_count_dp(CirculantGraph(8, 1), 1) == [0, 1, 0, 0, 0, 0, 0, 1]

    @pytest.mark.parametrize("n,w,steps", [(8, 1, 5), (10, 2, 4), (9, 4, 3), (4, 2, 6)])
    def test_against_brute_enumeration(self, n, w, steps):
        graph = CirculantGraph(n, w)
        assert walk_count_dp(graph, steps) == brute_walk_counts(graph, steps)

    def test_total_count(self):
        graph = CirculantGraph(12, 2)
        for n in (1, 3, 9):
            assert sum(walk_count_dp(graph, n)) == graph.degree**n

    def test_parity_on_even_cycle(self):
        counts = walk_count_dp(CirculantGraph(8, 1), 5)
        for r, c in enumerate(counts):
            if (r - 5) % 2 != 0:
                assert c == 0

    def test_fourier_agreement(self):
        for n_sites, w in [(16, 1), (16, 3), (24, 5), (9, 2)]:
            graph = CirculantGraph(n_sites, w)
            for n in (1, 4, 11, 20):
                dp = walk_count_dp(graph, n)
                fourier = walk_count_fourier_all(graph, n)
                total = graph.degree**n
                for r in range(n_sites):
                    exact = dp[r] / total
                    assert fourier[r] == pytest.approx(exact, rel=1e-6, abs=1e-12)

    def test_budget(self):
        with pytest.raises(BudgetError):
            walk_count_dp(CirculantGraph(1000, 5), 2000, budget=10_000)


class TestNonBacktracking:
    def test_shortest_return_impossible(self):
        assert nb_walk_count(CirculantGraph(8, 1), 2, 0, 0) == 0

    def test_full_circuits(self):
        # clockwise and counterclockwise tours of the 8-cycle
        assert nb_walk_count(CirculantGraph(8, 1), 8, 0, 0) == 2

    def test_single_edge(self):
        assert nb_walk_count(CirculantGraph(8, 1), 1, 0, 1) == 1

    def test_excluded_first_step(self):
        graph = CirculantGraph(8, 1)
        assert nb_walk_count(graph, 1, 0, 1, a_set={1}) == 0
        assert nb_walk_count(graph, 1, 0, 1, b_set={0}) == 0

    def test_sandwich(self):
        graph = CirculantGraph(11, 2)
        for n in (2, 4, 6):
            plain = walk_count_dp(graph, n)
            for v in range(11):
                free = nb_walk_count(graph, n, 0, v)
                constrained = nb_walk_count(graph, n, 0, v, a_set={1, 2}, b_set={9})
                assert 0 <= constrained <= free <= plain[v]

    def test_brute_force_small(self):
        # enumerate non-backtracking paths explicitly
        graph = CirculantGraph(7, 2)
        n = 4
        a_set, b_set = {1}, {5}

        def walks(u, v):
            total = 0

            def rec(path):
                nonlocal total
                depth = len(path) - 1
                if depth == n:
                    if path[-1] == v and path[n - 1] not in b_set:
                        total += 1
                    return
                for w in graph.neighbors(path[-1]):
                    if depth >= 1 and w == path[depth - 1]:
                        continue
                    if depth == 0 and w in a_set:
                        continue
                    rec(path + [w])

            rec([u])
            return total

        for v in range(7):
            assert nb_walk_count(graph, n, 0, v, a_set=a_set, b_set=b_set) == walks(0, v)


class TestWalkAsymptotics:
    def test_gaussian_closed_form(self):
        wa = walk_asymptotics(CirculantGraph(10_000, 2), 100, 0)
        assert wa.gaussian == pytest.approx((500 * math.pi) ** -0.5, rel=1e-12)

    def test_uniform_is_inverse_n(self):
        wa = walk_asymptotics(CirculantGraph(97, 3), 10, 4)
        assert wa.uniform == 1 / 97

    def test_fields_nonnegative(self):
        wa = walk_asymptotics(CirculantGraph(50, 4), 12, 20)
        assert wa.gaussian >= 0 and wa.uniform >= 0 and wa.upper_bound >= 0
        assert math.isfinite(wa.upper_bound)

    def test_local_clt_moderate_size(self):
        # small-scale version of the acceptance check (n << N^2/W^2)
        graph = CirculantGraph(5000, 8)
        n = 200
        for r in (0, 40, 100):
            exact = walk_count_fourier(graph, n, r)
            gauss = walk_asymptotics(graph, n, r).gaussian
            assert abs(exact / gauss - 1) < 0.05

    def test_mixing_moderate_size(self):
        # n >> N^2/W^2 drives every displacement to the uniform value
        graph = CirculantGraph(64, 8)
        n = 10 * math.ceil(64**2 / 8**2)
        vals = walk_count_fourier_all(graph, n)
        assert np.max(np.abs(64 * vals - 1)) <= 0.01

    def test_upper_bound_envelope(self):
        # diagnostic only in general; with (C, c) = (1, 1) the bound does
        # majorise the exact counts in the diffusive window tested here
        graph = CirculantGraph(128, 4)
        for n in (16, 64):
            for r in (0, 8, 32):
                exact = walk_count_fourier(graph, n, r)
                ub = walk_asymptotics(graph, n, r).upper_bound
                assert exact <= ub * 1.05


class TestGraphInvariants:
    def test_degree_generic_and_wrapped(self):
        assert CirculantGraph(12, 2).degree == 4
        assert CirculantGraph(5, 2).degree == 4
        assert CirculantGraph(8, 4).degree == 7
        assert CirculantGraph(2, 1).degree == 1

    def test_neighbor_count_matches_degree(self):
        for n, w in [(12, 2), (5, 2), (8, 4), (2, 1), (9, 4)]:
            graph = CirculantGraph(n, w)
            nbrs = graph.neighbors(3 % n)
            assert len(nbrs) == len(set(nbrs)) == graph.degree

    def test_invalid_bandwidth(self):
        with pytest.raises(ValueError):
            CirculantGraph(8, 5)
        with pytest.raises(ValueError):
            CirculantGraph(8, 0)
