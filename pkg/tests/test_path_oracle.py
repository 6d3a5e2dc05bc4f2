import numpy as np
import pytest
from helpers import exhaustive_joint_moment, exhaustive_trace_table

from bandedge.cheby import hn_apply
from bandedge.errors import BudgetError, DiagramError
from bandedge.path_oracle import (
    DiagramClass,
    KPathSpec,
    classify_diagram,
    cumulant_T,
    diagram_census,
    hn_entry_via_paths,
    iter_kpaths,
    joint_moment_paths,
    kpath_connected,
)
from bandedge.sampler import BandParams, SeedSpec, sample_band_matrix


class TestJointMoments:
    def test_no_closed_length_one(self):
        assert joint_moment_paths(BandParams(7, 2), KPathSpec((1,))) == 0

    def test_pair_of_single_edges(self):
        assert joint_moment_paths(BandParams(7, 2), KPathSpec((1, 1))) == 0

    def test_no_closed_nb_parity_paths_of_length_four(self):
        # out-and-back of length 4 would need an immediate reversal, and a
        # 4-cycle leaves every edge odd: the count vanishes identically
        assert joint_moment_paths(BandParams(7, 2), KPathSpec((4,))) == 0
        assert joint_moment_paths(BandParams(8, 2), KPathSpec((4,))) == 0

    def test_odd_total_length_vanishes(self):
        params = BandParams(7, 2)
        for lengths in [(3,), (5,), (7,), (3, 4), (1, 2, 4)]:
            assert joint_moment_paths(params, KPathSpec(lengths)) == 0

    def test_doubled_triangles_counted(self):
        # 7 triangles x 3 starting points x 2 orientations
        assert joint_moment_paths(BandParams(7, 2), KPathSpec((6,))) == 42

    @pytest.mark.parametrize(
        "n_sites,w,lengths",
        [
            (7, 2, (4,)),
            (7, 2, (6,)),
            (7, 2, (8,)),
            (7, 2, (3, 3)),
            (7, 2, (4, 4)),
            (7, 2, (3, 5)),
            (7, 2, (2, 3, 3)),
            (6, 2, (6,)),
            (6, 1, (6,)),
            (5, 2, (3, 3)),
        ],
    )
    def test_double_oracle_against_exhaustive_ensemble(self, n_sites, w, lengths):
        params = BandParams(n_sites, w, beta=1)
        table = exhaustive_trace_table(params, max(lengths))
        want = exhaustive_joint_moment(table, lengths)
        assert joint_moment_paths(params, KPathSpec(lengths)) == want

    def test_beta2_below_beta1(self):
        for lengths in [(6,), (3, 3), (4, 4), (8,)]:
            p1 = joint_moment_paths(BandParams(7, 2, beta=1), KPathSpec(lengths, beta=1))
            p2 = joint_moment_paths(BandParams(7, 2, beta=2), KPathSpec(lengths, beta=2))
            assert p2 <= p1

    def test_beta2_reversed_triangle_pairs(self):
        # each orientation of p1 pairs only with the reversed p2
        params = BandParams(7, 2, beta=2)
        n1 = joint_moment_paths(params, KPathSpec((3, 3), beta=2))
        params1 = BandParams(7, 2, beta=1)
        n2 = joint_moment_paths(params1, KPathSpec((3, 3), beta=1))
        assert n1 * 2 == n2  # beta=1 additionally admits equal orientations

    def test_budget_guards(self):
        with pytest.raises(BudgetError):
            joint_moment_paths(BandParams(7, 2), KPathSpec((12,)))
        with pytest.raises(BudgetError):
            joint_moment_paths(BandParams(14, 2), KPathSpec((4,)))


class TestCumulants:
    def test_odd_single(self):
        assert cumulant_T(BandParams(7, 2), KPathSpec((3,))) == 0

    def test_deterministic_traces_vanish(self):
        assert cumulant_T(BandParams(7, 2), KPathSpec((2,))) == 0
        assert cumulant_T(BandParams(7, 2), KPathSpec((2, 2))) == 0

    def test_pair_cumulant_equals_variance(self):
        # E tr M_3 = 0, so T(3,3) is the exhaustive second moment
        params = BandParams(7, 2)
        table = exhaustive_trace_table(params, 3)
        want = exhaustive_joint_moment(table, (3, 3))
        assert cumulant_T(params, KPathSpec((3, 3))) == want

    def test_counts_connected_kpaths(self):
        params = BandParams(7, 2)
        for lengths in [(3, 3), (4, 4), (6,)]:
            spec = KPathSpec(lengths)
            connected = sum(1 for kp in iter_kpaths(params, spec) if kpath_connected(kp))
            assert cumulant_T(params, spec) == connected


class TestEntryPathSum:
    def test_single_step_is_entry(self):
        h = sample_band_matrix(BandParams(9, 2), SeedSpec(0, 0))
        for u, v in [(0, 1), (0, 2), (3, 5), (0, 4)]:
            assert hn_entry_via_paths(h, u, v, 1) == h.entry(u, v)

    def test_closed_two_step_vanishes(self):
        h = sample_band_matrix(BandParams(9, 2), SeedSpec(0, 0))
        assert hn_entry_via_paths(h, 4, 4, 2) == 0.0

    @pytest.mark.parametrize("beta", [1, 2])
    def test_matches_operator_recursion(self, beta):
        params = BandParams(9, 2, beta=beta)
        for rep in range(3):
            h = sample_band_matrix(params, SeedSpec(31, rep))
            for n in (2, 3, 5):
                for u, v in [(0, 0), (0, 3), (2, 7)]:
                    basis = np.zeros(9)
                    basis[v] = 1.0
                    want = hn_apply(h, n, basis)[u]
                    got = hn_entry_via_paths(h, u, v, n)
                    if beta == 1:
                        assert got == want
                    else:
                        assert abs(got - want) <= 1e-10

    def test_budget(self):
        h = sample_band_matrix(BandParams(9, 2), SeedSpec(0, 0))
        with pytest.raises(BudgetError):
            hn_entry_via_paths(h, 0, 0, 20)


class TestClassifyDiagram:
    def test_doubled_triangle_is_genus_one(self):
        # minimal realisation of the tail-plus-turnaround topology; the
        # start sits on the doubled cycle so its tail edge is contracted
        cls = classify_diagram(((0, 1, 2, 0, 1, 2, 0),))
        assert cls == DiagramClass(s=1, k=1, vertex_count=2, edge_count=2)

    def test_chain_into_doubled_triangle(self):
        cls = classify_diagram(((0, 1, 2, 3, 1, 2, 3, 1, 0),))
        assert cls.s == 1
        assert cls.vertex_count == 2
        assert cls.edge_count == 2

    def test_doubled_square(self):
        cls = classify_diagram(((0, 1, 2, 3, 0, 1, 2, 3, 0),))
        assert cls.s == 1

    def test_reversed_triangle_pair(self):
        cls = classify_diagram(((0, 1, 2, 0), (0, 2, 1, 0)), beta=2)
        assert cls == DiagramClass(s=2, k=2, vertex_count=4, edge_count=4)

    def test_open_path_rejected(self):
        with pytest.raises(DiagramError):
            classify_diagram(((0, 1, 2),))

    def test_odd_multiplicity_rejected(self):
        with pytest.raises(DiagramError):
            classify_diagram(((0, 1, 2, 0),))

    def test_genus_identity_over_census(self):
        # independent route: s = k + (#edge pairs) - (#visited vertices)
        params = BandParams(7, 2)
        for lengths in [(6,), (8,), (3, 3), (4, 4), (3, 3, 2)]:
            spec = KPathSpec(lengths)
            for kpath in iter_kpaths(params, spec):
                cls = classify_diagram(kpath)
                pairs = {}
                visited = set()
                for path in kpath:
                    visited.update(path)
                    for a, b in zip(path, path[1:]):
                        key = (a, b) if a < b else (b, a)
                        pairs[key] = pairs.get(key, 0) + 1
                s_euler = len(kpath) + sum(t // 2 for t in pairs.values()) - len(visited)
                assert cls.s == s_euler

    def test_full_census_classifies(self):
        params = BandParams(7, 2)
        specs = [(4,), (6,), (8,), (3, 3), (4, 4), (3, 5), (2, 6), (3, 3, 2)]
        total = 0
        for lengths in specs:
            census = diagram_census(params, KPathSpec(lengths))
            for s, count in census.items():
                assert s >= len(lengths)
                total += count
        assert total > 0

    def test_beta2_census_even_genus(self):
        params = BandParams(7, 2, beta=2)
        seen = set()
        for lengths in [(3, 3), (6,), (8,), (4, 4)]:
            census = diagram_census(params, KPathSpec(lengths, beta=2))
            seen.update(census)
        assert seen  # at least the reversed-triangle pairs exist
        assert all(s % 2 == 0 for s in seen)


class TestSpecValidation:
    def test_lengths_sorted(self):
        assert KPathSpec((5, 3, 4)).lengths == (3, 4, 5)

    def test_rejects_empty_or_nonpositive(self):
        with pytest.raises(ValueError):
            KPathSpec(())
        with pytest.raises(ValueError):
            KPathSpec((0, 2))

    def test_diagram_class_consistency(self):
        with pytest.raises(DiagramError):
            DiagramClass(s=1, k=1, vertex_count=3, edge_count=2)
        with pytest.raises(DiagramError):
            DiagramClass(s=1, k=2, vertex_count=2, edge_count=1)
