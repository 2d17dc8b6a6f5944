"""Graph core: d-separation, path classification, knowledge application."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaldesign.graphs import (
    CausalGraph,
    ContradictionError,
    KnowledgeConstraints,
    apply_knowledge,
    classify_paths,
    complete_pattern,
    export_graph,
    extend_to_dag,
    is_d_separated,
    parse_graph,
)

from brute import d_separated_by_paths, random_dag


# The two canonical pitfalls: a common cause (area driving both structural
# strength and efficiency) and a common effect (operation cost driven by
# area and occupancy).
FORK = CausalGraph(
    ["Strength", "Area", "Efficiency"],
    [("Area", "Strength"), ("Area", "Efficiency")],
)
COLLIDER = CausalGraph(
    ["Area", "Cost", "Occupancy"],
    [("Area", "Cost"), ("Occupancy", "Cost")],
)


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            CausalGraph(["A"], [("A", "A")])

    def test_rejects_double_booked_pair(self):
        with pytest.raises(ValueError):
            CausalGraph(["A", "B"], [("A", "B")], [("A", "B")])
        with pytest.raises(ValueError):
            CausalGraph(["A", "B"], [("A", "B"), ("B", "A")])

    def test_rejects_unknown_node(self):
        with pytest.raises(ValueError, match="unknown node"):
            CausalGraph(["A"], [("A", "B")])

    def test_equality_ignores_node_order(self):
        g1 = CausalGraph(["A", "B"], [("A", "B")])
        g2 = CausalGraph(["B", "A"], [("A", "B")])
        assert g1 == g2

    def test_topological_order_detects_cycle(self):
        g = CausalGraph(["A", "B", "C"], [("A", "B"), ("B", "C"), ("C", "A")])
        with pytest.raises(ValueError, match="cycle"):
            g.topological_order()


class TestDSeparation:
    def test_fork_fixture(self):
        assert not is_d_separated(FORK, {"Strength"}, {"Efficiency"}, set())
        assert is_d_separated(FORK, {"Strength"}, {"Efficiency"}, {"Area"})

    def test_collider_fixture(self):
        assert is_d_separated(COLLIDER, {"Area"}, {"Occupancy"}, set())
        assert not is_d_separated(COLLIDER, {"Area"}, {"Occupancy"}, {"Cost"})

    def test_blocked_chain(self):
        g = CausalGraph(["A", "B", "C"], [("A", "B"), ("B", "C")])
        assert is_d_separated(g, {"A"}, {"C"}, {"B"})
        assert not is_d_separated(g, {"A"}, {"C"}, set())

    def test_collider_descendant_opens_path(self):
        g = CausalGraph(
            ["A", "B", "C", "D"],
            [("A", "C"), ("B", "C"), ("C", "D")],
        )
        assert is_d_separated(g, {"A"}, {"B"}, set())
        assert not is_d_separated(g, {"A"}, {"B"}, {"D"})

    def test_rejects_partially_oriented_graph(self):
        g = CausalGraph(["A", "B"], [], [("A", "B")])
        with pytest.raises(ValueError, match="fully oriented DAG"):
            is_d_separated(g, {"A"}, {"B"}, set())

    def test_rejects_overlapping_sets(self):
        with pytest.raises(ValueError, match="disjoint"):
            is_d_separated(FORK, {"Area"}, {"Area"}, set())

    def test_unknown_node(self):
        with pytest.raises(ValueError, match="unknown node"):
            is_d_separated(FORK, {"Nope"}, {"Area"}, set())

    def test_matches_path_enumeration_on_random_graphs(self):
        rng = np.random.default_rng(20240)
        for _ in range(60):
            g = random_dag(rng, int(rng.integers(3, 7)), 0.4)
            names = list(g.nodes)
            for _ in range(30):
                pick = rng.permutation(len(names))
                x, y = names[pick[0]], names[pick[1]]
                rest = [names[i] for i in pick[2:]]
                z = frozenset(v for v in rest if rng.random() < 0.4)
                expected = d_separated_by_paths(g, frozenset([x]), frozenset([y]), z)
                assert is_d_separated(g, {x}, {y}, z) == expected

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        g = random_dag(rng, 5, 0.4)
        names = list(g.nodes)
        x, y = names[0], names[1]
        z = frozenset(v for v in names[2:] if rng.random() < 0.5)
        assert is_d_separated(g, {x}, {y}, z) == is_d_separated(g, {y}, {x}, z)


class TestClassifyPaths:
    def test_two_node_direct_edge(self):
        g = CausalGraph(["X", "Y"], [("X", "Y")])
        paths = classify_paths(g, "X", "Y")
        assert len(paths) == 1
        assert paths[0].nodes == ("X", "Y")
        assert not paths[0].is_backdoor
        assert paths[0].is_open

    def test_fork_path_roles(self):
        paths = classify_paths(FORK, "Strength", "Efficiency")
        assert len(paths) == 1
        assert paths[0].roles == ("fork",)
        assert paths[0].is_backdoor
        assert paths[0].is_open
        blocked = classify_paths(FORK, "Strength", "Efficiency", {"Area"})
        assert not blocked[0].is_open

    def test_chain_blocked_by_interior(self):
        g = CausalGraph(
            ["X", "M1", "M2", "Y"],
            [("X", "M1"), ("M1", "M2"), ("M2", "Y")],
        )
        paths = classify_paths(g, "X", "Y", {"M1", "M2"})
        assert len(paths) == 1
        assert paths[0].roles == ("chain", "chain")
        assert not paths[0].is_open

    def test_collider_role(self):
        paths = classify_paths(COLLIDER, "Area", "Occupancy")
        assert paths[0].roles == ("collider",)
        assert not paths[0].is_open


class TestKnowledge:
    def test_empty_constraints_identity(self):
        g = complete_pattern(
            CausalGraph(["A", "B", "C"], [("A", "C"), ("B", "C")])
        )
        assert apply_knowledge(g, KnowledgeConstraints()) == g

    def test_remove_edge_by_double_forbid(self):
        g = CausalGraph(["A", "B", "C"], [("A", "B"), ("A", "C")], [("B", "C")])
        k = KnowledgeConstraints(forbidden=[("B", "C"), ("C", "B")])
        result = apply_knowledge(g, k)
        assert not result.adjacent("B", "C")
        assert result.directed == frozenset({("A", "B"), ("A", "C")})

    def test_required_orients_undirected(self):
        g = CausalGraph(["A", "B"], [], [("A", "B")])
        result = apply_knowledge(g, KnowledgeConstraints(required=[("A", "B")]))
        assert result.directed == frozenset({("A", "B")})

    def test_conflicting_requirements_error(self):
        with pytest.raises(ContradictionError):
            KnowledgeConstraints(required=[("A", "B")], forbidden=[("A", "B")])
        g = CausalGraph(["A", "B"], [("B", "A")])
        with pytest.raises(ContradictionError, match="'A', 'B'"):
            apply_knowledge(g, KnowledgeConstraints(required=[("A", "B")]))

    def test_required_both_ways_is_cycle(self):
        g = CausalGraph(["A", "B", "C"], [], [("A", "B"), ("B", "C"), ("C", "A")])
        k = KnowledgeConstraints(required=[("A", "B"), ("B", "C"), ("C", "A")])
        with pytest.raises(ContradictionError, match="cycle"):
            apply_knowledge(g, k)

    def test_required_without_adjacency(self):
        g = CausalGraph(["A", "B", "C"], [("A", "B")])
        with pytest.raises(ValueError, match="no corresponding adjacency"):
            apply_knowledge(g, KnowledgeConstraints(required=[("A", "C")]))

    def test_single_forbid_orients_reverse(self):
        g = CausalGraph(["A", "B"], [], [("A", "B")])
        result = apply_knowledge(g, KnowledgeConstraints(forbidden=[("A", "B")]))
        assert result.directed == frozenset({("B", "A")})

    def test_tiers_orient_across(self):
        g = CausalGraph(["A", "B", "C"], [], [("A", "B"), ("B", "C")])
        k = KnowledgeConstraints(tiers=[["A"], ["B"], ["C"]])
        result = apply_knowledge(g, k)
        assert result.directed == frozenset({("A", "B"), ("B", "C")})

    def test_tier_violation_detected(self):
        g = CausalGraph(["A", "B"], [("B", "A")])
        k = KnowledgeConstraints(tiers=[["A"], ["B"]])
        with pytest.raises(ContradictionError, match="tier"):
            apply_knowledge(g, k)

    def test_meek_rule_one_fires(self):
        # A -> B -- C with A, C non-adjacent must orient B -> C.
        g = CausalGraph(["A", "B", "C"], [("A", "B")], [("B", "C")])
        result = apply_knowledge(g, KnowledgeConstraints())
        assert result.directed == frozenset({("A", "B"), ("B", "C")})

    def test_idempotence_on_random_patterns(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            dag = random_dag(rng, int(rng.integers(3, 7)), 0.45)
            pattern = complete_pattern(dag)
            once = apply_knowledge(pattern, KnowledgeConstraints())
            twice = apply_knowledge(once, KnowledgeConstraints())
            assert once == twice

    def test_never_creates_cycle(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            dag = random_dag(rng, int(rng.integers(3, 7)), 0.45)
            pattern = complete_pattern(dag)
            result = apply_knowledge(pattern, KnowledgeConstraints())
            # Directed part must stay acyclic.
            CausalGraph(result.nodes, result.directed).topological_order()


class TestPatternCompletion:
    def test_collider_stays_oriented(self):
        dag = CausalGraph(["X", "Y", "Z"], [("X", "Z"), ("Y", "Z")])
        assert complete_pattern(dag) == dag

    def test_chain_fully_undirected(self):
        dag = CausalGraph(["X", "Y", "Z"], [("X", "Y"), ("Y", "Z")])
        pattern = complete_pattern(dag)
        assert not pattern.directed
        assert pattern.undirected == frozenset({("X", "Y"), ("Y", "Z")})

    def test_single_edge_undirected(self):
        dag = CausalGraph(["A", "B"], [("A", "B")])
        pattern = complete_pattern(dag)
        assert pattern.undirected == frozenset({("A", "B")})

    def test_equivalence_class_members_share_pattern(self):
        # X -> Y -> Z, X <- Y -> Z and X <- Y <- Z are one class.
        forms = [
            CausalGraph(["X", "Y", "Z"], [("X", "Y"), ("Y", "Z")]),
            CausalGraph(["X", "Y", "Z"], [("Y", "X"), ("Y", "Z")]),
            CausalGraph(["X", "Y", "Z"], [("Z", "Y"), ("Y", "X")]),
        ]
        patterns = {complete_pattern(g) for g in forms}
        assert len(patterns) == 1

    def test_extension_roundtrip(self):
        rng = np.random.default_rng(99)
        for _ in range(40):
            dag = random_dag(rng, int(rng.integers(3, 7)), 0.4)
            pattern = complete_pattern(dag)
            member = extend_to_dag(pattern)
            member.topological_order()
            assert complete_pattern(member) == pattern


class TestSerialization:
    def test_dot_contains_arrows(self):
        g = CausalGraph(["A", "B"], [("A", "B")])
        text = export_graph(g, "dot")
        assert '"A" -> "B";' in text

    def test_dot_undirected_edge(self):
        g = CausalGraph(["A", "B"], [], [("A", "B")])
        text = export_graph(g, "dot")
        assert '"A" -- "B";' in text

    @pytest.mark.parametrize("fmt", ["dot", "json"])
    def test_roundtrip(self, fmt):
        g = CausalGraph(
            ["A", "B", "C", "D"],
            [("A", "B"), ("B", "C")],
            [("C", "D")],
        )
        assert parse_graph(export_graph(g, fmt), fmt) == g

    def test_unknown_format(self):
        g = CausalGraph(["A"], [])
        with pytest.raises(ValueError, match="format"):
            export_graph(g, "xml")
