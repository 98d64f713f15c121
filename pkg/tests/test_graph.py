import numpy as np
import pytest

from dynstack.graph import (
    GraphParseError,
    SplitSpec,
    attach_labels,
    closeness_centrality,
    degree,
    largest_connected_component,
    parse_edge_list,
    split_nodes,
)

from conftest import random_graph
from oracles import connected_component_sets


class TestParseEdgeList:
    def test_minimal_path(self):
        g = parse_edge_list(["a b", "b c"])
        assert g.n_nodes == 3 and g.n_edges == 2
        _, w = g.neighbors(0)
        assert np.all(w == 1.0)

    def test_repeated_pair_merges_weights(self):
        g = parse_edge_list(["a b 2", "b a 3"])
        assert g.n_nodes == 2 and g.n_edges == 1
        nbrs, w = g.neighbors(0)
        assert nbrs.tolist() == [1] and w.tolist() == [5.0]

    def test_self_loop_rejected(self):
        with pytest.raises(GraphParseError, match="line 1"):
            parse_edge_list(["a a"])

    def test_malformed_lines(self):
        with pytest.raises(GraphParseError, match="line 2"):
            parse_edge_list(["a b", "a"])
        with pytest.raises(GraphParseError, match="non-numeric"):
            parse_edge_list(["a b x"])
        with pytest.raises(GraphParseError, match="weight"):
            parse_edge_list(["a b -1"])

    def test_comments_and_blanks_skipped(self):
        g = parse_edge_list(["# header", "", "a b", "  ", "# a c"])
        assert g.n_nodes == 2 and g.n_edges == 1

    def test_first_seen_id_order(self):
        g = parse_edge_list(["x y", "a x"])
        assert g.node_ids == ["x", "y", "a"]

    def test_symmetry_and_degree_sum(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(2, 12)))
            adj = g.adjacency().toarray()
            np.testing.assert_array_equal(adj, adj.T)
            assert degree(g).values.sum() == 2 * g.n_edges


class TestAttachLabels:
    def test_basic_vocabulary(self):
        g = parse_edge_list(["a b", "b c"])
        lg = attach_labels(g, [("a", "X"), ("b", "Y")])
        assert lg.class_count == 2
        assert lg.labels.tolist() == [0, 1, -1]

    def test_duplicate_consistent_ok(self):
        g = parse_edge_list(["a b"])
        lg = attach_labels(g, [("a", "X"), ("a", "X")])
        assert lg.labels[0] == 0

    def test_duplicate_conflicting_rejected(self):
        g = parse_edge_list(["a b"])
        with pytest.raises(GraphParseError, match="conflicting"):
            attach_labels(g, [("a", "X"), ("a", "Y")])

    def test_unknown_node_rejected(self):
        g = parse_edge_list(["a b"])
        with pytest.raises(GraphParseError, match="unknown"):
            attach_labels(g, [("z", "X")])


class TestLargestConnectedComponent:
    def test_picks_larger(self):
        g = parse_edge_list(["a b", "b c", "d e"])
        lcc = largest_connected_component(g)
        assert sorted(lcc.node_ids) == ["a", "b", "c"]

    def test_connected_graph_identity(self, k4):
        lcc = largest_connected_component(k4)
        assert lcc.node_ids == k4.node_ids
        np.testing.assert_array_equal(lcc.adjacency().toarray(), k4.adjacency().toarray())

    def test_tie_goes_to_smallest_node_index(self):
        # components {0,1} and {2,3}: both size 2
        g = parse_edge_list(["a b", "c d"])
        lcc = largest_connected_component(g)
        assert lcc.node_ids == ["a", "b"]

    def test_idempotent(self):
        g = parse_edge_list(["a b", "b c", "d e", "f g"])
        once = largest_connected_component(g)
        twice = largest_connected_component(once)
        assert once.node_ids == twice.node_ids

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            largest_connected_component(parse_edge_list([]))

    def test_against_exhaustive_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            g = random_graph(rng, int(rng.integers(2, 14)), edge_prob=0.15)
            edges = []
            for i in range(g.n_nodes):
                nbrs, _ = g.neighbors(i)
                edges += [(i, j) for j in nbrs if i < j]
            comps = connected_component_sets(g.n_nodes, edges)
            best_size = max(len(c) for c in comps)
            expected = min(
                (c for c in comps if len(c) == best_size), key=min
            )
            lcc = largest_connected_component(g)
            assert sorted(lcc.node_ids) == sorted(g.node_ids[i] for i in expected)


class TestDegree:
    def test_path(self, path3):
        assert degree(path3).values.tolist() == [1.0, 2.0, 1.0]

    def test_isolated_node(self):
        g = parse_edge_list(["a b"]).subgraph([0])
        assert degree(g).values.tolist() == [0.0]

    def test_star_center(self, star5):
        assert degree(star5).values[0] == 5.0


class TestCloseness:
    def test_path_hand_bfs(self, path3):
        # center: 1+1 = 2 -> 1/2; ends: 1+2 = 3 -> 1/3
        np.testing.assert_allclose(
            closeness_centrality(path3).values, [1 / 3, 1 / 2, 1 / 3]
        )

    def test_k4_all_equal(self, k4):
        np.testing.assert_allclose(closeness_centrality(k4).values, [1 / 3] * 4)

    def test_single_node_convention(self):
        g = parse_edge_list(["a b"]).subgraph([0])
        assert closeness_centrality(g).values.tolist() == [0.0]

    def test_disconnected_rejected(self):
        g = parse_edge_list(["a b", "c d"])
        with pytest.raises(ValueError, match="connected"):
            closeness_centrality(g)

    def test_bounds_and_star_equality(self, star5):
        vals = closeness_centrality(star5).values
        n = star5.n_nodes
        assert np.all(vals <= 1 / (n - 1) + 1e-15)
        # the hub is adjacent to everyone: upper bound is attained
        assert vals[0] == pytest.approx(1 / (n - 1))
        assert np.all(vals[1:] < 1 / (n - 1))

    def test_bounds_random_graphs(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            g = largest_connected_component(random_graph(rng, int(rng.integers(3, 12))))
            n = g.n_nodes
            if n < 2:
                continue
            vals = closeness_centrality(g).values
            assert np.all(vals <= 1 / (n - 1) + 1e-15)
            assert np.all(vals >= 1 / ((n - 1) * (n - 1)))  # diameter < n

    def test_ignores_weights(self):
        light = parse_edge_list(["a b 0.1", "b c 10"])
        np.testing.assert_allclose(
            closeness_centrality(light).values, [1 / 3, 1 / 2, 1 / 3]
        )


class TestSplitNodes:
    def _labeled(self, n, seed=0):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n, 0.5)
        return attach_labels(g, [(nid, "AB"[i % 2]) for i, nid in enumerate(g.node_ids)])

    def test_sizes_and_determinism(self):
        g = self._labeled(10)
        spec = SplitSpec(0.8, 99)
        train, test = split_nodes(g, spec)
        assert len(test) == 8 and len(train) == 2
        train2, test2 = split_nodes(g, spec)
        np.testing.assert_array_equal(train, train2)
        np.testing.assert_array_equal(test, test2)

    def test_disjoint_exhaustive(self):
        g = self._labeled(23, seed=1)
        train, test = split_nodes(g, SplitSpec(0.4, 3))
        combined = np.sort(np.r_[train, test])
        np.testing.assert_array_equal(combined, np.arange(g.n_nodes))

    def test_different_seeds_differ(self):
        g = self._labeled(30, seed=2)
        _, t1 = split_nodes(g, SplitSpec(0.5, 1))
        _, t2 = split_nodes(g, SplitSpec(0.5, 2))
        assert not np.array_equal(t1, t2)

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            SplitSpec(1.0, 0)
        with pytest.raises(ValueError):
            SplitSpec(0.0, 0)

    def test_requires_labels(self, path3):
        with pytest.raises(ValueError, match="labeled"):
            split_nodes(path3, SplitSpec(0.5, 0))

    def test_mask_labels_copy(self):
        g = self._labeled(8, seed=4)
        train, test = split_nodes(g, SplitSpec(0.5, 7))
        masked = g.mask_labels(test)
        assert np.all(masked.labels[test] == -1)
        np.testing.assert_array_equal(masked.labels[train], g.labels[train])
        assert np.all(g.labels >= 0)  # original untouched
