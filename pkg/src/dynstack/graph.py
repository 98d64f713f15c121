"""Undirected weighted graphs with optional node labels.

Nodes are dense integer indices 0..N-1 carrying external string ids.
Adjacency is stored in CSR form (symmetric, no self-loops, parallel
edges merged by weight summation at ingest). Labels are class indices
with -1 meaning unobserved.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

__all__ = [
    "Graph",
    "GraphParseError",
    "NodeCovariate",
    "SplitSpec",
    "parse_edge_list",
    "attach_labels",
    "read_label_file",
    "largest_connected_component",
    "degree",
    "closeness_centrality",
    "split_nodes",
    "write_covariate",
]


class GraphParseError(ValueError):
    """Malformed edge or label input."""


@dataclass(frozen=True)
class NodeCovariate:
    """Per-node scalar topology covariate."""

    kind: str  # "degree" or "closeness_centrality"
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("covariate values must be finite and >= 0")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SplitSpec:
    """Seeded train/test split with a fixed test fraction."""

    test_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")


class Graph:
    """Immutable undirected weighted graph.

    Build with :func:`parse_edge_list` or :meth:`Graph.build`. Edge
    weights are nonnegative; adjacency is symmetric by construction.
    """

    __slots__ = ("node_ids", "_indptr", "_indices", "_weights", "labels", "class_names")

    def __init__(self, node_ids, indptr, indices, weights, labels, class_names):
        self.node_ids = list(node_ids)
        self._indptr = indptr
        self._indices = indices
        self._weights = weights
        self.labels = labels
        self.class_names = list(class_names)
        if labels.shape != (len(self.node_ids),):
            raise ValueError("labels length must equal node count")
        if len(self.class_names) and labels.max(initial=-1) >= len(self.class_names):
            raise ValueError("label index out of range")

    @classmethod
    def build(cls, node_ids, edges, labels=None, class_names=()):
        """Construct from an iterable of ``(i, j, weight)`` index triples.

        Parallel edges are merged by summing weights; self-loops and
        negative weights are rejected.
        """
        node_ids = list(node_ids)
        n = len(node_ids)
        merged: dict[tuple[int, int], float] = {}
        for i, j, w in edges:
            if i == j:
                raise GraphParseError(f"self-loop at node index {i}")
            if not 0 <= i < n or not 0 <= j < n:
                raise GraphParseError(f"edge ({i},{j}) out of range")
            w = float(w)
            if w < 0:
                raise GraphParseError(f"negative weight on edge ({i},{j})")
            key = (i, j) if i < j else (j, i)
            merged[key] = merged.get(key, 0.0) + w

        rows, cols, vals = [], [], []
        for (i, j), w in merged.items():
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        adj = csr_matrix(
            (np.asarray(vals, dtype=float), (rows, cols)), shape=(n, n)
        )
        adj.sort_indices()

        if labels is None:
            lab = np.full(n, -1, dtype=np.int64)
        else:
            lab = np.asarray(labels, dtype=np.int64)
        return cls(node_ids, adj.indptr, adj.indices, adj.data, lab, class_names)

    # -- basic accessors -------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self._indices) // 2

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and the matching edge weights of node ``i``."""
        lo, hi = self._indptr[i], self._indptr[i + 1]
        return self._indices[lo:hi], self._weights[lo:hi]

    def adjacency(self) -> csr_matrix:
        n = self.n_nodes
        return csr_matrix((self._weights, self._indices, self._indptr), shape=(n, n))

    def index_of(self, node_id: str) -> int:
        try:
            return self.node_ids.index(node_id)
        except ValueError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    # -- derived graphs ---------------------------------------------------

    def with_labels(self, labels: np.ndarray, class_names) -> "Graph":
        return Graph(
            self.node_ids,
            self._indptr,
            self._indices,
            self._weights,
            np.asarray(labels, dtype=np.int64),
            class_names,
        )

    def mask_labels(self, node_indices) -> "Graph":
        """Copy with the given nodes' labels set to unobserved."""
        lab = self.labels.copy()
        lab[np.asarray(node_indices, dtype=np.int64)] = -1
        return self.with_labels(lab, self.class_names)

    def subgraph(self, node_indices) -> "Graph":
        """Induced subgraph; indices recompacted, external ids preserved."""
        keep = np.asarray(sorted(node_indices), dtype=np.int64)
        remap = -np.ones(self.n_nodes, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        edges = []
        for old_i in keep:
            nbrs, wts = self.neighbors(old_i)
            for old_j, w in zip(nbrs, wts):
                if old_i < old_j and remap[old_j] >= 0:
                    edges.append((remap[old_i], remap[old_j], w))
        return Graph.build(
            [self.node_ids[i] for i in keep],
            edges,
            labels=self.labels[keep],
            class_names=self.class_names,
        )


def parse_edge_list(lines) -> Graph:
    """Parse whitespace-separated ``id1 id2 [weight]`` lines into a graph.

    Blank lines and lines starting with ``#`` are skipped. Repeated pairs
    merge by weight sum; node ids are interned in first-seen order.
    Malformed lines raise :class:`GraphParseError` with the line number.
    """
    ids: dict[str, int] = {}
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"line {lineno}: expected 'id1 id2 [weight]', got {line!r}")
        a, b = parts[0], parts[1]
        if a == b:
            raise GraphParseError(f"line {lineno}: self-loop on {a!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(f"line {lineno}: non-numeric weight {parts[2]!r}") from None
            if not np.isfinite(w) or w < 0:
                raise GraphParseError(f"line {lineno}: invalid weight {w}")
        else:
            w = 1.0
        for tok in (a, b):
            if tok not in ids:
                ids[tok] = len(ids)
        edges.append((ids[a], ids[b], w))
    return Graph.build(list(ids), edges)


def attach_labels(graph: Graph, rows) -> Graph:
    """Return a copy of ``graph`` with labels from ``(id, label)`` pairs.

    The class vocabulary is the distinct label strings in first-seen
    order; nodes not mentioned stay unobserved. Unknown ids and
    conflicting duplicates are errors; consistent duplicates are fine.
    """
    index = {nid: i for i, nid in enumerate(graph.node_ids)}
    classes: dict[str, int] = {}
    labels = np.full(graph.n_nodes, -1, dtype=np.int64)
    for node_id, label in rows:
        if node_id not in index:
            raise GraphParseError(f"label for unknown node id {node_id!r}")
        if label not in classes:
            classes[label] = len(classes)
        c = classes[label]
        i = index[node_id]
        if labels[i] != -1 and labels[i] != c:
            raise GraphParseError(f"conflicting labels for node {node_id!r}")
        labels[i] = c
    return graph.with_labels(labels, list(classes))


def read_label_file(path) -> list[tuple[str, str]]:
    """Read a ``node_id,label`` CSV; a literal header row is tolerated."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            if len(rec) != 2:
                raise GraphParseError(f"label row {rec!r}: expected node_id,label")
            if rec == ["node_id", "label"]:
                continue
            rows.append((rec[0], rec[1]))
    return rows


def largest_connected_component(graph: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Size ties go to the component containing the smallest node index.
    """
    if graph.n_nodes == 0:
        raise ValueError("empty graph has no components")
    n_comp, comp = connected_components(graph.adjacency(), directed=False)
    sizes = np.bincount(comp, minlength=n_comp)
    # component ids are assigned in node-index order, so the first argmax
    # is the tied component containing the smallest node index
    best = int(np.argmax(sizes))
    return graph.subgraph(np.flatnonzero(comp == best))


def degree(graph: Graph) -> NodeCovariate:
    """Unweighted neighbor count per node."""
    return NodeCovariate("degree", np.diff(graph._indptr).astype(float))


def closeness_centrality(graph: Graph, chunk: int = 512) -> NodeCovariate:
    """Reciprocal of each node's total hop distance to all other nodes.

    Distances are unweighted shortest-path hop counts, so the graph must
    be connected (run :func:`largest_connected_component` first). A
    single-node graph gets the value 0 by convention. BFS runs from
    ``chunk`` sources at a time to bound memory.
    """
    n = graph.n_nodes
    if n == 0:
        raise ValueError("empty graph")
    if n == 1:
        return NodeCovariate("closeness_centrality", np.zeros(1))
    n_comp, _ = connected_components(graph.adjacency(), directed=False)
    if n_comp != 1:
        raise ValueError(
            "closeness centrality needs a connected graph "
            "(reduce to the largest connected component first)"
        )
    adj = graph.adjacency()
    totals = np.empty(n)
    for lo in range(0, n, chunk):
        idx = np.arange(lo, min(lo + chunk, n))
        dist = shortest_path(adj, method="D", directed=False, unweighted=True, indices=idx)
        totals[idx] = dist.sum(axis=1)
    return NodeCovariate("closeness_centrality", 1.0 / totals)


def split_nodes(graph: Graph, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic seeded partition into (train, test) node indices.

    All nodes must be labeled. The test set holds ``round(N * fraction)``
    nodes (ties round up); both sides are returned sorted.
    """
    if np.any(graph.labels < 0):
        raise ValueError("split requires every node to be labeled")
    n = graph.n_nodes
    n_test = int(np.floor(n * spec.test_fraction + 0.5))
    perm = np.random.default_rng(spec.seed).permutation(n)
    test = np.sort(perm[:n_test])
    train = np.sort(perm[n_test:])
    return train, test


def write_covariate(path, graph: Graph, cov: NodeCovariate) -> None:
    """Write ``node_id,value`` CSV for a covariate."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "value"])
        for nid, v in zip(graph.node_ids, cov.values):
            w.writerow([nid, repr(float(v))])
