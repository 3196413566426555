"""Density clustering over the reduced layout (HDBSCAN construction).

Pipeline: core distances -> mutual reachability -> MST -> single-linkage
hierarchy -> condensed tree -> stability-based (excess-of-mass) cluster
extraction with noise labelled -1. Everything is deterministic: ties
break on (weight, lower vertex id) and the extraction order is fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ClusterError(ValueError):
    pass


@dataclass
class MutualReachabilityGraph:
    n: int
    min_pts: int
    core_dist: np.ndarray  # (n,)
    matrix: np.ndarray  # (n, n) symmetric, zero diagonal

    def dist(self, p: int, q: int) -> float:
        return float(self.matrix[p, q])


@dataclass(frozen=True)
class MergeEvent:
    cluster_a: int
    cluster_b: int
    weight: float
    merged_size: int


@dataclass
class Dendrogram:
    n: int
    merges: list[MergeEvent]  # ascending weight; merge i creates cluster n + i


@dataclass
class CondensedNode:
    node_id: int
    parent: int | None
    lambda_birth: float
    lambda_death: float
    size: int


@dataclass
class CondensedTree:
    nodes: dict[int, CondensedNode]
    children: dict[int, list[int]]  # cluster node -> cluster children (0 or 2)
    departures: list[tuple[int, int, float]]  # (cluster node, point, lambda)
    stability: dict[int, float]
    min_cluster_size: int
    n_points: int


@dataclass
class ClusterLabels:
    labels: np.ndarray  # (n,) int, -1 = outlier
    n_clusters: int

    def counts(self) -> dict[int, int]:
        vals, cnt = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, cnt)}


def pairwise_distances(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    sq = np.sum(Y * Y, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def core_distances(Y: np.ndarray, min_pts: int) -> np.ndarray:
    """Distance from each point to its min_pts-th nearest neighbor (self excluded)."""
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[0]
    if not 1 <= min_pts < n:
        raise ClusterError(f"min_pts must satisfy 1 <= min_pts < n = {n}, got {min_pts}")
    d = pairwise_distances(Y)
    np.fill_diagonal(d, np.inf)
    part = np.sort(d, axis=1)
    return part[:, min_pts - 1].copy()


def mutual_reachability(Y: np.ndarray, core: np.ndarray, min_pts: int = 0) -> MutualReachabilityGraph:
    """max(core(p), core(q), d(p, q)) pairwise, with a zero diagonal."""
    d = pairwise_distances(Y)
    m = np.maximum(d, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(m, 0.0)
    return MutualReachabilityGraph(n=d.shape[0], min_pts=min_pts, core_dist=np.asarray(core), matrix=m)


def minimum_spanning_tree(graph: MutualReachabilityGraph) -> list[tuple[int, int, float]]:
    """Prim's algorithm on the dense graph; ties resolve to the lowest index."""
    m = graph.matrix
    n = graph.n
    if n < 2:
        raise ClusterError("need at least 2 points for a spanning tree")
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    dist = m[0].copy()
    parent = np.zeros(n, dtype=np.intp)
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, dist)
        j = int(np.argmin(cand))
        edges.append((int(parent[j]), j, float(dist[j])))
        in_tree[j] = True
        closer = (m[j] < dist) & ~in_tree
        dist[closer] = m[j][closer]
        parent[closer] = j
    return edges


def build_hierarchy(mst: list[tuple[int, int, float]]) -> Dendrogram:
    """Single-linkage merges over MST edges, ascending (weight, lower vertex id)."""
    n = len(mst) + 1
    ordered = sorted(mst, key=lambda e: (e[2], min(e[0], e[1]), max(e[0], e[1])))
    parent = list(range(2 * n - 1))
    cluster_of = list(range(n))  # root vertex -> current cluster id
    size = [1] * (2 * n - 1)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merges: list[MergeEvent] = []
    next_id = n
    for u, v, w in ordered:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise ClusterError("input edges do not form a tree")
        ca, cb = cluster_of[ru], cluster_of[rv]
        merged = size[ca] + size[cb]
        size[next_id] = merged
        parent[ru] = rv
        cluster_of[find(u)] = next_id
        merges.append(MergeEvent(min(ca, cb), max(ca, cb), w, merged))
        next_id += 1
    return Dendrogram(n=n, merges=merges)


def _lambda_of(weight: float) -> float:
    return 1.0 / weight if weight > 0 else math.inf


def condense(dendrogram: Dendrogram, min_cluster_size: int = 10) -> CondensedTree:
    """Collapse the hierarchy so only splits with both sides >= min_cluster_size
    create new clusters; smaller sides fall out of their parent point by point.

    stability(C) = sum over members of (lambda at departure - lambda at birth),
    with lambda = 1 / merge weight.
    """
    n = dendrogram.n
    if min_cluster_size < 2:
        raise ClusterError(f"min_cluster_size must be >= 2, got {min_cluster_size}")
    if min_cluster_size > n:
        raise ClusterError(f"min_cluster_size {min_cluster_size} exceeds point count {n}")

    kids: dict[int, tuple[int, int]] = {}
    lam: dict[int, float] = {}
    sizes = [1] * (2 * n - 1)
    for i, ev in enumerate(dendrogram.merges):
        node = n + i
        kids[node] = (ev.cluster_a, ev.cluster_b)
        lam[node] = _lambda_of(ev.weight)
        sizes[node] = ev.merged_size

    def leaves(node: int) -> list[int]:
        stack, out = [node], []
        while stack:
            x = stack.pop()
            if x < n:
                out.append(x)
            else:
                stack.extend(kids[x])
        return out

    root_tree = 2 * n - 2
    nodes: dict[int, CondensedNode] = {0: CondensedNode(0, None, 0.0, math.inf, n)}
    children: dict[int, list[int]] = {0: []}
    departures: list[tuple[int, int, float]] = []
    stability: dict[int, float] = {0: 0.0}
    next_cond = 1

    def credit(cluster: int, lam_value: float, count: int) -> None:
        birth = nodes[cluster].lambda_birth
        if math.isinf(lam_value) and math.isinf(birth):
            return
        stability[cluster] += (lam_value - birth) * count

    if n == 1:
        departures.append((0, 0, math.inf))
        return CondensedTree(nodes, children, departures, stability, min_cluster_size, n)

    stack: list[tuple[int, int]] = [(root_tree, 0)]
    while stack:
        tree_node, rel = stack.pop()
        while True:
            a, b = kids[tree_node]
            lv = lam[tree_node]
            sa, sb = sizes[a], sizes[b]
            if sa >= min_cluster_size and sb >= min_cluster_size:
                nodes[rel].lambda_death = lv
                credit(rel, lv, sa + sb)
                for side, sz in ((a, sa), (b, sb)):
                    cid = next_cond
                    next_cond += 1
                    nodes[cid] = CondensedNode(cid, rel, lv, math.inf, sz)
                    children[cid] = []
                    stability[cid] = 0.0
                    children[rel].append(cid)
                    stack.append((side, cid))
                break
            if sa < min_cluster_size and sb < min_cluster_size:
                for p in leaves(a) + leaves(b):
                    departures.append((rel, p, lv))
                credit(rel, lv, sa + sb)
                nodes[rel].lambda_death = lv
                break
            big, small, s_small = (a, b, sb) if sa >= min_cluster_size else (b, a, sa)
            for p in leaves(small):
                departures.append((rel, p, lv))
            credit(rel, lv, s_small)
            nodes[rel].lambda_death = lv
            tree_node = big

    return CondensedTree(nodes, children, departures, stability, min_cluster_size, n)


def extract_clusters(tree: CondensedTree) -> ClusterLabels:
    """Excess-of-mass selection over the condensed tree.

    A cluster is kept when its stability exceeds the summed stability of
    its selected descendants. The root only qualifies when it never split
    (single-cluster corpus); points that fall out above every selected
    cluster are outliers (-1).
    """
    order = sorted(tree.nodes, reverse=True)  # children before parents
    total: dict[int, float] = {}
    selected: set[int] = set()

    def deselect_subtree(c: int) -> None:
        for child in tree.children.get(c, []):
            selected.discard(child)
            deselect_subtree(child)

    for c in order:
        child_ids = tree.children.get(c, [])
        if not child_ids:
            total[c] = tree.stability[c]
            selected.add(c)
            continue
        child_sum = sum(total[ch] for ch in child_ids)
        if c == 0:
            total[c] = child_sum  # root never competes with its children
            continue
        if tree.stability[c] > child_sum:
            total[c] = tree.stability[c]
            selected.discard(c)
            deselect_subtree(c)
            selected.add(c)
        else:
            total[c] = child_sum

    label_of = {c: i for i, c in enumerate(sorted(selected))}
    labels = np.full(tree.n_points, -1, dtype=int)
    for cluster, point, _lam in tree.departures:
        node: int | None = cluster
        while node is not None:
            if node in label_of:
                labels[point] = label_of[node]
                break
            node = tree.nodes[node].parent
    return ClusterLabels(labels=labels, n_clusters=len(label_of))


def cluster_layout(Y: np.ndarray, min_pts: int = 10, min_cluster_size: int = 10) -> ClusterLabels:
    """Full HDBSCAN pass over layout coordinates."""
    core = core_distances(Y, min_pts)
    graph = mutual_reachability(Y, core, min_pts)
    mst = minimum_spanning_tree(graph)
    dendrogram = build_hierarchy(mst)
    tree = condense(dendrogram, min_cluster_size)
    return extract_clusters(tree)


def labels_to_csv(labels: ClusterLabels, doc_ids: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id,label\n")
        for doc_id, lab in zip(doc_ids, labels.labels):
            fh.write(f"{doc_id},{int(lab)}\n")


def condensed_tree_to_csv(tree: CondensedTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id,parent,lambda_birth,lambda_death,size,stability\n")
        for node_id in sorted(tree.nodes):
            nd = tree.nodes[node_id]
            parent = "" if nd.parent is None else str(nd.parent)
            fh.write(
                f"{nd.node_id},{parent},{nd.lambda_birth!r},{nd.lambda_death!r},"
                f"{nd.size},{tree.stability[node_id]!r}\n"
            )
