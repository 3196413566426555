import math

import numpy as np
import pytest

from helpers import adjusted_rand_index, gaussian_blobs, kruskal_mst_weight
from topicforge.clusterer import (
    ClusterError,
    Dendrogram,
    MergeEvent,
    build_hierarchy,
    cluster_layout,
    condense,
    core_distances,
    extract_clusters,
    minimum_spanning_tree,
    mutual_reachability,
)

LINE = np.array([[0.0], [1.0], [3.0]])


class TestCoreDistances:
    def test_collinear_min_pts_one(self):
        assert np.allclose(core_distances(LINE, 1), [1.0, 1.0, 2.0])

    def test_duplicated_pair(self):
        pts = np.array([[2.0, 2.0], [2.0, 2.0], [9.0, 9.0]])
        core = core_distances(pts, 1)
        assert core[0] == 0.0 and core[1] == 0.0

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(20)
        pts = rng.normal(size=(50, 3))
        core = core_distances(pts, 5)
        for i in range(50):
            dists = sorted(float(np.linalg.norm(pts[i] - pts[j])) for j in range(50) if j != i)
            assert core[i] == pytest.approx(dists[4], abs=1e-12)

    def test_min_pts_too_large(self):
        with pytest.raises(ClusterError):
            core_distances(LINE, 3)


class TestMutualReachability:
    def test_core_dominates(self):
        pts = np.array([[0.0], [2.0]])
        core = np.array([3.0, 1.0])
        g = mutual_reachability(pts, core)
        assert g.dist(0, 1) == 3.0

    def test_distance_dominates(self):
        pts = np.array([[0.0], [10.0]])
        core = np.array([1.0, 2.0])
        g = mutual_reachability(pts, core)
        assert g.dist(0, 1) == 10.0

    def test_all_equal_points(self):
        pts = np.zeros((4, 2))
        g = mutual_reachability(pts, np.zeros(4))
        assert np.allclose(g.matrix, 0.0)

    def test_lower_bound_and_symmetry(self):
        rng = np.random.default_rng(21)
        pts = rng.normal(size=(30, 2))
        core = core_distances(pts, 4)
        g = mutual_reachability(pts, core)
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        off = ~np.eye(30, dtype=bool)
        assert (g.matrix[off] >= d[off] - 1e-12).all()
        assert np.allclose(g.matrix, g.matrix.T)
        assert np.allclose(np.diag(g.matrix), 0.0)


class TestMst:
    def test_path_geometry(self):
        core = core_distances(LINE, 1)
        g = mutual_reachability(LINE, core)
        edges = {tuple(sorted(e[:2])) for e in minimum_spanning_tree(g)}
        assert edges == {(0, 1), (1, 2)}

    def test_two_points_single_edge(self):
        pts = np.array([[0.0], [5.0]])
        g = mutual_reachability(pts, core_distances(pts, 1))
        mst = minimum_spanning_tree(g)
        assert len(mst) == 1 and mst[0][2] == 5.0

    def test_total_weight_matches_kruskal(self):
        rng = np.random.default_rng(22)
        pts = rng.normal(size=(30, 3))
        g = mutual_reachability(pts, core_distances(pts, 4))
        total = sum(w for _, _, w in minimum_spanning_tree(g))
        assert total == pytest.approx(kruskal_mst_weight(g.matrix), abs=1e-9)

    def test_weight_invariant_under_relabeling(self):
        rng = np.random.default_rng(23)
        pts = rng.normal(size=(25, 2))
        perm = rng.permutation(25)
        for arr in (pts, pts[perm]):
            g = mutual_reachability(arr, core_distances(arr, 3))
            total = sum(w for _, _, w in minimum_spanning_tree(g))
            g0 = mutual_reachability(pts, core_distances(pts, 3))
            base = sum(w for _, _, w in minimum_spanning_tree(g0))
            assert total == pytest.approx(base, abs=1e-9)


class TestHierarchy:
    def test_two_points(self):
        dg = build_hierarchy([(0, 1, 2.5)])
        assert dg.n == 2
        assert dg.merges == [MergeEvent(0, 1, 2.5, 2)]

    def test_path_merge_order(self):
        core = core_distances(LINE, 1)
        g = mutual_reachability(LINE, core)
        dg = build_hierarchy(minimum_spanning_tree(g))
        assert [m.weight for m in dg.merges] == [1.0, 2.0]

    def test_final_size_is_n(self):
        rng = np.random.default_rng(24)
        pts = rng.normal(size=(20, 2))
        g = mutual_reachability(pts, core_distances(pts, 3))
        dg = build_hierarchy(minimum_spanning_tree(g))
        assert dg.merges[-1].merged_size == 20


class TestCondense:
    def test_single_blob_one_cluster(self):
        pts, _ = gaussian_blobs(25, n_per=20)
        pts = pts[:20]  # one blob only
        tree = condense(
            build_hierarchy(
                minimum_spanning_tree(mutual_reachability(pts, core_distances(pts, 5)))
            ),
            min_cluster_size=5,
        )
        assert set(tree.nodes) == {0}
        assert tree.nodes[0].size == 20
        assert len(tree.departures) == 20

    def test_two_blobs_two_children(self):
        rng = np.random.default_rng(26)
        a = rng.normal(0.0, 0.1, (20, 2))
        b = rng.normal(0.0, 0.1, (20, 2)) + [10.0, 0.0]
        pts = np.vstack([a, b])
        tree = condense(
            build_hierarchy(
                minimum_spanning_tree(mutual_reachability(pts, core_distances(pts, 5)))
            ),
            min_cluster_size=5,
        )
        assert tree.children[0] == [1, 2]
        assert {tree.nodes[1].size, tree.nodes[2].size} == {20}

    def test_zero_stability_when_points_leave_at_birth(self):
        # root splits into two pairs at weight 1; each pair sheds its two
        # leaves at the same lambda it was born at -> zero stability
        dg = Dendrogram(
            n=4,
            merges=[
                MergeEvent(0, 1, 1.0, 2),
                MergeEvent(2, 3, 1.0, 2),
                MergeEvent(4, 5, 1.0, 4),
            ],
        )
        tree = condense(dg, min_cluster_size=2)
        assert tree.stability[1] == 0.0 and tree.stability[2] == 0.0

    def test_min_cluster_size_bounds(self):
        dg = Dendrogram(n=2, merges=[MergeEvent(0, 1, 1.0, 2)])
        with pytest.raises(ClusterError):
            condense(dg, min_cluster_size=1)
        with pytest.raises(ClusterError):
            condense(dg, min_cluster_size=3)


class TestExtract:
    def test_single_blob_all_label_zero(self):
        rng = np.random.default_rng(27)
        pts = rng.normal(size=(30, 2))
        labels = cluster_layout(pts, min_pts=5, min_cluster_size=5)
        assert labels.n_clusters == 1
        assert (labels.labels == 0).all()

    def test_three_blob_recovery(self):
        pts, truth = gaussian_blobs(28)
        labels = cluster_layout(pts, min_pts=10, min_cluster_size=10)
        assert labels.n_clusters == 3
        assert adjusted_rand_index(truth, labels.labels) >= 0.95

    def test_noise_points_marked_outliers(self):
        pts, truth = gaussian_blobs(29)
        rng = np.random.default_rng(30)
        noise = rng.uniform(-15, 25, size=(10, pts.shape[1]))
        allpts = np.vstack([pts, noise])
        labels = cluster_layout(allpts, min_pts=10, min_cluster_size=10)
        assert int(np.sum(labels.labels[-10:] == -1)) >= 7

    def test_label_partition_counts(self):
        pts, _ = gaussian_blobs(31)
        labels = cluster_layout(pts, min_pts=8, min_cluster_size=8)
        counts = labels.counts()
        assert sum(counts.values()) == len(pts)
        for lab, c in counts.items():
            if lab >= 0:
                assert c >= 8

    def test_min_cluster_size_monotone(self):
        pts, _ = gaussian_blobs(32)
        core = core_distances(pts, 8)
        dg = build_hierarchy(minimum_spanning_tree(mutual_reachability(pts, core)))
        previous = math.inf
        for mcs in (2, 3, 5, 8, 12, 20):
            labels = extract_clusters(condense(dg, mcs))
            assert labels.n_clusters <= previous
            previous = labels.n_clusters
