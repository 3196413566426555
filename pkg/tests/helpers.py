"""Shared test oracles and fixture builders (independent of the library paths)."""

from __future__ import annotations

from collections import Counter
from math import comb

import numpy as np


def adjusted_rand_index(truth, labels) -> float:
    """Contingency-table ARI, written directly from the definition."""
    truth = list(truth)
    labels = list(labels)
    n = len(truth)
    pair_counts = Counter(zip(truth, labels))
    sum_ij = sum(comb(c, 2) for c in pair_counts.values())
    sum_a = sum(comb(c, 2) for c in Counter(truth).values())
    sum_b = sum(comb(c, 2) for c in Counter(labels).values())
    expected = sum_a * sum_b / comb(n, 2)
    maximum = (sum_a + sum_b) / 2
    return (sum_ij - expected) / (maximum - expected)


def gaussian_blobs(seed: int, n_per: int = 50, dim: int = 6, separation: float = 10.0, sigma: float = 1.0):
    """Three Gaussian blobs with centers separated by ``separation`` (= 10 sigma)."""
    rng = np.random.default_rng(seed)
    centers = np.zeros((3, dim))
    centers[0, 0] = separation
    centers[1, 1] = separation
    centers[2, 2] = separation
    points = np.vstack([rng.normal(0.0, sigma, (n_per, dim)) + centers[c] for c in range(3)])
    truth = np.repeat(np.arange(3), n_per)
    return points, truth


def knn_oracle(points: np.ndarray, k: int):
    """O(n^2) sorted-distance nearest neighbors, ties to the lower index."""
    n = len(points)
    idx = np.zeros((n, k), dtype=int)
    dst = np.zeros((n, k))
    for i in range(n):
        cand = []
        for j in range(n):
            if j == i:
                continue
            cand.append((float(np.linalg.norm(points[i] - points[j])), j))
        cand.sort()
        idx[i] = [j for _, j in cand[:k]]
        dst[i] = [d for d, _ in cand[:k]]
    return idx, dst


def kruskal_mst_weight(matrix: np.ndarray) -> float:
    """Independent MST total weight via Kruskal + union-find."""
    n = matrix.shape[0]
    edges = sorted((float(matrix[i, j]), i, j) for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0.0
    used = 0
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += w
            used += 1
            if used == n - 1:
                break
    return total


def relative_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a) + np.abs(b), 1e-8)
    return np.abs(a - b) / scale


def finite_difference_gradients(loss_fn, params: dict[str, np.ndarray], h: float = 1e-5) -> dict[str, np.ndarray]:
    """Central differences of a scalar loss w.r.t. every parameter entry."""
    grads = {}
    for name, arr in params.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            lp = loss_fn()
            flat[i] = orig - h
            lm = loss_fn()
            flat[i] = orig
            gflat[i] = (lp - lm) / (2 * h)
        grads[name] = g
    return grads


def assert_gradients_close(
    analytic: dict[str, np.ndarray],
    numeric: dict[str, np.ndarray],
    tol: float = 1e-4,
    abs_floor: float = 1e-9,
):
    """Relative-error gate with the usual escape hatch: entries whose absolute
    difference sits below ``abs_floor`` are finite-difference noise on
    numerically-zero gradients, not mismatches."""
    worst = 0.0
    worst_name = ""
    max_abs_diff = 0.0
    for name in analytic:
        diff = np.abs(analytic[name] - numeric[name])
        max_abs_diff = max(max_abs_diff, float(diff.max()))
        err = relative_error(analytic[name], numeric[name])
        mask = diff > abs_floor
        if mask.any():
            m = float(err[mask].max())
            if m > worst:
                worst, worst_name = m, name
    assert worst < tol, f"gradient mismatch on {worst_name}: rel err {worst:.3e}"
    return max_abs_diff
