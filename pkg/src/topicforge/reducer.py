"""Dimensionality reduction over embeddings: fuzzy k-NN graph + cross-entropy layout.

High-dimensional neighborhoods become fuzzy edge weights w_h; a low
dimensional layout is optimised so that the smooth weight
w_l(d) = 1 / (1 + a * d^(2b)) matches them under the edge-wise
cross-entropy

    sum_e  w_h log(w_h / w_l) + (1 - w_h) log((1 - w_h) / (1 - w_l)),

with attraction along positive edges and negative-sampled repulsion
standing in for the (absent) w_h = 0 terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

SIGMA_TOLERANCE = 1e-5
SIGMA_MAX_ITER = 64
WL_CLAMP = 1e-4  # keep w_l away from {0, 1} in log terms
GRAD_CLIP = 4.0  # per-coordinate update clip, standard for this estimator
DIST_EPS = 1e-3  # softens the repulsive 1/d^2 singularity
DIVERGENCE_LIMIT = 1e6


class ReducerError(RuntimeError):
    pass


@dataclass
class FuzzyGraph:
    heads: np.ndarray  # (E,) int
    tails: np.ndarray  # (E,) int
    weights: np.ndarray  # (E,) float in (0, 1]
    n: int
    k: int
    rho: np.ndarray  # (n,) distance to nearest neighbor
    sigma: np.ndarray  # (n,) smooth-kNN calibration

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.heads.tolist(), self.tails.tolist(), self.weights.tolist()))


@dataclass
class Layout:
    Y: np.ndarray  # (n, out_dim)
    out_dim: int
    epoch_ce: list[float]


def knn_graph(X: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact Euclidean k nearest neighbors (self excluded), ties to the lower index.

    Returns (indices, distances), both (n, k), neighbors sorted by distance.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ReducerError(f"k must satisfy 1 <= k < n = {n}, got {k}")
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    dists = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return order, dists


def symmetrize(a: float, b: float) -> float:
    """Fuzzy union of the two directed memberships: a + b - a*b."""
    return a + b - a * b


def fuzzy_weights(indices: np.ndarray, dists: np.ndarray) -> FuzzyGraph:
    """Calibrate per-vertex (rho, sigma) and symmetrize directed weights.

    rho_i is the nearest-neighbor distance; sigma_i is bisected so that
    sum_j exp(-max(0, d_ij - rho_i) / sigma_i) hits log2(k). Directed
    weights a, b combine as a + b - a*b; each undirected edge is stored once.
    """
    n, k = dists.shape
    if k < 2:
        raise ReducerError(f"fuzzy weights need k >= 2 neighbors, got {k}")
    target = np.log2(k)
    rho = dists[:, 0].copy()
    sigma = np.empty(n)
    for i in range(n):
        gaps = np.maximum(dists[i] - rho[i], 0.0)
        sigma[i] = _solve_sigma(gaps, target, vertex=i)

    directed: dict[tuple[int, int], float] = {}
    for i in range(n):
        w = np.exp(-np.maximum(dists[i] - rho[i], 0.0) / sigma[i])
        for j, wij in zip(indices[i], w):
            directed[(i, int(j))] = float(wij)

    merged: dict[tuple[int, int], float] = {}
    for (i, j), a in directed.items():
        key = (i, j) if i < j else (j, i)
        if key in merged:
            continue
        merged[key] = symmetrize(a, directed.get((j, i), 0.0))
    keys = sorted(merged)
    heads = np.array([i for i, _ in keys], dtype=np.intp)
    tails = np.array([j for _, j in keys], dtype=np.intp)
    weights = np.array([merged[key] for key in keys])
    return FuzzyGraph(heads=heads, tails=tails, weights=weights, n=n, k=k, rho=rho, sigma=sigma)


def _solve_sigma(gaps: np.ndarray, target: float, vertex: int) -> float:
    def total(sig: float) -> float:
        return float(np.exp(-gaps / sig).sum())

    lo, hi = 1e-12, 1.0
    grow = 0
    while total(hi) < target:
        hi *= 2.0
        grow += 1
        if grow > SIGMA_MAX_ITER:
            raise ReducerError(f"sigma bracket expansion failed to converge for vertex {vertex}")
    mid = hi
    for _ in range(SIGMA_MAX_ITER):
        mid = 0.5 * (lo + hi)
        value = total(mid)
        if abs(value - target) <= SIGMA_TOLERANCE:
            return mid
        if value > target:
            hi = mid
        else:
            lo = mid
    if abs(total(mid) - target) <= SIGMA_TOLERANCE:
        return mid
    raise ReducerError(f"sigma bisection did not converge for vertex {vertex}")


def curve_params(min_dist: float) -> tuple[float, float]:
    """Least-squares (a, b) so 1/(1 + a d^(2b)) tracks the min_dist plateau curve.

    Target is 1 for d <= min_dist and exp(-(d - min_dist)) beyond, sampled
    at 300 points over (0, 3]. Falls back to (1, 1) if the fit fails.
    """
    if not 0.0 < min_dist < 2.0:
        raise ReducerError(f"min_dist must lie in (0, 2), got {min_dist}")

    def wl(d, a, b):
        return 1.0 / (1.0 + a * d ** (2.0 * b))

    xs = np.linspace(3.0 / 300, 3.0, 300)
    ys = np.where(xs <= min_dist, 1.0, np.exp(-(xs - min_dist)))
    try:
        (a, b), _ = curve_fit(wl, xs, ys, p0=(1.0, 1.0), maxfev=5000)
        if not (np.isfinite(a) and np.isfinite(b) and a > 0 and b > 0):
            raise RuntimeError("degenerate fit")
    except RuntimeError:
        import warnings

        warnings.warn("output-curve fit failed; falling back to a=1, b=1")
        return 1.0, 1.0
    return float(a), float(b)


def low_dim_weight(d2: np.ndarray, a: float, b: float) -> np.ndarray:
    """w_l as a function of squared distance."""
    return 1.0 / (1.0 + a * d2**b)


def cross_entropy_terms(w_h: np.ndarray, w_l: np.ndarray) -> np.ndarray:
    """Per-edge cross-entropy with w_l clamped away from {0, 1}.

    Each term is the KL divergence between Bernoulli(w_h) and
    Bernoulli(w_l), hence non-negative.
    """
    wl = np.clip(w_l, WL_CLAMP, 1.0 - WL_CLAMP)
    wh = np.asarray(w_h, dtype=np.float64)
    out = np.zeros_like(wl)
    pos = wh > 0
    out[pos] += wh[pos] * np.log(wh[pos] / wl[pos])
    neg = wh < 1
    out[neg] += (1.0 - wh[neg]) * np.log((1.0 - wh[neg]) / (1.0 - wl[neg]))
    return out


def _epoch_updates(Y, heads, tails, w_h, negs, lr, a, b):
    """One asynchronous pass: each edge attracts its endpoints (scaled by its
    weight) then repels the head from the sampled negatives. Sequential
    in-place updates keep the optimisation stable from a near-degenerate
    start and make the result deterministic."""
    n_edges = heads.shape[0]
    dim = Y.shape[1]
    neg_samples = negs.shape[1]
    for e in range(n_edges):
        i = heads[e]
        j = tails[e]
        u = 0.0
        for d in range(dim):
            diff = Y[i, d] - Y[j, d]
            u += diff * diff
        if u > 0.0:
            coef = w_h[e] * (-2.0 * a * b * u ** (b - 1.0)) / (1.0 + a * u**b)
            for d in range(dim):
                g = coef * (Y[i, d] - Y[j, d])
                if g > GRAD_CLIP:
                    g = GRAD_CLIP
                elif g < -GRAD_CLIP:
                    g = -GRAD_CLIP
                Y[i, d] += lr * g
                Y[j, d] -= lr * g
        for s in range(neg_samples):
            k = negs[e, s]
            if k == i:
                continue
            u = 0.0
            for d in range(dim):
                diff = Y[i, d] - Y[k, d]
                u += diff * diff
            coef = 2.0 * b / ((DIST_EPS + u) * (1.0 + a * u**b))
            for d in range(dim):
                g = coef * (Y[i, d] - Y[k, d])
                if g > GRAD_CLIP:
                    g = GRAD_CLIP
                elif g < -GRAD_CLIP:
                    g = -GRAD_CLIP
                Y[i, d] += lr * g


try:  # the jitted kernel is ~100x faster; the pure-Python path is the fallback
    from numba import njit

    _epoch_updates_fast = njit(cache=True)(_epoch_updates)
except Exception:  # pragma: no cover - numba present in the supported env
    _epoch_updates_fast = _epoch_updates


def optimize_layout(
    graph: FuzzyGraph,
    out_dim: int = 5,
    epochs: int = 200,
    seed: int = 0,
    learning_rate: float = 1.0,
    neg_samples: int = 5,
    min_dist: float = 0.1,
    ab: tuple[float, float] | None = None,
) -> Layout:
    """Stochastically descend the layout under the edge-wise cross-entropy.

    Per epoch every positive edge attracts its endpoints (scaled by w_h)
    and each edge head repels ``neg_samples`` uniformly sampled vertices;
    the learning rate decays linearly to zero. The recorded epoch_ce is
    the objective over positive edges plus that epoch's sampled negatives.
    """
    if out_dim < 2:
        raise ReducerError(f"out_dim must be >= 2, got {out_dim}")
    if epochs < 1:
        raise ReducerError(f"epochs must be >= 1, got {epochs}")
    a, b = ab if ab is not None else curve_params(min_dist)

    rng = np.random.default_rng(seed)
    n = graph.n
    Y = rng.normal(0.0, 1e-2, size=(n, out_dim))
    heads, tails, w_h = graph.heads, graph.tails, graph.weights
    epoch_ce: list[float] = []

    for epoch in range(epochs):
        lr = learning_rate * (1.0 - epoch / epochs)
        negs = rng.integers(0, n, size=(heads.size, neg_samples))
        _epoch_updates_fast(Y, heads, tails, w_h, negs, lr, a, b)

        peak = float(np.max(np.abs(Y)))
        if peak > DIVERGENCE_LIMIT:
            raise ReducerError(
                f"layout diverged at epoch {epoch}: max |coordinate| = {peak:.3e} (lr={lr:.3g})"
            )

        delta = Y[heads] - Y[tails]
        u = np.sum(delta * delta, axis=1)
        ce = float(np.sum(cross_entropy_terms(w_h, low_dim_weight(u, a, b))))
        rep_heads = np.repeat(heads, neg_samples)
        rep_tails = negs.reshape(-1)
        keep = rep_heads != rep_tails
        rdelta = Y[rep_heads[keep]] - Y[rep_tails[keep]]
        ru = np.sum(rdelta * rdelta, axis=1)
        ce += float(np.sum(cross_entropy_terms(np.zeros(ru.size), low_dim_weight(ru, a, b))))
        epoch_ce.append(ce)

    return Layout(Y=Y, out_dim=out_dim, epoch_ce=epoch_ce)


def reduce_embeddings(
    X: np.ndarray,
    k: int = 15,
    out_dim: int = 5,
    epochs: int = 200,
    seed: int = 0,
    learning_rate: float = 1.0,
    neg_samples: int = 5,
    min_dist: float = 0.1,
) -> Layout:
    """knn_graph -> fuzzy_weights -> optimize_layout with shared defaults."""
    indices, dists = knn_graph(X, k)
    graph = fuzzy_weights(indices, dists)
    return optimize_layout(
        graph,
        out_dim=out_dim,
        epochs=epochs,
        seed=seed,
        learning_rate=learning_rate,
        neg_samples=neg_samples,
        min_dist=min_dist,
    )


def layout_to_csv(layout: Layout, doc_ids: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id," + ",".join(f"y{i + 1}" for i in range(layout.out_dim)) + "\n")
        for doc_id, row in zip(doc_ids, layout.Y):
            fh.write(doc_id + "," + ",".join(repr(float(v)) for v in row) + "\n")
