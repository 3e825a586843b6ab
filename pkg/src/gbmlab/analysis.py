"""Evaluation metrics, connectivity diagnostics and Monte-Carlo sweeps.

Metrics operate on predicted/true label arrays where -1 marks an
unassigned vertex (treated as its own singleton cluster and counted as an
error).  Connectivity diagnostics work on Graph objects or raw edge
arrays; phase sweeps generate seeded trial graphs per grid point and
report empirical frequencies.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .generators import (IntervalSet, interval_union_edges_only, rag1_edges_only,
                         rag_t_edges_only, radius_from_scale)
from .geometry import annulus_fraction, psi
from .graph import Graph
from .recovery import UNASSIGNED, UnionFind


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f_score: float
    node_error_rate: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "f_score": self.f_score, "node_error_rate": self.node_error_rate}


def _pair_count(sizes: np.ndarray) -> int:
    return int((sizes.astype(np.int64) * (sizes.astype(np.int64) - 1) // 2).sum())


def pair_f_score(pred, truth) -> Metrics:
    """Pair-level precision/recall/f-score plus the node error rate.

    Precision is the fraction of pred-co-clustered pairs that are truly
    co-clustered; recall the fraction of truly co-clustered pairs that
    pred co-clusters.  Unassigned vertices act as singletons, so they
    contribute no predicted pairs.  Label-permutation invariant.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth must have equal length")
    assigned = pred != UNASSIGNED

    pred_ids, pred_inv = np.unique(pred[assigned], return_inverse=True)
    truth_ids, truth_inv = np.unique(truth, return_inverse=True)

    pred_sizes = np.bincount(pred_inv, minlength=len(pred_ids))
    truth_sizes = np.bincount(truth_inv, minlength=len(truth_ids))
    pred_pairs = _pair_count(pred_sizes)
    truth_pairs = _pair_count(truth_sizes)

    # contingency over assigned vertices
    joint = np.bincount(pred_inv * len(truth_ids) + truth_inv[assigned],
                        minlength=len(pred_ids) * len(truth_ids))
    tp = _pair_count(joint)

    precision = tp / pred_pairs if pred_pairs else 0.0
    recall = tp / truth_pairs if truth_pairs else 0.0
    f = 2 * precision * recall / (precision + recall) if precision > 0 and recall > 0 else 0.0
    return Metrics(precision=precision, recall=recall, f_score=f,
                   node_error_rate=node_error_rate(pred, truth))


def node_error_rate(pred, truth) -> float:
    """Fraction of vertices outside the majority truth label of their cluster.

    Each predicted cluster maps to its majority truth label (ties map to
    the smallest truth label); minority members and unassigned vertices
    count as misclassified.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth must have equal length")
    n = len(pred)
    if n == 0:
        return 0.0
    errors = int((pred == UNASSIGNED).sum())
    assigned = pred != UNASSIGNED
    truth_ids, truth_inv = np.unique(truth, return_inverse=True)
    for cluster in np.unique(pred[assigned]):
        members = pred == cluster
        counts = np.bincount(truth_inv[members], minlength=len(truth_ids))
        errors += int(members.sum() - counts.max())
    return errors / n


def component_count(graph: Graph) -> int:
    uf = UnionFind(graph.n)
    for u, v in graph.edges:
        uf.union(int(u), int(v))
    return uf.n_components


def is_connected(graph: Graph) -> bool:
    return component_count(graph) == 1


def _components_from_edges(n: int, u: np.ndarray, v: np.ndarray) -> int:
    """Component count via sparse BFS; fast path for large Monte-Carlo sweeps."""
    import scipy.sparse as sp
    import scipy.sparse.csgraph as csgraph
    if len(u) == 0:
        return n
    m = sp.coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n))
    ncomp, _ = csgraph.connected_components(m, directed=False)
    return int(ncomp)


def isolated_count(graph: Graph) -> int:
    return int((graph.degrees() == 0).sum())


def isolated_expectation_1d(n: int, a: float, b: float) -> float:
    """Expected isolated-vertex count n (1 - 2 (a-b) log n / n)^(n-1) on the circle."""
    p = 2.0 * (a - b) * math.log(n) / n
    if p > 1.0:
        raise ValueError("band measure exceeds 1; expectation formula invalid")
    return n * (1.0 - p) ** (n - 1)


def isolated_expectation_hd(n: int, t: int, a: float, b: float) -> float:
    """Expected isolated-vertex count on S^t with scaled radii (a, b).

    Uses the exact annulus fraction rather than the leading-order
    c_t r^t approximation.
    """
    r1 = radius_from_scale(b, n, t)
    r2 = radius_from_scale(a, n, t)
    p = annulus_fraction(t, r1, r2)
    return n * (1.0 - p) ** (n - 1)


def isolated_vertices_expected_hd(t: int, a: float, b: float) -> bool:
    """Zero-one law side: isolated vertices persist iff a^t - b^t < psi(t)."""
    return a ** t - b ** t < psi(t)


def left_deficiency_count(embeddings: np.ndarray, graph: Graph) -> int:
    """Vertices with no neighbor at counterclockwise offset in (0, 1/2]."""
    pos = np.asarray(embeddings, dtype=float)
    if pos.ndim != 1:
        raise ValueError("circle embeddings expected")
    has_ccw = np.zeros(graph.n, dtype=bool)
    if graph.m:
        u, v = graph.edges[:, 0], graph.edges[:, 1]
        off_uv = (pos[v] - pos[u]) % 1.0
        hit_u = (off_uv > 0.0) & (off_uv <= 0.5)
        off_vu = (pos[u] - pos[v]) % 1.0
        hit_v = (off_vu > 0.0) & (off_vu <= 0.5)
        np.logical_or.at(has_ccw, u, hit_u)
        np.logical_or.at(has_ccw, v, hit_v)
    return int((~has_ccw).sum())


def find_pole(graph: Graph, embeddings: np.ndarray, r2: float):
    """Smallest vertex adjacent to every other vertex within distance r2, or None."""
    x = np.asarray(embeddings, dtype=float)
    circle = x.ndim == 1
    adj = graph.adjacency_bool()
    block = 512
    for i0 in range(0, graph.n, block):
        i1 = min(i0 + block, graph.n)
        if circle:
            d = np.abs(x[i0:i1, None] - x[None, :])
            d = np.minimum(d, 1.0 - d)
        else:
            d = np.sqrt(np.clip(2.0 - 2.0 * (x[i0:i1] @ x.T), 0.0, None))
        within = d <= r2
        within[np.arange(i1 - i0), np.arange(i0, i1)] = False
        missing = within & ~adj[i0:i1]
        ok = ~missing.any(axis=1)
        if ok.any():
            return int(i0 + np.argmax(ok))
    return None


@dataclass(frozen=True)
class PhasePoint:
    a: float
    b: float
    trials: int
    connected_frac: float
    isolated_frac: float
    mean_components: float


def _phase_trial(args) -> tuple[bool, bool, int]:
    family, n, a, b, c, t, seed, gi, ti = args
    trial_seed = (seed, gi, ti)
    ln = math.log(n)
    if family == "rag1":
        _, u, v = rag1_edges_only(n, b * ln / n, a * ln / n, trial_seed)
    elif family == "rag_t":
        _, u, v = rag_t_edges_only(n, t, radius_from_scale(b, n, t),
                                   radius_from_scale(a, n, t), trial_seed)
    elif family == "interval_union":
        ivs = IntervalSet(((0.0, c * ln / n), (b * ln / n, a * ln / n)))
        _, u, v = interval_union_edges_only(n, ivs, trial_seed)
    else:
        raise ValueError(f"unknown family {family!r}")
    deg = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
    iso = int((deg == 0).sum())
    ncomp = _components_from_edges(n, u, v)
    return ncomp == 1, iso > 0, ncomp


def phase_sweep(n: int, points, trials: int, seed: int,
                family: str = "rag1", t: int = 1, c: float = 0.0,
                jobs: int = 1) -> list[PhasePoint]:
    """Empirical connectivity/isolation frequencies over an (a, b) grid.

    Trial seeds derive from (seed, grid_index, trial_index) substreams, so
    points are independent and reproducible in isolation.  Output order
    follows the input grid regardless of execution schedule.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [(family, n, float(a), float(b), c, t, seed, gi, ti)
             for gi, (a, b) in enumerate(points) for ti in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_phase_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_phase_trial(task) for task in tasks]
    out = []
    for gi, (a, b) in enumerate(points):
        rs = results[gi * trials:(gi + 1) * trials]
        out.append(PhasePoint(
            a=float(a), b=float(b), trials=trials,
            connected_frac=sum(r[0] for r in rs) / trials,
            isolated_frac=sum(r[1] for r in rs) / trials,
            mean_components=sum(r[2] for r in rs) / trials,
        ))
    return out
