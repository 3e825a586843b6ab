"""Immutable simple undirected graph with sorted adjacency.

Stored as a CSR-style (indptr, indices) pair plus the unique edge list
with u < v.  Neighbor lists are strictly sorted, which makes neighbor
intersection a linear merge and keeps file output canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Graph:
    n: int
    indptr: np.ndarray     # (n+1,) int64
    indices: np.ndarray    # (2m,) int32, sorted within each vertex slice
    edges: np.ndarray      # (m, 2) int32 with edges[:,0] < edges[:,1], lexicographically sorted

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def adjacency_bool(self) -> np.ndarray:
        """Dense (n, n) boolean adjacency. Intended for n up to ~2e4."""
        a = np.zeros((self.n, self.n), dtype=bool)
        if self.m:
            a[self.edges[:, 0], self.edges[:, 1]] = True
            a[self.edges[:, 1], self.edges[:, 0]] = True
        return a

    def packed_rows(self) -> np.ndarray:
        """Bit-packed adjacency rows as uint64 words, for bulk intersection counts."""
        bits = np.packbits(self.adjacency_bool(), axis=1)
        pad = (-bits.shape[1]) % 8
        if pad:
            bits = np.concatenate([bits, np.zeros((self.n, pad), np.uint8)], axis=1)
        return np.ascontiguousarray(bits).view(np.uint64)

    def validate(self) -> None:
        """Check simplicity, symmetry and sortedness; raises on violation."""
        if self.indptr.shape != (self.n + 1,) or self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise ValueError("malformed indptr")
        for u in range(self.n):
            nbrs = self.neighbors(u)
            if len(nbrs) and (np.any(np.diff(nbrs) <= 0) or np.any(nbrs == u)):
                raise ValueError(f"adjacency of vertex {u} not strictly sorted / has self-loop")
        if self.m:
            u, v = self.edges[:, 0], self.edges[:, 1]
            if np.any(u >= v):
                raise ValueError("edge list not in u < v form")
            enc = u.astype(np.int64) * self.n + v
            if len(np.unique(enc)) != self.m:
                raise ValueError("duplicate edges")
            deg_from_edges = np.bincount(u, minlength=self.n) + np.bincount(v, minlength=self.n)
            if not np.array_equal(deg_from_edges, self.degrees()):
                raise ValueError("edge list inconsistent with adjacency")


def from_edges(n: int, u, v, validate: bool = False) -> Graph:
    """Build a Graph from parallel endpoint arrays (any orientation, no duplicates)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if len(u) != len(v):
        raise ValueError("endpoint arrays differ in length")
    if len(u) and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
        raise ValueError("vertex id out of range")
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    order = np.lexsort((hi, lo))
    edges = np.stack([lo[order], hi[order]], axis=1).astype(np.int32)

    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order2 = np.lexsort((dst, src))
    indices = dst[order2].astype(np.int32)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    g = Graph(n=int(n), indptr=indptr, indices=indices, edges=edges)
    if validate:
        g.validate()
    return g


def empty_graph(n: int) -> Graph:
    return from_edges(n, np.empty(0, np.int64), np.empty(0, np.int64))


# ---------------------------------------------------------------------------
# text formats (ASCII, LF endings)
# ---------------------------------------------------------------------------

def write_graph(path: str, graph: Graph, t: int = 1) -> None:
    """Write `n m t` header then one `u v` line per edge, 0-indexed with u < v."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{graph.n} {graph.m} {t}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def read_graph(path: str) -> tuple[Graph, int]:
    """Read the format written by write_graph; returns (graph, t)."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: malformed header")
        n, m, t = (int(x) for x in header)
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    if data.shape != (m, 2):
        raise ValueError(f"{path}: expected {m} edges, found {data.shape[0]}")
    return from_edges(n, data[:, 0], data[:, 1]), t


def write_embeddings(path: str, embeddings: np.ndarray) -> None:
    """One line per vertex, comma-separated coordinates."""
    pts = np.atleast_2d(np.asarray(embeddings, dtype=float).T).T
    with open(path, "w", newline="\n") as fh:
        for row in pts:
            fh.write(",".join(f"{x:.17g}" for x in np.atleast_1d(row)) + "\n")


def read_embeddings(path: str) -> np.ndarray:
    out = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return out[:, 0] if out.shape[1] == 1 else out


def write_labels(path: str, labels: np.ndarray) -> None:
    """One label per line; -1 denotes unassigned."""
    with open(path, "w", newline="\n") as fh:
        for x in labels:
            fh.write(f"{int(x)}\n")


def read_labels(path: str) -> np.ndarray:
    return np.loadtxt(path, dtype=np.int64, ndmin=1)
