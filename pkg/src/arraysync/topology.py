"""Random connected communication graphs and their consensus mixing matrices.

A network of nodes exchanging frequency/phase values is an undirected
connected graph.  Graphs are generated with a prescribed *connectivity*
``c = |E| / (N(N-1)/2)``: a uniform random spanning tree guarantees a single
component, then uniformly sampled non-tree pairs fill the edge budget.  The
consensus weights form a symmetric doubly stochastic Metropolis-Hastings
matrix whose sparsity pattern matches the edge set, so each node only needs
its local degree and its neighbors' degrees.

The second-largest eigenvalue modulus ``lambda2`` of the mixing matrix
governs both the convergence rate of repeated averaging and the
amplification of per-iteration errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Topology",
    "MixingMatrix",
    "build_random_graph",
    "mixing_matrix",
    "spectral_gap",
    "edge_list_text",
    "parse_edge_list",
]


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph on nodes ``0 .. n_nodes-1``.

    ``connectivity`` and ``avg_degree`` are recomputed from the realized edge
    set so downstream analysis always sees the true (post-rounding) values.
    """

    n_nodes: int
    edges: frozenset
    connectivity: float = field(init=False)
    avg_degree: float = field(init=False)

    def __post_init__(self):
        n = self.n_nodes
        if n < 2:
            raise ValueError(f"need at least 2 nodes, got {n}")
        canon = set()
        for pair in self.edges:
            i, j = pair
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge {pair} out of range for {n} nodes")
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(canon))
        if not self._is_connected():
            raise ValueError("graph is not connected")
        c = len(self.edges) / (n * (n - 1) / 2)
        object.__setattr__(self, "connectivity", c)
        object.__setattr__(self, "avg_degree", c * (n - 1))

    def _is_connected(self) -> bool:
        adj = [[] for _ in range(self.n_nodes)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n_nodes

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n_nodes, dtype=int)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric doubly stochastic weight matrix over a node graph."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @cached_property
    def lambda2(self) -> float:
        return spectral_gap(self)

    @property
    def n_nodes(self) -> int:
        return self.w.shape[0]


def _uniform_random_tree(n: int, rng: np.random.Generator) -> set:
    """Uniform random labeled tree via a random Pruefer sequence."""
    if n == 2:
        return {(0, 1)}
    prufer = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=int)
    for v in prufer:
        degree[v] += 1
    edges = set()
    # classic decode: repeatedly attach the smallest leaf to the next entry
    import heapq

    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    for v in prufer:
        leaf = heapq.heappop(leaves)
        edges.add((min(leaf, int(v)), max(leaf, int(v))))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, int(v))
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.add((min(u, v), max(u, v)))
    return edges


def build_random_graph(n_nodes: int, connectivity: float, rng: np.random.Generator) -> Topology:
    """Generate a connected random graph with a prescribed connectivity.

    The edge count is ``round(c * N(N-1)/2)``.  A uniform random spanning
    tree is drawn first, then the remaining budget is filled with non-tree
    pairs sampled uniformly without replacement.  Deterministic given the
    generator state.
    """
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    if connectivity > 1.0:
        raise ValueError(f"connectivity {connectivity} exceeds 1")
    n_pairs = n_nodes * (n_nodes - 1) // 2
    m_target = int(round(connectivity * n_pairs))
    if m_target < n_nodes - 1:
        raise ValueError(
            f"connectivity {connectivity} yields {m_target} edges for {n_nodes} nodes; "
            f"a spanning tree needs {n_nodes - 1} (c >= {(n_nodes - 1) / n_pairs:.4g})"
        )
    edges = _uniform_random_tree(n_nodes, rng)
    extra = m_target - len(edges)
    if extra > 0:
        iu, ju = np.triu_indices(n_nodes, k=1)
        taken = np.zeros(n_pairs, dtype=bool)
        index_of = {}
        for k in range(n_pairs):
            index_of[(int(iu[k]), int(ju[k]))] = k
        for e in edges:
            taken[index_of[e]] = True
        pool = np.flatnonzero(~taken)
        pick = rng.choice(pool.size, size=extra, replace=False)
        for k in pool[pick]:
            edges.add((int(iu[k]), int(ju[k])))
    return Topology(n_nodes=n_nodes, edges=frozenset(edges))


def mixing_matrix(topo: Topology) -> MixingMatrix:
    """Metropolis-Hastings weights for a graph.

    Off-diagonal entries are ``1 / (max(deg_i, deg_j) + 1)`` on edges and 0
    elsewhere; each diagonal entry absorbs the remainder so rows (and by
    symmetry columns) sum to 1.  Nonnegativity follows since each row holds
    at most ``deg_i`` off-diagonal terms, each at most ``1/(deg_i + 1)``.
    """
    n = topo.n_nodes
    deg = topo.degrees()
    w = np.zeros((n, n))
    for i, j in topo.edges:
        w[i, j] = w[j, i] = 1.0 / (max(deg[i], deg[j]) + 1)
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return MixingMatrix(w=w)


def spectral_gap(m: MixingMatrix) -> float:
    """Second-largest eigenvalue modulus of the mixing matrix.

    Uses a full symmetric eigendecomposition up to 512 nodes.  Beyond that
    scale it falls back to power iteration on the matrix deflated by the
    consensus eigenvector (tolerance 1e-10, at most 1e5 iterations).
    """
    w = m.w
    n = w.shape[0]
    if n <= 512:
        vals = np.linalg.eigvalsh(w)
        mods = np.sort(np.abs(vals))
        return float(mods[-2])
    return _deflated_power_lambda2(w)


def _deflated_power_lambda2(w: np.ndarray, tol: float = 1e-10, max_iters: int = 100_000) -> float:
    n = w.shape[0]
    # deterministic start vector, orthogonal to the all-ones consensus mode
    v = np.cos(np.arange(n, dtype=float) + 0.5)
    v -= v.mean()
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        u = w @ v
        u -= u.mean()  # re-deflate to fight roundoff leakage into the 1-mode
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        u /= norm
        lam_new = abs(u @ (w @ u))
        if abs(lam_new - lam) < tol:
            return float(lam_new)
        lam, v = lam_new, u
    return float(lam)


def edge_list_text(topo: Topology) -> str:
    """Edge list dump: one zero-indexed ``i j`` pair per line, sorted."""
    lines = [f"{i} {j}" for i, j in sorted(topo.edges)]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str, n_nodes: int | None = None) -> Topology:
    """Inverse of :func:`edge_list_text`; node count defaults to max index + 1."""
    edges = set()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        i, j = (int(tok) for tok in line.split())
        edges.add((min(i, j), max(i, j)))
    if not edges:
        raise ValueError("empty edge list")
    if n_nodes is None:
        n_nodes = max(max(i, j) for i, j in edges) + 1
    return Topology(n_nodes=n_nodes, edges=frozenset(edges))
