"""Tour machinery on complete weighted graphs.

``tsp_tour`` follows the Christofides recipe with a greedy matching on the
odd-degree vertices (so the 3/2 guarantee degrades towards 2), then polishes
the shortcut tour with first-improvement 2-opt.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from obsplan.geometry import DomainError

MAX_2OPT_PASSES = 50
_IMPROVE_TOL = 1e-10


def distance_matrix(xy) -> np.ndarray:
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _as_weights(g) -> np.ndarray:
    w = np.asarray(g, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DomainError("weight matrix must be square")
    if w.shape[0] == 0:
        raise DomainError("graph has no vertices")
    return w


def mst(g) -> tuple[list[tuple[int, int]], float]:
    """Kruskal MST; ties broken by the smallest ``(u, v)`` pair."""
    w = _as_weights(g)
    k = w.shape[0]
    iu, ju = np.triu_indices(k, 1)
    order = np.lexsort((ju, iu, w[iu, ju]))
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    total = 0.0
    for e in order:
        u, v = int(iu[e]), int(ju[e])
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            edges.append((u, v))
            total += float(w[u, v])
            if len(edges) == k - 1:
                break
    return edges, total


def greedy_matching(w: np.ndarray, vertices: list[int]) -> list[tuple[int, int]]:
    """Shortest-edge-first perfect matching on an even vertex set."""
    vs = sorted(vertices)
    pairs = sorted(
        (float(w[u, v]), u, v) for a, u in enumerate(vs) for v in vs[a + 1 :]
    )
    used = set()
    out = []
    for _, u, v in pairs:
        if u not in used and v not in used:
            used.update((u, v))
            out.append((u, v))
    return out


def euler_circuit(edges: list[tuple[int, int]], start: int) -> list[int]:
    """Hierholzer on a connected multigraph with all-even degrees."""
    adj = defaultdict(list)
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    for u in adj:
        adj[u].sort(reverse=True)
    used = [False] * len(edges)
    stack = [start]
    circuit = []
    while stack:
        u = stack[-1]
        while adj[u] and used[adj[u][-1][1]]:
            adj[u].pop()
        if adj[u]:
            v, idx = adj[u].pop()
            used[idx] = True
            stack.append(v)
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return circuit


def tour_cost(w: np.ndarray, tour: list[int]) -> float:
    """Cost of the closed cycle ``tour`` (first vertex not repeated)."""
    if len(tour) < 2:
        return 0.0
    t = np.asarray(tour)
    return float(w[t, np.roll(t, -1)].sum())


def two_opt(w: np.ndarray, tour: list[int], max_passes: int = MAX_2OPT_PASSES) -> list[int]:
    """First-improvement 2-opt keeping ``tour[0]`` fixed.

    Segment reversal is only cost-neutral on symmetric weights, which is all
    this module handles.
    """
    tour = list(tour)
    m = len(tour)
    if m < 4:
        return tour
    for _ in range(max_passes):
        improved = False
        for i in range(m - 1):
            a, b = tour[i], tour[i + 1]
            for j in range(i + 2, m if i > 0 else m - 1):
                c, d = tour[j], tour[(j + 1) % m]
                delta = w[a, c] + w[b, d] - w[a, b] - w[c, d]
                if delta < -_IMPROVE_TOL:
                    tour[i + 1 : j + 1] = reversed(tour[i + 1 : j + 1])
                    improved = True
                    a, b = tour[i], tour[i + 1]
        if not improved:
            break
    return tour


def tsp_tour(g, start: int = 0) -> list[int]:
    """Hamiltonian cycle as a vertex list beginning at ``start`` (closure implicit)."""
    w = _as_weights(g)
    k = w.shape[0]
    if k < 2:
        raise DomainError("tsp_tour needs at least two vertices")
    if k <= 3:
        return [start] + [v for v in range(k) if v != start]
    tree, _ = mst(w)
    degree = np.zeros(k, dtype=int)
    for u, v in tree:
        degree[u] += 1
        degree[v] += 1
    odd = [int(v) for v in np.flatnonzero(degree % 2)]
    multigraph = tree + greedy_matching(w, odd)
    walk = euler_circuit(multigraph, start)
    seen = set()
    tour = []
    for v in walk:
        if v not in seen:
            seen.add(v)
            tour.append(v)
    return two_opt(w, tour)


def order_from_tour(tour: list[int], start: int = 0) -> list[int]:
    """Rotate a cycle so ``start`` leads, then drop it."""
    i = tour.index(start)
    rotated = tour[i:] + tour[:i]
    return rotated[1:]
