"""Deterministic multi-source Dijkstra over CSR-style adjacency arrays."""

from __future__ import annotations

import heapq

import numpy as np


def dijkstra(indptr, nbr_node, nbr_edge, edge_weight, sources,
             node_ok=None, targets=None):
    """Shortest-path distances from a set of source nodes.

    All edge weights must be nonnegative. Ties are settled by node id:
    among equally distant frontier nodes the smallest id pops first, and
    a predecessor is replaced on an exact distance tie only by a smaller
    predecessor id, so runs are reproducible bit for bit.

    Parameters
    ----------
    indptr, nbr_node, nbr_edge : adjacency arrays (node -> neighbours).
    edge_weight : per-edge nonnegative weights indexed like ``nbr_edge``.
    sources : iterable of start node ids (distance 0).
    node_ok : optional boolean mask; nodes outside it are never visited.
    targets : optional iterable; the search stops once every reachable
        target has settled.

    Returns
    -------
    dist, pred_node, pred_edge : ``dist`` is +inf off the reached set,
        ``pred_*`` are -1 at sources and unreached nodes.
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pred_node = np.full(n, -1, dtype=np.int64)
    pred_edge = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)

    heap = []
    for s in sorted(set(int(v) for v in sources)):
        if node_ok is not None and not node_ok[s]:
            continue
        dist[s] = 0.0
        heapq.heappush(heap, (0.0, s))

    remaining = None
    if targets is not None:
        remaining = set(int(v) for v in targets)
        remaining = {v for v in remaining
                     if node_ok is None or node_ok[v]}

    while heap:
        d, u = heapq.heappop(heap)
        if done[u] or d > dist[u]:
            continue
        done[u] = True
        if remaining is not None:
            remaining.discard(u)
            if not remaining:
                break
        for k in range(indptr[u], indptr[u + 1]):
            v = nbr_node[k]
            if done[v] or (node_ok is not None and not node_ok[v]):
                continue
            nd = d + edge_weight[nbr_edge[k]]
            if nd < dist[v]:
                dist[v] = nd
                pred_node[v] = u
                pred_edge[v] = nbr_edge[k]
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and -1 < u < pred_node[v]:
                pred_node[v] = u
                pred_edge[v] = nbr_edge[k]
    return dist, pred_node, pred_edge


def walk_back(pred_node, pred_edge, node):
    """Trace a shortest-path tree from ``node`` back to its root.

    Returns (nodes, edges) in root-to-node order.
    """
    nodes = [int(node)]
    edges = []
    v = int(node)
    while pred_node[v] >= 0:
        edges.append(int(pred_edge[v]))
        v = int(pred_node[v])
        nodes.append(v)
    nodes.reverse()
    edges.reverse()
    return nodes, edges
