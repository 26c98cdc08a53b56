"""Shortest-augmenting-path maximum flow on small dense networks."""

from __future__ import annotations

from collections import deque

import numpy as np


def max_flow(capacity: np.ndarray, source: int, sink: int, floor: float = 1e-12):
    """Edmonds-Karp on a dense real capacity matrix.

    Paths whose bottleneck is at most ``floor`` are not augmented. Returns
    ``(value, flow, reachable)``: the flow matrix is antisymmetric and
    ``reachable`` marks the nodes on the source side of the final residual
    graph, i.e. a minimum cut.
    """
    cap = np.asarray(capacity, dtype=float)
    n = cap.shape[0]
    flow = np.zeros_like(cap)
    value = 0.0
    while True:
        residual = cap - flow
        parent = [-1] * n
        parent[source] = source
        queue = deque([source])
        while queue and parent[sink] < 0:
            u = queue.popleft()
            for v in np.nonzero(residual[u] > floor)[0]:
                if parent[v] < 0:
                    parent[v] = u
                    queue.append(v)
        if parent[sink] < 0:
            reachable = np.array([p >= 0 for p in parent])
            return value, flow, reachable
        path = []
        v = sink
        while v != source:
            path.append((parent[v], v))
            v = parent[v]
        bottleneck = min(residual[u, v] for u, v in path)
        for u, v in path:
            flow[u, v] += bottleneck
            flow[v, u] -= bottleneck
        value += bottleneck
