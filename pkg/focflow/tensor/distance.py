"""
Graph distances on the torus chart.

Nodes are joined to their 8 neighbours; an edge v = (di*h1, dj*h2) has length
sqrt(vᵀ ḡ v) with ḡ the mean of the metric at its two endpoints. Dijkstra on
this graph gives a first-order approximation of Riemannian distance.
"""

import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..utils.validators import validate_positive
from .grid import CutoffFunction

logger = logging.getLogger(__name__)

_OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))


def _edges(g):
    chart = g.chart
    n1, n2 = chart.shape
    i, j = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    i, j = i.ravel(), j.ravel()
    sources, targets, lengths, wraps1, wraps2 = [], [], [], [], []
    for di, dj in _OFFSETS:
        ti, tj = i + di, j + dj
        wraps1.append((ti < 0) | (ti >= n1))
        wraps2.append((tj < 0) | (tj >= n2))
        ti, tj = ti % n1, tj % n2
        v1, v2 = di * chart.h1, dj * chart.h2
        g11 = 0.5 * (g.g11[i, j] + g.g11[ti, tj])
        g12 = 0.5 * (g.g12[i, j] + g.g12[ti, tj])
        g22 = 0.5 * (g.g22[i, j] + g.g22[ti, tj])
        lengths.append(np.sqrt(g11 * v1 * v1 + 2 * g12 * v1 * v2 + g22 * v2 * v2))
        sources.append(i * n2 + j)
        targets.append(ti * n2 + tj)
    return (
        np.concatenate(sources),
        np.concatenate(targets),
        np.concatenate(lengths),
        np.concatenate(wraps1),
        np.concatenate(wraps2),
    )


def _graph(g):
    src, dst, length, _, _ = _edges(g)
    size = g.chart.N1 * g.chart.N2
    return coo_matrix((length, (src, dst)), shape=(size, size)).tocsr()


def distance_field(g, p):
    """Graph distance from node ``p`` to every node, shaped like the grid."""
    chart = g.chart
    dist = dijkstra(_graph(g), directed=False, indices=chart.flat_index(*p))
    return dist.reshape(chart.shape)


def grid_distance(g, p, q):
    i, j = g.chart.node(*q)
    return float(distance_field(g, p)[i, j])


def _double_cover(g, axis):
    """Graph on two sheets where crossing the seam of ``axis`` swaps sheets."""
    src, dst, length, wraps1, wraps2 = _edges(g)
    size = g.chart.N1 * g.chart.N2
    flips = wraps1 if axis == 1 else wraps2
    rows = np.concatenate([src, src + size])
    cols = np.concatenate([dst + size * flips, dst + size * (~flips)])
    data = np.concatenate([length, length])
    return coo_matrix((data, (rows, cols)), shape=(2 * size, 2 * size)).tocsr()


def systole_proxy(g):
    """Length of the shortest non-contractible loop on the grid graph.

    Any loop with odd winding around an axis visits the seam row of that
    axis, so every seam node is a source and no other node is needed.
    """
    chart = g.chart
    size = chart.N1 * chart.N2
    best = np.inf
    for axis in (1, 2):
        if axis == 1:
            seeds = [chart.flat_index(0, j) for j in range(chart.N2)]
        else:
            seeds = [chart.flat_index(i, 0) for i in range(chart.N1)]
        dist = dijkstra(_double_cover(g, axis), directed=False, indices=seeds)
        loops = dist[np.arange(len(seeds)), np.asarray(seeds) + size]
        best = min(best, float(np.min(loops)))
    logger.debug("systole proxy %.6g on %dx%d grid", best, chart.N1, chart.N2)
    return best


def ball_mask(g, center, radius):
    return distance_field(g, center) <= radius


def quintic_bump(d, r):
    """1 on [0, r], 0 beyond 2r, C² quintic transition in between."""
    s = np.clip((np.asarray(d, dtype=float) - r) / r, 0.0, 1.0)
    return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


def cutoff_function(g, center, r):
    validate_positive(r, "cutoff radius")
    gamma = np.clip(quintic_bump(distance_field(g, center), r), 0.0, 1.0)
    return CutoffFunction(gamma, g.chart, g.chart.node(*center), float(r))
