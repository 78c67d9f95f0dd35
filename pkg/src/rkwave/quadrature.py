"""Gauss-Legendre quadrature on panel subdivisions of an interval.

The kernels are piecewise polynomial with a kink along their diagonal, so
all verification integrals split the integration interval at the kink
locations and apply a fixed-order rule on each panel.  64 nodes per panel
integrate the degree-<=10 kernel products essentially to machine precision.
"""

from functools import lru_cache

import numpy as np

DEFAULT_NODES = 64


@lru_cache(maxsize=None)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(lo: float = 0.0, hi: float = 1.0, split_at=(), nodes_per_panel: int = DEFAULT_NODES):
    """Composite Gauss-Legendre rule on [lo, hi] split at interior breakpoints.

    Returns (nodes, weights) as flat arrays.  Breakpoints outside (lo, hi)
    are ignored; duplicates are merged.
    """
    cuts = sorted({float(s) for s in split_at if lo < float(s) < hi})
    edges = [lo] + cuts + [hi]
    base_x, base_w = _leggauss(nodes_per_panel)
    xs = []
    ws = []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        xs.append(0.5 * (a + b) + half * base_x)
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)
