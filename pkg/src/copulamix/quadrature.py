"""Composite Gauss-Legendre quadrature on [0, 1].

Rules are built from 32-point panels laid over a graded partition that
clusters panels toward both interval endpoints, where copula conditionals
composed with normal quantiles lose smoothness.  Fold integrands with
indicator factors additionally split the interval at the indicator
breakpoints so every panel sees a smooth piece.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

GAUSS_ORDER = 32

# Relative offsets of panel boundaries within the left half of a segment;
# mirrored onto the right half.
_LADDER = (1e-10, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.15, 0.3, 0.5)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def _graded_offsets() -> np.ndarray:
    left = np.array((0.0,) + _LADDER)
    right = 1.0 - left[-2::-1]
    return np.concatenate([left, right])


_OFFSETS = _graded_offsets()


def _panel_rule(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (b - a)
    return a + half * (_GL_NODES + 1.0), half * _GL_WEIGHTS


@lru_cache(maxsize=4096)
def unit_rule(breakpoints: tuple[float, ...] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating over (0, 1), split at ``breakpoints``.

    Each segment between consecutive split points carries a graded stack of
    32-point Gauss-Legendre panels.  Breakpoints outside (0, 1) are ignored.
    """
    cuts = sorted({float(t) for t in breakpoints if 0.0 < t < 1.0})
    bounds = [0.0, *cuts, 1.0]
    nodes, weights = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b - a <= 0.0:
            continue
        edges = a + (b - a) * _OFFSETS
        for lo, hi in zip(edges[:-1], edges[1:]):
            t, w = _panel_rule(lo, hi)
            nodes.append(t)
            weights.append(w)
    # panels narrower than a few ulp can round a node onto an endpoint,
    # where fold integrands may be singular; keep the interval open
    all_nodes = np.clip(np.concatenate(nodes), 5e-324, 1.0 - 2.0**-53)
    return all_nodes, np.concatenate(weights)
