"""Deterministic random streams.

All randomness flows through counter-based Philox generators keyed by
(seed, purpose), so distinct purposes never share bits and results do not
depend on draw interleaving or worker scheduling:

* stream 0 drives the chain (initial state and per-step inversion uniforms),
* stream 1 feeds mixture selectors (convex component and singular branch),
* stream 2 produces the auxiliary i.i.d. normal sample.

Replication r of a master seed runs on ``derive_seed(master, r)``.
"""

from __future__ import annotations

import numpy as np

CHAIN_STREAM = 0
SELECTOR_STREAM = 1
NORMAL_STREAM = 2

_MASK64 = (1 << 64) - 1
_LATTICE = 0.5 ** 52


def stream(seed: int, purpose: int) -> np.random.Generator:
    """Philox generator keyed by (seed, purpose)."""
    key = np.array([int(seed) & _MASK64, int(purpose) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(master: int, index: int) -> int:
    """Stable 64-bit sub-seed for replication ``index`` of ``master``."""
    ss = np.random.SeedSequence(entropy=[int(master) & _MASK64, int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def open_uniform(gen: np.random.Generator, size=None):
    """Uniform draws on the open interval (0, 1).

    Returns (k + 1/2) / 2**52 for a 52-bit integer k. Every such midpoint
    is exactly representable, so 0.0, 0.5 and 1.0 are never produced and
    quantile transforms stay finite. (A 53-bit lattice would round its top
    midpoint up to 1.0.)
    """
    k = gen.integers(0, 1 << 52, size=size, dtype=np.uint64)
    out = (k.astype(np.float64) + 0.5) * _LATTICE
    return float(out) if size is None else out
