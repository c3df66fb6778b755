"""Deterministic random-stream derivation.

All stochastic components draw from counter-based Philox generators keyed
by a master seed plus an explicit derivation path (for example
``(pass_index, sample_index)``).  Two consequences:

* the same seed always reproduces the same run, bit for bit;
* work can be split across threads or processes in any order without
  changing results, because no stream depends on global RNG state.
"""

import numpy as np

__all__ = ["spawn_rng", "derive_seed"]


def spawn_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Return a Philox generator for ``master_seed`` at a derivation path.

    Distinct paths yield statistically independent streams; the empty path
    is the root stream for ``master_seed``.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master_seed: int, *path: int) -> int:
    """Collapse ``(master_seed, path)`` into a single 128-bit integer seed.

    Useful where an API accepts one seed value but the caller wants it tied
    to a derivation path (for example per-pass seeds handed to
    ``forward_dropout``).
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    hi, lo = ss.generate_state(2, dtype=np.uint64)
    return (int(hi) << 64) | int(lo)
