"""Counter-based, path-keyed Gaussian increment generation.

Each path owns a Philox stream keyed by (master seed, path index), so the
increments for a path are a pure function of that pair: chunking, thread
count, and call order cannot change a single bit. Normals are produced by
pushing open-interval uniforms through the package's fixed inverse normal
CDF (see quantiles), keeping the output stable across platforms.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox

from .quantiles import inverse_normal_cdf

__all__ = ["path_uniforms", "generate_increments", "increments_block"]

_U53 = 2.0 ** -53


def path_uniforms(seed: int, path_index: int, count: int) -> np.ndarray:
    """Uniforms in the open interval (0, 1) for one path's stream."""
    key = np.array([seed, path_index], dtype=np.uint64)
    gen = Generator(Philox(key=key))
    ints = gen.integers(0, 1 << 53, size=count, dtype=np.int64)
    return (ints + 0.5) * _U53


def increments_block(seed: int, first_path: int, n_block: int,
                     n_steps: int, dim: int, dt: float) -> np.ndarray:
    """Normal(0, dt) increments for paths first_path..first_path+n_block-1.

    Shape (n_block, n_steps, dim). Per-path bits are independent of the
    block decomposition.
    """
    count = n_steps * dim
    u = np.empty((n_block, count))
    for i in range(n_block):
        u[i] = path_uniforms(seed, first_path + i, count)
    z = inverse_normal_cdf(u)
    return (z * np.sqrt(dt)).reshape(n_block, n_steps, dim)


def generate_increments(cfg, path_index: int, dim: int) -> np.ndarray:
    """Increment matrix (n_steps, dim) for a single path of cfg."""
    if path_index >= cfg.n_paths:
        raise ValueError(f"path_index {path_index} >= n_paths {cfg.n_paths}")
    return increments_block(cfg.seed, path_index, 1, cfg.n_steps, dim, cfg.dt)[0]
