import numpy as np
import pytest

from indexbeat.rng import generate_increments, increments_block, path_uniforms
from indexbeat.simulate import SimulationConfig


def cfg(n_steps=100, n_paths=10, seed=7, horizon=1.0):
    return SimulationConfig(horizon_T=horizon, n_steps=n_steps,
                            n_paths=n_paths, seed=seed)


def test_same_key_same_bits():
    c = cfg()
    a = generate_increments(c, 3, 2)
    b = generate_increments(c, 3, 2)
    assert np.array_equal(a, b)


def test_distinct_paths_and_seeds_differ():
    c = cfg()
    assert not np.array_equal(generate_increments(c, 0, 2),
                              generate_increments(c, 1, 2))
    other = cfg(seed=8)
    assert not np.array_equal(generate_increments(c, 0, 2),
                              generate_increments(other, 0, 2))


def test_block_decomposition_is_invisible():
    c = cfg(n_steps=32, n_paths=12)
    whole = increments_block(c.seed, 0, 12, c.n_steps, 3, c.dt)
    pieces = np.concatenate([
        increments_block(c.seed, 0, 5, c.n_steps, 3, c.dt),
        increments_block(c.seed, 5, 7, c.n_steps, 3, c.dt)])
    assert np.array_equal(whole, pieces)
    single = generate_increments(c, 11, 3)
    assert np.array_equal(whole[11], single)


def test_path_index_out_of_range():
    with pytest.raises(ValueError):
        generate_increments(cfg(n_paths=4), 4, 2)


def test_uniforms_are_open_interval():
    u = path_uniforms(1, 0, 100_000)
    assert u.min() > 0.0 and u.max() < 1.0


def test_moment_bounds():
    # CLT bound on the mean and chi-square concentration on the variance
    # for n_steps * dim = 2e5 samples of Normal(0, dt).
    c = cfg(n_steps=100_000, n_paths=1, seed=123)
    z = generate_increments(c, 0, 2)
    n = z.size
    assert abs(z.mean()) <= 4.0 * np.sqrt(c.dt) / np.sqrt(n)
    assert abs(z.var() - c.dt) <= 0.05 * c.dt
