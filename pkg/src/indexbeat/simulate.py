"""Exact-in-distribution path simulation for the multi-asset model.

Because the coefficients are constant on each schedule segment, the log-price
recursion

    log S_k(t + dt) = log S_k(t) + (mu_k - 0.5*||sigma_k||^2) dt + sigma_k . dW

is the strong solution sampled on the grid: there is no discretization drift,
only the grid resolution of the Brownian path. All Brownian increments come
from the path-keyed counter RNG, so results are reproducible bit-for-bit
regardless of chunking or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import ScheduleAlignmentError, ValidationError
from .market import MarketSpec, risk_profile

__all__ = [
    "SimulationConfig", "PathBundle", "TerminalStats", "Schedule",
    "simulate_prices", "schedule_simulate", "simulate_terminals",
    "brownian_at",
]

Schedule = list[tuple[float, MarketSpec]]

# Target number of float64 elements per generation block (~32 MiB).
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class SimulationConfig:
    horizon_T: float
    n_steps: int
    n_paths: int
    seed: int

    def __post_init__(self):
        if not (self.horizon_T > 0 and np.isfinite(self.horizon_T)):
            raise ValidationError("horizon_T must be positive and finite")
        if self.n_steps < 1:
            raise ValidationError("n_steps must be >= 1")
        if self.n_paths < 1:
            raise ValidationError("n_paths must be >= 1")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValidationError("seed must fit in 64 unsigned bits")

    @property
    def dt(self) -> float:
        return self.horizon_T / self.n_steps

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass
class PathBundle:
    """One simulation batch. log_K is filled by the strategy engine."""

    times: np.ndarray                  # (n_steps+1,)
    dW: np.ndarray                     # (n_paths, n_steps, D_b)
    log_S: np.ndarray                  # (n_paths, n_steps+1, K+1)
    log_R: np.ndarray                  # (n_steps+1,)
    segments: tuple[tuple[float, MarketSpec], ...]
    log_K: np.ndarray | None = None    # (n_paths, n_steps+1)

    @property
    def n_paths(self) -> int:
        return self.dW.shape[0]

    @property
    def n_steps(self) -> int:
        return self.dW.shape[1]

    @property
    def brownian_dim(self) -> int:
        return self.dW.shape[2]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def segment_slices(self) -> list[tuple[int, int, MarketSpec]]:
        out, i0 = [], 0
        for duration, spec in self.segments:
            n_seg = int(round(duration / self.dt))
            out.append((i0, i0 + n_seg, spec))
            i0 += n_seg
        return out


@dataclass(frozen=True)
class TerminalStats:
    """Terminal values per path, memory-light companion to PathBundle."""

    horizon_T: float
    log_S: np.ndarray        # (n_paths, K+1)
    log_K: np.ndarray        # (n_paths,)
    identity_residual: np.ndarray  # (n_paths,)


def _as_schedule(spec_or_schedule, horizon_T: float) -> Schedule:
    if isinstance(spec_or_schedule, MarketSpec):
        return [(horizon_T, spec_or_schedule)]
    return list(spec_or_schedule)


def _segment_slices(schedule: Schedule, cfg: SimulationConfig) -> list[tuple[int, int, MarketSpec]]:
    if not schedule:
        raise ValidationError("schedule is empty")
    total = sum(d for d, _ in schedule)
    if abs(total - cfg.horizon_T) > 1e-9 * max(1.0, cfg.horizon_T):
        raise ScheduleAlignmentError(
            f"schedule durations sum to {total}, horizon is {cfg.horizon_T}")
    dims = {s.brownian_dim for _, s in schedule}
    assets = {s.n_assets for _, s in schedule}
    if len(dims) != 1 or len(assets) != 1:
        raise ValidationError("all schedule segments must share the security "
                              "count and Brownian dimension",
                              code="dimension-mismatch")
    slices, i0 = [], 0
    for duration, spec in schedule:
        steps = duration / cfg.dt
        n_seg = int(round(steps))
        if n_seg < 1 or abs(steps - n_seg) > 1e-9 * max(1.0, steps):
            raise ScheduleAlignmentError(
                f"segment duration {duration} is not a whole number of grid "
                f"steps (dt={cfg.dt})")
        slices.append((i0, i0 + n_seg, spec))
        i0 += n_seg
    return slices


def _drift_row(spec: MarketSpec) -> np.ndarray:
    return spec.mu - 0.5 * np.sum(spec.sigma ** 2, axis=1)


def _mix(dW: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Accumulate dW . v_k for each row vector, in a fixed dimension order.

    Explicit loop over Brownian dimensions keeps per-path results bitwise
    independent of batch composition (no BLAS blocking effects).
    """
    out = np.zeros(dW.shape[:-1] + (vectors.shape[0],))
    for d in range(dW.shape[-1]):
        out += dW[..., d, None] * vectors[:, d]
    return out


def _block_ranges(n_paths: int, per_path_elements: int) -> list[tuple[int, int]]:
    block = max(1, _BLOCK_ELEMENTS // max(1, per_path_elements))
    return [(i, min(i + block, n_paths)) for i in range(0, n_paths, block)]


def _run_blocks(fn, ranges, workers: int):
    if workers <= 1:
        for rg in ranges:
            fn(rg)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fn, ranges))


def simulate_prices(spec: MarketSpec, cfg: SimulationConfig,
                    dW: np.ndarray | None = None) -> PathBundle:
    """Full-storage simulation of all securities (log_K left unfilled)."""
    return schedule_simulate([(cfg.horizon_T, spec)], cfg, dW=dW)


def schedule_simulate(schedule: Schedule, cfg: SimulationConfig,
                      dW: np.ndarray | None = None) -> PathBundle:
    """Piecewise-constant coefficient simulation on the uniform grid.

    Segment boundaries must land on grid points. Passing dW injects a
    precomputed increment array (tests use this for refinement checks).
    """
    slices = _segment_slices(schedule, cfg)
    dim = schedule[0][1].brownian_dim
    n_assets = schedule[0][1].n_assets
    dt = cfg.dt

    if dW is None:
        dW = np.empty((cfg.n_paths, cfg.n_steps, dim))
        ranges = _block_ranges(cfg.n_paths, cfg.n_steps * dim)

        def fill(rg):
            lo, hi = rg
            dW[lo:hi] = rng.increments_block(cfg.seed, lo, hi - lo,
                                             cfg.n_steps, dim, dt)

        _run_blocks(fill, ranges, workers=1)
    else:
        dW = np.asarray(dW, dtype=float)
        if dW.shape != (cfg.n_paths, cfg.n_steps, dim):
            raise ValidationError(
                f"injected dW has shape {dW.shape}, expected "
                f"{(cfg.n_paths, cfg.n_steps, dim)}", code="dimension-mismatch")

    contrib = np.empty((cfg.n_paths, cfg.n_steps, n_assets))
    rates = np.empty(cfg.n_steps)
    for i0, i1, spec in slices:
        contrib[:, i0:i1, :] = _drift_row(spec) * dt
        contrib[:, i0:i1, :] += _mix(dW[:, i0:i1, :], spec.sigma)
        rates[i0:i1] = spec.r

    log_S = np.zeros((cfg.n_paths, cfg.n_steps + 1, n_assets))
    np.cumsum(contrib, axis=1, out=log_S[:, 1:, :])
    log_R = np.concatenate([[0.0], np.cumsum(rates * dt)])

    return PathBundle(times=cfg.times(), dW=dW, log_S=log_S, log_R=log_R,
                      segments=tuple((float(d), s) for d, s in schedule))


def simulate_terminals(spec_or_schedule, cfg: SimulationConfig,
                       workers: int = 1) -> TerminalStats:
    """Streaming simulation keeping only terminal values.

    For each path: terminal log prices of all securities, the terminal log
    wealth of the index-beating strategy, and the pathwise residual of the
    central log-wealth identity (direct formula minus identity route).
    """
    schedule = _as_schedule(spec_or_schedule, cfg.horizon_T)
    slices = _segment_slices(schedule, cfg)
    dim = schedule[0][1].brownian_dim
    n_assets = schedule[0][1].n_assets
    dt = cfg.dt

    seg_info = []
    log_s_drift = np.zeros(n_assets)
    direct_drift = 0.0
    identity_drift = 0.0
    for i0, i1, spec in slices:
        profile = risk_profile(spec)
        duration = (i1 - i0) * dt
        seg_info.append((i0, i1, spec, profile))
        log_s_drift += _drift_row(spec) * duration
        direct_drift += (spec.r + 0.5 * float(profile.theta @ profile.theta)) * duration
        identity_drift += 0.5 * profile.disc_norm_sq * duration

    log_S = np.empty((cfg.n_paths, n_assets))
    log_K = np.empty(cfg.n_paths)
    residual = np.empty(cfg.n_paths)

    def run(rg):
        lo, hi = rg
        dW = rng.increments_block(cfg.seed, lo, hi - lo, cfg.n_steps, dim, dt)
        s_noise = np.zeros((hi - lo, n_assets))
        direct_noise = np.zeros(hi - lo)
        identity_noise = np.zeros(hi - lo)
        for i0, i1, spec, profile in seg_info:
            dW_seg = dW[:, i0:i1, :].sum(axis=1)
            s_noise += _mix(dW_seg, spec.sigma)
            for d in range(dim):
                direct_noise += dW_seg[:, d] * profile.theta[d]
                identity_noise += dW_seg[:, d] * profile.disc[d]
        log_S[lo:hi] = log_s_drift + s_noise
        log_K[lo:hi] = log_S[lo:hi, 0] + identity_drift + identity_noise
        residual[lo:hi] = (direct_drift + direct_noise) - log_K[lo:hi]

    _run_blocks(run, _block_ranges(cfg.n_paths, cfg.n_steps * dim), workers)
    return TerminalStats(horizon_T=cfg.horizon_T, log_S=log_S, log_K=log_K,
                         identity_residual=residual)


def brownian_at(cfg: SimulationConfig, dim: int, step_indices,
                workers: int = 1) -> np.ndarray:
    """Brownian state W at selected grid steps, streamed over path blocks.

    step_indices are 1-based grid steps (index i means time i*dt), strictly
    increasing. Returns shape (n_paths, len(step_indices), dim).
    """
    idx = [int(i) for i in step_indices]
    if not idx or any(i < 1 or i > cfg.n_steps for i in idx) or sorted(idx) != idx:
        raise ValidationError("step indices must be increasing and in [1, n_steps]")
    starts = np.array([0] + idx[:-1])
    out = np.empty((cfg.n_paths, len(idx), dim))

    def run(rg):
        lo, hi = rg
        dW = rng.increments_block(cfg.seed, lo, hi - lo, cfg.n_steps, dim, cfg.dt)
        seg = np.add.reduceat(dW[:, :idx[-1], :], starts, axis=1)
        out[lo:hi] = np.cumsum(seg, axis=1)

    _run_blocks(run, _block_ranges(cfg.n_paths, cfg.n_steps * dim), workers)
    return out
