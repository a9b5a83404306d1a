"""Finite-horizon dichotomy: detection thresholds and outperformance odds.

At horizon T the excess log wealth log K_T - log S0_T is Normal with mean
0.5 ||disc||^2 T and variance ||disc||^2 T, which gives a closed form for
the probability of beating the index by a factor 1/delta and, by solving
the resulting quadratic, the discrepancy threshold below which the
approximate SCAPM cannot be rejected at confidence 1-epsilon.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta

from .errors import ValidationError
from .market import MarketSpec, risk_profile
from .quantiles import inverse_normal_cdf, normal_cdf
from .simulate import SimulationConfig, brownian_at, simulate_terminals

__all__ = [
    "Verdict", "HorizonReport", "upper_quantile",
    "outperformance_probability", "detection_thresholds", "horizon_report",
    "MCOutperformance", "monte_carlo_outperformance",
    "CheckpointSummary", "asymptotic_ratio_experiment",
]


class Verdict(str, enum.Enum):
    OUTPERFORMS_WHP = "OUTPERFORMS_WHP"
    SCAPM_APPROX_HOLDS = "SCAPM_APPROX_HOLDS"


@dataclass(frozen=True)
class HorizonReport:
    epsilon: float
    delta: float
    horizon_T: float
    z_epsilon: float
    z_delta: float
    threshold_weak: float
    threshold_loose: float
    threshold_improved: float
    disc_norm: float
    p_outperform: float
    verdict: Verdict


def upper_quantile(p: float) -> float:
    """z_p: the point exceeded with probability p under the standard normal."""
    return inverse_normal_cdf(1.0 - p)


def outperformance_probability(disc_norm: float, horizon_T: float,
                               delta: float) -> float:
    """P(K_T / S0_T > 1/delta) in closed form.

    The zero-discrepancy limit is 0 for delta < 1 (K tracks the index
    exactly, so it never beats it by a factor above 1) and 1/2 at the
    delta = 1 boundary, breaking the measure-zero tie downward.
    """
    if disc_norm < 0:
        raise ValidationError("disc_norm must be nonnegative")
    if horizon_T <= 0:
        raise ValidationError("horizon_T must be positive")
    if not (0 < delta <= 1):
        raise ValidationError("delta must lie in (0, 1]")
    if disc_norm == 0.0:
        return 0.5 if delta == 1.0 else 0.0
    scale = disc_norm * np.sqrt(horizon_T)
    return float(normal_cdf(0.5 * scale - np.log(1.0 / delta) / scale))


def detection_thresholds(epsilon: float, delta: float,
                         horizon_T: float) -> tuple[float, float, float]:
    """(weak, loose, improved) discrepancy thresholds at horizon T.

    weak     = (z_eps + sqrt(z_eps^2 + 2 ln(1/delta))) / sqrt(T)
    loose    = (2 z_eps + sqrt(2 ln(1/delta))) / sqrt(T)
    improved = (z_eps + z_delta) / sqrt(T)
    """
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValidationError("epsilon and delta must lie in (0, 1)")
    if horizon_T <= 0:
        raise ValidationError("horizon_T must be positive")
    z_eps = upper_quantile(epsilon)
    z_del = upper_quantile(delta)
    log_term = np.log(1.0 / delta)
    sqrt_t = np.sqrt(horizon_T)
    weak = (z_eps + np.sqrt(z_eps ** 2 + 2.0 * log_term)) / sqrt_t
    loose = (2.0 * z_eps + np.sqrt(2.0 * log_term)) / sqrt_t
    improved = (z_eps + z_del) / sqrt_t
    return float(weak), float(loose), float(improved)


def horizon_report(spec: MarketSpec, epsilon: float, delta: float,
                   horizon_T: float) -> HorizonReport:
    profile = risk_profile(spec)
    weak, loose, improved = detection_thresholds(epsilon, delta, horizon_T)
    disc_norm = profile.disc_norm
    # A tie at the threshold still achieves probability exactly 1-epsilon.
    verdict = (Verdict.OUTPERFORMS_WHP if disc_norm >= weak
               else Verdict.SCAPM_APPROX_HOLDS)
    return HorizonReport(
        epsilon=epsilon, delta=delta, horizon_T=horizon_T,
        z_epsilon=upper_quantile(epsilon), z_delta=upper_quantile(delta),
        threshold_weak=weak, threshold_loose=loose,
        threshold_improved=improved, disc_norm=disc_norm,
        p_outperform=outperformance_probability(disc_norm, horizon_T, delta),
        verdict=verdict,
    )


@dataclass(frozen=True)
class MCOutperformance:
    n_paths: int
    n_hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float


def _clopper_pearson(k: int, n: int, confidence: float) -> tuple[float, float]:
    alpha = 1.0 - confidence
    low = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    high = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return low, high


def monte_carlo_outperformance(spec: MarketSpec, cfg: SimulationConfig,
                               delta: float, confidence: float = 0.99,
                               workers: int = 1) -> MCOutperformance:
    """Empirical P(K_T/S0_T > 1/delta) with a two-sided binomial CI."""
    if not (0 < delta <= 1):
        raise ValidationError("delta must lie in (0, 1]")
    stats = simulate_terminals(spec, cfg, workers=workers)
    excess = stats.log_K - stats.log_S[:, 0]
    hits = int(np.sum(excess > np.log(1.0 / delta)))
    low, high = _clopper_pearson(hits, cfg.n_paths, confidence)
    return MCOutperformance(n_paths=cfg.n_paths, n_hits=hits,
                            p_hat=hits / cfg.n_paths, ci_low=low,
                            ci_high=high, confidence=confidence)


@dataclass(frozen=True)
class CheckpointSummary:
    t: float
    mean: float
    sd: float
    quantiles: dict[str, float]


def asymptotic_ratio_experiment(spec: MarketSpec, cfg: SimulationConfig,
                                checkpoints, workers: int = 1) -> list[CheckpointSummary]:
    """Monte Carlo summaries of (log K - log S0) / (||disc||^2 t).

    The ratio has mean exactly 1/2 and standard deviation
    1/sqrt(||disc||^2 t), so it concentrates at the asymptotic rate as t
    grows. Checkpoints must lie on the simulation grid. Requires a nonzero
    discrepancy, otherwise the asymptotic hypothesis (divergent discrepancy
    integral) fails for constant coefficients.
    """
    profile = risk_profile(spec)
    if profile.disc_norm_sq == 0.0:
        raise ValueError(
            "discrepancy is zero: the asymptotic-rate hypothesis (infinite "
            "integral of ||theta - sigma0||^2) cannot hold with constant "
            "coefficients")
    dt = cfg.dt
    indices = []
    for t in checkpoints:
        idx = int(round(t / dt))
        if idx < 1 or idx > cfg.n_steps or abs(idx * dt - t) > 1e-9 * max(1.0, t):
            raise ValidationError(f"checkpoint t={t} is not on the grid")
        indices.append(idx)
    w = brownian_at(cfg, spec.brownian_dim, indices, workers=workers)
    out = []
    for j, idx in enumerate(indices):
        t = idx * dt
        v = profile.disc_norm_sq * t
        excess = 0.5 * v + w[:, j, :] @ profile.disc
        ratio = excess / v
        qs = np.quantile(ratio, [0.05, 0.25, 0.5, 0.75, 0.95])
        out.append(CheckpointSummary(
            t=t, mean=float(ratio.mean()), sd=float(ratio.std(ddof=1)),
            quantiles={"q05": qs[0], "q25": qs[1], "q50": qs[2],
                       "q75": qs[3], "q95": qs[4]},
        ))
    return out
