"""Constant-coefficient multi-asset Black-Scholes market and its static
risk quantities.

Securities are indexed 0..K with security 0 the index. The volatility
matrix `sigma` has one row per security and one column per Brownian
dimension (D_b <= K+1, full column rank). Viability means the excess
appreciation mu - r*1 lies in the column span of sigma, which yields the
market price of risk theta with sigma @ theta = mu - r*1.

Derived quantities:
  disc                 theta - sigma[0], the discrepancy; zero iff SCAPM holds
  scapm_residuals[k]   mu[k] - r - sigma[k] . sigma[0]
  deficits[k]          0.5 * ||theta - sigma[k]||^2  (growth shortfall)
  optimal_growth_rate  r + 0.5 * ||theta||^2
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteMarketError, NonViableMarketError, ValidationError

__all__ = [
    "MarketSpec", "RiskProfile", "VIABILITY_TOL",
    "check_viability", "solve_theta", "risk_profile",
    "replication_weights", "sigma_condition",
]

VIABILITY_TOL = 1e-9

# theta is snapped to sigma[0] when they agree to this relative precision, so
# that an SCAPM market (up to float rounding in the config) gets an exactly
# zero discrepancy and the downstream wealth/index dichotomy is sharp.
_SNAP_TOL = 1e-10


@dataclass(frozen=True)
class MarketSpec:
    r: float
    mu: np.ndarray
    sigma: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim == 1:
            sigma = sigma.reshape(-1, 1)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        r = float(self.r)
        object.__setattr__(self, "r", r)
        if not np.isfinite(r):
            raise ValidationError("interest rate must be finite", code="non-finite")
        if not np.all(np.isfinite(mu)):
            raise ValidationError("appreciation vector has non-finite entries",
                                  code="non-finite")
        if not np.all(np.isfinite(sigma)):
            raise ValidationError("volatility matrix has non-finite entries",
                                  code="non-finite")
        if sigma.shape[0] != mu.shape[0]:
            raise ValidationError(
                f"sigma has {sigma.shape[0]} rows but mu has length {mu.shape[0]}",
                code="dimension-mismatch")
        if sigma.shape[0] < 1 or sigma.shape[1] < 1:
            raise ValidationError("need at least one security and one Brownian "
                                  "dimension", code="dimension-mismatch")
        if sigma.shape[1] > sigma.shape[0]:
            raise ValidationError(
                f"Brownian dimension {sigma.shape[1]} exceeds number of "
                f"securities {sigma.shape[0]}", code="dimension-mismatch")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != mu.shape[0]:
                raise ValidationError(
                    f"{len(labels)} labels for {mu.shape[0]} securities",
                    code="dimension-mismatch")
            object.__setattr__(self, "labels", labels)

    @property
    def n_assets(self) -> int:
        """K+1: index plus K stocks."""
        return self.mu.shape[0]

    @property
    def brownian_dim(self) -> int:
        return self.sigma.shape[1]

    def asset_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return ("index",) + tuple(f"stock{k}" for k in range(1, self.n_assets))

    def excess(self) -> np.ndarray:
        return self.mu - self.r


@dataclass(frozen=True)
class RiskProfile:
    theta: np.ndarray
    disc: np.ndarray
    disc_norm_sq: float
    scapm_residuals: np.ndarray
    deficits: np.ndarray
    optimal_growth_rate: float

    @property
    def disc_norm(self) -> float:
        return float(np.sqrt(self.disc_norm_sq))


def _require_full_rank(spec: MarketSpec) -> None:
    rank = np.linalg.matrix_rank(spec.sigma)
    if rank < spec.brownian_dim:
        raise IncompleteMarketError(
            f"sigma has rank {rank} < {spec.brownian_dim} columns; "
            "the market is incomplete")


def check_viability(spec: MarketSpec, tol: float = VIABILITY_TOL) -> tuple[bool, float]:
    """Least-squares viability test: is mu - r*1 in the span of sigma?

    Returns (viable, residual_norm). Raises IncompleteMarketError for a
    rank-deficient sigma, which is a different failure from non-viability.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    _require_full_rank(spec)
    rhs = spec.excess()
    theta, *_ = np.linalg.lstsq(spec.sigma, rhs, rcond=None)
    residual = float(np.linalg.norm(spec.sigma @ theta - rhs))
    scale = max(float(np.linalg.norm(rhs)), 1e-12)
    return residual <= tol * scale, residual


def solve_theta(spec: MarketSpec, tol: float = VIABILITY_TOL) -> np.ndarray:
    """Market price of risk: the unique theta with sigma @ theta = mu - r*1.

    Exact inverse when D_b = K+1, normal equations on the small Gram matrix
    otherwise. Raises NonViableMarketError (carrying the residual) if no
    solution exists at the tolerance.
    """
    viable, residual = check_viability(spec, tol)
    if not viable:
        raise NonViableMarketError(residual, tol)
    rhs = spec.excess()
    if spec.brownian_dim == spec.n_assets:
        theta = np.linalg.solve(spec.sigma, rhs)
    else:
        gram = spec.sigma.T @ spec.sigma
        theta = np.linalg.solve(gram, spec.sigma.T @ rhs)
    sigma0 = spec.sigma[0]
    snap_scale = max(1.0, float(np.max(np.abs(sigma0))))
    if np.max(np.abs(theta - sigma0)) <= _SNAP_TOL * snap_scale:
        theta = sigma0.copy()
    return theta


def sigma_condition(spec: MarketSpec) -> float:
    """2-norm condition number of the volatility matrix."""
    return float(np.linalg.cond(spec.sigma))


def risk_profile(spec: MarketSpec, tol: float = VIABILITY_TOL) -> RiskProfile:
    theta = solve_theta(spec, tol)
    disc = theta - spec.sigma[0]
    deficits = 0.5 * np.sum((theta[None, :] - spec.sigma) ** 2, axis=1)
    return RiskProfile(
        theta=theta,
        disc=disc,
        disc_norm_sq=float(disc @ disc),
        scapm_residuals=spec.mu - spec.r - spec.sigma @ spec.sigma[0],
        deficits=deficits,
        optimal_growth_rate=spec.r + 0.5 * float(theta @ theta),
    )


def replication_weights(spec: MarketSpec, tol: float = VIABILITY_TOL) -> np.ndarray:
    """Constant wealth fractions pi (remainder at rate r) with sigma.T @ pi = theta.

    Square case uses the exact solve; the underdetermined case returns the
    minimum-norm solution sigma (sigma.T sigma)^-1 theta.
    """
    theta = solve_theta(spec, tol)
    if spec.brownian_dim == spec.n_assets:
        return np.linalg.solve(spec.sigma.T, theta)
    gram = spec.sigma.T @ spec.sigma
    return spec.sigma @ np.linalg.solve(gram, theta)
