"""Index-outperformance analytics for constant-coefficient Black-Scholes
markets: market price of risk, SCAPM residuals, growth-optimal wealth
simulation, and finite-horizon detection thresholds.
"""

from .reporting import __version__
from .errors import (IncompleteMarketError, IndexbeatError,
                     NonViableMarketError, ScheduleAlignmentError,
                     ValidationError)
from .market import (MarketSpec, RiskProfile, check_viability,
                     replication_weights, risk_profile, solve_theta)
from .quantiles import inverse_normal_cdf, normal_cdf
from .simulate import (PathBundle, SimulationConfig, TerminalStats,
                       brownian_at, schedule_simulate, simulate_prices,
                       simulate_terminals)
from .strategy import (central_identity_residual, lil_statistic,
                       log_wealth_path, replicate_and_compare)
from .horizon import (HorizonReport, Verdict, asymptotic_ratio_experiment,
                      detection_thresholds, horizon_report,
                      monte_carlo_outperformance, outperformance_probability)
from .config import parse_market_config

__all__ = [
    "__version__",
    "IndexbeatError", "ValidationError", "IncompleteMarketError",
    "ScheduleAlignmentError", "NonViableMarketError",
    "MarketSpec", "RiskProfile", "check_viability", "solve_theta",
    "risk_profile", "replication_weights",
    "inverse_normal_cdf", "normal_cdf",
    "SimulationConfig", "PathBundle", "TerminalStats", "simulate_prices",
    "schedule_simulate", "simulate_terminals", "brownian_at",
    "log_wealth_path", "central_identity_residual", "replicate_and_compare",
    "lil_statistic",
    "HorizonReport", "Verdict", "outperformance_probability",
    "detection_thresholds", "horizon_report", "monte_carlo_outperformance",
    "asymptotic_ratio_experiment",
    "parse_market_config",
]
