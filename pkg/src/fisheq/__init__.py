"""Exact equilibrium computation for Fisher markets with budget-additive
(capped linear) utilities."""

from .descend import EventRecord, SolveResult, solve_max_revenue
from .errors import (
    ConvergenceError,
    FormatError,
    InvalidMarketError,
    InvariantError,
)
from .exact import INF, format_rational, parse_rational
from .flow import (
    Flow,
    FlowNetwork,
    balanced_flow,
    is_balanced,
    max_flow,
    min_cut,
    residual_reach,
    tight_set_scale,
)
from .lattice import PricePartition, join, meet, partition
from .market import (
    Market,
    NormalizedMarket,
    active_budget,
    equality_graph,
    mbb_ratio,
    normalize,
    strip_trivial,
)
from .minrev import min_revenue
from .oracle import balanced_surplus_levels, equalize_balanced, solve_eg_numeric
from .verify import Equilibrium, VerificationReport, equilibrium_from_allocation, verify

__all__ = [
    "INF",
    "ConvergenceError",
    "Equilibrium",
    "EventRecord",
    "Flow",
    "FlowNetwork",
    "FormatError",
    "InvalidMarketError",
    "InvariantError",
    "Market",
    "NormalizedMarket",
    "PricePartition",
    "SolveResult",
    "VerificationReport",
    "active_budget",
    "balanced_flow",
    "balanced_surplus_levels",
    "equality_graph",
    "equalize_balanced",
    "equilibrium_from_allocation",
    "format_rational",
    "is_balanced",
    "join",
    "max_flow",
    "mbb_ratio",
    "meet",
    "min_cut",
    "min_revenue",
    "normalize",
    "parse_rational",
    "partition",
    "residual_reach",
    "solve_eg_numeric",
    "solve_max_revenue",
    "strip_trivial",
    "tight_set_scale",
    "verify",
]
