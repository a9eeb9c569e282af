"""Market state, impulse transactions, liquidation values and solvency geometry.

A portfolio point is (x, y, p, theta): cash, shares (no shorting), mid price
and the lag since the last trade.  A trade of e shares at lag theta moves
cash by -e * p * f(e, theta) and resets the lag; under the fixed-fee scheme
an extra epsilon of cash is paid per trade.  The solvency region is the set
of states whose block-sale liquidation value is nonnegative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InadmissibleTradeError, NoShortError
from .impact import ImpactModel

__all__ = [
    "State", "MarketParams", "PowerUtility", "SchemeVariant", "Scheme",
    "Region", "TradeInterval", "quote", "apply_trade", "liquidation_value",
    "merton_value", "in_solvency", "max_buy", "admissible_trades",
    "merton_bound", "region_boundary", "spread_floor",
]

# absolute tolerance for classifying a state onto the zero-liquidation boundary
BOUNDARY_ATOL = 1e-12


@dataclass(frozen=True)
class State:
    """One market/portfolio point."""

    x: float      # cash
    y: float      # shares, >= 0
    p: float      # mid price, > 0
    theta: float  # lag since last trade, >= 0

    def __post_init__(self):
        if self.y < 0.0:
            raise NoShortError(f"shares must be >= 0, got y={self.y}")
        if self.p <= 0.0:
            raise ConfigError(f"price must be > 0, got p={self.p}")
        if self.theta < 0.0:
            raise ConfigError(f"lag must be >= 0, got theta={self.theta}")


@dataclass(frozen=True)
class MarketParams:
    """GBM mid-price dynamics dP = P (b dt + sigma dW) on [0, T].

    sigma = 0 is accepted for deterministic-limit simulations; the grid
    solver itself requires sigma > 0.
    """

    b: float = 0.1
    sigma: float = 0.3
    T: float = 1.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ConfigError(f"volatility must be >= 0, got {self.sigma}")
        if self.T <= 0.0:
            raise ConfigError(f"horizon must be > 0, got {self.T}")


@dataclass(frozen=True)
class PowerUtility:
    """U(x) = K * x**gamma with U(0) = 0, K >= 0, gamma in [0, 1)."""

    K: float = 1.0
    gamma: float = 0.5

    def __post_init__(self):
        if self.K < 0.0:
            raise ConfigError(f"utility scale must be >= 0, got {self.K}")
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigError(f"utility exponent must lie in [0,1), got {self.gamma}")

    def __call__(self, x: float) -> float:
        if x < 0.0:
            raise ConfigError(f"utility argument must be >= 0, got {x}")
        if x == 0.0:
            return 0.0
        return self.K * x ** self.gamma

    def array(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = self.K * np.power(np.maximum(x, 0.0), self.gamma)
        return np.where(x > 0.0, out, 0.0)


class SchemeVariant(str, enum.Enum):
    RAW = "raw"
    FIXED_FEE = "fixed_fee"
    UTILITY_PENALTY = "utility_penalty"


@dataclass(frozen=True)
class Scheme:
    """Perturbation scheme: per-trade cash fee, per-trade utility penalty, or
    the unperturbed problem (no uniqueness guarantee, kept as reference)."""

    variant: SchemeVariant = SchemeVariant.FIXED_FEE
    epsilon: float = 0.05

    def __post_init__(self):
        variant = SchemeVariant(self.variant)
        object.__setattr__(self, "variant", variant)
        if variant is SchemeVariant.RAW:
            if self.epsilon != 0.0:
                object.__setattr__(self, "epsilon", 0.0)
        elif self.epsilon <= 0.0:
            raise ConfigError(f"{variant.value} scheme requires epsilon > 0, got {self.epsilon}")

    @classmethod
    def raw(cls) -> "Scheme":
        return cls(SchemeVariant.RAW, 0.0)

    @classmethod
    def fixed_fee(cls, epsilon: float) -> "Scheme":
        return cls(SchemeVariant.FIXED_FEE, epsilon)

    @classmethod
    def utility_penalty(cls, epsilon: float) -> "Scheme":
        return cls(SchemeVariant.UTILITY_PENALTY, epsilon)

    @property
    def cash_fee(self) -> float:
        """Per-trade cash deduction (fixed-fee scheme only)."""
        return self.epsilon if self.variant is SchemeVariant.FIXED_FEE else 0.0

    @property
    def value_penalty(self) -> float:
        """Per-trade deduction applied to the objective (penalty scheme only)."""
        return self.epsilon if self.variant is SchemeVariant.UTILITY_PENALTY else 0.0


class Region(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY_Y = "boundary_y"
    BOUNDARY_L = "boundary_l"
    OUTSIDE = "outside"


def quote(impact: ImpactModel, e: float, p: float, theta: float) -> float:
    """Price per share actually obtained for an order of e shares:
    p * f(e, theta). Purchases at zero lag quote math.inf (sentinel)."""
    if p <= 0.0:
        raise ConfigError(f"price must be > 0, got {p}")
    f = impact.multiplier(e, theta)
    return math.inf if math.isinf(f) else p * f


def apply_trade(impact: ImpactModel, state: State, e: float, scheme: Scheme) -> State:
    """Post-trade state: cash loses e * p * f(e, theta) (+ fee), shares gain e,
    the lag resets to zero.  Purchases at zero lag are rejected before any
    arithmetic on the infinite quote."""
    if state.y + e < 0.0:
        raise NoShortError(f"trade {e} from y={state.y} would short the position")
    if e > 0.0 and state.theta == 0.0:
        raise InadmissibleTradeError("purchase at zero lag is inadmissible")
    f = impact.multiplier(e, state.theta)
    x_new = state.x - e * state.p * f - scheme.cash_fee
    return State(x=x_new, y=state.y + e, p=state.p, theta=0.0)


def liquidation_value(impact: ImpactModel, state: State, scheme: Scheme) -> float:
    """Cash from an immediate block sale: x + y p f(-y, theta); fixed-fee
    scheme takes max(x, block sale - fee) (the investor may abandon the
    position and keep the cash)."""
    block = state.x + state.y * state.p * impact.multiplier(-state.y, state.theta)
    if scheme.variant is SchemeVariant.FIXED_FEE:
        return max(state.x, block - scheme.epsilon)
    return block


def merton_value(state: State) -> float:
    """Frictionless mark-to-market wealth x + p y."""
    return state.x + state.p * state.y


def spread_floor(impact: ImpactModel) -> float:
    """min(kappa_a - 1, 1 - kappa_b): per-share spread cost floor of a trade."""
    return min(impact.kappa_a - 1.0, 1.0 - impact.kappa_b)


def in_solvency(impact: ImpactModel, state: State, scheme: Scheme) -> Region:
    """Classify a state against the (scheme-dependent) solvency region."""
    lval = liquidation_value(impact, state, scheme)
    if state.y == 0.0:
        return Region.BOUNDARY_Y if lval >= 0.0 else Region.OUTSIDE
    if abs(lval) <= BOUNDARY_ATOL:
        return Region.BOUNDARY_L
    if lval > 0.0:
        return Region.INTERIOR
    return Region.OUTSIDE


def _bisect_increasing(g, lo: float, hi: float, target: float, rtol: float = 1e-10) -> float:
    """Root of g(e) = target for nondecreasing g on [lo, hi] with g(lo) <= target <= g(hi)."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            break
    return lo


def max_buy(impact: ImpactModel, state: State, scheme: Scheme) -> float:
    """Largest admissible trade: sup{e : e p f(e, theta) <= cash budget}
    where the budget is x (raw/penalty) or x - fee (fixed fee).

    Purchases solve on the strictly increasing buy branch by bisection to
    1e-10 relative tolerance.  A negative budget puts the answer on the sale
    branch (root of the increasing part of e * f(e, theta)); -inf means the
    budget is unreachable even by the best sale.
    """
    x, p, theta = state.x, state.p, state.theta
    budget = x - scheme.cash_fee
    if theta == 0.0:
        # sales trade at zero price: the constraint reduces to the budget sign
        return 0.0 if budget >= 0.0 else -math.inf

    def traded_cash(e: float) -> float:
        return e * p * impact.multiplier(e, theta)

    if budget >= 0.0:
        hi = budget / (p * impact.kappa_a) + 1.0
        while traded_cash(hi) <= budget:  # grows without bound, terminates
            hi *= 2.0
        return _bisect_increasing(traded_cash, 0.0, hi, budget)

    # negative budget: look for the largest sale whose proceeds cover it,
    # i.e. the root on the increasing branch of e * f(e, theta) for e < 0
    q_star = impact.max_sale_proceeds_share(theta)
    if traded_cash(-q_star) > budget:
        return -math.inf
    return _bisect_increasing(traded_cash, -q_star, 0.0, budget)


@dataclass(frozen=True)
class TradeInterval:
    """Closed interval [lo, hi] of trade sizes; empty when hi < lo."""

    lo: float
    hi: float

    @property
    def is_empty(self) -> bool:
        return self.hi < self.lo or math.isnan(self.hi)

    def contains(self, e: float, atol: float = 0.0) -> bool:
        return (not self.is_empty) and (self.lo - atol <= e <= self.hi + atol)


_EMPTY_INTERVAL = TradeInterval(lo=0.0, hi=-math.inf)


def admissible_trades(impact: ImpactModel, state: State, scheme: Scheme) -> TradeInterval:
    """Admissible trade sizes [-y, max_buy]; empty under the fixed-fee scheme
    when no trade can keep post-trade cash nonnegative (zero lag with cash
    below the fee, or liquidation proceeds below the fee)."""
    if scheme.variant is SchemeVariant.FIXED_FEE and state.theta == 0.0 and state.x < scheme.epsilon:
        return _EMPTY_INTERVAL
    hi = max_buy(impact, state, scheme)
    if math.isinf(hi) and hi < 0:
        return _EMPTY_INTERVAL
    interval = TradeInterval(lo=-state.y, hi=hi)
    return interval if not interval.is_empty else _EMPTY_INTERVAL


def merton_bound(market: MarketParams, utility: PowerUtility, t: float, state: State) -> float:
    """Frictionless upper bound K exp(rho (T - t)) (x + p y)^gamma with the
    smallest admissible rho = gamma/(1-gamma) * b^2 / (2 sigma^2)."""
    if not (0.0 <= t <= market.T):
        raise ConfigError(f"t must lie in [0, T], got {t}")
    if utility.gamma == 0.0:
        return utility.K
    if market.sigma == 0.0:
        raise ConfigError("merton_bound requires sigma > 0")
    rho = utility.gamma / (1.0 - utility.gamma) * market.b ** 2 / (2.0 * market.sigma ** 2)
    lm = max(merton_value(state), 0.0)
    return utility.K * math.exp(rho * (market.T - t)) * lm ** utility.gamma


def region_boundary(impact: ImpactModel, scheme: Scheme, p: float, theta: float, y_values):
    """Minimal solvent cash per share level, plus the corner share levels of
    the fee region.

    Returns (x_min array aligned with y_values, corners) where corners is the
    pair (y1, y2) solving y p f(-y, theta) = epsilon when the best block sale
    covers the fee, else None.  Raw/penalty schemes have no corners.
    """
    if p <= 0.0:
        raise ConfigError(f"price must be > 0, got {p}")
    y = np.asarray(y_values, dtype=float)
    if np.any(y < 0.0):
        raise ConfigError("share levels must be >= 0")
    proceeds = y * p * impact.multiplier_array(-y, theta)
    if scheme.variant is not SchemeVariant.FIXED_FEE:
        return -proceeds, None
    eps = scheme.epsilon
    x_min = np.minimum(0.0, eps - proceeds)
    y_star = impact.max_sale_proceeds_share(theta)
    best = y_star * p * impact.multiplier(-y_star, theta) if theta > 0.0 else 0.0
    if best < eps:
        return x_min, None

    def g(q: float) -> float:
        return q * p * impact.multiplier(-q, theta)

    y1 = _bisect_root(g, 0.0, y_star, eps, increasing=True)
    hi = y_star
    while g(hi) >= eps:
        hi = 2.0 * hi + 1.0
    y2 = _bisect_root(g, y_star, hi, eps, increasing=False)
    return x_min, (y1, y2)


def _bisect_root(g, lo: float, hi: float, target: float, increasing: bool, rtol: float = 1e-13) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = g(mid)
        below = val < target
        if below == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)
