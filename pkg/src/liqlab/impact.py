"""Temporary price impact models.

The impact multiplier f(e, lag) scales the mid price into the price actually
obtained for an order of e shares placed `lag` time units after the previous
trade.  Conventions, checked by :func:`validate_assumptions`:

  H1f   f(0, lag) = 1 and f(., lag) is nondecreasing,
  H2f   f(e, 0) = 0 for sales and f(e, 0) = +inf for purchases,
  H3f   f < kappa_b < 1 on sales and f > kappa_a > 1 on purchases
        (kappa_b / kappa_a act as bid / ask multipliers on the mid price),
  Hcf   f is continuous for lag > 0 and the lag-derivative of the sale
        branch is bounded.

Purchases at zero lag quote at ``math.inf``; callers must treat that value
as "reject the trade", never feed it into cash arithmetic.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = ["ImpactModel", "ExponentialImpact", "AssumptionReport", "validate_assumptions"]


class ImpactModel(ABC):
    """Abstract temporary-impact surface. Implementations must be pure/immutable."""

    kappa_a: float
    kappa_b: float

    @abstractmethod
    def multiplier(self, e: float, lag: float) -> float:
        """Impact multiplier f(e, lag). lag < 0 is a domain error."""

    @abstractmethod
    def dtheta(self, e: float, lag: float) -> float:
        """Lag-derivative of f on the sale branch (e < 0, lag > 0 only)."""

    def multiplier_array(self, e, lag):
        """Vectorized multiplier; default falls back to the scalar method."""
        vec = np.vectorize(self.multiplier, otypes=[float])
        return vec(e, lag)


@dataclass(frozen=True)
class ExponentialImpact(ImpactModel):
    """Exponential impact family exp(lam * |e/lag|**beta * sgn(e)) with a
    bid/ask multiplier, the usual empirical parameterization.

    kappa_a : ask multiplier, > 1
    kappa_b : bid multiplier, in (0, 1)
    lam     : impact factor, > 0
    beta    : impact exponent, > 0
    """

    kappa_a: float = 1.1
    kappa_b: float = 0.9
    lam: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.kappa_b < 1.0 < self.kappa_a):
            raise ConfigError(
                "impact multipliers must satisfy 0 < kappa_b < 1 < kappa_a (H3f); "
                f"got kappa_b={self.kappa_b}, kappa_a={self.kappa_a}"
            )
        if self.lam <= 0.0:
            raise ConfigError(f"impact factor lam must be > 0, got {self.lam}")
        if self.beta <= 0.0:
            raise ConfigError(f"impact exponent beta must be > 0, got {self.beta}")

    def side(self, e: float) -> float:
        return self.kappa_a if e > 0 else (self.kappa_b if e < 0 else 1.0)

    def multiplier(self, e: float, lag: float) -> float:
        if lag < 0.0:
            raise ConfigError(f"lag must be >= 0, got {lag}")
        if lag == 0.0:
            if e > 0.0:
                return math.inf
            return 1.0 if e == 0.0 else 0.0
        if e == 0.0:
            return 1.0
        expo = self.lam * abs(e / lag) ** self.beta * math.copysign(1.0, e)
        return self.side(e) * math.exp(expo)

    def dtheta(self, e: float, lag: float) -> float:
        if e >= 0.0 or lag <= 0.0:
            raise ConfigError("lag-derivative only defined on the sale branch (e < 0, lag > 0)")
        # d/dlag of kb * exp(-lam (|e|/lag)^beta)
        return self.multiplier(e, lag) * self.lam * self.beta * abs(e) ** self.beta / lag ** (self.beta + 1)

    def multiplier_array(self, e, lag):
        e = np.asarray(e, dtype=float)
        lag = np.asarray(lag, dtype=float)
        if np.any(lag < 0.0):
            raise ConfigError("lag must be >= 0")
        e, lag = np.broadcast_arrays(e, lag)
        out = np.ones(e.shape, dtype=float)
        side = np.where(e > 0, self.kappa_a, np.where(e < 0, self.kappa_b, 1.0))
        pos_lag = lag > 0
        nz = pos_lag & (e != 0)
        with np.errstate(divide="ignore"):
            expo = self.lam * np.abs(e[nz] / lag[nz]) ** self.beta * np.sign(e[nz])
        out[nz] = np.exp(expo)
        out *= side
        zero_lag = ~pos_lag
        out[zero_lag & (e < 0)] = 0.0
        out[zero_lag & (e == 0)] = 1.0
        out[zero_lag & (e > 0)] = np.inf
        return out

    def max_sale_proceeds_share(self, lag: float) -> float:
        """argmax over q > 0 of q * f(-q, lag): the sale size with the largest
        cash proceeds per unit price. Increasing branch of q*f(-q,.) is
        [0, argmax]."""
        if lag <= 0.0:
            return 0.0
        return lag * (self.lam * self.beta) ** (-1.0 / self.beta)


@dataclass(frozen=True)
class AssumptionReport:
    ok: bool
    failures: tuple
    n_checked: int

    def summary(self) -> str:
        if self.ok:
            return f"impact assumptions hold on {self.n_checked} sample points"
        lines = [f"{len(self.failures)} impact assumption failure(s):"]
        lines += [f"  {cond} at {pt}: {msg}" for cond, pt, msg in self.failures]
        return "\n".join(lines)


def validate_assumptions(model: ImpactModel, e_values, lag_values) -> AssumptionReport:
    """Check the liquidity conditions H1f/H2f/H3f numerically on a sample grid.

    Returns a report; failures carry the witness point rather than raising.
    """
    e_values = np.sort(np.asarray(e_values, dtype=float))
    lag_values = np.asarray(lag_values, dtype=float)
    if e_values.size == 0 or lag_values.size == 0:
        raise ConfigError("sample grid must be nonempty")
    failures = []
    n = 0
    for lag in lag_values:
        f = model.multiplier_array(e_values, lag)
        n += f.size
        f0 = model.multiplier(0.0, float(lag))
        if f0 != 1.0:
            failures.append(("H1f", (0.0, float(lag)), f"f(0,lag)={f0!r} != 1"))
        finite = np.isfinite(f)
        diffs = np.diff(f[finite])
        if np.any(diffs < 0):
            i = int(np.argmax(np.diff(f[finite]) < 0))
            failures.append(("H1f", (float(e_values[finite][i]), float(lag)), "f not nondecreasing in e"))
        if lag == 0.0:
            if np.any(f[e_values < 0] != 0.0):
                failures.append(("H2f", (None, 0.0), "f(e,0) != 0 for some sale"))
            if np.any(np.isfinite(f[e_values > 0])):
                failures.append(("H2f", (None, 0.0), "f(e,0) finite for some purchase"))
            continue
        sales = f[e_values < 0]
        buys = f[e_values > 0]
        if sales.size and np.max(sales) > model.kappa_b:
            i = int(np.argmax(sales))
            failures.append(("H3f", (float(e_values[e_values < 0][i]), float(lag)),
                             f"sale multiplier {np.max(sales):.6g} exceeds kappa_b={model.kappa_b}"))
        if model.kappa_b >= 1.0:
            failures.append(("H3f", (None, float(lag)), f"kappa_b={model.kappa_b} not < 1"))
        if buys.size and np.min(buys) < model.kappa_a:
            i = int(np.argmin(buys))
            failures.append(("H3f", (float(e_values[e_values > 0][i]), float(lag)),
                             f"buy multiplier {np.min(buys):.6g} below kappa_a={model.kappa_a}"))
        if model.kappa_a <= 1.0:
            failures.append(("H3f", (None, float(lag)), f"kappa_a={model.kappa_a} not > 1"))
    # dedupe repeated condition/point-free failures
    seen, uniq = set(), []
    for item in failures:
        key = (item[0], item[2])
        if key not in seen:
            seen.add(key)
            uniq.append(item)
    return AssumptionReport(ok=not uniq, failures=tuple(uniq), n_checked=n)
