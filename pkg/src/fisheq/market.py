"""Market data model and the basic buyer-side computations.

A market has n buyers with money budgets M_i and happiness caps c_i, and m
divisible goods of unit supply.  Buyer i gets utility min(c_i, sum_j u_ij
x_ij) from bundle x_i; a cap of ``None`` means the buyer is an ordinary
linear buyer.  Everything is exact: budgets, caps and utilities are
Fractions and never floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidMarketError
from .exact import INF


def _as_fraction_grid(utilities):
    return tuple(tuple(Fraction(u) for u in row) for row in utilities)


@dataclass(frozen=True)
class Market:
    """Immutable market instance (raw rational entries)."""

    budgets: tuple
    caps: tuple
    utilities: tuple

    def __post_init__(self):
        object.__setattr__(self, "budgets", tuple(Fraction(b) for b in self.budgets))
        object.__setattr__(
            self, "caps", tuple(None if c is None else Fraction(c) for c in self.caps)
        )
        object.__setattr__(self, "utilities", _as_fraction_grid(self.utilities))
        n = len(self.budgets)
        if n == 0:
            raise InvalidMarketError("market needs at least one buyer")
        if len(self.caps) != n or len(self.utilities) != n:
            raise InvalidMarketError("budgets, caps and utility rows must align")
        m = len(self.utilities[0])
        if m == 0:
            raise InvalidMarketError("market needs at least one good")
        if any(len(row) != m for row in self.utilities):
            raise InvalidMarketError("ragged utility matrix")
        for i, b in enumerate(self.budgets):
            if b <= 0:
                raise InvalidMarketError(f"buyer {i}: budget must be positive")
        for i, c in enumerate(self.caps):
            if c is not None and c <= 0:
                raise InvalidMarketError(f"buyer {i}: cap must be positive")
        for row in self.utilities:
            for u in row:
                if u < 0:
                    raise InvalidMarketError("utilities must be nonnegative")

    @property
    def n(self):
        return len(self.budgets)

    @property
    def m(self):
        return len(self.utilities[0])


@dataclass(frozen=True)
class NormalizedMarket(Market):
    """Market whose entries are all integers, plus the scale factors that
    map results back to the original units.

    Budgets were multiplied by the common factor ``budget_scale`` (prices of
    any equilibrium scale with it, allocations do not); each buyer's
    (utility row, cap) pair was multiplied by ``buyer_scales[i]`` (which
    changes no equilibrium at all).
    """

    budget_scale: Fraction = Fraction(1)
    buyer_scales: tuple = field(default=())

    @property
    def U(self):
        """Largest integer among the normalized budgets, caps, utilities."""
        best = 1
        for b in self.budgets:
            best = max(best, int(b))
        for c in self.caps:
            if c is not None:
                best = max(best, int(c))
        for row in self.utilities:
            for u in row:
                best = max(best, int(u))
        return best


def normalize(market):
    """Scale a raw market to an equivalent all-integer one.

    All budgets share one positive integer factor L; each buyer's utilities
    and cap share a per-buyer positive integer factor.  Records both so the
    solver can de-scale its output.
    """
    L = math.lcm(*(b.denominator for b in market.budgets))
    scales = []
    for i in range(market.n):
        dens = [u.denominator for u in market.utilities[i]]
        if market.caps[i] is not None:
            dens.append(market.caps[i].denominator)
        scales.append(Fraction(math.lcm(*dens)))
    return NormalizedMarket(
        budgets=tuple(b * L for b in market.budgets),
        caps=tuple(
            None if c is None else c * s for c, s in zip(market.caps, scales)
        ),
        utilities=tuple(
            tuple(u * s for u in row)
            for row, s in zip(market.utilities, scales)
        ),
        budget_scale=Fraction(L),
        buyer_scales=tuple(scales),
    )


def strip_trivial(market):
    """Drop buyers that value nothing and goods that nobody values.

    Such buyers get the empty bundle (trivially a demand bundle) and such
    goods get price zero in the assembled equilibrium; neither plays any
    role in the price dynamics.  Returns the reduced market together with
    the retained original indices.
    """
    buyers = tuple(i for i in range(market.n) if any(u > 0 for u in market.utilities[i]))
    goods = tuple(
        j for j in range(market.m) if any(market.utilities[i][j] > 0 for i in buyers)
    )
    if not buyers or not goods:
        raise InvalidMarketError("market is empty after preprocessing")
    reduced = NormalizedMarket(
        budgets=tuple(market.budgets[i] for i in buyers),
        caps=tuple(market.caps[i] for i in buyers),
        utilities=tuple(
            tuple(market.utilities[i][j] for j in goods) for i in buyers
        ),
        budget_scale=getattr(market, "budget_scale", Fraction(1)),
        buyer_scales=tuple(
            getattr(market, "buyer_scales", (Fraction(1),) * market.n)[i]
            for i in buyers
        ),
    )
    return reduced, buyers, goods


def mbb_ratio(market, prices, buyer):
    """Maximum bang-per-buck ratio max_j u_ij / p_j.

    Conventions: 0/0 = 0, and a positive utility at price zero makes the
    ratio INF (the buyer can grab value for free).
    """
    best = Fraction(0)
    unbounded = False
    for j in range(market.m):
        u = market.utilities[buyer][j]
        if u == 0:
            continue
        if prices[j] == 0:
            unbounded = True
        elif not unbounded:
            ratio = u / prices[j]
            if ratio > best:
                best = ratio
    return INF if unbounded else best


def active_budget(market, prices, buyer):
    """min(M_i, c_i / alpha_i) and whether the cap binds.

    The cap counts as binding on equality (c_i/alpha_i == M_i).  Callers
    must not pass buyers that value nothing; zero-price states (alpha INF)
    only occur for finitely capped buyers on the deletion path.
    """
    alpha = mbb_ratio(market, prices, buyer)
    if alpha == 0:
        raise InvalidMarketError(f"buyer {buyer} values no good")
    money = market.budgets[buyer]
    cap = market.caps[buyer]
    if cap is None:
        if alpha is INF:
            raise InvalidMarketError(
                f"buyer {buyer}: unbounded cap with a free valued good"
            )
        return money, False
    if alpha is INF:
        return Fraction(0), True
    needed = cap / alpha
    if needed <= money:
        return needed, True
    return money, False


def equality_graph(market, prices):
    """Edges (i, j) on which buyer i attains its bang-per-buck ratio.

    If buyer i values some zero-priced good, its ratio is INF and its
    equality edges are exactly the zero-priced goods it values.
    """
    edges = set()
    for i in range(market.n):
        alpha = mbb_ratio(market, prices, i)
        if alpha == 0:
            continue
        for j in range(market.m):
            u = market.utilities[i][j]
            if u == 0:
                continue
            if alpha is INF:
                if prices[j] == 0:
                    edges.add((i, j))
            elif prices[j] > 0 and u == alpha * prices[j]:
                edges.add((i, j))
    return frozenset(edges)
