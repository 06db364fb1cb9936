"""Lattice structure of the modest MBB equilibria.

Price vectors of modest MBB equilibria are closed under pointwise max and
min; the constructive join/meet splice together the price and allocation of
the two inputs along the partition of goods into equal-, below- and
above-priced sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantError
from .verify import equilibrium_from_allocation, verify


@dataclass(frozen=True)
class PricePartition:
    equal: tuple  # S0: p == p'
    below: tuple  # S1: p <  p'
    above: tuple  # S2: p >  p'
    buyers_equal: frozenset
    buyers_below: frozenset
    buyers_above: frozenset


def _touched(alloc, goods):
    return frozenset(
        i for i, row in enumerate(alloc) if any(row[j] > 0 for j in goods)
    )


def _checked(market, equilibrium, name):
    report = verify(market, equilibrium)
    if not report.ok:
        raise ValueError(
            f"{name} is not a modest MBB equilibrium: {report.violations}"
        )


def partition(market, first, second):
    """Split goods by price comparison and buyers by where their allocation
    sits.  The three buyer sets must agree between the two equilibria, be
    mutually disjoint, and be capped outside the equal-price part; a
    violation means a bug or a bad input and raises."""
    _checked(market, first, "first equilibrium")
    _checked(market, second, "second equilibrium")
    equal, below, above = [], [], []
    for j in range(market.m):
        if first.prices[j] == second.prices[j]:
            equal.append(j)
        elif first.prices[j] < second.prices[j]:
            below.append(j)
        else:
            above.append(j)
    groups = {}
    for name, goods in (("equal", equal), ("below", below), ("above", above)):
        mine = _touched(first.allocation, goods)
        theirs = _touched(second.allocation, goods)
        if mine != theirs:
            raise InvariantError(
                f"buyer sets for {name}-priced goods differ: {sorted(mine)} vs {sorted(theirs)}"
            )
        groups[name] = mine
    if (
        groups["equal"] & groups["below"]
        or groups["equal"] & groups["above"]
        or groups["below"] & groups["above"]
    ):
        raise InvariantError("buyer groups of the price partition overlap")
    for i in groups["below"] | groups["above"]:
        if not (first.capped[i] and second.capped[i]):
            raise InvariantError(f"buyer {i} moves prices while uncapped")
    return PricePartition(
        equal=tuple(equal),
        below=tuple(below),
        above=tuple(above),
        buyers_equal=groups["equal"],
        buyers_below=groups["below"],
        buyers_above=groups["above"],
    )


def _splice(market, first, second, take_second):
    prices, columns = [], []
    for j in range(market.m):
        if j in take_second:
            prices.append(second.prices[j])
            columns.append([second.allocation[i][j] for i in range(market.n)])
        else:
            prices.append(first.prices[j])
            columns.append([first.allocation[i][j] for i in range(market.n)])
    alloc = tuple(
        tuple(columns[j][i] for j in range(market.m)) for i in range(market.n)
    )
    result = equilibrium_from_allocation(market, tuple(prices), alloc)
    report = verify(market, result)
    if not report.ok:
        raise InvariantError(f"spliced equilibrium fails to verify: {report.violations}")
    return result


def join(market, first, second):
    """Pointwise price maximum: the second's prices and allocation on the
    goods where it is higher, the first's everywhere else."""
    split = partition(market, first, second)
    return _splice(market, first, second, set(split.below))


def meet(market, first, second):
    """Pointwise price minimum (mirror image of join)."""
    split = partition(market, first, second)
    return _splice(market, first, second, set(split.above))
