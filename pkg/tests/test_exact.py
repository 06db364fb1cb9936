from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fisheq import INF, FormatError, format_rational, parse_rational


def test_parse_integer_and_fraction():
    assert parse_rational("3") == F(3)
    assert parse_rational("-7/2") == F(-7, 2)
    assert parse_rational("10/13") == F(10, 13)


def test_parse_normalizes_to_lowest_terms():
    q = parse_rational("4/8")
    assert (q.numerator, q.denominator) == (1, 2)


@pytest.mark.parametrize("bad", ["1.5", "1e3", "", "inf", "1/0", "a/b", "0.1/2", None, 3])
def test_parse_rejects_non_rationals(bad):
    with pytest.raises(FormatError):
        parse_rational(bad)


def test_format_lowest_terms():
    assert format_rational(F(10, 13)) == "10/13"
    assert format_rational(F(4)) == "4"
    assert format_rational(F(-6, 4)) == "-3/2"


@given(st.integers(-10**12, 10**12), st.integers(1, 10**12))
def test_round_trip(num, den):
    q = F(num, den)
    assert parse_rational(format_rational(q)) == q


def test_infinity_orders_above_everything():
    assert INF > F(10**100)
    assert not (INF < F(0))
    assert INF >= INF and INF <= INF
    assert not (INF > INF)
    assert INF == INF and INF != F(1)
