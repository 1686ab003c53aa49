from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from invoiceval.fixedpoint import (add_scaled, as_fraction, format_decimal,
                                   parse_decimal_string, rescale_half_up,
                                   round_half_up, sub_scaled)


@pytest.mark.parametrize("minor, scale, expected", [
    (123456, 2, "1234.56"),
    (-50, 2, "-0.50"),
    (0, 0, "0"),
    (5, 3, "0.005"),
    (7, 0, "7"),
])
def test_format_decimal(minor, scale, expected):
    assert format_decimal(minor, scale) == expected


@pytest.mark.parametrize("text, expected", [
    ("1234.56", (123456, 2)),
    ("-0.50", (-50, 2)),
    ("0", (0, 0)),
    ("+7", (7, 0)),
])
def test_parse_decimal_string(text, expected):
    assert parse_decimal_string(text) == expected


@pytest.mark.parametrize("bad", ["", "1,2", "1.2.3", "abc", "1.1234567"])
def test_parse_decimal_string_rejects(bad):
    with pytest.raises(ValueError):
        parse_decimal_string(bad)


@pytest.mark.parametrize("minor, scale, to_scale, expected", [
    (8325, 4, 2, 83),    # 0.8325 -> 0.83
    (8350, 4, 2, 84),    # ties round away from zero
    (-8350, 4, 2, -84),
    (83, 2, 4, 8300),
])
def test_rescale_half_up(minor, scale, to_scale, expected):
    assert rescale_half_up(minor, scale, to_scale) == expected


@given(st.integers(-10 ** 12, 10 ** 12), st.integers(0, 6))
def test_format_parse_roundtrip(minor, scale):
    assert parse_decimal_string(format_decimal(minor, scale)) == (minor, scale)


@given(st.integers(-10 ** 9, 10 ** 9), st.integers(0, 6),
       st.integers(-10 ** 9, 10 ** 9), st.integers(0, 6))
def test_add_sub_are_exact(m1, s1, m2, s2):
    added = add_scaled((m1, s1), (m2, s2))
    assert as_fraction(*added) == as_fraction(m1, s1) + as_fraction(m2, s2)
    subbed = sub_scaled((m1, s1), (m2, s2))
    assert as_fraction(*subbed) == as_fraction(m1, s1) - as_fraction(m2, s2)


def test_round_half_up():
    assert round_half_up(Fraction(1, 2)) == 1
    assert round_half_up(Fraction(935, 10)) == 94
    assert round_half_up(Fraction(49, 100)) == 0
