import pytest
from hypothesis import given, strategies as st

from invoiceval.fixedpoint import format_decimal
from invoiceval.normalize import (NormalizationPolicy, ParseFailure,
                                  normalize_identifier, normalize_text,
                                  parse_date, parse_money, parse_quantity)

from .handtables import DATE_ERRORS, DATE_TABLE, MONEY_TABLE

USD = NormalizationPolicy(default_currency="USD")

# Invoice-realistic text alphabet: latin letters with common accents,
# digits, punctuation, and whitespace runs.
_text = st.text(
    alphabet=st.sampled_from(list(
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        "0123456789 \t\n.,-&/()'äöüßéèçÅ")),
    max_size=60)


def test_normalize_text_pipeline():
    assert normalize_text("  ACME   GmbH ") == "acme gmbh"
    assert normalize_text("Müller") == "muller"


def test_normalize_text_flags():
    keep_case = NormalizationPolicy(text_case_fold=False)
    assert normalize_text("ACME  GmbH", keep_case) == "ACME GmbH"
    keep_marks = NormalizationPolicy(text_strip_diacritics=False)
    assert normalize_text("Müller", keep_marks) == "müller"
    no_collapse = NormalizationPolicy(text_collapse_whitespace=False)
    assert normalize_text(" a  b ", no_collapse) == "a  b"


@given(_text)
def test_normalize_text_idempotent(raw):
    once = normalize_text(raw)
    assert normalize_text(once) == once


@pytest.mark.parametrize("raw, expected", [
    ("inv-001", "INV001"),
    ("INV 001", "INV001"),
    ("INV001", "INV001"),
])
def test_normalize_identifier(raw, expected):
    assert normalize_identifier(raw) == expected


@given(_text)
def test_normalize_identifier_idempotent(raw):
    once = normalize_identifier(raw)
    assert normalize_identifier(once) == once


@pytest.mark.parametrize("raw, order, ymd", DATE_TABLE)
def test_parse_date_table(raw, order, ymd):
    policy = NormalizationPolicy(date_order=order)
    parsed = parse_date(raw, policy)
    assert (parsed.year, parsed.month, parsed.day) == ymd


@pytest.mark.parametrize("raw", DATE_ERRORS)
def test_parse_date_errors(raw):
    with pytest.raises(ParseFailure):
        parse_date(raw, USD)


def test_parse_date_never_returns_invalid():
    parsed = parse_date("29/02/2024", NormalizationPolicy(date_order="day_first"))
    assert parsed.is_valid()


@pytest.mark.parametrize("raw, minor, scale, currency", MONEY_TABLE)
def test_parse_money_hand_table(raw, minor, scale, currency):
    amount = parse_money(raw, USD)
    assert (amount.minor_units, amount.scale, amount.currency) == (minor, scale, currency)


@pytest.mark.parametrize("raw", ["", "abc", "1,23.4,5", "1.2.3", "1..2",
                                 "12.3456789", "100 EUROS"])
def test_parse_money_errors(raw):
    with pytest.raises(ParseFailure):
        parse_money(raw, USD)


@pytest.mark.parametrize("raw, minor, scale", [
    ("3", 3, 0),
    ("2.50", 250, 2),
    ("19 %", 19, 0),
    ("1,5", 15, 1),
    ("-3", -3, 0),
    ("1 000", 1000, 0),
])
def test_parse_quantity(raw, minor, scale):
    qty = parse_quantity(raw, USD)
    assert (qty.minor_units, qty.scale) == (minor, scale)


def test_parse_quantity_rejects_units():
    with pytest.raises(ParseFailure):
        parse_quantity("3 pcs", USD)


@given(st.integers(-10 ** 8, 10 ** 8), st.integers(0, 2))
def test_money_format_parse_identity(minor, scale):
    # Canonical money strings use at most two decimals and no grouping.
    text = format_decimal(minor, scale)
    parsed = parse_money(text, USD)
    assert (parsed.minor_units, parsed.scale) == (minor, scale)


@given(st.integers(0, 3000000))
def test_date_format_parse_identity(ordinal_offset):
    import datetime
    day = datetime.date(1800, 1, 1) + datetime.timedelta(days=ordinal_offset % 200000)
    parsed = parse_date(day.isoformat(), USD)
    assert (parsed.year, parsed.month, parsed.day) == (day.year, day.month, day.day)


def test_parse_money_then_format_then_parse_is_identity():
    for raw, *_ in MONEY_TABLE:
        first = parse_money(raw, USD)
        again = parse_money(format_decimal(first.minor_units, first.scale), USD)
        assert (again.minor_units, again.scale) == (first.minor_units, first.scale)
