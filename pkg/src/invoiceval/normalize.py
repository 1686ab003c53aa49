"""Locale-tolerant conversion of raw extractor strings into canonical values.

All functions here are pure, deterministic, and idempotent where a fixpoint
makes sense (text and identifier normalization). Parse failures raise
ParseFailure; adapters treat that as a wrong prediction, not a harness fault.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .fixedpoint import MAX_SCALE
from .schema import CURRENCY_UNKNOWN, DateValue, MonetaryAmount, Quantity

DATE_ORDERS = ("day_first", "month_first", "year_first")

CURRENCY_SYMBOLS = {"€": "EUR", "$": "USD", "£": "GBP"}

# Characters that may group digits and can be deleted before separator logic.
_GROUPING_CHARS = " '  "

_MONTHS = {}
for _i, _name in enumerate(
    ("january", "february", "march", "april", "may", "june", "july",
     "august", "september", "october", "november", "december"), start=1):
    _MONTHS[_name] = _i
    _MONTHS[_name[:3]] = _i


class ParseFailure(ValueError):
    """A raw string could not be converted to the requested value type."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class NormalizationPolicy:
    date_order: str = "day_first"
    text_case_fold: bool = True
    text_collapse_whitespace: bool = True
    text_strip_diacritics: bool = True
    identifier_strip: frozenset = frozenset(" -")
    default_currency: str = CURRENCY_UNKNOWN

    def __post_init__(self):
        if self.date_order not in DATE_ORDERS:
            raise ValueError(f"date_order must be one of {DATE_ORDERS}")
        object.__setattr__(self, "identifier_strip", frozenset(self.identifier_strip))


DEFAULT_POLICY = NormalizationPolicy()


def normalize_text(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> str:
    s = unicodedata.normalize("NFC", raw)
    if policy.text_strip_diacritics:
        decomposed = unicodedata.normalize("NFD", s)
        s = unicodedata.normalize(
            "NFC", "".join(c for c in decomposed if unicodedata.category(c) != "Mn"))
    if policy.text_case_fold:
        s = s.casefold()
    if policy.text_collapse_whitespace:
        s = " ".join(s.split())
    return s.strip()


def normalize_identifier(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> str:
    s = raw.upper()
    return "".join(c for c in s if c not in policy.identifier_strip)


def _pivot_year(two_digit: int) -> int:
    # 00..68 -> 2000..2068, 69..99 -> 1969..1999
    return 2000 + two_digit if two_digit <= 68 else 1900 + two_digit


def _year_of(group: str, raw: str) -> int:
    if len(group) == 4:
        return int(group)
    if len(group) == 2:
        return _pivot_year(int(group))
    raise ParseFailure(f"ambiguous year {group!r} in date {raw!r}", raw)


_ISO_RE = re.compile(r"(\d{4})-(\d{1,2})-(\d{1,2})")
_NUMERIC_RE = re.compile(r"(\d{1,4})([./-])(\d{1,2})\2(\d{1,4})")
_DMY_NAME_RE = re.compile(r"(\d{1,2})\s+([A-Za-z]+)\.?,?\s+(\d{2,4})")
_MDY_NAME_RE = re.compile(r"([A-Za-z]+)\.?\s+(\d{1,2}),?\s+(\d{2,4})")


def parse_date(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> DateValue:
    s = raw.strip()

    parts = None
    if m := _ISO_RE.fullmatch(s):
        parts = (int(m.group(1)), int(m.group(2)), int(m.group(3)))
    elif m := _NUMERIC_RE.fullmatch(s):
        a, _, b, c = m.groups()
        # A 4-digit group pins the year position regardless of policy;
        # otherwise the policy decides and the year sits where it says.
        if len(a) == 4:
            parts = (int(a), int(b), int(c))
        elif len(a) == 3 or len(c) == 3:
            raise ParseFailure(f"ambiguous year in date {raw!r}", raw)
        elif policy.date_order == "year_first" and len(c) != 4:
            parts = (_year_of(a, raw), int(b), int(c))
        elif policy.date_order == "month_first" or (
                policy.date_order == "year_first" and len(c) == 4):
            parts = (_year_of(c, raw), int(a), int(b))
        else:
            parts = (_year_of(c, raw), int(b), int(a))
    elif m := _DMY_NAME_RE.fullmatch(s):
        day, name, year = m.groups()
        month = _MONTHS.get(name.lower())
        if month is not None:
            parts = (_year_of(year, raw), month, int(day))
    elif m := _MDY_NAME_RE.fullmatch(s):
        name, day, year = m.groups()
        month = _MONTHS.get(name.lower())
        if month is not None:
            parts = (_year_of(year, raw), month, int(day))

    if parts is None:
        raise ParseFailure(f"unrecognized date format: {raw!r}", raw)
    value = DateValue(*parts)
    if not value.is_valid():
        raise ParseFailure(f"invalid calendar date: {raw!r}", raw)
    return value


def _split_grouped(core: str, raw: str) -> tuple[str, int]:
    """Resolve '.'/',' roles in a bare numeric string.

    Returns (digits, scale). Raises ParseFailure when no digits are present
    or the separators cannot be read consistently.
    """
    for ch in _GROUPING_CHARS:
        core = core.replace(ch, "")
    if not core or not any(c.isdigit() for c in core):
        raise ParseFailure(f"no digits in {raw!r}", raw)
    if any(c not in "0123456789.," for c in core):
        raise ParseFailure(f"unexpected character in number {raw!r}", raw)

    dots = core.count(".")
    commas = core.count(",")

    def check_groups(body: str, sep: str) -> str:
        groups = body.split(sep)
        if not 1 <= len(groups[0]) <= 3 or any(len(g) != 3 for g in groups[1:]) \
                or not all(g.isdigit() for g in groups):
            raise ParseFailure(f"inconsistent separators in {raw!r}", raw)
        return "".join(groups)

    if dots and commas:
        dec_char = "." if core.rindex(".") > core.rindex(",") else ","
        thou_char = "," if dec_char == "." else "."
        if core.count(dec_char) != 1:
            raise ParseFailure(f"inconsistent separators in {raw!r}", raw)
        body, frac = core.split(dec_char)
        if not frac.isdigit() or not frac:
            raise ParseFailure(f"inconsistent separators in {raw!r}", raw)
        digits = check_groups(body, thou_char) + frac
        scale = len(frac)
    elif dots + commas == 1:
        sep = "." if dots else ","
        before, after = core.split(sep)
        if not after.isdigit() or not after:
            raise ParseFailure(f"inconsistent separators in {raw!r}", raw)
        if len(after) == 3 and 1 <= len(before) <= 3 and before.isdigit() and before != "0":
            digits, scale = before + after, 0
        else:
            if before and not before.isdigit():
                raise ParseFailure(f"inconsistent separators in {raw!r}", raw)
            digits, scale = (before or "0") + after, len(after)
    elif dots or commas:
        sep = "." if dots else ","
        digits, scale = check_groups(core, sep), 0
    else:
        digits, scale = core, 0

    if scale > MAX_SCALE:
        raise ParseFailure(f"more than {MAX_SCALE} decimal digits in {raw!r}", raw)
    return digits, scale


_ISO_CODE_HEAD = re.compile(r"([A-Za-z]{3})(?![A-Za-z])")
_ISO_CODE_TAIL = re.compile(r"(?<![A-Za-z])([A-Za-z]{3})$")


def parse_money(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> MonetaryAmount:
    s = raw.strip()
    if not s:
        raise ParseFailure(f"no digits in {raw!r}", raw)

    negative = False
    if s.startswith("(") and s.endswith(")"):
        negative = True
        s = s[1:-1].strip()

    currency = None
    kept = []
    for ch in s:
        if unicodedata.category(ch) == "Sc":
            if currency is None:
                currency = CURRENCY_SYMBOLS.get(ch, CURRENCY_UNKNOWN)
        else:
            kept.append(ch)
    s = "".join(kept).strip()

    if m := _ISO_CODE_HEAD.match(s):
        if currency is None:
            currency = m.group(1).upper()
        s = s[m.end():].strip()
    if m := _ISO_CODE_TAIL.search(s):
        if currency is None:
            currency = m.group(1).upper()
        s = s[:m.start()].strip()

    if s.startswith("-"):
        negative = True
        s = s[1:].strip()
    elif s.startswith("+"):
        s = s[1:].strip()

    digits, scale = _split_grouped(s, raw)
    minor = int(digits)
    if negative:
        minor = -minor
    return MonetaryAmount(minor, scale, currency or policy.default_currency)


def parse_quantity(raw: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> Quantity:
    s = raw.strip()
    if s.endswith("%"):
        s = s[:-1].strip()
    negative = False
    if s.startswith("-"):
        negative = True
        s = s[1:].strip()
    elif s.startswith("+"):
        s = s[1:].strip()
    digits, scale = _split_grouped(s, raw)
    minor = int(digits)
    return Quantity(-minor if negative else minor, scale)
