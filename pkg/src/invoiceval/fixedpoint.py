"""Exact scaled-integer decimal arithmetic.

Money and quantity values are (minor_units, scale) pairs meaning
minor_units / 10**scale. All comparisons and residuals are computed in
integer or rational arithmetic; binary floating point is never involved,
so arithmetic identities over these values hold exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction

MAX_SCALE = 6

_DECIMAL_RE = re.compile(r"([+-]?)(\d+)(?:\.(\d+))?")


def rescale_exact(minor: int, scale: int, to_scale: int) -> int:
    """Rescale to a finer scale. Requires to_scale >= scale."""
    if to_scale < scale:
        raise ValueError("rescale_exact cannot reduce precision")
    return minor * 10 ** (to_scale - scale)


def rescale_half_up(minor: int, scale: int, to_scale: int) -> int:
    """Rescale to any scale, rounding half away from zero when precision drops."""
    if to_scale >= scale:
        return minor * 10 ** (to_scale - scale)
    factor = 10 ** (scale - to_scale)
    q, r = divmod(abs(minor), factor)
    if 2 * r >= factor:
        q += 1
    return q if minor >= 0 else -q


def as_fraction(minor: int, scale: int) -> Fraction:
    return Fraction(minor, 10 ** scale)


def add_scaled(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    """Exact sum of two (minor, scale) pairs at the coarser common scale."""
    scale = max(a[1], b[1])
    return (rescale_exact(a[0], a[1], scale) + rescale_exact(b[0], b[1], scale),
            scale)


def sub_scaled(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    scale = max(a[1], b[1])
    return (rescale_exact(a[0], a[1], scale) - rescale_exact(b[0], b[1], scale),
            scale)


def format_decimal(minor: int, scale: int) -> str:
    """Canonical decimal string with exactly `scale` fraction digits."""
    sign = "-" if minor < 0 else ""
    magnitude = abs(minor)
    if scale == 0:
        return f"{sign}{magnitude}"
    whole, frac = divmod(magnitude, 10 ** scale)
    return f"{sign}{whole}.{frac:0{scale}d}"


def parse_decimal_string(text: str) -> tuple[int, int]:
    """Parse a canonical decimal string ("-12.50") into (minor, scale).

    This is the strict reader for canonical record files; locale-tolerant
    parsing lives in invoiceval.normalize.
    """
    m = _DECIMAL_RE.fullmatch(text.strip())
    if m is None:
        raise ValueError(f"not a canonical decimal: {text!r}")
    sign, whole, frac = m.groups()
    frac = frac or ""
    if len(frac) > MAX_SCALE:
        raise ValueError(f"more than {MAX_SCALE} decimal digits: {text!r}")
    minor = int(whole + frac) if whole + frac else 0
    if sign == "-":
        minor = -minor
    return minor, len(frac)


def round_half_up(value: Fraction) -> int:
    """Round a non-negative rational half-up to the nearest integer."""
    if value < 0:
        raise ValueError("round_half_up expects a non-negative value")
    whole, rem = divmod(value.numerator, value.denominator)
    return whole + (1 if 2 * rem >= value.denominator else 0)
