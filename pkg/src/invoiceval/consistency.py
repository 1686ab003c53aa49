"""Arithmetic business-rule checks over one extracted invoice.

Four rules, evaluated in fixed order:

  R1_header_sum      net_amount + tax_amount + roundoff_amount = gross_amount
                     (an absent roundoff counts as zero)
  R2_line_arithmetic quantity x unit_price = line_total per line, the product
                     rounded half-up to the line total's scale
  R3_lines_vs_net    sum of line totals = net_amount
  R4_tax_lines_vs_tax sum of tax-line amounts = header tax_amount

Residuals are exact decimals; a rule passes when |residual| <= tolerance,
and is not applicable when a required operand is absent. The document
verdict fails on any failing rule, passes when nothing failed and at least
one rule applied, and is not applicable otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .fixedpoint import add_scaled, as_fraction, rescale_half_up, sub_scaled
from .schema import (CURRENCY_UNKNOWN, CanonicalInvoice, Money, Quantity,
                     is_absent)

RULE_IDS = ("R1_header_sum", "R2_line_arithmetic", "R3_lines_vs_net",
            "R4_tax_lines_vs_tax")


class RuleStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


class CurrencyMixtureError(ValueError):
    """Header amounts carry different known currencies; the sum is undefined."""


@dataclass(frozen=True)
class ConsistencyResult:
    rule_id: str
    status: RuleStatus
    residual: Optional[Quantity]
    detail: str

    def residual_fraction(self) -> Optional[Fraction]:
        if self.residual is None:
            return None
        return self.residual.as_fraction()


@dataclass(frozen=True)
class InvoiceCheck:
    results: tuple[ConsistencyResult, ...]
    verdict: RuleStatus

    def rule(self, rule_id: str) -> ConsistencyResult:
        for result in self.results:
            if result.rule_id == rule_id:
                return result
        raise KeyError(rule_id)


def _money(inv: CanonicalInvoice, name: str):
    value = inv.invoice.get(name)
    if value is None or is_absent(value):
        return None
    return value.value


def _residual_qty(minor: int, scale: int) -> Quantity:
    return Quantity(minor, scale)


def _within(minor: int, scale: int, tol: Fraction) -> bool:
    return abs(as_fraction(minor, scale)) <= tol


def check_r1_header(inv: CanonicalInvoice, tol: Fraction) -> ConsistencyResult:
    net = _money(inv, "net_amount")
    tax = _money(inv, "tax_amount")
    gross = _money(inv, "gross_amount")
    roundoff = _money(inv, "roundoff_amount")
    if net is None or tax is None or gross is None:
        return ConsistencyResult("R1_header_sum", RuleStatus.NOT_APPLICABLE, None,
                                 "net, tax, or gross amount absent")

    known = {m.currency for m in (net, tax, gross, roundoff)
             if m is not None and m.currency != CURRENCY_UNKNOWN}
    if len(known) > 1:
        raise CurrencyMixtureError(
            f"header amounts mix currencies: {', '.join(sorted(known))}")

    total = add_scaled((net.minor_units, net.scale), (tax.minor_units, tax.scale))
    if roundoff is not None:
        total = add_scaled(total, (roundoff.minor_units, roundoff.scale))
    minor, scale = sub_scaled(total, (gross.minor_units, gross.scale))
    status = RuleStatus.PASS if _within(minor, scale, tol) else RuleStatus.FAIL
    return ConsistencyResult("R1_header_sum", status, _residual_qty(minor, scale),
                             "net + tax + roundoff vs gross")


def check_r2_lines(inv: CanonicalInvoice, tol: Fraction) -> ConsistencyResult:
    residuals: list[tuple[int, int, int]] = []  # (index, minor, scale)
    for i, row in enumerate(inv.line_items):
        if is_absent(row.quantity) or is_absent(row.unit_price) or is_absent(row.line_total):
            continue
        qty = row.quantity.value
        price = row.unit_price.value
        total = row.line_total.value
        product_minor = qty.minor_units * price.minor_units
        product_scale = qty.scale + price.scale
        rounded = rescale_half_up(product_minor, product_scale, total.scale)
        residuals.append((i, rounded - total.minor_units, total.scale))

    if not residuals:
        return ConsistencyResult("R2_line_arithmetic", RuleStatus.NOT_APPLICABLE,
                                 None, "no line has quantity, unit price, and total")

    failing = [i for i, minor, scale in residuals if not _within(minor, scale, tol)]
    worst = max(residuals, key=lambda r: abs(as_fraction(r[1], r[2])))
    status = RuleStatus.FAIL if failing else RuleStatus.PASS
    detail = (f"lines failing: {failing}" if failing
              else f"{len(residuals)} line(s) checked")
    return ConsistencyResult("R2_line_arithmetic", status,
                             _residual_qty(worst[1], worst[2]), detail)


def check_r3_lines_vs_net(inv: CanonicalInvoice, tol: Fraction) -> ConsistencyResult:
    net = _money(inv, "net_amount")
    totals = [row.line_total.value for row in inv.line_items
              if not is_absent(row.line_total)]
    if net is None or not totals:
        return ConsistencyResult("R3_lines_vs_net", RuleStatus.NOT_APPLICABLE, None,
                                 "net amount or line totals absent")
    acc = (0, 0)
    for t in totals:
        acc = add_scaled(acc, (t.minor_units, t.scale))
    minor, scale = sub_scaled(acc, (net.minor_units, net.scale))
    status = RuleStatus.PASS if _within(minor, scale, tol) else RuleStatus.FAIL
    return ConsistencyResult("R3_lines_vs_net", status, _residual_qty(minor, scale),
                             f"sum of {len(totals)} line total(s) vs net")


def check_r4_tax_lines(inv: CanonicalInvoice, tol: Fraction) -> ConsistencyResult:
    header_tax = _money(inv, "tax_amount")
    amounts = [row.tax_amount.value for row in inv.tax_lines
               if not is_absent(row.tax_amount)]
    if header_tax is None or not amounts:
        return ConsistencyResult("R4_tax_lines_vs_tax", RuleStatus.NOT_APPLICABLE,
                                 None, "header tax or tax lines absent")
    acc = (0, 0)
    for t in amounts:
        acc = add_scaled(acc, (t.minor_units, t.scale))
    minor, scale = sub_scaled(acc, (header_tax.minor_units, header_tax.scale))
    status = RuleStatus.PASS if _within(minor, scale, tol) else RuleStatus.FAIL
    return ConsistencyResult("R4_tax_lines_vs_tax", status,
                             _residual_qty(minor, scale),
                             f"sum of {len(amounts)} tax line(s) vs header tax")


def check_invoice(inv: CanonicalInvoice, tol: Fraction) -> InvoiceCheck:
    results = (
        check_r1_header(inv, tol),
        check_r2_lines(inv, tol),
        check_r3_lines_vs_net(inv, tol),
        check_r4_tax_lines(inv, tol),
    )
    statuses = [r.status for r in results]
    if RuleStatus.FAIL in statuses:
        verdict = RuleStatus.FAIL
    elif RuleStatus.PASS in statuses:
        verdict = RuleStatus.PASS
    else:
        verdict = RuleStatus.NOT_APPLICABLE
    return InvoiceCheck(results, verdict)


@dataclass(frozen=True)
class PassRateSummary:
    passed: int
    failed: int
    not_applicable: int
    r2_failures: int
    r2_applicable: int

    @property
    def pass_rate(self) -> Optional[Fraction]:
        applicable = self.passed + self.failed
        if applicable == 0:
            return None
        return Fraction(self.passed, applicable)

    @property
    def math_error_rate(self) -> Optional[Fraction]:
        if self.r2_applicable == 0:
            return None
        return Fraction(self.r2_failures, self.r2_applicable)


def pass_rate(checks: Iterable[InvoiceCheck]) -> PassRateSummary:
    passed = failed = not_applicable = 0
    r2_failures = r2_applicable = 0
    for check in checks:
        if check.verdict is RuleStatus.PASS:
            passed += 1
        elif check.verdict is RuleStatus.FAIL:
            failed += 1
        else:
            not_applicable += 1
        r2 = check.rule("R2_line_arithmetic")
        if r2.status is not RuleStatus.NOT_APPLICABLE:
            r2_applicable += 1
            if r2.status is RuleStatus.FAIL:
                r2_failures += 1
    return PassRateSummary(passed, failed, not_applicable, r2_failures, r2_applicable)
