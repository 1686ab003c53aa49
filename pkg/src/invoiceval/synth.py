"""Seeded synthetic invoices and controlled error injection.

The generator builds fully-populated invoices whose arithmetic identities
hold exactly at tolerance zero by construction: line totals are the
rounded quantity x unit-price products, net is their sum, tax lines are
computed per rate, and gross is net + tax + roundoff. Within one invoice,
descriptions, unit prices, and line totals are pairwise distinct so that
row alignment of any injected variant is unambiguous.

The injector mutates a copy of the ground truth and records, per error,
the outcome class the evaluator must report and the exact contribution to
each consistency-rule residual. Expected corpus metrics then come from
pure counting over those ledgers (expected_report) with no dependency on
the matcher, which is what makes the ledger an independent oracle for the
whole pipeline. Targets are drawn from disjoint per-kind pools through
per-kind seeded shuffles, so growing one error count never reshuffles or
steals the targets of another: metrics degrade monotonically along
growing error specs.
"""

from __future__ import annotations

import dataclasses
import datetime
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .config import EvalConfig
from .consistency import RuleStatus
from .corpus import dump_report_json, invoice_to_dict
from .fixedpoint import rescale_half_up
from .matching import MatchClass
from .normalize import normalize_text
from .schema import (ABSENT, CanonicalInvoice, Date, DateValue, DocumentMeta,
                     FieldValue, Identifier, LineItem, Money, MonetaryAmount,
                     Qty, Quantity, TaxLine, Text, is_absent)

ERROR_KINDS = ("drop_field", "perturb_money", "perturb_date", "corrupt_text",
               "drop_row", "duplicate_row", "spurious_field")

_SUPPLIERS = (
    ("Nordwind Stahlbau GmbH", "Hafenstrasse 12", "Hamburg", "DE"),
    ("Brightline Office Supplies Ltd", "14 Corn Exchange Street", "Leeds", "GB"),
    ("Cedar Creek Logistics Inc", "4820 Maple Avenue", "Columbus", "US"),
    ("Vektor Antriebstechnik AG", "Industriering 7", "Stuttgart", "DE"),
    ("Atlas Packaging Corp", "901 Harbor Boulevard", "Oakland", "US"),
    ("Greenfield Catering Services", "22 Orchard Lane", "Bristol", "GB"),
    ("Helios Solarmontage GmbH", "Sonnenallee 88", "Dresden", "DE"),
    ("Pinnacle IT Consulting LLC", "310 Birch Street", "Denver", "US"),
    ("Marlin Print and Media Ltd", "5 Dockside Row", "Glasgow", "GB"),
    ("Quellwasser Getraenke KG", "Brunnenweg 3", "Mainz", "DE"),
    ("Sierra Tooling Works Inc", "77 Foundry Road", "Reno", "US"),
    ("Kastanie Moebelwerk GmbH", "Lindenplatz 19", "Kassel", "DE"),
)

_BUYERS = (
    ("Meridian Retail Group", "250 Market Square", "Manchester"),
    ("Walther und Sohn KG", "Bergstrasse 41", "Bonn"),
    ("Lakeshore Clinics LLC", "18 Fountain Plaza", "Madison"),
    ("Orbis Event Management", "9 Castle Yard", "York"),
    ("Tannenhof Hotelbetriebe", "Waldweg 5", "Freiburg"),
    ("Crestview Schools Trust", "1200 Prairie Drive", "Topeka"),
    ("Delta Marine Services", "36 Quayside Walk", "Portsmouth"),
    ("Feldmann Agrarhandel", "Muehlenstrasse 27", "Rostock"),
    ("Ironbridge Fabrication Co", "450 Smelter Row", "Pittsburgh"),
    ("Aurora Dental Partners", "63 Crescent Parade", "Brighton"),
)

_PRODUCTS = (
    "steel mounting bracket", "annual maintenance contract",
    "thermal transfer labels", "industrial vacuum pump",
    "ergonomic desk chair", "fiber optic patch cable",
    "stainless hex bolts", "warehouse shelving unit",
    "colour laser toner", "hydraulic hose assembly",
    "safety goggles pack", "conference room projector",
    "pallet wrapping film", "brushless servo motor",
    "granite composite sink", "external audit service",
    "cloud backup subscription", "forklift inspection visit",
    "acoustic wall panels", "nitrile gloves carton",
    "beverage cooler rental", "signage vinyl roll",
    "network switch rackmount", "espresso machine descaler",
)

_TERMS = (("Net 30", 30), ("Net 14", 14), ("Net 60", 60), ("Due on receipt", 0))

_RATE_POOLS = {"EUR": (19, 7), "GBP": (20, 5), "USD": (10, 6)}

_OPTIONAL_FIELDS = ("invoice.payment_terms", "bill_to.buyer_tax_id",
                    "supplier.bank_account")

_SENTINELS = "0123456789#@&*+=~"


class InfeasibleSpecError(ValueError):
    """The error spec asks for more targets than the invoice provides."""


@dataclass(frozen=True)
class GenConfig:
    min_lines: int = 1
    max_lines: int = 5
    language: Optional[str] = None
    currency: Optional[str] = None
    template_id: Optional[str] = None
    min_tax_rates: int = 1
    max_tax_rates: int = 2
    allow_absent_optional: bool = False


def _money(minor: int, currency: str) -> Money:
    return Money(MonetaryAmount(minor, 2, currency))


def generate_invoice(seed: int, cfg: GenConfig = GenConfig(),
                     doc_id: Optional[str] = None
                     ) -> tuple[CanonicalInvoice, DocumentMeta]:
    rng = random.Random(seed)
    currency = cfg.currency or rng.choice(("EUR", "USD", "GBP"))
    language = cfg.language or rng.choice(("en", "de"))
    supplier_idx = rng.randrange(len(_SUPPLIERS))
    buyer_idx = rng.randrange(len(_BUYERS))
    s_name, s_street, s_city, s_country = _SUPPLIERS[supplier_idx]
    b_name, b_street, b_city = _BUYERS[buyer_idx]

    issue = datetime.date(2022, 1, 1) + datetime.timedelta(days=rng.randrange(1461))
    terms, term_days = rng.choice(_TERMS)
    due = issue + datetime.timedelta(days=term_days)
    invoice_number = f"INV-{issue.year}-{rng.randrange(10 ** 6):06d}"

    n_lines = rng.randint(cfg.min_lines, cfg.max_lines)
    products = rng.sample(_PRODUCTS, n_lines)
    rate_pool = _RATE_POOLS[currency] if currency in _RATE_POOLS else (19, 7)
    n_rates = min(rng.randint(cfg.min_tax_rates, cfg.max_tax_rates),
                  len(rate_pool), n_lines)
    rates = sorted(rng.sample(rate_pool, n_rates))

    lines = []
    used_prices: set[int] = set()
    used_totals: set[int] = set()
    for description in products:
        style = rng.randrange(3)
        if style == 0:
            qty = Quantity(rng.randint(1, 12), 0)
        elif style == 1:
            qty = Quantity(rng.randint(5, 500), 1)
        else:
            qty = Quantity(rng.randint(25, 2500), 2)
        # Distinct prices and totals keep row alignment of perturbed copies
        # unambiguous.
        while True:
            price_minor = rng.randint(50, 99999)
            total_minor = rescale_half_up(qty.minor_units * price_minor,
                                          qty.scale + 2, 2)
            if price_minor not in used_prices and total_minor not in used_totals \
                    and total_minor > 0:
                break
        used_prices.add(price_minor)
        used_totals.add(total_minor)
        rate = rates[rng.randrange(len(rates))]
        lines.append(LineItem(
            description=Text(description),
            quantity=Qty(qty),
            unit_price=_money(price_minor, currency),
            line_total=_money(total_minor, currency),
            tax_rate=Qty(Quantity(rate, 0)),
        ))

    tax_lines = []
    tax_total_minor = 0
    for rate in rates:
        base_minor = sum(row.line_total.value.minor_units for row in lines
                         if row.tax_rate.value.minor_units == rate
                         and row.tax_rate.value.scale == 0)
        if base_minor == 0:
            continue
        amount_minor = rescale_half_up(base_minor * rate, 4, 2)
        tax_total_minor += amount_minor
        tax_lines.append(TaxLine(
            rate=Qty(Quantity(rate, 0)),
            taxable_base=_money(base_minor, currency),
            tax_amount=_money(amount_minor, currency),
        ))

    net_minor = sum(row.line_total.value.minor_units for row in lines)
    pre_round = net_minor + tax_total_minor
    roundoff_minor = (-pre_round) % 5 if rng.random() < 0.3 else 0
    gross_minor = pre_round + roundoff_minor

    country = s_country
    supplier_tax_id = f"{country}{rng.randrange(10 ** 9):09d}"
    bank_account = f"{country}{rng.randrange(10 ** 18):018d}"
    buyer_tax_id = f"{country}{rng.randrange(10 ** 9):09d}"

    bill_to: dict[str, FieldValue] = {
        "buyer_name": Text(b_name),
        "buyer_address": Text(f"{b_street}, {b_city}"),
        "buyer_tax_id": Identifier(buyer_tax_id),
    }
    supplier: dict[str, FieldValue] = {
        "seller_name": Text(s_name),
        "seller_address": Text(f"{s_street}, {s_city}"),
        "supplier_tax_id": Identifier(supplier_tax_id),
        "bank_account": Identifier(bank_account),
    }
    invoice: dict[str, FieldValue] = {
        "invoice_number": Identifier(invoice_number),
        "issue_date": Date(DateValue(issue.year, issue.month, issue.day)),
        "due_date": Date(DateValue(due.year, due.month, due.day)),
        "payment_terms": Text(terms),
        "currency": Identifier(currency),
        "net_amount": _money(net_minor, currency),
        "tax_amount": _money(tax_total_minor, currency),
        "roundoff_amount": _money(roundoff_minor, currency),
        "gross_amount": _money(gross_minor, currency),
    }

    absence_draws = {name: rng.random() < 0.4 for name in _OPTIONAL_FIELDS}
    if cfg.allow_absent_optional:
        for path, absent in absence_draws.items():
            if absent:
                ent, name = path.split(".", 1)
                {"invoice": invoice, "bill_to": bill_to,
                 "supplier": supplier}[ent].pop(name, None)

    source_kind = rng.choice(("digital", "scanned"))
    template_variant = rng.randrange(3)
    template_split = "unseen" if rng.random() < 0.25 else "seen"
    page_count = rng.randint(1, 3)

    meta = DocumentMeta(
        doc_id=doc_id or f"synth-{seed:012d}",
        source_kind=source_kind,
        language=language,
        vendor_id=f"vendor-{supplier_idx:02d}",
        template_id=cfg.template_id or f"tmpl-{supplier_idx:02d}-{template_variant}",
        template_split=template_split,
        page_count=page_count,
    )
    record = CanonicalInvoice.build(bill_to=bill_to, supplier=supplier,
                                    invoice=invoice, line_items=lines,
                                    tax_lines=tax_lines)
    return record, meta


@dataclass(frozen=True)
class ErrorSpec:
    seed: int
    counts: Mapping[str, int] = field(default_factory=dict)
    money_delta_minor: tuple[int, int] = (2, 900)
    date_delta_days: tuple[int, int] = (1, 45)
    text_edits: tuple[int, int] = (1, 4)
    within_tolerance: frozenset = frozenset()

    def __post_init__(self):
        unknown = set(self.counts) - set(ERROR_KINDS)
        if unknown:
            raise ValueError(f"unknown error kinds: {sorted(unknown)}")
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("error counts must be non-negative")
        object.__setattr__(self, "within_tolerance", frozenset(self.within_tolerance))

    def count(self, kind: str) -> int:
        return self.counts.get(kind, 0)


@dataclass(frozen=True)
class LedgerEntry:
    target: str
    kind: str
    expected_class: Optional[MatchClass] = None
    row_effect: Optional[str] = None
    rule_deltas: Mapping[str, Fraction] = field(default_factory=dict)
    detail: str = ""


@dataclass(frozen=True)
class ErrorLedger:
    doc_id: str
    entries: tuple[LedgerEntry, ...]
    expected_rules: Mapping[str, RuleStatus]
    header_present: int
    header_absent: int
    gt_rows: int
    gt_tax_rows: int


_MONEY_SIGN = {"invoice.net_amount": 1, "invoice.tax_amount": 1,
               "invoice.roundoff_amount": 1, "invoice.gross_amount": -1}


def _header_value(entities: Mapping[str, dict], path: str) -> FieldValue:
    ent, name = path.split(".", 1)
    return entities[ent].get(name, ABSENT)


def _pick(pool: Sequence, count: int, seed: int, kind: str) -> list:
    if count > len(pool):
        raise InfeasibleSpecError(
            f"{kind}: requested {count} targets, only {len(pool)} available")
    shuffled = list(pool)
    random.Random(f"{seed}:{kind}").shuffle(shuffled)
    return shuffled[:count]


def inject_errors(gt: CanonicalInvoice, spec: ErrorSpec,
                  cfg: EvalConfig) -> tuple[CanonicalInvoice, ErrorLedger]:
    entities = {"bill_to": dict(gt.bill_to), "supplier": dict(gt.supplier),
                "invoice": dict(gt.invoice)}
    policy = cfg.normalization
    match_cfg = cfg.matching
    consistency_tol = cfg.consistency.tolerance_fraction

    text_pool = [p for p in ("bill_to.buyer_name", "bill_to.buyer_address",
                             "supplier.seller_name", "supplier.seller_address",
                             "invoice.payment_terms")
                 if not is_absent(_header_value(entities, p))]
    money_pool = [p for p in _MONEY_SIGN if not is_absent(_header_value(entities, p))]
    date_pool = ["invoice.issue_date", "invoice.due_date"]
    drop_pool = [p for p in ("invoice.invoice_number", "bill_to.buyer_tax_id",
                             "supplier.supplier_tax_id", "supplier.bank_account",
                             "invoice.currency")
                 if not is_absent(_header_value(entities, p))]
    spurious_pool = [p for p in _OPTIONAL_FIELDS
                     if is_absent(_header_value(entities, p))]

    n_rows = len(gt.line_items)
    row_order = _pick(list(range(n_rows)), n_rows, spec.seed, "rows")
    n_drop = spec.count("drop_row")
    n_dup = spec.count("duplicate_row")
    if n_drop + n_dup > n_rows:
        raise InfeasibleSpecError(
            f"drop_row+duplicate_row: requested {n_drop + n_dup} distinct rows, "
            f"only {n_rows} available")
    dropped_rows = sorted(row_order[:n_drop])
    duplicated_rows = sorted(row_order[n_rows - n_dup:]) if n_dup else []

    targets = {
        "drop_field": _pick(drop_pool, spec.count("drop_field"), spec.seed, "drop_field"),
        "perturb_money": _pick(money_pool, spec.count("perturb_money"), spec.seed,
                               "perturb_money"),
        "perturb_date": _pick(date_pool, spec.count("perturb_date"), spec.seed,
                              "perturb_date"),
        "corrupt_text": _pick(text_pool, spec.count("corrupt_text"), spec.seed,
                              "corrupt_text"),
        "spurious_field": _pick(spurious_pool, spec.count("spurious_field"),
                                spec.seed, "spurious_field"),
    }

    entries: list[LedgerEntry] = []
    rule_deltas: dict[str, Fraction] = {"R1_header_sum": Fraction(0),
                                        "R3_lines_vs_net": Fraction(0),
                                        "R4_tax_lines_vs_tax": Fraction(0)}

    def set_header(path: str, value: FieldValue) -> None:
        ent, name = path.split(".", 1)
        if is_absent(value):
            entities[ent].pop(name, None)
        else:
            entities[ent][name] = value

    for path in targets["drop_field"]:
        set_header(path, ABSENT)
        entries.append(LedgerEntry(path, "drop_field", MatchClass.MISSING))

    rng_money = random.Random(f"{spec.seed}:perturb_money:delta")
    for path in targets["perturb_money"]:
        amount = _header_value(entities, path).value
        tolerance = max(match_cfg.money_abs_fraction,
                        match_cfg.money_rel_fraction * abs(amount.as_fraction()))
        tol_minor = int(tolerance * 10 ** amount.scale)  # floor: largest in-window delta
        draw = rng_money.randint(*spec.money_delta_minor)
        if "perturb_money" in spec.within_tolerance:
            if tol_minor < 1:
                raise InfeasibleSpecError(
                    f"perturb_money within tolerance impossible at {path}")
            delta = max(1, min(draw, tol_minor))
            expected = MatchClass.CORRECT_RELAXED
        else:
            delta = max(draw, tol_minor + 1)
            expected = MatchClass.INCORRECT
        signed = delta * _MONEY_SIGN[path]
        set_header(path, Money(MonetaryAmount(amount.minor_units + signed,
                                              amount.scale, amount.currency)))
        signed_fraction = Fraction(signed, 10 ** amount.scale)
        # R1 residual = d(net) + d(tax) + d(roundoff) - d(gross)
        r1 = signed_fraction if path != "invoice.gross_amount" else -signed_fraction
        deltas = {"R1_header_sum": r1}
        if path == "invoice.net_amount":
            deltas["R3_lines_vs_net"] = -signed_fraction
        if path == "invoice.tax_amount":
            deltas["R4_tax_lines_vs_tax"] = -signed_fraction
        for rule, value in deltas.items():
            rule_deltas[rule] += value
        entries.append(LedgerEntry(path, "perturb_money", expected,
                                   rule_deltas=deltas,
                                   detail=f"delta {signed} minor units"))

    rng_date = random.Random(f"{spec.seed}:perturb_date:delta")
    for path in targets["perturb_date"]:
        date = _header_value(entities, path).value
        draw = rng_date.randint(*spec.date_delta_days)
        if "perturb_date" in spec.within_tolerance:
            if match_cfg.date_tol_days < 1:
                raise InfeasibleSpecError(
                    f"perturb_date within tolerance impossible at {path}")
            delta = min(draw, match_cfg.date_tol_days)
            expected = MatchClass.CORRECT_RELAXED
        else:
            delta = max(draw, match_cfg.date_tol_days + 1)
            expected = MatchClass.INCORRECT
        shifted = datetime.date.fromordinal(date.ordinal() + delta)
        set_header(path, Date(DateValue(shifted.year, shifted.month, shifted.day)))
        entries.append(LedgerEntry(path, "perturb_date", expected,
                                   detail=f"shifted {delta} day(s)"))

    rng_text = random.Random(f"{spec.seed}:corrupt_text:edits")
    threshold = match_cfg.text_threshold_fraction
    for path in targets["corrupt_text"]:
        raw = _header_value(entities, path).value
        normalized = normalize_text(raw, policy)
        if len(normalized) != len(raw):
            raise InfeasibleSpecError(
                f"corrupt_text target {path} does not normalize length-stably")
        positions = [i for i, ch in enumerate(raw) if ch != " "]
        k = min(rng_text.randint(*spec.text_edits), len(positions))
        chosen = sorted(rng_text.sample(positions, k))
        sentinel = next((c for c in _SENTINELS if c not in normalized), None)
        if sentinel is None:
            raise InfeasibleSpecError(f"no sentinel character available for {path}")
        chars = list(raw)
        for i in chosen:
            chars[i] = sentinel
        set_header(path, Text("".join(chars)))
        similarity = Fraction(len(normalized) - k, len(normalized))
        expected = (MatchClass.CORRECT_RELAXED if similarity >= threshold
                    else MatchClass.INCORRECT)
        entries.append(LedgerEntry(path, "corrupt_text", expected,
                                   detail=f"{k} edit(s), similarity {similarity}"))

    rng_spurious = random.Random(f"{spec.seed}:spurious_field:value")
    for path in targets["spurious_field"]:
        if path == "invoice.payment_terms":
            value: FieldValue = Text("Net 45")
        else:
            value = Identifier(f"XX{rng_spurious.randrange(10 ** 9):09d}")
        set_header(path, value)
        entries.append(LedgerEntry(path, "spurious_field", MatchClass.SPURIOUS))

    pred_rows = [row for i, row in enumerate(gt.line_items) if i not in dropped_rows]
    for idx in dropped_rows:
        total = gt.line_items[idx].line_total.value
        rule_deltas["R3_lines_vs_net"] -= total.as_fraction()
        entries.append(LedgerEntry(f"row:{idx}", "drop_row", row_effect="omission",
                                   rule_deltas={"R3_lines_vs_net": -total.as_fraction()}))
    for idx in duplicated_rows:
        pred_rows.append(gt.line_items[idx])
        total = gt.line_items[idx].line_total.value
        rule_deltas["R3_lines_vs_net"] += total.as_fraction()
        entries.append(LedgerEntry(f"row:{idx}", "duplicate_row",
                                   row_effect="duplication",
                                   rule_deltas={"R3_lines_vs_net": total.as_fraction()}))

    remaining = n_rows - n_drop
    expected_rules = {
        "R1_header_sum": (RuleStatus.FAIL
                          if abs(rule_deltas["R1_header_sum"]) > consistency_tol
                          else RuleStatus.PASS),
        "R2_line_arithmetic": (RuleStatus.NOT_APPLICABLE if remaining + n_dup == 0
                               else RuleStatus.PASS),
        "R3_lines_vs_net": (RuleStatus.NOT_APPLICABLE if remaining + n_dup == 0
                            else (RuleStatus.FAIL
                                  if abs(rule_deltas["R3_lines_vs_net"]) > consistency_tol
                                  else RuleStatus.PASS)),
        "R4_tax_lines_vs_tax": (RuleStatus.NOT_APPLICABLE if not gt.tax_lines
                                else (RuleStatus.FAIL
                                      if abs(rule_deltas["R4_tax_lines_vs_tax"]) > consistency_tol
                                      else RuleStatus.PASS)),
    }

    header_present = sum(1 for _, value in gt.iter_header() if not is_absent(value))
    prediction = CanonicalInvoice.build(
        bill_to=entities["bill_to"], supplier=entities["supplier"],
        invoice=entities["invoice"], line_items=pred_rows,
        tax_lines=gt.tax_lines)
    ledger = ErrorLedger(
        doc_id="", entries=tuple(entries), expected_rules=expected_rules,
        header_present=header_present, header_absent=16 - header_present,
        gt_rows=n_rows, gt_tax_rows=len(gt.tax_lines))
    return prediction, ledger


@dataclass(frozen=True)
class ExpectedMetrics:
    """Corpus-level counts derived from ledgers alone."""

    documents: int
    class_counts: Mapping[MatchClass, int]
    gt_rows: int
    pred_rows: int
    matched_rows: int
    omissions: int
    duplications: int
    verdict_counts: Mapping[RuleStatus, int]
    r2_failures: int
    r2_applicable: int

    @property
    def annotated(self) -> int:
        return sum(self.class_counts.get(c, 0) for c in
                   (MatchClass.CORRECT_EXACT, MatchClass.CORRECT_RELAXED,
                    MatchClass.INCORRECT, MatchClass.MISSING))

    @property
    def accuracy(self) -> Optional[Fraction]:
        correct = (self.class_counts.get(MatchClass.CORRECT_EXACT, 0)
                   + self.class_counts.get(MatchClass.CORRECT_RELAXED, 0))
        return Fraction(correct, self.annotated) if self.annotated else None

    @property
    def completeness(self) -> Fraction:
        return Fraction(self.matched_rows, self.gt_rows) if self.gt_rows else Fraction(1)

    @property
    def pass_rate_value(self) -> Optional[Fraction]:
        passed = self.verdict_counts.get(RuleStatus.PASS, 0)
        failed = self.verdict_counts.get(RuleStatus.FAIL, 0)
        return Fraction(passed, passed + failed) if passed + failed else None

    @property
    def math_error_rate(self) -> Optional[Fraction]:
        if not self.r2_applicable:
            return None
        return Fraction(self.r2_failures, self.r2_applicable)


def expected_report(ledgers: Sequence[ErrorLedger]) -> ExpectedMetrics:
    counts = {cls: 0 for cls in MatchClass}
    gt_rows = pred_rows = matched = omissions = duplications = 0
    verdicts = {status: 0 for status in RuleStatus}
    r2_failures = r2_applicable = 0

    for ledger in ledgers:
        annotated = ledger.header_present + 5 * ledger.gt_rows + 3 * ledger.gt_tax_rows
        doc_counts = {cls: 0 for cls in MatchClass}
        doc_counts[MatchClass.CORRECT_EXACT] = annotated
        doc_counts[MatchClass.BOTH_ABSENT] = ledger.header_absent
        doc_matched = ledger.gt_rows
        doc_pred_rows = ledger.gt_rows

        for entry in ledger.entries:
            if entry.row_effect == "omission":
                doc_counts[MatchClass.CORRECT_EXACT] -= 5
                doc_counts[MatchClass.MISSING] += 5
                doc_matched -= 1
                doc_pred_rows -= 1
                omissions += 1
            elif entry.row_effect == "duplication":
                doc_counts[MatchClass.SPURIOUS] += 5
                doc_pred_rows += 1
                duplications += 1
            elif entry.expected_class is MatchClass.SPURIOUS:
                doc_counts[MatchClass.BOTH_ABSENT] -= 1
                doc_counts[MatchClass.SPURIOUS] += 1
            else:
                doc_counts[MatchClass.CORRECT_EXACT] -= 1
                doc_counts[entry.expected_class] += 1

        for cls, n in doc_counts.items():
            counts[cls] += n
        gt_rows += ledger.gt_rows
        pred_rows += doc_pred_rows
        matched += doc_matched

        statuses = list(ledger.expected_rules.values())
        if RuleStatus.FAIL in statuses:
            verdicts[RuleStatus.FAIL] += 1
        elif RuleStatus.PASS in statuses:
            verdicts[RuleStatus.PASS] += 1
        else:
            verdicts[RuleStatus.NOT_APPLICABLE] += 1
        r2 = ledger.expected_rules["R2_line_arithmetic"]
        if r2 is not RuleStatus.NOT_APPLICABLE:
            r2_applicable += 1
            if r2 is RuleStatus.FAIL:
                r2_failures += 1

    return ExpectedMetrics(
        documents=len(ledgers), class_counts=counts,
        gt_rows=gt_rows, pred_rows=pred_rows, matched_rows=matched,
        omissions=omissions, duplications=duplications,
        verdict_counts=verdicts, r2_failures=r2_failures,
        r2_applicable=r2_applicable)


# Corpus writer -----------------------------------------------------------

def _ledger_to_json(ledger: ErrorLedger) -> dict:
    return {
        "doc_id": ledger.doc_id,
        "header_present": ledger.header_present,
        "header_absent": ledger.header_absent,
        "gt_rows": ledger.gt_rows,
        "gt_tax_rows": ledger.gt_tax_rows,
        "expected_rules": {k: v.value for k, v in ledger.expected_rules.items()},
        "entries": [
            {
                "target": e.target,
                "kind": e.kind,
                "expected_class": e.expected_class.value if e.expected_class else None,
                "row_effect": e.row_effect,
                "rule_deltas": {k: str(v) for k, v in sorted(e.rule_deltas.items())},
                "detail": e.detail,
            }
            for e in ledger.entries
        ],
    }


def write_synthetic_corpus(out_dir, n_docs: int, seed: int, cfg: EvalConfig,
                           gen: GenConfig = GenConfig(),
                           spec: Optional[ErrorSpec] = None,
                           method_name: str = "synthetic") -> dict:
    """Write manifest + ground truth + predictions + ledger under out_dir."""
    if n_docs < 1:
        raise ValueError("a corpus needs at least one document")
    out = Path(out_dir)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    (out / "predictions" / method_name).mkdir(parents=True, exist_ok=True)

    documents = []
    ledgers = []
    error_count = 0
    for i in range(n_docs):
        doc_seed = seed * 1_000_003 + i
        doc_id = f"doc-{i:04d}"
        gt, meta = generate_invoice(doc_seed, gen, doc_id=doc_id)
        if spec is None:
            pred, ledger = gt, None
        else:
            doc_spec = dataclasses.replace(spec, seed=spec.seed * 1_000_003 + i)
            pred, ledger = inject_errors(gt, doc_spec, cfg)
            ledger = dataclasses.replace(ledger, doc_id=doc_id)
            ledgers.append(ledger)
            error_count += len(ledger.entries)

        gt_rel = f"gt/{doc_id}.json"
        pred_rel = f"predictions/{method_name}/{doc_id}.json"
        (out / gt_rel).write_text(
            json.dumps(invoice_to_dict(gt), ensure_ascii=False, indent=2,
                       sort_keys=True) + "\n", encoding="utf-8")
        (out / pred_rel).write_text(
            json.dumps(invoice_to_dict(pred), ensure_ascii=False, indent=2,
                       sort_keys=True) + "\n", encoding="utf-8")
        documents.append({
            "doc_id": doc_id,
            "gt_path": gt_rel,
            "predictions": {method_name: pred_rel},
            "meta": {
                "source_kind": meta.source_kind,
                "language": meta.language,
                "vendor_id": meta.vendor_id,
                "template_id": meta.template_id,
                "template_split": meta.template_split,
                "page_count": meta.page_count,
            },
        })

    manifest = {"corpus_id": f"synthetic-{seed}", "documents": documents,
                "adapters": {method_name: "canonical"}}
    (out / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    if ledgers:
        (out / "ledger.json").write_text(
            dump_report_json({"seed": seed,
                              "documents": [_ledger_to_json(l) for l in ledgers]}),
            encoding="utf-8")
    return {"documents": n_docs, "errors": error_count,
            "manifest": str(out / "manifest.json")}
