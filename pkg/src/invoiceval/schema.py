"""Canonical invoice data model, field registry, and structural validation.

Every record that enters the evaluator — ground truth or adapted prediction —
is a CanonicalInvoice: three header entities (bill_to, supplier, invoice),
an ordered list of line items, an ordered list of tax lines, and an optional
bounding-box map that is carried through untouched and never scored.

A field is either Absent or a typed value whose tag must agree with the
semantic type the registry declares for its path. The empty string is a
present (and presumably wrong) value, not an absence.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

from .fixedpoint import MAX_SCALE, as_fraction, format_decimal

CURRENCY_UNKNOWN = "UNKNOWN"
_CURRENCY_RE = re.compile(r"[A-Z]{3}")
_ROW_PATH_RE = re.compile(r"(line_items|tax_lines)\[[^\]]*\]\.(\w+)")


class SemanticType(str, Enum):
    TEXT = "text"
    DATE = "date"
    MONEY = "money"
    QUANTITY = "quantity"
    PERCENT = "percent"
    IDENTIFIER = "identifier"


class Entity(str, Enum):
    BILL_TO = "bill_to"
    SUPPLIER = "supplier"
    INVOICE = "invoice"
    LINE_ITEM = "line_item"
    TAX_LINE = "tax_line"


@dataclass(frozen=True, eq=False)
class MonetaryAmount:
    """Exact decimal money: minor_units / 10**scale in `currency`.

    Equality is value equality: {12340, scale 3, EUR} == {1234, scale 2, EUR}.
    """

    minor_units: int
    scale: int
    currency: str = CURRENCY_UNKNOWN

    def __post_init__(self):
        if not 0 <= self.scale <= MAX_SCALE:
            raise ValueError(f"scale {self.scale} outside 0..{MAX_SCALE}")
        if self.currency != CURRENCY_UNKNOWN and not _CURRENCY_RE.fullmatch(self.currency):
            raise ValueError(f"bad currency code {self.currency!r}")

    def normalized(self) -> tuple[int, int]:
        minor, scale = self.minor_units, self.scale
        while scale > 0 and minor % 10 == 0:
            minor //= 10
            scale -= 1
        return minor, scale

    def as_fraction(self) -> Fraction:
        return as_fraction(self.minor_units, self.scale)

    def __eq__(self, other):
        if not isinstance(other, MonetaryAmount):
            return NotImplemented
        return (self.normalized() == other.normalized()
                and self.currency == other.currency)

    def __hash__(self):
        return hash((self.normalized(), self.currency))

    def __str__(self):
        return f"{format_decimal(self.minor_units, self.scale)} {self.currency}"


@dataclass(frozen=True, eq=False)
class Quantity:
    """Exact decimal quantity; same representation as money, no currency."""

    minor_units: int
    scale: int

    def __post_init__(self):
        if not 0 <= self.scale <= MAX_SCALE:
            raise ValueError(f"scale {self.scale} outside 0..{MAX_SCALE}")

    def normalized(self) -> tuple[int, int]:
        minor, scale = self.minor_units, self.scale
        while scale > 0 and minor % 10 == 0:
            minor //= 10
            scale -= 1
        return minor, scale

    def as_fraction(self) -> Fraction:
        return as_fraction(self.minor_units, self.scale)

    def __eq__(self, other):
        if not isinstance(other, Quantity):
            return NotImplemented
        return self.normalized() == other.normalized()

    def __hash__(self):
        return hash(self.normalized())

    def __str__(self):
        return format_decimal(self.minor_units, self.scale)


@dataclass(frozen=True)
class DateValue:
    """A calendar date. Construction is permissive so that validation can
    report malformed dates as data problems; use is_valid() before arithmetic."""

    year: int
    month: int
    day: int

    def is_valid(self) -> bool:
        try:
            datetime.date(self.year, self.month, self.day)
        except ValueError:
            return False
        return True

    def ordinal(self) -> int:
        return datetime.date(self.year, self.month, self.day).toordinal()

    def iso(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Identifier:
    value: str


@dataclass(frozen=True)
class Date:
    value: DateValue


@dataclass(frozen=True)
class Money:
    value: MonetaryAmount


@dataclass(frozen=True)
class Qty:
    value: Quantity


@dataclass(frozen=True)
class Absent:
    pass


ABSENT = Absent()

FieldValue = Union[Text, Identifier, Date, Money, Qty, Absent]


def is_absent(value: FieldValue) -> bool:
    return isinstance(value, Absent)


# Which value tags satisfy each declared semantic type.
_TYPE_TAGS = {
    SemanticType.TEXT: Text,
    SemanticType.DATE: Date,
    SemanticType.MONEY: Money,
    SemanticType.QUANTITY: Qty,
    SemanticType.PERCENT: Qty,
    SemanticType.IDENTIFIER: Identifier,
}


def tag_matches(value: FieldValue, semantic_type: SemanticType) -> bool:
    return isinstance(value, (Absent, _TYPE_TAGS[semantic_type]))


@dataclass(frozen=True)
class LineItem:
    description: FieldValue = ABSENT
    quantity: FieldValue = ABSENT
    unit_price: FieldValue = ABSENT
    line_total: FieldValue = ABSENT
    tax_rate: FieldValue = ABSENT


@dataclass(frozen=True)
class TaxLine:
    rate: FieldValue = ABSENT
    taxable_base: FieldValue = ABSENT
    tax_amount: FieldValue = ABSENT


@dataclass(frozen=True)
class FieldSpec:
    path: str
    entity: Entity
    semantic_type: SemanticType
    in_accuracy: bool = True


# The closed field registry. Header paths are "entity.field"; row paths are
# templates that apply to every row of the sequence they name.
_HEADER_SPECS: tuple[FieldSpec, ...] = (
    FieldSpec("bill_to.buyer_name", Entity.BILL_TO, SemanticType.TEXT),
    FieldSpec("bill_to.buyer_address", Entity.BILL_TO, SemanticType.TEXT),
    FieldSpec("bill_to.buyer_tax_id", Entity.BILL_TO, SemanticType.IDENTIFIER),
    FieldSpec("supplier.seller_name", Entity.SUPPLIER, SemanticType.TEXT),
    FieldSpec("supplier.seller_address", Entity.SUPPLIER, SemanticType.TEXT),
    FieldSpec("supplier.supplier_tax_id", Entity.SUPPLIER, SemanticType.IDENTIFIER),
    FieldSpec("supplier.bank_account", Entity.SUPPLIER, SemanticType.IDENTIFIER),
    FieldSpec("invoice.invoice_number", Entity.INVOICE, SemanticType.IDENTIFIER),
    FieldSpec("invoice.issue_date", Entity.INVOICE, SemanticType.DATE),
    FieldSpec("invoice.due_date", Entity.INVOICE, SemanticType.DATE),
    FieldSpec("invoice.payment_terms", Entity.INVOICE, SemanticType.TEXT),
    FieldSpec("invoice.currency", Entity.INVOICE, SemanticType.IDENTIFIER),
    FieldSpec("invoice.net_amount", Entity.INVOICE, SemanticType.MONEY),
    FieldSpec("invoice.tax_amount", Entity.INVOICE, SemanticType.MONEY),
    FieldSpec("invoice.roundoff_amount", Entity.INVOICE, SemanticType.MONEY),
    FieldSpec("invoice.gross_amount", Entity.INVOICE, SemanticType.MONEY),
)

LINE_ITEM_TYPES: dict[str, SemanticType] = {
    "description": SemanticType.TEXT,
    "quantity": SemanticType.QUANTITY,
    "unit_price": SemanticType.MONEY,
    "line_total": SemanticType.MONEY,
    "tax_rate": SemanticType.PERCENT,
}

TAX_LINE_TYPES: dict[str, SemanticType] = {
    "rate": SemanticType.PERCENT,
    "taxable_base": SemanticType.MONEY,
    "tax_amount": SemanticType.MONEY,
}

_ROW_SPECS: tuple[FieldSpec, ...] = tuple(
    FieldSpec(f"line_items[].{name}", Entity.LINE_ITEM, stype)
    for name, stype in LINE_ITEM_TYPES.items()
) + tuple(
    FieldSpec(f"tax_lines[].{name}", Entity.TAX_LINE, stype)
    for name, stype in TAX_LINE_TYPES.items()
)

FIELD_REGISTRY: tuple[FieldSpec, ...] = _HEADER_SPECS + _ROW_SPECS

HEADER_FIELDS: dict[str, dict[str, SemanticType]] = {}
for _spec in _HEADER_SPECS:
    _ent, _name = _spec.path.split(".", 1)
    HEADER_FIELDS.setdefault(_ent, {})[_name] = _spec.semantic_type


def field_registry() -> tuple[FieldSpec, ...]:
    """The field registry in its stable, deterministic order."""
    return FIELD_REGISTRY


def header_field_specs() -> tuple[FieldSpec, ...]:
    return _HEADER_SPECS


def semantic_type_of(path: str) -> SemanticType:
    m = _ROW_PATH_RE.fullmatch(path)
    if m is not None:
        table, name = m.groups()
        types = LINE_ITEM_TYPES if table == "line_items" else TAX_LINE_TYPES
        if name in types:
            return types[name]
        raise KeyError(f"unknown row field {path!r}")
    for spec in _HEADER_SPECS:
        if spec.path == path:
            return spec.semantic_type
    raise KeyError(f"unknown field path {path!r}")


def entity_of(path: str) -> Entity:
    if path.startswith("line_items["):
        return Entity.LINE_ITEM
    if path.startswith("tax_lines["):
        return Entity.TAX_LINE
    ent = path.split(".", 1)[0]
    return Entity(ent)


@dataclass(frozen=True)
class CanonicalInvoice:
    bill_to: Mapping[str, FieldValue] = field(default_factory=dict)
    supplier: Mapping[str, FieldValue] = field(default_factory=dict)
    invoice: Mapping[str, FieldValue] = field(default_factory=dict)
    line_items: tuple[LineItem, ...] = ()
    tax_lines: tuple[TaxLine, ...] = ()
    boxes: Optional[Mapping[str, tuple[float, float, float, float]]] = None

    @classmethod
    def build(cls, bill_to=None, supplier=None, invoice=None,
              line_items=(), tax_lines=(), boxes=None) -> "CanonicalInvoice":
        """Construct in canonical form: Absent entries dropped, rows tupled."""
        def clean(mapping):
            if not mapping:
                return {}
            return {k: v for k, v in mapping.items() if not is_absent(v)}

        box_map = None
        if boxes:
            box_map = {k: tuple(float(x) for x in v) for k, v in boxes.items()}
        return cls(
            bill_to=clean(bill_to),
            supplier=clean(supplier),
            invoice=clean(invoice),
            line_items=tuple(line_items),
            tax_lines=tuple(tax_lines),
            boxes=box_map,
        )

    def entity_map(self, entity: str) -> Mapping[str, FieldValue]:
        return getattr(self, entity)

    def header_value(self, path: str) -> FieldValue:
        ent, name = path.split(".", 1)
        return self.entity_map(ent).get(name, ABSENT)

    def iter_header(self) -> Iterator[tuple[FieldSpec, FieldValue]]:
        for spec in _HEADER_SPECS:
            yield spec, self.header_value(spec.path)


@dataclass(frozen=True)
class DocumentMeta:
    doc_id: str
    source_kind: str
    language: str
    vendor_id: str
    template_id: str
    template_split: str = "seen"
    page_count: int = 1

    def __post_init__(self):
        if self.source_kind not in ("digital", "scanned"):
            raise ValueError(f"source_kind must be digital|scanned, got {self.source_kind!r}")
        if not re.fullmatch(r"[a-z]{2}", self.language):
            raise ValueError(f"language must be a 2-letter lowercase code, got {self.language!r}")
        if self.template_split not in ("seen", "unseen"):
            raise ValueError(f"template_split must be seen|unseen, got {self.template_split!r}")
        if self.page_count < 1:
            raise ValueError("page_count must be positive")


STRATA_DIMENSIONS = ("source_kind", "language", "vendor_id", "template_split")


@dataclass(frozen=True)
class Violation:
    path: str
    problem: str

    def __str__(self):
        return f"{self.problem} at {self.path}"


def _check_value(path: str, value: FieldValue, semantic_type: SemanticType,
                 out: list[Violation]) -> None:
    if is_absent(value):
        return
    if not tag_matches(value, semantic_type):
        out.append(Violation(path, "type mismatch"))
        return
    if isinstance(value, Date) and not value.value.is_valid():
        out.append(Violation(path, "invalid calendar date"))


def validate_invoice(record: CanonicalInvoice) -> list[Violation]:
    """Collect every structural violation; an empty list means the record is ok."""
    violations: list[Violation] = []
    for ent, fields in HEADER_FIELDS.items():
        mapping = record.entity_map(ent)
        for name, value in mapping.items():
            if name not in fields:
                violations.append(Violation(f"{ent}.{name}", "unknown field name"))
                continue
            _check_value(f"{ent}.{name}", value, fields[name], violations)
    for i, row in enumerate(record.line_items):
        for name, stype in LINE_ITEM_TYPES.items():
            _check_value(f"line_items[{i}].{name}", getattr(row, name), stype, violations)
    for i, row in enumerate(record.tax_lines):
        for name, stype in TAX_LINE_TYPES.items():
            _check_value(f"tax_lines[{i}].{name}", getattr(row, name), stype, violations)
    if record.boxes:
        for key, box in record.boxes.items():
            if len(box) != 4:
                violations.append(Violation(f"boxes.{key}", "bounding box must have 4 numbers"))
    return violations
