import pytest

from invoiceval.schema import (ABSENT, CanonicalInvoice, Date, DateValue,
                               Entity, Identifier, LineItem, Money,
                               MonetaryAmount, Qty, Quantity, SemanticType,
                               Text, entity_of, field_registry,
                               semantic_type_of, validate_invoice)
from invoiceval.synth import generate_invoice


def test_registry_contains_expected_fields():
    registry = {spec.path: spec for spec in field_registry()}
    assert registry["invoice.invoice_number"].semantic_type is SemanticType.IDENTIFIER
    assert registry["invoice.invoice_number"].entity is Entity.INVOICE
    assert registry["supplier.supplier_tax_id"].semantic_type is SemanticType.IDENTIFIER
    assert "boxes" not in registry
    assert not any("boxes" in path for path in registry)


def test_registry_order_is_stable():
    assert [s.path for s in field_registry()] == [s.path for s in field_registry()]
    header = [s for s in field_registry() if "[" not in s.path]
    assert len(header) == 16


def test_registry_paths_resolve_in_any_invoice():
    invoice = CanonicalInvoice.build()
    for spec in field_registry():
        if "[" in spec.path:
            continue
        assert invoice.header_value(spec.path) is ABSENT
    gt, _ = generate_invoice(11)
    for spec in field_registry():
        if "[" in spec.path:
            continue
        gt.header_value(spec.path)  # must not raise


def test_money_equality_is_scale_invariant():
    assert MonetaryAmount(12340, 3, "EUR") == MonetaryAmount(1234, 2, "EUR")
    assert MonetaryAmount(12340, 3, "EUR") != MonetaryAmount(1234, 2, "USD")
    assert hash(MonetaryAmount(12340, 3, "EUR")) == hash(MonetaryAmount(1234, 2, "EUR"))
    assert Quantity(250, 2) == Quantity(25, 1)


def test_money_invariants():
    with pytest.raises(ValueError):
        MonetaryAmount(1, 7, "EUR")
    with pytest.raises(ValueError):
        MonetaryAmount(1, 2, "eur")
    MonetaryAmount(1, 2, "UNKNOWN")  # sentinel allowed


def test_empty_string_is_not_absent():
    assert Text("") != ABSENT
    assert not Text("") == ABSENT


def test_validate_clean_invoice(cfg):
    gt, _ = generate_invoice(3)
    assert validate_invoice(gt) == []


def test_validate_reports_type_mismatch():
    record = CanonicalInvoice.build(invoice={"issue_date": Text("hello")})
    violations = validate_invoice(record)
    assert [str(v) for v in violations] == ["type mismatch at invoice.issue_date"]


def test_validate_reports_invalid_date():
    record = CanonicalInvoice.build(invoice={"issue_date": Date(DateValue(2023, 2, 30))})
    violations = validate_invoice(record)
    assert [str(v) for v in violations] == ["invalid calendar date at invoice.issue_date"]


def test_validate_reports_unknown_field_and_collects_all():
    record = CanonicalInvoice.build(
        invoice={"issue_date": Text("x"), "made_up": Text("y")},
        line_items=[LineItem(quantity=Money(MonetaryAmount(1, 0, "EUR")))],
    )
    problems = {str(v) for v in validate_invoice(record)}
    assert problems == {
        "type mismatch at invoice.issue_date",
        "unknown field name at invoice.made_up",
        "type mismatch at line_items[0].quantity",
    }


def test_semantic_type_of_row_paths():
    assert semantic_type_of("line_items[3].unit_price") is SemanticType.MONEY
    assert semantic_type_of("tax_lines[0].rate") is SemanticType.PERCENT
    assert entity_of("line_items[pred=2].quantity") is Entity.LINE_ITEM
    assert entity_of("tax_lines[1].tax_amount") is Entity.TAX_LINE
    with pytest.raises(KeyError):
        semantic_type_of("invoice.nope")


def test_build_drops_absent_entries():
    record = CanonicalInvoice.build(invoice={"invoice_number": Identifier("A"),
                                             "payment_terms": ABSENT})
    assert "payment_terms" not in record.invoice
    assert record.header_value("invoice.payment_terms") is ABSENT
