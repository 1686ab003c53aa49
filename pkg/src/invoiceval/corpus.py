"""Corpus loading, prediction adapters, and report persistence.

A corpus is a manifest plus one canonical ground-truth record per document
and one prediction file per (document, method). Ground truth must parse
strictly — a malformed annotation is a corpus bug. Prediction files are
adapted leniently: unmappable keys are reported and dropped, unparseable
values become Absent with a diagnostic, and evaluation always proceeds,
because a bad value is an extractor-quality signal rather than a harness
fault.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .config import EvalConfig
from .fixedpoint import format_decimal, parse_decimal_string
from .matching import MatchClass
from .metrics import (EvaluationReport, MethodReport, MetricBlock,
                      ratio_percent)
from .normalize import (NormalizationPolicy, ParseFailure, parse_date,
                        parse_money, parse_quantity)
from .schema import (ABSENT, CURRENCY_UNKNOWN, CanonicalInvoice, Date,
                     DateValue, DocumentMeta, Entity, FieldValue,
                     HEADER_FIELDS, Identifier, LINE_ITEM_TYPES, LineItem,
                     Money, MonetaryAmount, Qty, Quantity, SemanticType,
                     STRATA_DIMENSIONS, TAX_LINE_TYPES, TaxLine, Text,
                     is_absent, validate_invoice)

ADAPTERS = ("canonical", "flat_kv", "schema_llm")

_ISO_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")


class ManifestError(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestDocument:
    doc_id: str
    gt_path: str
    predictions: Mapping[str, str]
    meta: DocumentMeta


@dataclass(frozen=True)
class CorpusManifest:
    corpus_id: str
    documents: tuple[ManifestDocument, ...]
    adapters: Mapping[str, str] = field(default_factory=dict)
    root: Path = Path(".")

    def methods(self) -> tuple[str, ...]:
        names = sorted({m for doc in self.documents for m in doc.predictions})
        return tuple(names)

    def adapter_for(self, method: str) -> str:
        return self.adapters.get(method, "canonical")


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError("io", f"cannot read manifest {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError("parse", f"manifest {path}: invalid JSON at line "
                            f"{exc.lineno}, column {exc.colno}: {exc.msg}") from exc

    if not isinstance(data, dict):
        raise ManifestError("schema", f"manifest {path}: top level must be an object")
    corpus_id = data.get("corpus_id")
    if not isinstance(corpus_id, str) or not corpus_id:
        raise ManifestError("schema", f"manifest {path}: corpus_id must be a non-empty string")
    raw_docs = data.get("documents")
    if not isinstance(raw_docs, list) or not raw_docs:
        raise ManifestError("schema", f"manifest {path}: documents must be a non-empty list")

    adapters = data.get("adapters", {})
    if not isinstance(adapters, dict):
        raise ManifestError("schema", f"manifest {path}: adapters must be an object")
    for method, adapter in adapters.items():
        if adapter not in ADAPTERS:
            raise ManifestError("schema", f"manifest {path}: unknown adapter {adapter!r} "
                                f"for method {method!r}")

    root = path.parent
    documents = []
    seen_ids = set()
    for i, raw in enumerate(raw_docs):
        where = f"manifest {path}, documents[{i}]"
        if not isinstance(raw, dict):
            raise ManifestError("schema", f"{where}: must be an object")
        doc_id = raw.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            raise ManifestError("schema", f"{where}: doc_id must be a non-empty string")
        if doc_id in seen_ids:
            raise ManifestError("duplicate-id", f"{where}: duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        gt_path = raw.get("gt_path")
        if not isinstance(gt_path, str):
            raise ManifestError("schema", f"{where}: gt_path must be a string")
        if not (root / gt_path).is_file():
            raise ManifestError("dangling-path",
                                f"{where}: gt_path {gt_path!r} does not exist")
        predictions = raw.get("predictions", {})
        if not isinstance(predictions, dict):
            raise ManifestError("schema", f"{where}: predictions must be an object")
        for method, rel in predictions.items():
            if not (root / rel).is_file():
                raise ManifestError("dangling-path",
                                    f"{where}: prediction {rel!r} for method "
                                    f"{method!r} does not exist")
        meta_raw = raw.get("meta")
        if not isinstance(meta_raw, dict):
            raise ManifestError("schema", f"{where}: meta must be an object")
        try:
            meta = DocumentMeta(
                doc_id=doc_id,
                source_kind=meta_raw.get("source_kind", "digital"),
                language=meta_raw.get("language", "en"),
                vendor_id=str(meta_raw.get("vendor_id", "unknown")),
                template_id=str(meta_raw.get("template_id", "unknown")),
                template_split=meta_raw.get("template_split", "seen"),
                page_count=int(meta_raw.get("page_count", 1)),
            )
        except ValueError as exc:
            raise ManifestError("schema", f"{where}: {exc}") from exc
        documents.append(ManifestDocument(doc_id, gt_path, dict(predictions), meta))

    methods = {m for doc in documents for m in doc.predictions}
    for doc in documents:
        missing = methods - set(doc.predictions)
        if missing:
            raise ManifestError("schema", f"manifest {path}: document {doc.doc_id!r} "
                                f"lacks predictions for {sorted(missing)}")

    return CorpusManifest(corpus_id=corpus_id, documents=tuple(documents),
                          adapters=dict(adapters), root=root)


# Canonical value (de)serialization -------------------------------------

def value_to_json(value: FieldValue):
    if is_absent(value):
        return None
    if isinstance(value, (Text, Identifier)):
        return value.value
    if isinstance(value, Date):
        return value.value.iso()
    if isinstance(value, Money):
        return {"amount": format_decimal(value.value.minor_units, value.value.scale),
                "currency": value.value.currency}
    if isinstance(value, Qty):
        return format_decimal(value.value.minor_units, value.value.scale)
    raise TypeError(f"unexpected field value {value!r}")


def _canonical_value(raw, semantic_type: SemanticType, where: str) -> FieldValue:
    if raw is None:
        return ABSENT
    if semantic_type is SemanticType.TEXT:
        if not isinstance(raw, str):
            raise CorpusFormatError(f"{where}: expected a string")
        return Text(raw)
    if semantic_type is SemanticType.IDENTIFIER:
        if not isinstance(raw, str):
            raise CorpusFormatError(f"{where}: expected a string")
        return Identifier(raw)
    if semantic_type is SemanticType.DATE:
        if not isinstance(raw, str) or not _ISO_DATE_RE.fullmatch(raw):
            raise CorpusFormatError(f"{where}: expected an ISO date string")
        year, month, day = (int(part) for part in raw.split("-"))
        date = DateValue(year, month, day)
        if not date.is_valid():
            raise CorpusFormatError(f"{where}: invalid calendar date {raw!r}")
        return Date(date)
    if semantic_type is SemanticType.MONEY:
        if not isinstance(raw, dict) or "amount" not in raw:
            raise CorpusFormatError(f"{where}: expected {{'amount': ..., 'currency': ...}}")
        try:
            minor, scale = parse_decimal_string(str(raw["amount"]))
        except ValueError as exc:
            raise CorpusFormatError(f"{where}: {exc}") from exc
        currency = raw.get("currency", CURRENCY_UNKNOWN)
        try:
            return Money(MonetaryAmount(minor, scale, str(currency)))
        except ValueError as exc:
            raise CorpusFormatError(f"{where}: {exc}") from exc
    # quantity / percent
    if not isinstance(raw, (str, int)):
        raise CorpusFormatError(f"{where}: expected a decimal string")
    try:
        minor, scale = parse_decimal_string(str(raw))
    except ValueError as exc:
        raise CorpusFormatError(f"{where}: {exc}") from exc
    return Qty(Quantity(minor, scale))


def _lenient_value(raw, semantic_type: SemanticType, where: str,
                   policy: NormalizationPolicy,
                   diagnostics: list[str]) -> FieldValue:
    """Canonical form first, then locale-tolerant parsing of bare strings.
    Failure degrades to Absent and is logged."""
    try:
        return _canonical_value(raw, semantic_type, where)
    except CorpusFormatError:
        pass
    if isinstance(raw, (int, float)):
        raw = format(raw, "f") if isinstance(raw, float) else str(raw)
    if not isinstance(raw, str):
        diagnostics.append(f"{where}: unusable value {raw!r}; treated as absent")
        return ABSENT
    try:
        if semantic_type is SemanticType.DATE:
            return Date(parse_date(raw, policy))
        if semantic_type is SemanticType.MONEY:
            return Money(parse_money(raw, policy))
        if semantic_type in (SemanticType.QUANTITY, SemanticType.PERCENT):
            return Qty(parse_quantity(raw, policy))
    except ParseFailure as exc:
        diagnostics.append(f"{where}: {exc}; treated as absent")
        return ABSENT
    if semantic_type is SemanticType.IDENTIFIER:
        return Identifier(raw)
    return Text(raw)


def invoice_to_dict(inv: CanonicalInvoice) -> dict:
    def entity(mapping):
        return {name: value_to_json(value) for name, value in sorted(mapping.items())}

    data = {
        "bill_to": entity(inv.bill_to),
        "supplier": entity(inv.supplier),
        "invoice": entity(inv.invoice),
        "line_items": [
            {name: value_to_json(getattr(row, name))
             for name in LINE_ITEM_TYPES if not is_absent(getattr(row, name))}
            for row in inv.line_items
        ],
        "tax_lines": [
            {name: value_to_json(getattr(row, name))
             for name in TAX_LINE_TYPES if not is_absent(getattr(row, name))}
            for row in inv.tax_lines
        ],
    }
    if inv.boxes:
        data["boxes"] = {k: list(v) for k, v in sorted(inv.boxes.items())}
    return data


def invoice_from_dict(data: Mapping, strict: bool = True,
                      policy: NormalizationPolicy = NormalizationPolicy(),
                      where: str = "invoice") -> tuple[CanonicalInvoice, list[str]]:
    if not isinstance(data, Mapping):
        raise CorpusFormatError(f"{where}: record must be a JSON object")
    diagnostics: list[str] = []

    def read_value(raw, semantic_type, path):
        if strict:
            return _canonical_value(raw, semantic_type, path)
        return _lenient_value(raw, semantic_type, path, policy, diagnostics)

    entities = {}
    for ent, fields in HEADER_FIELDS.items():
        section = data.get(ent, {})
        if section is None:
            section = {}
        if not isinstance(section, Mapping):
            raise CorpusFormatError(f"{where}.{ent}: must be an object")
        parsed = {}
        for name, raw in section.items():
            if name not in fields:
                message = f"{where}.{ent}.{name}: unknown field"
                if strict:
                    raise CorpusFormatError(message)
                diagnostics.append(f"{message}; dropped")
                continue
            value = read_value(raw, fields[name], f"{where}.{ent}.{name}")
            if not is_absent(value):
                parsed[name] = value
        entities[ent] = parsed

    def read_rows(key, types, factory):
        raw_rows = data.get(key, [])
        if raw_rows is None:
            raw_rows = []
        if not isinstance(raw_rows, list):
            raise CorpusFormatError(f"{where}.{key}: must be a list")
        rows = []
        for i, raw in enumerate(raw_rows):
            if not isinstance(raw, Mapping):
                raise CorpusFormatError(f"{where}.{key}[{i}]: must be an object")
            kwargs = {}
            for name, raw_value in raw.items():
                if name not in types:
                    message = f"{where}.{key}[{i}].{name}: unknown field"
                    if strict:
                        raise CorpusFormatError(message)
                    diagnostics.append(f"{message}; dropped")
                    continue
                kwargs[name] = read_value(raw_value, types[name],
                                          f"{where}.{key}[{i}].{name}")
            rows.append(factory(**kwargs))
        return rows

    boxes = data.get("boxes")
    if boxes is not None and not isinstance(boxes, Mapping):
        raise CorpusFormatError(f"{where}.boxes: must be an object")

    record = CanonicalInvoice.build(
        bill_to=entities["bill_to"],
        supplier=entities["supplier"],
        invoice=entities["invoice"],
        line_items=read_rows("line_items", LINE_ITEM_TYPES, LineItem),
        tax_lines=read_rows("tax_lines", TAX_LINE_TYPES, TaxLine),
        boxes=boxes,
    )
    return record, diagnostics


def load_invoice_file(path, strict: bool = True,
                      policy: NormalizationPolicy = NormalizationPolicy()
                      ) -> tuple[CanonicalInvoice, list[str]]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}: invalid JSON at line {exc.lineno}, "
                                f"column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise CorpusFormatError(f"{path}: {exc}") from exc
    return invoice_from_dict(data, strict=strict, policy=policy, where=str(path))


# Prediction adapters ----------------------------------------------------

@dataclass(frozen=True)
class PredictionEnvelope:
    method_name: str
    invoice: CanonicalInvoice
    confidences: Mapping[str, float] = field(default_factory=dict)
    rationales: Mapping[str, str] = field(default_factory=dict)


DEFAULT_HEADER_ALIASES: dict[str, str] = {
    "invoice_number": "invoice.invoice_number",
    "invoice_no": "invoice.invoice_number",
    "inv_no": "invoice.invoice_number",
    "number": "invoice.invoice_number",
    "issue_date": "invoice.issue_date",
    "invoice_date": "invoice.issue_date",
    "date": "invoice.issue_date",
    "due_date": "invoice.due_date",
    "payment_due": "invoice.due_date",
    "payment_terms": "invoice.payment_terms",
    "terms": "invoice.payment_terms",
    "currency": "invoice.currency",
    "currency_code": "invoice.currency",
    "net_amount": "invoice.net_amount",
    "net": "invoice.net_amount",
    "subtotal": "invoice.net_amount",
    "tax_amount": "invoice.tax_amount",
    "tax": "invoice.tax_amount",
    "vat": "invoice.tax_amount",
    "vat_amount": "invoice.tax_amount",
    "roundoff_amount": "invoice.roundoff_amount",
    "roundoff": "invoice.roundoff_amount",
    "rounding": "invoice.roundoff_amount",
    "gross_amount": "invoice.gross_amount",
    "gross": "invoice.gross_amount",
    "total": "invoice.gross_amount",
    "total_amount": "invoice.gross_amount",
    "grand_total": "invoice.gross_amount",
    "amount_due": "invoice.gross_amount",
    "seller_name": "supplier.seller_name",
    "seller": "supplier.seller_name",
    "vendor": "supplier.seller_name",
    "vendor_name": "supplier.seller_name",
    "supplier_name": "supplier.seller_name",
    "seller_address": "supplier.seller_address",
    "vendor_address": "supplier.seller_address",
    "supplier_address": "supplier.seller_address",
    "supplier_tax_id": "supplier.supplier_tax_id",
    "seller_tax_id": "supplier.supplier_tax_id",
    "vat_id": "supplier.supplier_tax_id",
    "tax_id": "supplier.supplier_tax_id",
    "bank_account": "supplier.bank_account",
    "iban": "supplier.bank_account",
    "buyer_name": "bill_to.buyer_name",
    "buyer": "bill_to.buyer_name",
    "customer": "bill_to.buyer_name",
    "customer_name": "bill_to.buyer_name",
    "bill_to_name": "bill_to.buyer_name",
    "buyer_address": "bill_to.buyer_address",
    "customer_address": "bill_to.buyer_address",
    "bill_to_address": "bill_to.buyer_address",
    "buyer_tax_id": "bill_to.buyer_tax_id",
    "customer_tax_id": "bill_to.buyer_tax_id",
}

DEFAULT_ROW_ALIASES: dict[str, str] = {
    "description": "description",
    "desc": "description",
    "item": "description",
    "product": "description",
    "name": "description",
    "quantity": "quantity",
    "qty": "quantity",
    "count": "quantity",
    "unit_price": "unit_price",
    "price": "unit_price",
    "unit_cost": "unit_price",
    "line_total": "line_total",
    "total": "line_total",
    "amount": "line_total",
    "line_amount": "line_total",
    "tax_rate": "tax_rate",
    "vat_rate": "tax_rate",
    "tax_percent": "tax_rate",
}

DEFAULT_TAX_ROW_ALIASES: dict[str, str] = {
    "rate": "rate",
    "tax_rate": "rate",
    "percent": "rate",
    "taxable_base": "taxable_base",
    "base": "taxable_base",
    "taxable": "taxable_base",
    "net": "taxable_base",
    "tax_amount": "tax_amount",
    "tax": "tax_amount",
    "amount": "tax_amount",
}


def _alias_tables(cfg: EvalConfig) -> dict[str, dict[str, str]]:
    tables = {
        "header": dict(DEFAULT_HEADER_ALIASES),
        "row": dict(DEFAULT_ROW_ALIASES),
        "tax_row": dict(DEFAULT_TAX_ROW_ALIASES),
    }
    for scope, extra in cfg.adapters.flat_kv_aliases.items():
        if scope in tables:
            tables[scope].update({k.lower(): v for k, v in extra.items()})
    return tables


def _adapt_flat_kv(data: Mapping, cfg: EvalConfig,
                   diagnostics: list[str]) -> CanonicalInvoice:
    tables = _alias_tables(cfg)
    policy = cfg.normalization
    entities: dict[str, dict] = {"bill_to": {}, "supplier": {}, "invoice": {}}

    for key, raw in data.items():
        if key in ("rows", "tax_rows"):
            continue
        path = tables["header"].get(str(key).lower())
        if path is None:
            diagnostics.append(f"flat_kv: unmappable key {key!r}; value dropped")
            continue
        ent, name = path.split(".", 1)
        semantic_type = HEADER_FIELDS[ent][name]
        value = _lenient_value(raw, semantic_type, f"flat_kv.{key}", policy, diagnostics)
        if not is_absent(value):
            entities[ent][name] = value

    def rows_from(key, alias_table, types, factory):
        raw_rows = data.get(key, [])
        if not isinstance(raw_rows, list):
            diagnostics.append(f"flat_kv: {key} is not a list; dropped")
            return []
        rows = []
        for i, raw in enumerate(raw_rows):
            if not isinstance(raw, Mapping):
                diagnostics.append(f"flat_kv: {key}[{i}] is not an object; dropped")
                continue
            kwargs = {}
            for k, v in raw.items():
                name = alias_table.get(str(k).lower())
                if name is None:
                    diagnostics.append(f"flat_kv: unmappable key {key}[{i}].{k!r}; "
                                       "value dropped")
                    continue
                value = _lenient_value(v, types[name], f"flat_kv.{key}[{i}].{k}",
                                       policy, diagnostics)
                if not is_absent(value):
                    kwargs[name] = value
            rows.append(factory(**kwargs))
        return rows

    return CanonicalInvoice.build(
        bill_to=entities["bill_to"],
        supplier=entities["supplier"],
        invoice=entities["invoice"],
        line_items=rows_from("rows", tables["row"], LINE_ITEM_TYPES, LineItem),
        tax_lines=rows_from("tax_rows", tables["tax_row"], TAX_LINE_TYPES, TaxLine),
    )


def adapt_prediction(raw: bytes, adapter: str, method_name: str,
                     cfg: EvalConfig) -> tuple[PredictionEnvelope, list[str]]:
    if adapter not in ADAPTERS:
        raise CorpusFormatError(f"unknown adapter {adapter!r}; "
                                f"expected one of {ADAPTERS}")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorpusFormatError(f"prediction for {method_name!r}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise CorpusFormatError(f"prediction for {method_name!r}: "
                                "top level must be an object")

    diagnostics: list[str] = []
    confidences: dict[str, float] = {}
    rationales: dict[str, str] = {}

    if adapter == "flat_kv":
        invoice = _adapt_flat_kv(data, cfg, diagnostics)
    else:
        # canonical and schema_llm share the nested entity layout; schema_llm
        # additionally carries confidences/rationales and free-form scalars
        # that the lenient reader normalizes.
        body = {k: v for k, v in data.items()
                if k not in ("confidences", "rationales", "method")}
        invoice, diagnostics = invoice_from_dict(
            body, strict=False, policy=cfg.normalization,
            where=f"prediction[{method_name}]")
        if adapter == "schema_llm":
            raw_conf = data.get("confidences", {})
            if isinstance(raw_conf, Mapping):
                for path, value in raw_conf.items():
                    try:
                        value = float(value)
                    except (TypeError, ValueError):
                        diagnostics.append(f"confidence for {path!r} is not a number; dropped")
                        continue
                    if 0.0 <= value <= 1.0:
                        confidences[str(path)] = value
                    else:
                        diagnostics.append(f"confidence for {path!r} outside [0, 1]; dropped")
            raw_rat = data.get("rationales", {})
            if isinstance(raw_rat, Mapping):
                rationales = {str(k): str(v) for k, v in raw_rat.items()}

    problems = validate_invoice(invoice)
    if problems:
        # The lenient readers should never let this happen; guard anyway.
        raise CorpusFormatError(f"adapter {adapter} produced an invalid record: "
                                f"{'; '.join(str(p) for p in problems)}")
    return (PredictionEnvelope(method_name=method_name, invoice=invoice,
                               confidences=confidences, rationales=rationales),
            diagnostics)


def load_prediction(manifest: CorpusManifest, doc: ManifestDocument,
                    method: str, cfg: EvalConfig) -> tuple[PredictionEnvelope, list[str]]:
    rel = doc.predictions[method]
    raw = (manifest.root / rel).read_bytes()
    return adapt_prediction(raw, manifest.adapter_for(method), method, cfg)


def load_ground_truth(manifest: CorpusManifest,
                      doc: ManifestDocument) -> CanonicalInvoice:
    invoice, _ = load_invoice_file(manifest.root / doc.gt_path, strict=True)
    problems = validate_invoice(invoice)
    if problems:
        raise CorpusFormatError(f"ground truth {doc.gt_path}: "
                                f"{'; '.join(str(p) for p in problems)}")
    return invoice


# Report serialization ---------------------------------------------------

def _ratio_json(value) -> Optional[dict]:
    if value is None:
        return None
    return {"exact": f"{value.numerator}/{value.denominator}",
            "value": float(value), "percent": ratio_percent(value)}


def _block_to_dict(block: MetricBlock) -> dict:
    accuracy = block.accuracy
    f1 = block.f1

    def prf(summary):
        return {"tp": summary.tp, "fp": summary.fp, "fn": summary.fn,
                "precision": _ratio_json(summary.precision),
                "recall": _ratio_json(summary.recall),
                "f1": _ratio_json(summary.f1)}

    consistency = block.consistency
    return {
        "documents": block.documents,
        "fields": {cls.value: block.class_counts.get(cls, 0) for cls in MatchClass},
        "accuracy": {
            "annotated": accuracy.annotated,
            "correct": accuracy.correct,
            "exact": accuracy.exact,
            "spurious": accuracy.spurious,
            "overall": _ratio_json(accuracy.overall),
            "exact_only": _ratio_json(accuracy.exact_only),
            "relaxed_included": _ratio_json(accuracy.relaxed_included),
        },
        "per_entity": {
            entity.value: {"annotated": summary.annotated,
                           "correct": summary.correct,
                           "accuracy": _ratio_json(summary.overall)}
            for entity, summary in sorted(block.per_entity.items(),
                                          key=lambda kv: kv[0].value)
        },
        "presence_f1": {"presence": prf(f1.presence),
                        "correctness": prf(f1.correctness)},
        "line_items": {
            "gt_rows": block.gt_rows,
            "pred_rows": block.pred_rows,
            "matched": block.matched_rows,
            "omissions": block.omissions,
            "duplications": block.duplications,
            "completeness": _ratio_json(block.completeness),
        },
        "consistency": {
            "passed": consistency.passed,
            "failed": consistency.failed,
            "not_applicable": consistency.not_applicable,
            "pass_rate": _ratio_json(consistency.pass_rate),
            "r2_failures": consistency.r2_failures,
            "r2_applicable": consistency.r2_applicable,
            "math_error_rate": _ratio_json(consistency.math_error_rate),
        },
        "timing": (None if block.timing is None else
                   {"seconds_per_doc": block.timing.seconds_per_doc,
                    "seconds_per_page": block.timing.seconds_per_page}),
    }


def _document_to_dict(doc) -> dict:
    accuracy = doc.accuracy()
    return {
        "doc_id": doc.doc_id,
        "annotated": accuracy.annotated,
        "correct": accuracy.correct,
        "accuracy": _ratio_json(accuracy.overall),
        "fields": {cls.value: count for cls, count in sorted(
            doc.class_counts().items(), key=lambda kv: kv[0].value)},
        "line_items": {"gt_rows": doc.gt_rows, "pred_rows": doc.pred_rows,
                       "matched": doc.matched_rows, "omissions": doc.omissions,
                       "duplications": doc.duplications},
        "verdict": doc.check.verdict.value,
        "rules": {
            result.rule_id: {
                "status": result.status.value,
                "residual": (None if result.residual is None else str(result.residual)),
                "detail": result.detail,
            }
            for result in doc.check.results
        },
        "mismatches": list(doc.mismatched_paths()),
        "diagnostics": list(doc.diagnostics),
    }


def _method_to_dict(method_report: MethodReport) -> dict:
    return {
        "metrics": _block_to_dict(method_report.block),
        "strata": {
            dimension: [{"key": key, "metrics": _block_to_dict(block)}
                        for key, block in slices]
            for dimension, slices in sorted(method_report.strata.items())
        },
        "documents": [_document_to_dict(doc) for doc in method_report.documents],
    }


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "corpus_id": report.corpus_id,
        "config": report.config,
        "methods": {name: _method_to_dict(method)
                    for name, method in sorted(report.methods.items())},
    }


def dump_report_json(report_dict: dict) -> str:
    return json.dumps(report_dict, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _pct_cell(ratio: Optional[dict]) -> str:
    if ratio is None or ratio.get("percent") is None:
        return "n/a"
    return str(ratio["percent"])


def _method_presentation(report_dict: dict, method: str) -> tuple[str, dict]:
    methods_cfg = report_dict.get("config", {}).get("report", {}).get("methods", {})
    body = methods_cfg.get(method, {}) or {}
    display = body.get("display_name") or method
    return display, body.get("annotations", {}) or {}


def _annotation(annotations: Mapping, key: str, fallback: str = "n/a") -> str:
    return str(annotations.get(key, fallback))


def _timing_cell(metrics: dict, annotations: Mapping) -> str:
    if "processing_time" in annotations:
        return str(annotations["processing_time"])
    timing = metrics.get("timing")
    if timing and timing.get("seconds_per_page") is not None:
        return f"{timing['seconds_per_page']:.2f} sec"
    return "n/a"


def _error_sources_cell(metrics: dict, annotations: Mapping) -> str:
    if "primary_error_sources" in annotations:
        return str(annotations["primary_error_sources"])
    worst = [
        (entry["accuracy"]["value"], entity)
        for entity, entry in metrics.get("per_entity", {}).items()
        if entry.get("accuracy") and entry["accuracy"]["value"] < 1.0
    ]
    if not worst:
        return "none observed"
    worst.sort()
    return ", ".join(entity for _, entity in worst[:2])


def render_markdown(report_dict: dict) -> str:
    """Render the four summary tables (plus strata) from a serialized report.

    Operates on the JSON form only, so re-rendering an existing report file
    never recomputes a metric.
    """
    methods = sorted(report_dict.get("methods", {}))
    lines = [f"# Invoice extraction evaluation: {report_dict.get('corpus_id', '')}", ""]

    lines += ["## Overall performance and consistency", "",
              "| Method | Overall Accuracy (%) | Processing Time (avg/page) | "
              "Consistency Check Pass Rate (%) | Mathematical Validation Errors (%) |",
              "|---|---|---|---|---|"]
    for method in methods:
        metrics = report_dict["methods"][method]["metrics"]
        display, annotations = _method_presentation(report_dict, method)
        lines.append(
            f"| {display} "
            f"| {_pct_cell(metrics['accuracy']['overall'])} "
            f"| {_timing_cell(metrics, annotations)} "
            f"| {_pct_cell(metrics['consistency']['pass_rate'])} "
            f"| {_pct_cell(metrics['consistency']['math_error_rate'])} |")
    lines.append("")

    lines += ["## Technical characteristics", "",
              "| Method | Input Format | Model Architecture | "
              "Pre-processing Required | Computational Resources |",
              "|---|---|---|---|---|"]
    for method in methods:
        display, annotations = _method_presentation(report_dict, method)
        lines.append(
            f"| {display} | {_annotation(annotations, 'input_format')} "
            f"| {_annotation(annotations, 'model_architecture')} "
            f"| {_annotation(annotations, 'preprocessing_required')} "
            f"| {_annotation(annotations, 'computational_resources')} |")
    lines.append("")

    lines += ["## Error analysis", "",
              "| Method | Primary Error Sources | Complex Layout Handling | "
              "Multi-page Document Support |",
              "|---|---|---|---|"]
    for method in methods:
        metrics = report_dict["methods"][method]["metrics"]
        display, annotations = _method_presentation(report_dict, method)
        lines.append(
            f"| {display} | {_error_sources_cell(metrics, annotations)} "
            f"| {_annotation(annotations, 'complex_layout_handling')} "
            f"| {_annotation(annotations, 'multipage_support')} |")
    lines.append("")

    lines += ["## Practical considerations", "",
              "| Method | Setup Complexity | Scalability | Cost Efficiency | "
              "Real-time Processing |",
              "|---|---|---|---|---|"]
    for method in methods:
        display, annotations = _method_presentation(report_dict, method)
        lines.append(
            f"| {display} | {_annotation(annotations, 'setup_complexity')} "
            f"| {_annotation(annotations, 'scalability')} "
            f"| {_annotation(annotations, 'cost_efficiency')} "
            f"| {_annotation(annotations, 'realtime_processing')} |")
    lines.append("")

    any_strata = any(report_dict["methods"][m].get("strata") for m in methods)
    if any_strata:
        lines += ["## Stratified metrics", ""]
        for dimension in STRATA_DIMENSIONS:
            rows = []
            for method in methods:
                display, _ = _method_presentation(report_dict, method)
                for entry in report_dict["methods"][method]["strata"].get(dimension, []):
                    metrics = entry["metrics"]
                    rows.append(
                        f"| {display} | {entry['key']} | {metrics['documents']} "
                        f"| {_pct_cell(metrics['accuracy']['overall'])} "
                        f"| {_pct_cell(metrics['consistency']['pass_rate'])} "
                        f"| {_pct_cell(metrics['line_items']['completeness'])} |")
            if rows:
                lines += [f"### By {dimension}", "",
                          "| Method | Key | Documents | Accuracy (%) | "
                          "Pass Rate (%) | Completeness (%) |",
                          "|---|---|---|---|---|---|"]
                lines += rows
                lines.append("")

    return "\n".join(lines).rstrip("\n") + "\n"


def write_report(report_dict: dict, fmt: str, path) -> None:
    path = Path(path)
    if fmt == "json":
        content = dump_report_json(report_dict)
    elif fmt in ("md", "markdown"):
        content = render_markdown(report_dict)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    path.write_text(content, encoding="utf-8", newline="\n")
