"""Deterministic evaluation harness for invoice information extraction.

Scores extractor predictions against annotated ground truth at field,
line-item, and document level, runs arithmetic consistency checks, and
produces stratified corpus reports. See the README for the CLI and the
config file format.
"""

from .config import EvalConfig, default_config, load_config
from .consistency import check_invoice, pass_rate
from .matching import FieldOutcome, MatchClass, compare_field, string_similarity
from .metrics import (DocumentScore, EvaluationReport, aggregate_corpus,
                      entity_breakdown, field_accuracy, presence_f1, stratify)
from .normalize import (NormalizationPolicy, normalize_identifier,
                        normalize_text, parse_date, parse_money, parse_quantity)
from .pipeline import evaluate_document, evaluate_documents
from .schema import (ABSENT, CanonicalInvoice, DateValue, DocumentMeta,
                     LineItem, MonetaryAmount, Quantity, TaxLine,
                     field_registry, validate_invoice)
from .synth import ErrorSpec, GenConfig, expected_report, generate_invoice, inject_errors

__version__ = "0.1.0"

__all__ = [
    "ABSENT", "CanonicalInvoice", "DateValue", "DocumentMeta", "DocumentScore",
    "ErrorSpec", "EvalConfig", "EvaluationReport", "FieldOutcome", "GenConfig",
    "LineItem", "MatchClass", "MonetaryAmount", "NormalizationPolicy",
    "Quantity", "TaxLine", "aggregate_corpus", "check_invoice", "compare_field",
    "default_config", "entity_breakdown", "evaluate_document",
    "evaluate_documents", "expected_report", "field_accuracy", "field_registry",
    "generate_invoice", "inject_errors", "load_config", "normalize_identifier",
    "normalize_text", "parse_date", "parse_money", "parse_quantity",
    "pass_rate", "presence_f1", "string_similarity", "stratify",
    "validate_invoice",
]
