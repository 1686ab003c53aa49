"""Per-document evaluation and corpus orchestration.

evaluate_document scores one prediction against one ground truth: all
registry header fields through field matching, both row tables through
optimal alignment, and the four consistency rules over the predicted
values. A prediction that mixes currencies in its header amounts is
recorded as a failing R1 with a diagnostic instead of aborting the run —
a corpus evaluation must survive arbitrarily bad extractor output.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from .alignment import align_rows, aligned_field_outcomes, table_completeness
from .config import EvalConfig
from .consistency import (ConsistencyResult, CurrencyMixtureError,
                          InvoiceCheck, RuleStatus, check_invoice)
from .matching import compare_field
from .metrics import DocumentScore
from .schema import CanonicalInvoice, header_field_specs


def _checked(pred: CanonicalInvoice, cfg: EvalConfig) -> tuple[InvoiceCheck, tuple[str, ...]]:
    try:
        return check_invoice(pred, cfg.consistency.tolerance_fraction), ()
    except CurrencyMixtureError as exc:
        failed_r1 = ConsistencyResult("R1_header_sum", RuleStatus.FAIL, None, str(exc))
        rest = check_invoice(
            CanonicalInvoice.build(
                bill_to=dict(pred.bill_to), supplier=dict(pred.supplier),
                invoice={k: v for k, v in pred.invoice.items()
                         if k not in ("net_amount", "tax_amount",
                                      "roundoff_amount", "gross_amount")},
                line_items=pred.line_items, tax_lines=pred.tax_lines),
            cfg.consistency.tolerance_fraction)
        results = (failed_r1,) + rest.results[1:]
        return InvoiceCheck(results, RuleStatus.FAIL), (f"consistency: {exc}",)


def evaluate_document(doc_id: str, gt: CanonicalInvoice, pred: CanonicalInvoice,
                      cfg: EvalConfig,
                      diagnostics: Sequence[str] = ()) -> DocumentScore:
    started = time.perf_counter()
    outcomes = []
    for spec, gt_value in gt.iter_header():
        if not spec.in_accuracy:
            continue
        outcomes.append(compare_field(spec.path, gt_value,
                                      pred.header_value(spec.path),
                                      cfg.matching, cfg.normalization))

    line_alignment = align_rows(gt.line_items, pred.line_items,
                                cfg.line_items, cfg.matching, cfg.normalization)
    outcomes.extend(aligned_field_outcomes(line_alignment, gt.line_items,
                                           pred.line_items, cfg.matching,
                                           cfg.normalization, prefix="line_items"))
    table = table_completeness(line_alignment, len(gt.line_items), len(pred.line_items))

    tax_alignment = align_rows(gt.tax_lines, pred.tax_lines,
                               cfg.tax_lines, cfg.matching, cfg.normalization)
    outcomes.extend(aligned_field_outcomes(tax_alignment, gt.tax_lines,
                                           pred.tax_lines, cfg.matching,
                                           cfg.normalization, prefix="tax_lines"))

    check, check_diagnostics = _checked(pred, cfg)
    elapsed = time.perf_counter() - started
    return DocumentScore(
        doc_id=doc_id,
        outcomes=tuple(outcomes),
        gt_rows=len(gt.line_items),
        pred_rows=len(pred.line_items),
        matched_rows=len(line_alignment.pairs),
        omissions=table.omissions,
        duplications=table.duplications,
        check=check,
        diagnostics=tuple(diagnostics) + check_diagnostics,
        elapsed_seconds=elapsed,
    )


def evaluate_documents(items: Sequence[tuple[str, CanonicalInvoice, CanonicalInvoice, Sequence[str]]],
                       cfg: EvalConfig, workers: Optional[int] = None) -> list[DocumentScore]:
    """Evaluate (doc_id, gt, pred, diagnostics) tuples, optionally in parallel.

    Results come back in input order whatever the worker count, so every
    downstream aggregate is identical for any parallelism level.
    """
    if workers is None or workers <= 1 or len(items) <= 1:
        return [evaluate_document(doc_id, gt, pred, cfg, diags)
                for doc_id, gt, pred, diags in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(
            lambda item: evaluate_document(item[0], item[1], item[2], cfg, item[3]),
            items))
