"""Command-line interface: evaluate, check, synth, report.

Exit codes: 0 success; 1 a configured --gate threshold was violated (or a
checked invoice failed its rules); 2 malformed input or config; 3 internal
fault.
"""

from __future__ import annotations

import json
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

import click

from .config import ConfigError, EvalConfig, config_to_dict, default_config, load_config
from .consistency import CurrencyMixtureError, RuleStatus, check_invoice
from .corpus import (CorpusFormatError, ManifestError, dump_report_json,
                     load_ground_truth, load_manifest, load_prediction,
                     render_markdown, report_to_dict, write_report)
from .metrics import EvaluationReport, aggregate_corpus
from .pipeline import evaluate_documents
from .synth import ErrorSpec, GenConfig, write_synthetic_corpus

EXIT_OK = 0
EXIT_GATE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

GATE_METRICS = ("accuracy", "exact_accuracy", "f1_presence", "f1_correctness",
                "pass_rate", "completeness")


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path) -> EvalConfig:
    if path is None:
        return default_config()
    return load_config(path)


def _gate_value(block, metric: str):
    if metric == "accuracy":
        return block.accuracy.overall
    if metric == "exact_accuracy":
        return block.accuracy.exact_only
    if metric == "f1_presence":
        return block.f1.presence.f1
    if metric == "f1_correctness":
        return block.f1.correctness.f1
    if metric == "pass_rate":
        return block.consistency.pass_rate
    if metric == "completeness":
        return block.completeness
    raise ConfigError(f"unknown gate metric {metric!r}; expected one of {GATE_METRICS}")


def _parse_gates(gates) -> list[tuple[str, Fraction]]:
    parsed = []
    for gate in gates:
        name, _, raw = gate.partition("=")
        if not raw:
            raise ConfigError(f"gate {gate!r} must look like METRIC=VALUE")
        if name not in GATE_METRICS:
            raise ConfigError(f"unknown gate metric {name!r}; expected one of {GATE_METRICS}")
        try:
            parsed.append((name, Fraction(Decimal(raw))))
        except InvalidOperation as exc:
            raise ConfigError(f"gate {gate!r}: bad value") from exc
    return parsed


def _percent(value) -> str:
    if value is None:
        return "n/a"
    return f"{float(value) * 100:.2f}%"


@click.group()
def main():
    """Deterministic scoring of invoice-extraction output against ground truth."""


@main.command()
@click.argument("manifest_path", metavar="MANIFEST", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Evaluation config JSON.")
@click.option("--method", "methods", multiple=True,
              help="Evaluate only these methods (repeatable).")
@click.option("--out", "out_path", type=click.Path(), default="report.json",
              show_default=True, help="Report output path.")
@click.option("--format", "fmt", type=click.Choice(["json", "md"]), default="json",
              show_default=True)
@click.option("--workers", type=int, default=None,
              help="Parallel document evaluation (default: CPU count).")
@click.option("--seed", type=int, default=None, hidden=True)
@click.option("--timings", is_flag=True,
              help="Include measured wall time in the report (non-reproducible bytes).")
@click.option("--gate", "gates", multiple=True, metavar="METRIC=VALUE",
              help="Fail (exit 1) when a metric lands below VALUE (repeatable).")
def evaluate(manifest_path, config_path, methods, out_path, fmt, workers,
             seed, timings, gates):
    """Score every (document, method) pair in MANIFEST and write a report."""
    del seed  # accepted for interface uniformity; evaluation is seed-free
    try:
        cfg = _load_config(config_path)
        gate_list = _parse_gates(gates)
        manifest = load_manifest(manifest_path)
        selected = manifest.methods()
        if methods:
            unknown = set(methods) - set(selected)
            if unknown:
                raise ManifestError("schema", f"unknown methods requested: {sorted(unknown)}")
            selected = tuple(m for m in selected if m in methods)

        ground_truth = {}
        metas = {}
        for doc in manifest.documents:
            ground_truth[doc.doc_id] = load_ground_truth(manifest, doc)
            metas[doc.doc_id] = doc.meta

        include_timings = timings or cfg.report.include_timings
        method_reports = {}
        for method in selected:
            items = []
            for doc in manifest.documents:
                envelope, diagnostics = load_prediction(manifest, doc, method, cfg)
                items.append((doc.doc_id, ground_truth[doc.doc_id],
                              envelope.invoice, tuple(diagnostics)))
            scores = evaluate_documents(items, cfg, workers=workers)
            method_reports[method] = aggregate_corpus(
                scores, metas, method=method, with_timing=include_timings)

        report = EvaluationReport(corpus_id=manifest.corpus_id,
                                  config=config_to_dict(cfg),
                                  methods=method_reports)
        report_dict = report_to_dict(report)
        write_report(report_dict, fmt, out_path)
    except (ConfigError, ManifestError, CorpusFormatError, OSError) as exc:
        _fail(str(exc), EXIT_INPUT)
        return
    except Exception as exc:  # pragma: no cover - defensive
        _fail(f"internal: {exc!r}", EXIT_INTERNAL)
        return

    gate_violated = False
    for method in sorted(method_reports):
        block = method_reports[method].block
        click.echo(
            f"{method}: accuracy {_percent(block.accuracy.overall)}, "
            f"exact {_percent(block.accuracy.exact_only)}, "
            f"pass rate {_percent(block.consistency.pass_rate)}, "
            f"completeness {_percent(block.completeness)}, "
            f"docs {block.documents}")
        for name, threshold in gate_list:
            value = _gate_value(block, name)
            if value is None or value < threshold:
                click.echo(f"{method}: gate {name}={float(threshold)} violated "
                           f"(actual {_percent(value)})", err=True)
                gate_violated = True
    click.echo(f"report written to {out_path}")
    sys.exit(EXIT_GATE if gate_violated else EXIT_OK)


@main.command()
@click.argument("invoice_path", metavar="INVOICE", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
def check(invoice_path, config_path):
    """Run the four consistency rules over one canonical invoice record."""
    try:
        cfg = _load_config(config_path)
        from .corpus import load_invoice_file
        invoice, _ = load_invoice_file(invoice_path, strict=True)
        result = check_invoice(invoice, cfg.consistency.tolerance_fraction)
    except (ConfigError, CorpusFormatError, CurrencyMixtureError, OSError) as exc:
        _fail(str(exc), EXIT_INPUT)
        return
    for rule in result.results:
        residual = "n/a" if rule.residual is None else str(rule.residual)
        click.echo(f"{rule.rule_id}: {rule.status.value} residual={residual} "
                   f"({rule.detail})")
    click.echo(f"verdict: {result.verdict.value}")
    sys.exit(EXIT_GATE if result.verdict is RuleStatus.FAIL else EXIT_OK)


def _error_spec_from_file(path, default_seed: int) -> ErrorSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"error spec {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"error spec {path}: top level must be an object")
    kwargs = {"seed": int(data.get("seed", default_seed)),
              "counts": {str(k): int(v) for k, v in data.get("counts", {}).items()}}
    for key in ("money_delta_minor", "date_delta_days", "text_edits"):
        if key in data:
            lo, hi = data[key]
            kwargs[key] = (int(lo), int(hi))
    if "within_tolerance" in data:
        kwargs["within_tolerance"] = frozenset(str(k) for k in data["within_tolerance"])
    try:
        return ErrorSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"error spec {path}: {exc}") from exc


@main.command()
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--n", "n_docs", type=int, required=True, help="Document count.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--errors", "errors_path", type=click.Path(), default=None,
              help="ErrorSpec JSON; omitted means predictions equal ground truth.")
@click.option("--method-name", default="synthetic", show_default=True)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--min-lines", type=int, default=1, show_default=True)
@click.option("--max-lines", type=int, default=5, show_default=True)
def synth(out_dir, n_docs, seed, errors_path, method_name, config_path,
          min_lines, max_lines):
    """Write a seeded synthetic corpus (manifest, ground truth, predictions,
    error ledger) that `evaluate` can consume directly."""
    try:
        if n_docs < 1:
            raise ConfigError("--n must be at least 1: a corpus needs a document")
        cfg = _load_config(config_path)
        spec = None
        if errors_path is not None:
            spec = _error_spec_from_file(errors_path, seed)
        summary = write_synthetic_corpus(
            out_dir, n_docs, seed, cfg,
            gen=GenConfig(min_lines=min_lines, max_lines=max_lines),
            spec=spec, method_name=method_name)
    except (ConfigError, ValueError, OSError) as exc:
        _fail(str(exc), EXIT_INPUT)
        return
    click.echo(f"wrote {summary['documents']} documents "
               f"({summary['errors']} injected errors) to {out_dir}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("report_path", metavar="REPORT_JSON", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "md"]), default="md",
              show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output path; stdout when omitted.")
def report(report_path, fmt, out_path):
    """Re-render an existing report JSON without recomputing anything."""
    try:
        data = json.loads(Path(report_path).read_text(encoding="utf-8"))
        if not isinstance(data, dict) or "methods" not in data:
            raise CorpusFormatError(f"{report_path}: not an evaluation report")
        rendered = dump_report_json(data) if fmt == "json" else render_markdown(data)
    except (OSError, json.JSONDecodeError, CorpusFormatError) as exc:
        _fail(str(exc), EXIT_INPUT)
        return
    if out_path is None:
        click.echo(rendered, nl=False)
    else:
        Path(out_path).write_text(rendered, encoding="utf-8", newline="\n")
        click.echo(f"report written to {out_path}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
