"""Evaluation configuration: defaults, JSON loading, and serialization.

The config file is UTF-8 JSON with sections normalization, matching,
line_items, tax_lines, consistency, report, and adapters. Every key is
optional; omitted keys take the defaults below. Numeric thresholds are
read as exact decimals (JSON numbers are parsed with Decimal, strings are
accepted too) so that threshold comparisons never suffer float noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Mapping, Optional

from .normalize import DATE_ORDERS, NormalizationPolicy
from .schema import LINE_ITEM_TYPES, TAX_LINE_TYPES


class ConfigError(ValueError):
    pass


def _decimal(value, key: str) -> Decimal:
    try:
        if isinstance(value, Decimal):
            return value
        if isinstance(value, (int, str)):
            return Decimal(value)
        if isinstance(value, float):
            # Floats only appear when callers hand-build config dicts.
            return Decimal(str(value))
    except InvalidOperation:
        pass
    raise ConfigError(f"{key}: expected a decimal number, got {value!r}")


@dataclass
class MatchConfig:
    relaxed_text_threshold: Decimal = Decimal("0.90")
    money_abs_tol: Decimal = Decimal("0.01")
    money_rel_tol: Decimal = Decimal("0.0001")
    qty_abs_tol: Decimal = Decimal("0.001")
    date_tol_days: int = 0
    identifier_relaxed: bool = True

    def __post_init__(self):
        if not 0 <= self.relaxed_text_threshold <= 1:
            raise ConfigError("relaxed_text_threshold must be in [0, 1]")
        for name in ("money_abs_tol", "money_rel_tol", "qty_abs_tol"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.date_tol_days < 0:
            raise ConfigError("date_tol_days must be non-negative")
        self.text_threshold_fraction = Fraction(self.relaxed_text_threshold)
        self.money_abs_fraction = Fraction(self.money_abs_tol)
        self.money_rel_fraction = Fraction(self.money_rel_tol)
        self.qty_abs_fraction = Fraction(self.qty_abs_tol)


@dataclass
class RowConfig:
    """Weights and acceptance threshold for one row table."""

    field_weights: Mapping[str, Decimal]
    min_row_similarity: Decimal = Decimal("0.50")

    def __post_init__(self):
        self.field_weights = {k: _decimal(v, f"field_weights.{k}")
                              for k, v in self.field_weights.items()}
        if any(w < 0 for w in self.field_weights.values()):
            raise ConfigError("field weights must be non-negative")
        if sum(self.field_weights.values()) != 1:
            raise ConfigError("field weights must sum to 1")
        if not 0 <= self.min_row_similarity <= 1:
            raise ConfigError("min_row_similarity must be in [0, 1]")
        self.weight_fractions = {k: Fraction(v) for k, v in self.field_weights.items()}
        self.threshold_fraction = Fraction(self.min_row_similarity)


def default_line_item_config() -> RowConfig:
    return RowConfig(field_weights={
        "description": Decimal("0.4"),
        "quantity": Decimal("0.15"),
        "unit_price": Decimal("0.15"),
        "line_total": Decimal("0.25"),
        "tax_rate": Decimal("0.05"),
    })


def default_tax_line_config() -> RowConfig:
    return RowConfig(field_weights={
        "rate": Decimal("0.25"),
        "taxable_base": Decimal("0.35"),
        "tax_amount": Decimal("0.40"),
    })


@dataclass
class ConsistencyConfig:
    tolerance: Decimal = Decimal("0.01")

    def __post_init__(self):
        if self.tolerance < 0:
            raise ConfigError("consistency tolerance must be non-negative")
        self.tolerance_fraction = Fraction(self.tolerance)


@dataclass
class MethodPresentation:
    display_name: Optional[str] = None
    annotations: Mapping[str, str] = field(default_factory=dict)


@dataclass
class ReportConfig:
    include_timings: bool = False
    methods: Mapping[str, MethodPresentation] = field(default_factory=dict)


@dataclass
class AdapterConfig:
    flat_kv_aliases: Mapping[str, Mapping[str, str]] = field(default_factory=dict)


@dataclass
class EvalConfig:
    normalization: NormalizationPolicy = field(default_factory=NormalizationPolicy)
    matching: MatchConfig = field(default_factory=MatchConfig)
    line_items: RowConfig = field(default_factory=default_line_item_config)
    tax_lines: RowConfig = field(default_factory=default_tax_line_config)
    consistency: ConsistencyConfig = field(default_factory=ConsistencyConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    adapters: AdapterConfig = field(default_factory=AdapterConfig)


def default_config() -> EvalConfig:
    return EvalConfig()


def _build_policy(section: Mapping) -> NormalizationPolicy:
    kwargs = {}
    if "date_order" in section:
        if section["date_order"] not in DATE_ORDERS:
            raise ConfigError(f"date_order must be one of {DATE_ORDERS}")
        kwargs["date_order"] = section["date_order"]
    for flag in ("text_case_fold", "text_collapse_whitespace", "text_strip_diacritics"):
        if flag in section:
            kwargs[flag] = bool(section[flag])
    if "identifier_strip" in section:
        kwargs["identifier_strip"] = frozenset(section["identifier_strip"])
    if "default_currency" in section:
        kwargs["default_currency"] = str(section["default_currency"])
    return NormalizationPolicy(**kwargs)


def _build_matching(section: Mapping) -> MatchConfig:
    cfg = MatchConfig(
        relaxed_text_threshold=_decimal(section.get("relaxed_text_threshold", "0.90"),
                                        "relaxed_text_threshold"),
        money_abs_tol=_decimal(section.get("money_abs_tol", "0.01"), "money_abs_tol"),
        money_rel_tol=_decimal(section.get("money_rel_tol", "0.0001"), "money_rel_tol"),
        qty_abs_tol=_decimal(section.get("qty_abs_tol", "0.001"), "qty_abs_tol"),
        date_tol_days=int(section.get("date_tol_days", 0)),
        identifier_relaxed=bool(section.get("identifier_relaxed", True)),
    )
    return cfg


def _build_rows(section: Mapping, defaults: RowConfig, allowed: tuple[str, ...]) -> RowConfig:
    weights = dict(defaults.field_weights)
    if "field_weights" in section:
        supplied = section["field_weights"]
        unknown = set(supplied) - set(allowed)
        if unknown:
            raise ConfigError(f"unknown row fields in weights: {sorted(unknown)}")
        weights = {k: _decimal(v, f"field_weights.{k}") for k, v in supplied.items()}
        for name in allowed:
            weights.setdefault(name, Decimal(0))
    return RowConfig(
        field_weights=weights,
        min_row_similarity=_decimal(section.get("min_row_similarity", "0.50"),
                                    "min_row_similarity"),
    )


def config_from_dict(data: Mapping) -> EvalConfig:
    known = {"normalization", "matching", "line_items", "tax_lines",
             "consistency", "report", "adapters"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    report_section = data.get("report", {})
    methods = {}
    for name, body in report_section.get("methods", {}).items():
        methods[name] = MethodPresentation(
            display_name=body.get("display_name"),
            annotations={str(k): str(v) for k, v in body.get("annotations", {}).items()},
        )
    return EvalConfig(
        normalization=_build_policy(data.get("normalization", {})),
        matching=_build_matching(data.get("matching", {})),
        line_items=_build_rows(data.get("line_items", {}), default_line_item_config(),
                               tuple(LINE_ITEM_TYPES)),
        tax_lines=_build_rows(data.get("tax_lines", {}), default_tax_line_config(),
                              tuple(TAX_LINE_TYPES)),
        consistency=ConsistencyConfig(
            tolerance=_decimal(data.get("consistency", {}).get("tolerance", "0.01"),
                               "consistency.tolerance")),
        report=ReportConfig(
            include_timings=bool(report_section.get("include_timings", False)),
            methods=methods,
        ),
        adapters=AdapterConfig(
            flat_kv_aliases={
                str(scope): {str(k): str(v) for k, v in table.items()}
                for scope, table in data.get("adapters", {}).get("flat_kv_aliases", {}).items()
            },
        ),
    )


def load_config(path) -> EvalConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    return config_from_dict(data)


def config_to_dict(cfg: EvalConfig) -> dict:
    """Serializable view of the full effective config, embedded in reports."""
    pol = cfg.normalization
    return {
        "normalization": {
            "date_order": pol.date_order,
            "text_case_fold": pol.text_case_fold,
            "text_collapse_whitespace": pol.text_collapse_whitespace,
            "text_strip_diacritics": pol.text_strip_diacritics,
            "identifier_strip": "".join(sorted(pol.identifier_strip)),
            "default_currency": pol.default_currency,
        },
        "matching": {
            "relaxed_text_threshold": str(cfg.matching.relaxed_text_threshold),
            "money_abs_tol": str(cfg.matching.money_abs_tol),
            "money_rel_tol": str(cfg.matching.money_rel_tol),
            "qty_abs_tol": str(cfg.matching.qty_abs_tol),
            "date_tol_days": cfg.matching.date_tol_days,
            "identifier_relaxed": cfg.matching.identifier_relaxed,
        },
        "line_items": {
            "field_weights": {k: str(v) for k, v in cfg.line_items.field_weights.items()},
            "min_row_similarity": str(cfg.line_items.min_row_similarity),
        },
        "tax_lines": {
            "field_weights": {k: str(v) for k, v in cfg.tax_lines.field_weights.items()},
            "min_row_similarity": str(cfg.tax_lines.min_row_similarity),
        },
        "consistency": {"tolerance": str(cfg.consistency.tolerance)},
        "report": {
            "include_timings": cfg.report.include_timings,
            "methods": {
                name: {"display_name": pres.display_name,
                       "annotations": dict(pres.annotations)}
                for name, pres in sorted(cfg.report.methods.items())
            },
        },
        "adapters": {
            "flat_kv_aliases": {scope: dict(table)
                                for scope, table in sorted(cfg.adapters.flat_kv_aliases.items())},
        },
    }
