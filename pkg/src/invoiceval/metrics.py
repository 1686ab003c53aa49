"""Document- and corpus-level metric aggregation.

Corpus numbers are micro-averages: raw outcome counts are pooled across
documents and divided once, so stratified slices sum back to the corpus
counts exactly and results cannot depend on the order documents finish.
Accuracy denominators contain only annotated fields (ground truth present);
spurious predictions are reported separately and through precision.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .consistency import InvoiceCheck, PassRateSummary, pass_rate
from .fixedpoint import round_half_up
from .matching import FieldOutcome, MatchClass
from .schema import STRATA_DIMENSIONS, DocumentMeta, Entity, entity_of

GT_PRESENT_CLASSES = (MatchClass.CORRECT_EXACT, MatchClass.CORRECT_RELAXED,
                      MatchClass.INCORRECT, MatchClass.MISSING)


class MissingMetadataError(KeyError):
    pass


def ratio_percent(value: Optional[Fraction]) -> Optional[int]:
    """Integer percent, rounded half-up, for table rendering."""
    if value is None:
        return None
    return round_half_up(value * 100)


@dataclass(frozen=True)
class AccuracySummary:
    correct: int
    exact: int
    annotated: int
    spurious: int

    @property
    def overall(self) -> Optional[Fraction]:
        return Fraction(self.correct, self.annotated) if self.annotated else None

    @property
    def exact_only(self) -> Optional[Fraction]:
        return Fraction(self.exact, self.annotated) if self.annotated else None

    # Same value as overall; kept so both match grades are always visible
    # next to each other in reports.
    @property
    def relaxed_included(self) -> Optional[Fraction]:
        return self.overall


def _count_classes(outcomes: Iterable[FieldOutcome]) -> Counter:
    counts: Counter = Counter()
    for outcome in outcomes:
        counts[outcome.match_class] += 1
    return counts


def accuracy_from_counts(counts: Mapping[MatchClass, int]) -> AccuracySummary:
    exact = counts.get(MatchClass.CORRECT_EXACT, 0)
    relaxed = counts.get(MatchClass.CORRECT_RELAXED, 0)
    annotated = sum(counts.get(c, 0) for c in GT_PRESENT_CLASSES)
    return AccuracySummary(correct=exact + relaxed, exact=exact,
                           annotated=annotated,
                           spurious=counts.get(MatchClass.SPURIOUS, 0))


def field_accuracy(outcomes: Iterable[FieldOutcome]) -> AccuracySummary:
    return accuracy_from_counts(_count_classes(outcomes))


@dataclass(frozen=True)
class PrfSummary:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> Fraction:
        return Fraction(self.tp, self.tp + self.fp) if self.tp + self.fp else Fraction(0)

    @property
    def recall(self) -> Fraction:
        return Fraction(self.tp, self.tp + self.fn) if self.tp + self.fn else Fraction(0)

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        if p + r == 0:
            return Fraction(0)
        return 2 * p * r / (p + r)


@dataclass(frozen=True)
class PresenceF1:
    """Variant `presence` scores detection only; `correctness` also requires
    the detected value to match, so a present-but-wrong field costs both a
    false positive and a false negative."""

    presence: PrfSummary
    correctness: PrfSummary


def presence_f1_from_counts(counts: Mapping[MatchClass, int]) -> PresenceF1:
    exact = counts.get(MatchClass.CORRECT_EXACT, 0)
    relaxed = counts.get(MatchClass.CORRECT_RELAXED, 0)
    incorrect = counts.get(MatchClass.INCORRECT, 0)
    missing = counts.get(MatchClass.MISSING, 0)
    spurious = counts.get(MatchClass.SPURIOUS, 0)
    correct = exact + relaxed
    return PresenceF1(
        presence=PrfSummary(tp=correct + incorrect, fp=spurious, fn=missing),
        correctness=PrfSummary(tp=correct, fp=spurious + incorrect,
                               fn=missing + incorrect),
    )


def presence_f1(outcomes: Iterable[FieldOutcome]) -> PresenceF1:
    return presence_f1_from_counts(_count_classes(outcomes))


def entity_breakdown(outcomes: Iterable[FieldOutcome]) -> dict[Entity, AccuracySummary]:
    per_entity: dict[Entity, Counter] = {}
    for outcome in outcomes:
        entity = entity_of(outcome.field_path)
        per_entity.setdefault(entity, Counter())[outcome.match_class] += 1
    return {entity: accuracy_from_counts(counts)
            for entity, counts in per_entity.items()}


@dataclass(frozen=True)
class DocumentScore:
    doc_id: str
    outcomes: tuple[FieldOutcome, ...]
    gt_rows: int
    pred_rows: int
    matched_rows: int
    omissions: int
    duplications: int
    check: InvoiceCheck
    diagnostics: tuple[str, ...] = ()
    elapsed_seconds: Optional[float] = None

    def class_counts(self) -> Counter:
        return _count_classes(self.outcomes)

    def entity_class_counts(self) -> dict[Entity, Counter]:
        result: dict[Entity, Counter] = {}
        for outcome in self.outcomes:
            result.setdefault(entity_of(outcome.field_path), Counter())[outcome.match_class] += 1
        return result

    def accuracy(self) -> AccuracySummary:
        return accuracy_from_counts(self.class_counts())

    def mismatched_paths(self) -> tuple[str, ...]:
        bad = (MatchClass.INCORRECT, MatchClass.MISSING, MatchClass.SPURIOUS)
        return tuple(o.field_path for o in self.outcomes if o.match_class in bad)


@dataclass(frozen=True)
class TimingSummary:
    seconds_per_doc: float
    seconds_per_page: float


@dataclass(frozen=True)
class MetricBlock:
    documents: int
    class_counts: Mapping[MatchClass, int]
    entity_counts: Mapping[Entity, Mapping[MatchClass, int]]
    gt_rows: int
    pred_rows: int
    matched_rows: int
    omissions: int
    duplications: int
    consistency: PassRateSummary
    timing: Optional[TimingSummary] = None

    @property
    def accuracy(self) -> AccuracySummary:
        return accuracy_from_counts(self.class_counts)

    @property
    def f1(self) -> PresenceF1:
        return presence_f1_from_counts(self.class_counts)

    @property
    def per_entity(self) -> dict[Entity, AccuracySummary]:
        return {entity: accuracy_from_counts(counts)
                for entity, counts in self.entity_counts.items()}

    @property
    def completeness(self) -> Fraction:
        if self.gt_rows == 0:
            return Fraction(1)
        return Fraction(self.matched_rows, self.gt_rows)


def pool_documents(doc_scores: Sequence[DocumentScore],
                   metas: Optional[Mapping[str, DocumentMeta]] = None,
                   with_timing: bool = False) -> MetricBlock:
    ordered = sorted(doc_scores, key=lambda d: d.doc_id)
    class_counts: Counter = Counter()
    entity_counts: dict[Entity, Counter] = {}
    gt_rows = pred_rows = matched = omissions = duplications = 0
    for doc in ordered:
        class_counts.update(doc.class_counts())
        for entity, counts in doc.entity_class_counts().items():
            entity_counts.setdefault(entity, Counter()).update(counts)
        gt_rows += doc.gt_rows
        pred_rows += doc.pred_rows
        matched += doc.matched_rows
        omissions += doc.omissions
        duplications += doc.duplications

    timing = None
    if with_timing and ordered and all(d.elapsed_seconds is not None for d in ordered):
        total_seconds = sum(d.elapsed_seconds for d in ordered)
        total_pages = sum(metas[d.doc_id].page_count for d in ordered) if metas else len(ordered)
        timing = TimingSummary(seconds_per_doc=total_seconds / len(ordered),
                               seconds_per_page=total_seconds / total_pages)

    return MetricBlock(
        documents=len(ordered),
        class_counts=dict(class_counts),
        entity_counts={e: dict(c) for e, c in entity_counts.items()},
        gt_rows=gt_rows, pred_rows=pred_rows, matched_rows=matched,
        omissions=omissions, duplications=duplications,
        consistency=pass_rate(d.check for d in ordered),
        timing=timing,
    )


def stratify(doc_scores: Sequence[DocumentScore],
             metas: Mapping[str, DocumentMeta],
             dimension: str) -> list[tuple[str, MetricBlock]]:
    if dimension not in STRATA_DIMENSIONS:
        raise ValueError(f"unknown stratification dimension {dimension!r}")
    partitions: dict[str, list[DocumentScore]] = {}
    for doc in doc_scores:
        if doc.doc_id not in metas:
            raise MissingMetadataError(f"no metadata for document {doc.doc_id!r}")
        key = getattr(metas[doc.doc_id], dimension)
        partitions.setdefault(key, []).append(doc)
    return [(key, pool_documents(partitions[key], metas))
            for key in sorted(partitions)]


@dataclass(frozen=True)
class MethodReport:
    method: str
    block: MetricBlock
    strata: Mapping[str, Sequence[tuple[str, MetricBlock]]]
    documents: tuple[DocumentScore, ...]


def aggregate_corpus(doc_scores: Sequence[DocumentScore],
                     metas: Mapping[str, DocumentMeta],
                     method: str = "", with_timing: bool = False) -> MethodReport:
    ordered = tuple(sorted(doc_scores, key=lambda d: d.doc_id))
    for doc in ordered:
        if doc.doc_id not in metas:
            raise MissingMetadataError(f"no metadata for document {doc.doc_id!r}")
    return MethodReport(
        method=method,
        block=pool_documents(ordered, metas, with_timing=with_timing),
        strata={dim: stratify(ordered, metas, dim) for dim in STRATA_DIMENSIONS},
        documents=ordered,
    )


@dataclass(frozen=True)
class EvaluationReport:
    corpus_id: str
    config: Mapping
    methods: Mapping[str, MethodReport] = field(default_factory=dict)
