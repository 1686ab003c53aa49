"""Field-level match classification.

Each ground-truth/prediction pair lands in exactly one class:

  correct_exact   raw values equal (money/quantity equality is value
                  equality, so 2.50 == 2.5; currency must match)
  correct_relaxed equal after normalization, or inside the configured
                  tolerance window
  incorrect       both present, outside every window
  missing         annotated but not predicted
  spurious        predicted but not annotated
  both_absent     annotated absent and predicted absent

Similarities and thresholds are compared as exact rationals; a string one
edit away from a ten-character value sits exactly on a 0.9 threshold and
must land on the correct side of it deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from . import kernels
from .config import MatchConfig
from .normalize import NormalizationPolicy, normalize_identifier, normalize_text
from .schema import (CURRENCY_UNKNOWN, Date, FieldValue, Identifier, Money,
                     Qty, SemanticType, Text, is_absent, semantic_type_of,
                     tag_matches)


class TypeMismatchError(TypeError):
    """A value's tag disagrees with the registry; that is an adapter bug."""


class MatchClass(str, Enum):
    CORRECT_EXACT = "correct_exact"
    CORRECT_RELAXED = "correct_relaxed"
    INCORRECT = "incorrect"
    MISSING = "missing"
    SPURIOUS = "spurious"
    BOTH_ABSENT = "both_absent"


CORRECT_CLASSES = (MatchClass.CORRECT_EXACT, MatchClass.CORRECT_RELAXED)


@dataclass(frozen=True)
class FieldOutcome:
    field_path: str
    gt: FieldValue
    pred: FieldValue
    match_class: MatchClass
    similarity: Optional[Fraction] = None


def similarity_fraction(a: str, b: str) -> Fraction:
    """1 - levenshtein/max(len); 1 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return Fraction(1)
    return Fraction(longest - kernels.levenshtein(a, b), longest)


def string_similarity(a: str, b: str) -> float:
    return float(similarity_fraction(a, b))


def money_within_tolerance(gt, pred, cfg: MatchConfig) -> bool:
    if (gt.currency != pred.currency
            and CURRENCY_UNKNOWN not in (gt.currency, pred.currency)):
        return False
    diff = abs(gt.as_fraction() - pred.as_fraction())
    tolerance = max(cfg.money_abs_fraction,
                    cfg.money_rel_fraction * abs(gt.as_fraction()))
    return diff <= tolerance


def date_within_tolerance(gt, pred, cfg: MatchConfig) -> bool:
    return abs(gt.ordinal() - pred.ordinal()) <= cfg.date_tol_days


def qty_within_tolerance(gt, pred, cfg: MatchConfig) -> bool:
    return abs(gt.as_fraction() - pred.as_fraction()) <= cfg.qty_abs_fraction


def compare_field(path: str, gt: FieldValue, pred: FieldValue,
                  cfg: MatchConfig, policy: NormalizationPolicy) -> FieldOutcome:
    semantic_type = semantic_type_of(path)
    for side, value in (("ground truth", gt), ("prediction", pred)):
        if not tag_matches(value, semantic_type):
            raise TypeMismatchError(
                f"{side} value at {path} has tag {type(value).__name__}, "
                f"registry declares {semantic_type.value}")

    if is_absent(gt) and is_absent(pred):
        return FieldOutcome(path, gt, pred, MatchClass.BOTH_ABSENT)
    if is_absent(pred):
        return FieldOutcome(path, gt, pred, MatchClass.MISSING)
    if is_absent(gt):
        return FieldOutcome(path, gt, pred, MatchClass.SPURIOUS)

    if semantic_type is SemanticType.TEXT:
        similarity = similarity_fraction(normalize_text(gt.value, policy),
                                         normalize_text(pred.value, policy))
        if gt.value == pred.value:
            cls = MatchClass.CORRECT_EXACT
        elif similarity >= cfg.text_threshold_fraction:
            cls = MatchClass.CORRECT_RELAXED
        else:
            cls = MatchClass.INCORRECT
        return FieldOutcome(path, gt, pred, cls, similarity)

    if semantic_type is SemanticType.IDENTIFIER:
        if gt.value == pred.value:
            return FieldOutcome(path, gt, pred, MatchClass.CORRECT_EXACT, Fraction(1))
        norm_gt = normalize_identifier(gt.value, policy)
        norm_pred = normalize_identifier(pred.value, policy)
        if cfg.identifier_relaxed and norm_gt == norm_pred:
            return FieldOutcome(path, gt, pred, MatchClass.CORRECT_RELAXED, Fraction(1))
        return FieldOutcome(path, gt, pred, MatchClass.INCORRECT,
                            similarity_fraction(norm_gt, norm_pred))

    if semantic_type is SemanticType.DATE:
        if gt.value == pred.value:
            cls = MatchClass.CORRECT_EXACT
        elif date_within_tolerance(gt.value, pred.value, cfg):
            cls = MatchClass.CORRECT_RELAXED
        else:
            cls = MatchClass.INCORRECT
    elif semantic_type is SemanticType.MONEY:
        if gt.value == pred.value:
            cls = MatchClass.CORRECT_EXACT
        elif money_within_tolerance(gt.value, pred.value, cfg):
            cls = MatchClass.CORRECT_RELAXED
        else:
            cls = MatchClass.INCORRECT
    else:  # quantity / percent
        if gt.value == pred.value:
            cls = MatchClass.CORRECT_EXACT
        elif qty_within_tolerance(gt.value, pred.value, cfg):
            cls = MatchClass.CORRECT_RELAXED
        else:
            cls = MatchClass.INCORRECT

    similarity = Fraction(1) if cls in CORRECT_CLASSES else None
    return FieldOutcome(path, gt, pred, cls, similarity)
