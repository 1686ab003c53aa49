"""Line-item row alignment by optimal assignment.

Predicted rows are assigned to ground-truth rows by maximizing total row
similarity over injective partial matchings, rejecting pairs below the
acceptance threshold. Ties are broken toward the lexicographically smallest
(gt_index, pred_index) pair sequence, so scores never depend on input order
or on which of several equally-good matchings a solver happens to find.

The solver works in exact arithmetic. Similarities arrive as rationals and
are scaled to integers; a per-cell power-of-two bonus encodes the
lexicographic preference strictly below the primary objective (any gain in
total similarity is at least one integer unit, which the summed bonuses can
never reach). Zero-similarity cells are discarded up front — a pair that
contributes nothing is never reported as matched — which also makes the
bonus encoding sound: among equal-total matchings none can be a strict
superset of another.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Optional, Sequence

from .config import MatchConfig, RowConfig
from .matching import (CORRECT_CLASSES, FieldOutcome, MatchClass,
                       compare_field)
from .normalize import NormalizationPolicy
from .schema import (ABSENT, LineItem, SemanticType, TaxLine, is_absent,
                     semantic_type_of)

_INF = float("inf")


@dataclass(frozen=True)
class RowAlignment:
    """pairs hold (gt_index, pred_index, similarity); unmatched ground-truth
    rows are omissions, unmatched predicted rows are duplications/spurious."""

    pairs: tuple[tuple[int, int, Fraction], ...]
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]

    def total_similarity(self) -> Fraction:
        return sum((s for _, _, s in self.pairs), Fraction(0))


@dataclass(frozen=True)
class TableScore:
    completeness: Fraction
    omissions: int
    duplications: int


def _solve_square_min_cost(cost: list[list[int]]) -> list[int]:
    """Minimum-cost perfect matching on a square integer matrix.

    Shortest-augmenting-path method with potentials; returns the column
    assigned to each row.
    """
    n = len(cost)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    matched_row = [0] * (n + 1)  # matched_row[col 1..n] = row, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        matched_row[0] = i
        j0 = 0
        minv = [_INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = matched_row[j0]
            delta = _INF
            j1 = 0
            row = cost[i0 - 1]
            ui = u[i0]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - ui - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[matched_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if matched_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            matched_row[j0] = matched_row[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        if matched_row[j]:
            assignment[matched_row[j] - 1] = j - 1
    return assignment


def max_weight_assignment(matrix: Sequence[Sequence[Fraction]],
                          threshold: Fraction) -> RowAlignment:
    """Optimal injective partial matching over cells with weight >= threshold."""
    n = len(matrix)
    m = len(matrix[0]) if n else 0
    eligible = [[sim >= threshold and sim > 0 for sim in row] for row in matrix]

    cells = [(i, j) for i in range(n) for j in range(m) if eligible[i][j]]
    if not cells:
        return RowAlignment((), tuple(range(n)), tuple(range(m)))

    denominator = lcm(*(matrix[i][j].denominator for i, j in cells))
    bonus_bits = n * m
    scale = 1 << bonus_bits

    size = n + m
    cost = [[0] * size for _ in range(size)]
    for i in range(n):
        for j in range(m):
            if eligible[i][j]:
                sim = matrix[i][j]
                weight = (sim.numerator * (denominator // sim.denominator) * scale
                          + (1 << (bonus_bits - 1 - (i * m + j))))
                cost[i][j] = -weight
            else:
                cost[i][j] = 1

    assignment = _solve_square_min_cost(cost)
    pairs = []
    for i in range(n):
        j = assignment[i]
        if j < m and eligible[i][j]:
            pairs.append((i, j, matrix[i][j]))
    pairs.sort()
    matched_gt = {i for i, _, _ in pairs}
    matched_pred = {j for _, j, _ in pairs}
    return RowAlignment(
        pairs=tuple(pairs),
        unmatched_gt=tuple(i for i in range(n) if i not in matched_gt),
        unmatched_pred=tuple(j for j in range(m) if j not in matched_pred),
    )


def _row_field_names(row) -> tuple[str, ...]:
    if isinstance(row, TaxLine):
        return ("rate", "taxable_base", "tax_amount")
    return ("description", "quantity", "unit_price", "line_total", "tax_rate")


def _table_prefix(row) -> str:
    return "tax_lines" if isinstance(row, TaxLine) else "line_items"


def row_similarity_fraction(gt_row, pred_row, cfg: RowConfig,
                            mcfg: MatchConfig, policy: NormalizationPolicy) -> Fraction:
    """Weighted per-field score; weights of fields absent on both sides are
    redistributed proportionally. All fields absent on both sides scores 1."""
    prefix = _table_prefix(gt_row)
    total_weight = Fraction(0)
    score = Fraction(0)
    for name in _row_field_names(gt_row):
        weight = cfg.weight_fractions.get(name, Fraction(0))
        outcome = compare_field(f"{prefix}[].{name}", getattr(gt_row, name),
                                getattr(pred_row, name), mcfg, policy)
        if outcome.match_class is MatchClass.BOTH_ABSENT:
            continue
        total_weight += weight
        if outcome.match_class in CORRECT_CLASSES:
            score += weight
        elif (outcome.match_class is MatchClass.INCORRECT
              and semantic_type_of(f"{prefix}[].{name}") is SemanticType.TEXT):
            score += weight * outcome.similarity
    if total_weight == 0:
        return Fraction(1)
    return score / total_weight


def row_similarity(gt_row, pred_row, cfg: RowConfig, mcfg: MatchConfig,
                   policy: NormalizationPolicy) -> float:
    return float(row_similarity_fraction(gt_row, pred_row, cfg, mcfg, policy))


def align_rows(gt_rows: Sequence, pred_rows: Sequence, cfg: RowConfig,
               mcfg: MatchConfig, policy: NormalizationPolicy) -> RowAlignment:
    matrix = [[row_similarity_fraction(g, p, cfg, mcfg, policy) for p in pred_rows]
              for g in gt_rows]
    if not gt_rows:
        return RowAlignment((), (), tuple(range(len(pred_rows))))
    return max_weight_assignment(matrix, cfg.threshold_fraction)


def table_completeness(alignment: RowAlignment, gt_count: int,
                       pred_count: int) -> TableScore:
    if gt_count == 0:
        # Nothing to find: vacuously complete; stray predictions count as
        # duplications.
        return TableScore(Fraction(1), 0, pred_count)
    return TableScore(Fraction(len(alignment.pairs), gt_count),
                      len(alignment.unmatched_gt),
                      len(alignment.unmatched_pred))


def _present_fields(row) -> list[str]:
    return [name for name in _row_field_names(row)
            if not is_absent(getattr(row, name))]


def aligned_field_outcomes(alignment: RowAlignment, gt_rows: Sequence,
                           pred_rows: Sequence, mcfg: MatchConfig,
                           policy: NormalizationPolicy,
                           prefix: Optional[str] = None) -> list[FieldOutcome]:
    """Field outcomes implied by an alignment: matched pairs compare all row
    fields; omitted rows emit one missing outcome per present field; extra
    predicted rows emit one spurious outcome per present field."""
    outcomes: list[FieldOutcome] = []
    if prefix is None:
        sample = gt_rows[0] if gt_rows else (pred_rows[0] if pred_rows else LineItem())
        prefix = _table_prefix(sample)
    names = _row_field_names(gt_rows[0] if gt_rows else
                             (pred_rows[0] if pred_rows else LineItem()))
    for gi, pi, _ in alignment.pairs:
        for name in names:
            outcomes.append(compare_field(f"{prefix}[{gi}].{name}",
                                          getattr(gt_rows[gi], name),
                                          getattr(pred_rows[pi], name),
                                          mcfg, policy))
    for gi in alignment.unmatched_gt:
        for name in _present_fields(gt_rows[gi]):
            outcomes.append(FieldOutcome(f"{prefix}[{gi}].{name}",
                                         getattr(gt_rows[gi], name), ABSENT,
                                         MatchClass.MISSING))
    for pi in alignment.unmatched_pred:
        for name in _present_fields(pred_rows[pi]):
            outcomes.append(FieldOutcome(f"{prefix}[pred={pi}].{name}",
                                         ABSENT, getattr(pred_rows[pi], name),
                                         MatchClass.SPURIOUS))
    return outcomes


def line_item_field_accuracy(alignment: RowAlignment, gt_rows: Sequence[LineItem],
                             pred_rows: Sequence[LineItem], mcfg: MatchConfig,
                             policy: NormalizationPolicy) -> list[FieldOutcome]:
    return aligned_field_outcomes(alignment, gt_rows, pred_rows, mcfg, policy,
                                  prefix="line_items")
