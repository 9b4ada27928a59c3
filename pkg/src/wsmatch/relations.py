"""Relation algebra between data sets and operations, and the correspondence table.

Set relations come from threshold-gated coverage over the sentence-similarity
matrix: a set is covered when every one of its sentences has some counterpart
scoring strictly above the threshold. Coverage both ways is equality, one way
is subset, no cell above threshold is disjoint, anything else intersects.
The checks overlap by construction, so evaluation priority is fixed:
Equal, then subset, then Disjoint, then Intersect.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from wsmatch.engine import Weights
from wsmatch.errors import WsMatchError
from wsmatch.textsim import SimilarityCalculator, SimilarityMatrix
from wsmatch.wsdl import DataSet, ServiceDescription

DEFAULT_THRESHOLD = 0.5


class SetRelation(Enum):
    EQUAL = "Equal"
    LEFT_SUBSET_OF_RIGHT = "LeftSubsetOfRight"
    RIGHT_SUBSET_OF_LEFT = "RightSubsetOfLeft"
    INTERSECT = "Intersect"
    DISJOINT = "Disjoint"


_SUBSETS = (SetRelation.LEFT_SUBSET_OF_RIGHT, SetRelation.RIGHT_SUBSET_OF_LEFT)


class OperationRelationKind(Enum):
    EQUALITY = "Equality"
    CORESTRICTION = "Corestriction"
    RESTRICTION = "Restriction"
    PROLONGATION = "Prolongation"
    INTERSECTION = "Intersection"
    DIFFERENCE = "Difference"


# Administrator-facing preference order; lower is better.
RELATION_PRIORITY = {
    OperationRelationKind.EQUALITY: 1,
    OperationRelationKind.CORESTRICTION: 2,
    OperationRelationKind.RESTRICTION: 3,
    OperationRelationKind.PROLONGATION: 4,
    OperationRelationKind.INTERSECTION: 5,
    OperationRelationKind.DIFFERENCE: 6,
}


class Direction(Enum):
    LEFT_TO_RIGHT = "leftToRight"
    RIGHT_TO_LEFT = "rightToLeft"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class OperationRelation:
    kind: OperationRelationKind
    direction: Direction = Direction.SYMMETRIC

    def __post_init__(self):
        symmetric_kinds = (
            OperationRelationKind.EQUALITY,
            OperationRelationKind.INTERSECTION,
            OperationRelationKind.DIFFERENCE,
        )
        if (self.direction is Direction.SYMMETRIC) != (self.kind in symmetric_kinds):
            raise ValueError(f"direction {self.direction} invalid for {self.kind}")


def data_set_relation(
    calc: SimilarityCalculator,
    left: DataSet,
    right: DataSet,
    threshold: float = DEFAULT_THRESHOLD,
) -> SetRelation:
    """Classify the relation between two data sets at the given threshold.

    Coverage is strict: a similarity of exactly ``threshold`` does not count.
    Empty sets are vacuously covered, so empty vs empty is Equal and empty vs
    non-empty is a subset.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold {threshold} outside (0, 1)")
    s1, s2 = left.sentences, right.sentences
    matrix = [
        [calc.sentence_similarity(a, b) for b in s2]
        for a in s1
    ]
    return relation_from_matrix(matrix, len(s1), len(s2), threshold)


def relation_from_matrix(matrix, n: int, m: int, threshold: float) -> SetRelation:
    """Apply the coverage rules to a precomputed n-by-m similarity matrix."""
    left_covered = all(
        any(matrix[i][j] > threshold for j in range(m)) for i in range(n)
    )
    right_covered = all(
        any(matrix[i][j] > threshold for i in range(n)) for j in range(m)
    )
    if left_covered and right_covered:
        return SetRelation.EQUAL
    if left_covered:
        return SetRelation.LEFT_SUBSET_OF_RIGHT
    if right_covered:
        return SetRelation.RIGHT_SUBSET_OF_LEFT
    any_above = any(
        matrix[i][j] > threshold for i in range(n) for j in range(m)
    )
    if not any_above:
        return SetRelation.DISJOINT
    return SetRelation.INTERSECT


def classify_operation_pair(
    r_in: SetRelation, r_out: SetRelation
) -> OperationRelation:
    """Map the (input relation, output relation) pair to an operation relation.

    Total over all 25 combinations; direction is taken from the subset
    operand(s) where the relation has one.
    """
    if r_in is SetRelation.EQUAL and r_out is SetRelation.EQUAL:
        return OperationRelation(OperationRelationKind.EQUALITY)
    if r_in is SetRelation.EQUAL and r_out in _SUBSETS:
        return OperationRelation(
            OperationRelationKind.CORESTRICTION, _subset_direction(r_out)
        )
    if r_out is SetRelation.EQUAL and r_in in _SUBSETS:
        return OperationRelation(
            OperationRelationKind.RESTRICTION, _subset_direction(r_in)
        )
    if r_in in _SUBSETS and r_in is r_out:
        return OperationRelation(
            OperationRelationKind.PROLONGATION, _subset_direction(r_in)
        )
    if r_in is SetRelation.DISJOINT or r_out is SetRelation.DISJOINT:
        return OperationRelation(OperationRelationKind.DIFFERENCE)
    return OperationRelation(OperationRelationKind.INTERSECTION)


def _subset_direction(relation: SetRelation) -> Direction:
    return (
        Direction.LEFT_TO_RIGHT
        if relation is SetRelation.LEFT_SUBSET_OF_RIGHT
        else Direction.RIGHT_TO_LEFT
    )


@dataclass(frozen=True)
class Cell:
    relation: OperationRelation
    score: float


@dataclass(frozen=True)
class CorrespondenceTable:
    """Grid of (relation, similarity) over substituted x substituent operations."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[tuple[Cell, ...], ...]
    threshold: float = DEFAULT_THRESHOLD

    def cell(self, row: str, col: str) -> Cell:
        return self.cells[self.rows.index(row)][self.cols.index(col)]

    def to_json_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "threshold": self.threshold,
            "cells": [
                [
                    {
                        "relation": cell.relation.kind.value,
                        "direction": cell.relation.direction.value,
                        "score": cell.score,
                    }
                    for cell in row
                ]
                for row in self.cells
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CorrespondenceTable":
        cells = tuple(
            tuple(
                Cell(
                    OperationRelation(
                        OperationRelationKind(c["relation"]),
                        Direction(c["direction"]),
                    ),
                    c["score"],
                )
                for c in row
            )
            for row in data["cells"]
        )
        return cls(
            rows=tuple(data["rows"]),
            cols=tuple(data["cols"]),
            cells=cells,
            threshold=data.get("threshold", DEFAULT_THRESHOLD),
        )


def build_correspondence_table(
    calc: SimilarityCalculator,
    substituted: ServiceDescription,
    substituent: ServiceDescription,
    scores: SimilarityMatrix,
    threshold: float = DEFAULT_THRESHOLD,
) -> CorrespondenceTable:
    """Classify every operation pair, reusing the similarity matrix for scores."""
    n, m = len(substituted.operations), len(substituent.operations)
    if scores.rows != n or scores.cols != m:
        raise WsMatchError(
            f"score matrix is {scores.rows}x{scores.cols}, expected {n}x{m}"
        )
    cells = []
    for i, f in enumerate(substituted.operations):
        row = []
        for j, g in enumerate(substituent.operations):
            relation = classify_operation_pair(
                data_set_relation(calc, f.input, g.input, threshold),
                data_set_relation(calc, f.output, g.output, threshold),
            )
            row.append(Cell(relation, scores.values[i][j]))
        cells.append(tuple(row))
    return CorrespondenceTable(
        rows=substituted.operation_names(),
        cols=substituent.operation_names(),
        cells=tuple(cells),
        threshold=threshold,
    )


@dataclass(frozen=True)
class SuggestionEntry:
    col: str
    relation: OperationRelation
    score: float


@dataclass(frozen=True)
class RowSuggestions:
    row: str
    entries: tuple[SuggestionEntry, ...]
    no_match: bool

    def to_json_dict(self) -> dict:
        return {
            "row": self.row,
            "noMatch": self.no_match,
            "entries": [
                {
                    "col": e.col,
                    "relation": e.relation.kind.value,
                    "direction": e.relation.direction.value,
                    "score": e.score,
                }
                for e in self.entries
            ],
        }


def suggest_matching(table: CorrespondenceTable) -> tuple[RowSuggestions, ...]:
    """Per substituted operation: candidate columns by relation priority then score.

    A row whose every cell is Difference offers nothing to match and is
    flagged ``no_match`` with an empty candidate list.
    """
    out = []
    for row_name, cells in zip(table.rows, table.cells):
        if all(
            cell.relation.kind is OperationRelationKind.DIFFERENCE for cell in cells
        ):
            out.append(RowSuggestions(row_name, (), no_match=True))
            continue
        order = sorted(
            zip(table.cols, cells),
            key=lambda pair: (
                RELATION_PRIORITY[pair[1].relation.kind],
                -pair[1].score,
                pair[0],
            ),
        )
        entries = tuple(
            SuggestionEntry(col, cell.relation, cell.score) for col, cell in order
        )
        out.append(RowSuggestions(row_name, entries, no_match=False))
    return tuple(out)
