"""Similarity pyramid: data sets, operations, whole services, and ranking."""

from __future__ import annotations

from dataclasses import dataclass

from wsmatch.errors import WsMatchError
from wsmatch.textsim import SimilarityCalculator, SimilarityMatrix, hausdorff_similarity
from wsmatch.wsdl import DataSet, Operation, ServiceDescription


@dataclass(frozen=True)
class Weights:
    """Component weights for operation similarity: input, output, name."""

    p1: float = 1.0
    p2: float = 1.0
    p3: float = 2.0

    def __post_init__(self):
        if min(self.p1, self.p2, self.p3) < 0:
            raise ValueError("weights must be nonnegative")
        if self.p1 + self.p2 + self.p3 <= 0:
            raise ValueError("at least one weight must be positive")


DEFAULT_WEIGHTS = Weights()


def data_set_similarity(calc: SimilarityCalculator, d1: DataSet, d2: DataSet) -> float:
    """Hausdorff aggregate over pairwise sentence similarities.

    Two empty sets compare as 1.0; an empty set against a non-empty one as 0.0.
    """
    s1, s2 = d1.sentences, d2.sentences
    if not s1 and not s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    matrix = [
        [calc.sentence_similarity(a, b) for b in s2]
        for a in s1
    ]
    return hausdorff_similarity(matrix, literal=calc.literal_hausdorff)


def combine_operation_scores(
    input_sim: float, output_sim: float, name_sim: float, weights: Weights = DEFAULT_WEIGHTS
) -> float:
    """Weighted mean of the three component similarities."""
    total = weights.p1 + weights.p2 + weights.p3
    return (
        weights.p1 * input_sim + weights.p2 * output_sim + weights.p3 * name_sim
    ) / total


def operation_similarity(
    calc: SimilarityCalculator,
    f: Operation,
    g: Operation,
    weights: Weights = DEFAULT_WEIGHTS,
) -> float:
    return combine_operation_scores(
        data_set_similarity(calc, f.input, g.input),
        data_set_similarity(calc, f.output, g.output),
        calc.sentence_similarity(f.name_sentence, g.name_sentence),
        weights,
    )


def service_similarity(
    calc: SimilarityCalculator,
    a: ServiceDescription,
    b: ServiceDescription,
    weights: Weights = DEFAULT_WEIGHTS,
) -> tuple[float, SimilarityMatrix]:
    """Score two services and return the operation matrix for later matching."""
    if not a.operations or not b.operations:
        raise WsMatchError("service similarity requires non-empty services")
    rows = tuple(
        tuple(operation_similarity(calc, f, g, weights) for g in b.operations)
        for f in a.operations
    )
    matrix = SimilarityMatrix(rows)
    return hausdorff_similarity(matrix, literal=calc.literal_hausdorff), matrix


@dataclass(frozen=True)
class RankedCandidate:
    service: ServiceDescription
    score: float
    per_operation: SimilarityMatrix


@dataclass(frozen=True)
class RankingFailure:
    name: str
    source_uri: str | None
    error: str


def rank_candidates(
    calc: SimilarityCalculator,
    target: ServiceDescription,
    pool: list[ServiceDescription],
    weights: Weights = DEFAULT_WEIGHTS,
) -> tuple[list[RankedCandidate], list[RankingFailure]]:
    """Score every pool member against the target, best first.

    Individual failures are collected instead of aborting the ranking. Ties
    break by service name, then source URI, for a stable listing.
    """
    ranked: list[RankedCandidate] = []
    failures: list[RankingFailure] = []
    for candidate in pool:
        try:
            score, matrix = service_similarity(calc, target, candidate, weights)
        except WsMatchError as exc:
            failures.append(
                RankingFailure(candidate.name, candidate.source_uri, str(exc))
            )
            continue
        ranked.append(RankedCandidate(candidate, score, matrix))
    ranked.sort(
        key=lambda rc: (-rc.score, rc.service.name, rc.service.source_uri or "")
    )
    return ranked, failures
