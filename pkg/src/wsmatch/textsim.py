"""Identifier tokenization, string similarity, and Hausdorff-style aggregation.

The aggregate used everywhere above the word level is the similarity form of
the modified Hausdorff distance: with d = 1 - sim, 1 - HD equals the minimum
of the two directed averages of row/column maxima. The formula exactly as
printed in the source material (max of averaged minima over the similarity
matrix) is available via ``literal=True`` for experimentation; it does not
score identical inputs as 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from wsmatch import _kernels
from wsmatch.errors import EmptySetComparison
from wsmatch.lexicon import ContextWindow, Lexicon, PartOfSpeech, disambiguate, wu_palmer

_WORD_BOUNDARIES = (
    re.compile(r"([a-z])([A-Z])"),      # camelCase seam
    re.compile(r"([A-Za-z])([0-9])"),   # letter -> digit
    re.compile(r"([0-9])([A-Za-z])"),   # digit -> letter
)
_SEPARATORS = re.compile(r"[^A-Za-z0-9]+")


@dataclass(frozen=True)
class Sentence:
    """Ordered lowercase words plus the raw string they came from."""

    words: tuple[str, ...]
    source: str = ""

    def __bool__(self) -> bool:
        return bool(self.words)

    @property
    def text(self) -> str:
        return " ".join(self.words)


def tokenize(raw: str) -> Sentence:
    """Split an identifier or sentence into lowercase words.

    Boundaries: whitespace and punctuation (including underscores and
    hyphens), digit/letter seams, and lowercase-to-uppercase camelCase seams.
    """
    text = raw
    for pattern in _WORD_BOUNDARIES:
        text = pattern.sub(r"\1 \2", text)
    words = tuple(w.lower() for w in _SEPARATORS.split(text) if w)
    return Sentence(words=words, source=raw)


def jaro_winkler(s1: str, s2: str) -> float:
    """Case-insensitive Jaro-Winkler similarity in [0, 1]."""
    return _kernels.jaro_winkler(s1, s2)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Rectangular matrix of pairwise scores in [0, 1]."""

    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        widths = {len(row) for row in self.values}
        if len(widths) > 1:
            raise ValueError("ragged similarity matrix")
        for row in self.values:
            for v in row:
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"similarity {v} outside [0, 1]")

    @property
    def rows(self) -> int:
        return len(self.values)

    @property
    def cols(self) -> int:
        return len(self.values[0]) if self.values else 0

    def transpose(self) -> "SimilarityMatrix":
        return SimilarityMatrix(tuple(zip(*self.values)))


def hausdorff_similarity(matrix, *, literal: bool = False) -> float:
    """Aggregate a non-empty similarity matrix to a single score in [0, 1].

    Raises EmptySetComparison on an empty matrix; callers own the empty-set
    conventions (two empty sets -> 1.0, one empty -> 0.0).
    """
    values = matrix.values if isinstance(matrix, SimilarityMatrix) else matrix
    if len(values) == 0 or len(values[0]) == 0:
        raise EmptySetComparison("empty set comparison")
    if literal:
        return _kernels.literal_hausdorff_reduce(values)
    return _kernels.hausdorff_reduce(values)


class SimilarityCalculator:
    """Word- and sentence-level similarity with memoisation.

    Holds the (optional) lexicon and the Hausdorff-orientation switch; all
    public methods are pure, so instances are safe to share across threads.
    """

    def __init__(self, lexicon: Lexicon | None = None, *, literal_hausdorff: bool = False):
        self.lexicon = lexicon
        self.literal_hausdorff = literal_hausdorff
        self._sense_cache: dict = {}
        self._sentence_cache: dict = {}

    def word_similarity(
        self, w1: str, w2: str, ctx1: ContextWindow, ctx2: ContextWindow
    ) -> float:
        """Wu-Palmer over disambiguated senses when both words are known,
        Jaro-Winkler otherwise."""
        w1 = w1.lower()
        w2 = w2.lower()
        lex = self.lexicon
        if lex is None:
            return jaro_winkler(w1, w2)
        s1 = self._sense(w1, ctx1)
        s2 = self._sense(w2, ctx2)
        if s1 is None or s2 is None:
            return jaro_winkler(w1, w2)
        # Wu-Palmer is an is-a measure: nouns with nouns, verbs with verbs;
        # anything else falls back to the syntactic measure.
        if s1.pos != s2.pos or s1.pos not in (PartOfSpeech.NOUN, PartOfSpeech.VERB):
            return jaro_winkler(w1, w2)
        return wu_palmer(lex, s1, s2)

    def sentence_similarity(self, s1: Sentence, s2: Sentence) -> float:
        """Hausdorff aggregate of the pairwise word-similarity matrix."""
        if not s1.words and not s2.words:
            return 1.0
        if not s1.words or not s2.words:
            return 0.0
        key = (s1.words, s2.words)
        hit = self._sentence_cache.get(key)
        if hit is not None:
            return hit
        matrix = self.word_matrix(s1, s2)
        score = hausdorff_similarity(matrix, literal=self.literal_hausdorff)
        self._sentence_cache[key] = score
        self._sentence_cache[(s2.words, s1.words)] = score
        return score

    def word_matrix(self, s1: Sentence, s2: Sentence) -> SimilarityMatrix:
        rows = []
        for i, w1 in enumerate(s1.words):
            ctx1 = ContextWindow(s1.words, i)
            row = []
            for j, w2 in enumerate(s2.words):
                ctx2 = ContextWindow(s2.words, j)
                row.append(self.word_similarity(w1, w2, ctx1, ctx2))
            rows.append(tuple(row))
        return SimilarityMatrix(tuple(rows))

    def _sense(self, word: str, ctx: ContextWindow):
        key = (word, ctx.words, ctx.target_index)
        if key in self._sense_cache:
            return self._sense_cache[key]
        sense = disambiguate(self.lexicon, word, ctx)
        self._sense_cache[key] = sense
        return sense
