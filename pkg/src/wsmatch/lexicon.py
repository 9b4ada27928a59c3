"""Lexical taxonomy: sense lookup, Wu-Palmer similarity, adapted-Lesk disambiguation.

Two on-disk formats are supported by :func:`load_lexicon`:

* WordNet 3.x plain-text databases (a directory holding ``data.noun``,
  ``index.noun`` and friends);
* the one-line-per-synset fixture format used by the test suite::

      id | pos | lemma,lemma | hypernymId,... | gloss text

  ``pos`` is noun/verb/adjective/adverb (or the WordNet letters n/v/a/r),
  blank lines and ``#`` comments are ignored.

The loaded :class:`Lexicon` is immutable; every function here is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path

from wsmatch.errors import LexiconError

# Pinned function-word list used by gloss-overlap scoring. Changing it changes
# disambiguation results, so it is part of the artifact's documented surface.
STOP_WORDS = frozenset(
    """
    a an the and or but if then else when while of in on at to from by for
    with about as into onto over under is am are was were be been being do
    does did done have has had it its this that these those not no nor so
    such than too very can will shall may might must just also
    """.split()
)

_GLOSS_WORD = re.compile(r"[a-z0-9]+")


class PartOfSpeech(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJECTIVE = "adjective"
    ADVERB = "adverb"


_POS_LETTERS = {
    "n": PartOfSpeech.NOUN,
    "v": PartOfSpeech.VERB,
    "a": PartOfSpeech.ADJECTIVE,
    "s": PartOfSpeech.ADJECTIVE,  # WordNet adjective satellite
    "r": PartOfSpeech.ADVERB,
}


@dataclass(frozen=True)
class Synset:
    """One word sense: lemmas sharing a meaning, its gloss, and is-a parents."""

    id: str
    pos: PartOfSpeech
    lemmas: tuple[str, ...]
    hypernyms: tuple[str, ...]
    gloss: str


@dataclass(frozen=True)
class ContextWindow:
    """Words surrounding a target word; the target itself sits at target_index."""

    words: tuple[str, ...]
    target_index: int

    def __post_init__(self):
        if not 0 <= self.target_index < len(self.words):
            raise ValueError(
                f"target_index {self.target_index} out of bounds "
                f"for {len(self.words)} words"
            )

    def context_words(self) -> tuple[str, ...]:
        return tuple(
            w for k, w in enumerate(self.words) if k != self.target_index
        )


@dataclass(frozen=True)
class Lexicon:
    """Immutable synset collection with a lemma index and precomputed depths.

    ``lemma_index`` preserves sense order (file order for the fixture format,
    index-file order for WordNet), which is the documented tie-break for
    disambiguation.
    """

    synsets: dict[str, Synset]
    lemma_index: dict[str, tuple[str, ...]]
    root_ids: dict[PartOfSpeech, tuple[str, ...]]
    _depths: dict[str, int] = field(repr=False)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.lemma_index

    def senses(self, word: str) -> tuple[Synset, ...]:
        """All senses of a word, in lexicon sense order."""
        ids = self.lemma_index.get(word.lower(), ())
        return tuple(self.synsets[i] for i in ids)

    def get(self, synset_id: str) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise LexiconError(f"unknown synset id: {synset_id}") from None


def depth(lex: Lexicon, s: Synset) -> int:
    """Node count on the shortest root-to-s hypernym path; a root has depth 1."""
    d = lex._depths.get(s.id)
    if d is None:
        raise LexiconError(f"detached synset: {s.id}")
    return d


def _ancestors(lex: Lexicon, s: Synset) -> set[str]:
    """Hypernym closure of s, including s itself."""
    seen = {s.id}
    stack = list(s.hypernyms)
    while stack:
        sid = stack.pop()
        if sid in seen:
            continue
        seen.add(sid)
        stack.extend(lex.synsets[sid].hypernyms)
    return seen


def least_common_subsumer(lex: Lexicon, a: Synset, b: Synset) -> Synset:
    """Deepest common ancestor of a and b; ties broken by smallest synset id."""
    common = _ancestors(lex, a) & _ancestors(lex, b)
    if not common:
        raise LexiconError(f"no common ancestor: {a.id}, {b.id}")
    best = min(common, key=lambda sid: (-lex._depths[sid], sid))
    return lex.synsets[best]


def wu_palmer(lex: Lexicon, a: Synset, b: Synset) -> float:
    """2*depth(LCS) / (depth(a) + depth(b)); 0.0 when no common ancestor exists."""
    try:
        lcs = least_common_subsumer(lex, a, b)
    except LexiconError:
        return 0.0
    return 2.0 * depth(lex, lcs) / (depth(lex, a) + depth(lex, b))


def _gloss_words(gloss: str) -> list[str]:
    return [
        w for w in _GLOSS_WORD.findall(gloss.lower()) if w not in STOP_WORDS
    ]


def gloss_overlap(g1: str, g2: str) -> int:
    """Adapted-Lesk overlap: sum of squared lengths of maximal shared word runs.

    Both glosses are lowercased and stop-word filtered first. Runs are
    consumed greedily longest-first (ties by earliest position in g1, then
    g2), and consumed words cannot be reused by later runs.
    """
    t1 = _gloss_words(g1)
    t2 = _gloss_words(g2)
    score = 0
    while True:
        best_len = 0
        best_i = best_j = -1
        for i in range(len(t1)):
            for j in range(len(t2)):
                k = 0
                while (
                    i + k < len(t1)
                    and j + k < len(t2)
                    and t1[i + k] == t2[j + k]
                ):
                    k += 1
                if k > best_len:
                    best_len, best_i, best_j = k, i, j
        if best_len == 0:
            return score
        score += best_len * best_len
        for k in range(best_len):
            # distinct sentinels so consumed words never match anything again
            t1[best_i + k] = object()
            t2[best_j + k] = object()


@lru_cache(maxsize=16384)
def _overlap_cached(g1: str, g2: str) -> int:
    return gloss_overlap(g1, g2)


def extended_gloss(lex: Lexicon, s: Synset) -> str:
    """Own gloss plus the glosses of direct hypernyms."""
    parts = [s.gloss]
    parts.extend(lex.synsets[h].gloss for h in s.hypernyms)
    return " ".join(parts)


def disambiguate(lex: Lexicon, target: str, ctx: ContextWindow) -> Synset | None:
    """Pick the sense of ``target`` whose extended gloss best overlaps the context.

    The score of a sense is the summed gloss overlap against the extended
    glosses of every sense of every other context word. Returns None when the
    target is not in the lexicon; ties go to the earlier sense.
    """
    senses = lex.senses(target)
    if not senses:
        return None
    if len(senses) == 1:
        return senses[0]
    best = None
    best_score = -1
    for sense in senses:
        ext = extended_gloss(lex, sense)
        score = 0
        for word in ctx.context_words():
            for ctx_sense in lex.senses(word):
                score += _overlap_cached(ext, extended_gloss(lex, ctx_sense))
        if score > best_score:
            best, best_score = sense, score
    return best


# ---------------------------------------------------------------------------
# Loading


def load_lexicon(source: str | Path) -> Lexicon:
    """Load a lexicon from a fixture file or a WordNet database directory."""
    path = Path(source)
    if path.is_dir():
        raw, order = _read_wordnet_dir(path)
    else:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise LexiconError(f"unreadable lexicon source: {source}: {exc}")
        raw, order = _parse_fixture(text, str(path)), None
    return _build(raw, order)


def _build(
    raw: list[Synset], sense_order: dict[str, list[str]] | None
) -> Lexicon:
    if not raw:
        raise LexiconError("no synsets")
    synsets: dict[str, Synset] = {}
    for s in raw:
        if s.id in synsets:
            raise LexiconError(f"duplicate synset id: {s.id}")
        synsets[s.id] = s
    for s in raw:
        for h in s.hypernyms:
            if h not in synsets:
                raise LexiconError(f"synset {s.id}: unknown hypernym id {h}")

    depths = _compute_depths(synsets)

    lemma_index: dict[str, list[str]] = {}
    if sense_order is not None:
        for lemma, ids in sense_order.items():
            lemma_index[lemma] = list(ids)
    for s in raw:
        for lemma in s.lemmas:
            bucket = lemma_index.setdefault(lemma, [])
            if s.id not in bucket:
                bucket.append(s.id)

    roots: dict[PartOfSpeech, list[str]] = {p: [] for p in PartOfSpeech}
    for s in raw:
        if not s.hypernyms:
            roots[s.pos].append(s.id)

    return Lexicon(
        synsets=synsets,
        lemma_index={w: tuple(ids) for w, ids in lemma_index.items()},
        root_ids={p: tuple(ids) for p, ids in roots.items()},
        _depths=depths,
    )


def _compute_depths(synsets: dict[str, Synset]) -> dict[str, int]:
    """Shortest-path depth for every synset; rejects hypernym cycles."""
    depths: dict[str, int] = {}
    WORKING, DONE = 1, 2
    state: dict[str, int] = {}

    def visit(sid: str) -> int:
        if state.get(sid) == DONE:
            return depths[sid]
        if state.get(sid) == WORKING:
            raise LexiconError(f"cyclic hypernym chain detected at {sid}")
        state[sid] = WORKING
        hypernyms = synsets[sid].hypernyms
        if not hypernyms:
            d = 1
        else:
            d = 1 + min(visit(h) for h in hypernyms)
        depths[sid] = d
        state[sid] = DONE
        return d

    for sid in synsets:
        visit(sid)
    return depths


def _parse_fixture(text: str, origin: str) -> list[Synset]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 5:
            raise LexiconError(
                f"{origin}:{lineno}: expected 5 '|'-separated fields, "
                f"got {len(fields)}"
            )
        sid, pos_text, lemmas_text, hypernyms_text, gloss = fields
        if not sid:
            raise LexiconError(f"{origin}:{lineno}: empty synset id")
        pos = _parse_pos(pos_text, origin, lineno)
        lemmas = tuple(
            w.strip().lower() for w in lemmas_text.split(",") if w.strip()
        )
        if not lemmas:
            raise LexiconError(f"{origin}:{lineno}: synset {sid} has no lemmas")
        hypernyms = tuple(
            h.strip() for h in hypernyms_text.split(",") if h.strip()
        )
        out.append(Synset(sid, pos, lemmas, hypernyms, gloss))
    return out


def _parse_pos(text: str, origin: str, lineno: int) -> PartOfSpeech:
    text = text.strip().lower()
    if text in _POS_LETTERS:
        return _POS_LETTERS[text]
    try:
        return PartOfSpeech(text)
    except ValueError:
        raise LexiconError(
            f"{origin}:{lineno}: unknown part of speech {text!r}"
        ) from None


# ---------------------------------------------------------------------------
# WordNet 3.x plain-text database reader

_WN_SUFFIXES = {
    "noun": PartOfSpeech.NOUN,
    "verb": PartOfSpeech.VERB,
    "adj": PartOfSpeech.ADJECTIVE,
    "adv": PartOfSpeech.ADVERB,
}

# is-a pointers: hypernym and instance hypernym
_WN_HYPERNYM_SYMBOLS = {"@", "@i"}


def _wn_id(offset: str, ss_letter: str) -> str:
    # satellite adjectives share the data.adj offset space; pointers say "a"
    if ss_letter == "s":
        ss_letter = "a"
    return f"{offset}-{ss_letter}"


def _read_wordnet_dir(
    path: Path,
) -> tuple[list[Synset], dict[str, list[str]]]:
    raw: list[Synset] = []
    seen_any = False
    for suffix, pos in _WN_SUFFIXES.items():
        data = path / f"data.{suffix}"
        if not data.exists():
            continue
        seen_any = True
        raw.extend(_parse_wordnet_data(data, pos))
    if not seen_any:
        raise LexiconError(
            f"unreadable lexicon source: {path} has no data.* files"
        )

    order: dict[str, list[str]] = {}
    for suffix, pos in _WN_SUFFIXES.items():
        index = path / f"index.{suffix}"
        if index.exists():
            _parse_wordnet_index(index, pos, order)
    return raw, order


def _clean_wn_lemma(word: str) -> str:
    # strip adjective syntactic markers like "(a)" and normalise spacing
    word = re.sub(r"\((a|p|ip)\)$", "", word)
    return word.replace("_", " ").lower()


def _parse_wordnet_data(path: Path, pos: PartOfSpeech) -> list[Synset]:
    out = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.startswith(" ") or not line.strip():
                continue  # license header
            try:
                body, _, gloss = line.partition("|")
                fields = body.split()
                offset = fields[0]
                ss_type = fields[2]
                w_cnt = int(fields[3], 16)
                words = []
                k = 4
                for _ in range(w_cnt):
                    words.append(_clean_wn_lemma(fields[k]))
                    k += 2  # skip lex_id
                p_cnt = int(fields[k])
                k += 1
                hypernyms = []
                for _ in range(p_cnt):
                    symbol = fields[k]
                    target_offset = fields[k + 1]
                    target_pos = fields[k + 2]
                    k += 4  # symbol, offset, pos, source/target
                    if symbol in _WN_HYPERNYM_SYMBOLS:
                        hypernyms.append(_wn_id(target_offset, target_pos))
            except (IndexError, ValueError) as exc:
                raise LexiconError(
                    f"{path}:{lineno}: malformed WordNet entry: {exc}"
                ) from None
            sid = _wn_id(offset, ss_type)
            out.append(
                Synset(
                    id=sid,
                    pos=_POS_LETTERS[ss_type],
                    lemmas=tuple(words),
                    hypernyms=tuple(hypernyms),
                    gloss=gloss.strip(),
                )
            )
    return out


def _parse_wordnet_index(
    path: Path, pos: PartOfSpeech, order: dict[str, list[str]]
) -> None:
    letter = {v: k for k, v in _WN_SUFFIXES.items()}[pos]
    ss_letter = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}[letter]
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.startswith(" ") or not line.strip():
                continue
            fields = line.split()
            try:
                lemma = fields[0].replace("_", " ").lower()
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                offsets = fields[6 + p_cnt:]
                if len(offsets) != synset_cnt:
                    raise ValueError("sense count mismatch")
            except (IndexError, ValueError) as exc:
                raise LexiconError(
                    f"{path}:{lineno}: malformed WordNet index entry: {exc}"
                ) from None
            bucket = order.setdefault(lemma, [])
            for off in offsets:
                sid = f"{off}-{ss_letter}"
                if sid not in bucket:
                    bucket.append(sid)
