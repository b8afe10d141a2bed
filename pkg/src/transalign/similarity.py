"""Sentence-pair similarity: matching-blocks ratio, stop-word-filtered token
overlap, synonym-expanded scoring, and tiered comparator chains.

The character-level ratio is 2*M/T where M is the total length of the common
contiguous blocks found by recursive longest-block decomposition and T is the
summed length of both strings. It rewards partial word matches ("boy"/"boys")
and is insensitive to small reorderings, which plain token intersection is not.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .corpus import Sentence, TokenizedSentence, tokenize
from .errors import ConfigError
from .lexicon import (
    EMPTY_LEXICON,
    EMPTY_STOPWORDS,
    StopWordList,
    SynonymLexicon,
    expand_sentence,
)

MATCHING_BLOCKS_RATIO = "matching_blocks_ratio"
TOKEN_OVERLAP = "token_overlap"
SYNONYM_RATIO = "synonym_ratio"

# Escalation order: cheap and coarse first, expensive and precise last.
COMPARATOR_COSTS = {
    TOKEN_OVERLAP: 0,
    MATCHING_BLOCKS_RATIO: 1,
    SYNONYM_RATIO: 2,
}


@dataclass(frozen=True)
class MatchingBlock:
    """A common contiguous run: character offsets into both strings."""

    a_start: int
    b_start: int
    length: int


def _longest_block(a, b, a_lo, a_hi, b_lo, b_hi):
    """Longest common contiguous block within the given slices.

    Ties go to the smallest a_start, then the smallest b_start. Returns
    (a_start, b_start, length); length 0 means no common block.
    """
    positions: dict[str, list[int]] = {}
    for j in range(b_lo, b_hi):
        positions.setdefault(b[j], []).append(j)
    best_i, best_j, best_size = a_lo, b_lo, 0
    lengths: dict[int, int] = {}
    for i in range(a_lo, a_hi):
        new_lengths: dict[int, int] = {}
        for j in positions.get(a[i], ()):
            size = lengths.get(j - 1, 0) + 1
            new_lengths[j] = size
            if size > best_size:
                best_i, best_j, best_size = i - size + 1, j - size + 1, size
        lengths = new_lengths
    return best_i, best_j, best_size


def matching_blocks(a: str, b: str) -> list[MatchingBlock]:
    """Decompose two strings into their common contiguous blocks.

    Finds the longest common block, then recurses on the prefix pair and
    the suffix pair. Blocks come back ordered and non-overlapping in both
    strings; the total matched length is the M of the ratio measure.
    """
    blocks: list[MatchingBlock] = []
    pending = [(0, len(a), 0, len(b))]
    while pending:
        a_lo, a_hi, b_lo, b_hi = pending.pop()
        i, j, size = _longest_block(a, b, a_lo, a_hi, b_lo, b_hi)
        if size:
            blocks.append(MatchingBlock(i, j, size))
            pending.append((a_lo, i, b_lo, j))
            pending.append((i + size, a_hi, j + size, b_hi))
    blocks.sort(key=lambda block: block.a_start)
    return blocks


def ratio(a: str, b: str) -> float:
    """Matching-blocks similarity 2*M/T in [0, 1].

    1.0 for identical strings, 0.0 for strings with nothing in common.
    Two empty strings count as identical (1.0).
    """
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    matched = sum(block.length for block in matching_blocks(a, b))
    return 2.0 * matched / total


def token_overlap(
    a: TokenizedSentence, b: TokenizedSentence, stopwords: StopWordList = EMPTY_STOPWORDS
) -> float:
    """Dice overlap of the stop-word-filtered token multisets.

    2*|A' intersect B'| / (|A'| + |B'|); 1.0 when both filtered sides are
    empty. Multiset intersection, so repeated content words count once per
    occurrence. Order-free by construction.
    """
    counts_a = Counter(t for t in a.tokens if t not in stopwords)
    counts_b = Counter(t for t in b.tokens if t not in stopwords)
    total = sum(counts_a.values()) + sum(counts_b.values())
    if total == 0:
        return 1.0
    common = sum((counts_a & counts_b).values())
    return 2.0 * common / total


@lru_cache(maxsize=100_000)
def _cached_tokens(sentence: Sentence) -> TokenizedSentence:
    return tokenize(sentence)


def synonym_ratio(
    a: Sentence,
    b: Sentence,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    cap: int = 64,
) -> float:
    """Best matching-blocks ratio over the synonym variants of ``a``.

    Variants are re-joined with single spaces and compared against the
    normalized text of ``b``; the unexpanded pair is always included, so
    the result is never below ratio(a, b).
    """
    best = ratio(a.normalized, b.normalized)
    if best == 1.0 or not len(lexicon):
        return best
    for variant in expand_sentence(_cached_tokens(a), lexicon, cap):
        score = ratio(" ".join(variant.tokens), b.normalized)
        if score > best:
            best = score
            if best == 1.0:
                break
    return best


@dataclass(frozen=True)
class Comparator:
    """One tier of the escalation policy: a scoring kind plus its acceptance
    threshold. Lower cost class means the tier runs earlier."""

    kind: str
    threshold: float
    cost_class: int = -1

    def __post_init__(self):
        if self.kind not in COMPARATOR_COSTS:
            raise ConfigError(f"unknown comparator kind: {self.kind!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(
                f"comparator threshold must be in [0, 1], got {self.threshold}"
            )
        if self.cost_class < 0:
            object.__setattr__(self, "cost_class", COMPARATOR_COSTS[self.kind])


@dataclass(frozen=True)
class ComparatorChain:
    """Comparators ordered by ascending cost: fast coarse tiers first."""

    comparators: tuple[Comparator, ...]

    def __post_init__(self):
        if not self.comparators:
            raise ConfigError("comparator chain must not be empty")
        ordered = tuple(
            sorted(self.comparators, key=lambda comp: comp.cost_class)
        )
        object.__setattr__(self, "comparators", ordered)

    def __iter__(self):
        return iter(self.comparators)

    def __len__(self) -> int:
        return len(self.comparators)

    def with_threshold(self, position: int, threshold: float) -> "ComparatorChain":
        """Copy of the chain with one comparator's threshold replaced."""
        comparators = list(self.comparators)
        old = comparators[position]
        comparators[position] = Comparator(old.kind, threshold, old.cost_class)
        return ComparatorChain(tuple(comparators))


@dataclass(frozen=True)
class ChainContext:
    """Shared inputs the chain's comparators need."""

    stopwords: StopWordList = EMPTY_STOPWORDS
    lexicon: SynonymLexicon = EMPTY_LEXICON
    cap: int = 64


DEFAULT_CONTEXT = ChainContext()


@dataclass(frozen=True)
class ChainDecision:
    """Outcome of running a chain on one sentence pair."""

    accepted: bool
    score: float
    comparator: Comparator


def _comparator_score(
    comparator: Comparator, a: Sentence, b: Sentence, context: ChainContext
) -> float:
    if comparator.kind == TOKEN_OVERLAP:
        return token_overlap(_cached_tokens(a), _cached_tokens(b), context.stopwords)
    if comparator.kind == MATCHING_BLOCKS_RATIO:
        return ratio(a.normalized, b.normalized)
    return synonym_ratio(a, b, context.lexicon, context.cap)


def evaluate_chain(
    a: Sentence,
    b: Sentence,
    chain: ComparatorChain,
    context: ChainContext = DEFAULT_CONTEXT,
) -> ChainDecision:
    """Run comparators in cost order, stopping at the first acceptance.

    A comparator accepts when its score reaches its threshold. If none
    accepts, the decision reports the maximum score observed and the
    comparator that produced it.
    """
    best_score = -1.0
    best_comparator = None
    for comparator in chain:
        score = _comparator_score(comparator, a, b, context)
        if score >= comparator.threshold:
            return ChainDecision(True, score, comparator)
        if score > best_score:
            best_score = score
            best_comparator = comparator
    return ChainDecision(False, best_score, best_comparator)
