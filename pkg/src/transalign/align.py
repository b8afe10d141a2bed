"""Core alignment: match each intermediate-translation line to the best
target line, resolve conflicts by looking ahead, fill the gaps with the
translations themselves, and never lose a source line.

Other aligners leave holes when they cannot match a line; here every source
line yields exactly one output pair, either a real target sentence, the
machine translation standing in for a missing one, or a fill attributed to
the raw size difference between the two input files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Sentence
from .errors import DataError
from .lexicon import EMPTY_LEXICON, EMPTY_STOPWORDS, StopWordList, SynonymLexicon
from .similarity import (
    ChainContext,
    ChainDecision,
    Comparator,
    ComparatorChain,
    evaluate_chain,
)

ALIGNED = "aligned"
TRANSLATED = "translated"
FILLED = "filled"


@dataclass(frozen=True)
class AlignmentConfig:
    """Knobs for one alignment run.

    ``window`` is the candidate-search half-width around the expected
    target position (0 disables windowing, i.e. full scan); ``lookahead_depth``
    is how many following translation lines may contest a selected candidate
    (0 disables lookahead).
    """

    chain: ComparatorChain
    window: int = 20
    lookahead_depth: int = 1
    cap: int = 64
    stopwords: StopWordList = EMPTY_STOPWORDS
    lexicon: SynonymLexicon = EMPTY_LEXICON

    def __post_init__(self):
        if self.window < 0:
            raise DataError(f"window must be >= 0, got {self.window}")
        if self.lookahead_depth < 0:
            raise DataError(f"lookahead_depth must be >= 0, got {self.lookahead_depth}")

    def context(self) -> ChainContext:
        return ChainContext(self.stopwords, self.lexicon, self.cap)


@dataclass(frozen=True)
class AlignmentDecision:
    """Per-source-line outcome: a consumed target line, a translation used
    verbatim, or a fill attributed to input-file size disproportion."""

    source_index: int
    outcome: str
    text: str
    target_index: int | None = None
    score: float | None = None
    comparator: str | None = None
    disproportion: bool = False


@dataclass(frozen=True)
class AlignmentResult:
    decisions: tuple[AlignmentDecision, ...]
    output_pairs: tuple[tuple[str, str], ...]
    aligned_count: int
    translated_count: int
    disproportion_count: int
    total: int
    unmatched_target_indices: tuple[int, ...] = ()


class _PairScorer:
    """Memoized chain evaluation over (translation line, target line) pairs.

    Lookahead re-scores pairs the main loop will visit again; within one
    run the inputs are immutable so a dictionary is safe and exact.
    """

    def __init__(self, trans: Corpus, target: Corpus, chain, context):
        self.trans = trans
        self.target = target
        self.chain = chain
        self.context = context
        self._memo: dict[tuple[int, int], ChainDecision] = {}

    def decide(self, trans_index: int, target_index: int) -> ChainDecision:
        key = (trans_index, target_index)
        decision = self._memo.get(key)
        if decision is None:
            decision = evaluate_chain(
                self.trans[trans_index], self.target[target_index], self.chain, self.context
            )
            self._memo[key] = decision
        return decision


def select_candidate(
    trans_line: Sentence,
    pool: list[Sentence],
    expected_position: float,
    chain: ComparatorChain,
    context: ChainContext,
    score_fn=None,
) -> tuple[Sentence, ChainDecision] | None:
    """Best accepted candidate for one translation line, or None.

    Ties on score break toward the smallest distance from the expected
    position, then the smallest target index.
    """
    if score_fn is None:
        def score_fn(candidate):
            return evaluate_chain(trans_line, candidate, chain, context)

    best = None
    best_key = None
    for candidate in pool:
        decision = score_fn(candidate)
        if not decision.accepted:
            continue
        key = (-decision.score, abs(candidate.index - expected_position), candidate.index)
        if best_key is None or key < best_key:
            best, best_key = (candidate, decision), key
    return best


def lookahead_resolve(
    source_index: int,
    candidate: Sentence,
    trans: Corpus,
    chain: ComparatorChain,
    depth: int,
    context: ChainContext = ChainContext(),
    current_score: float | None = None,
    score_fn=None,
) -> bool:
    """Keep the candidate for this line? False defers it to a later line.

    The candidate is deferred iff some translation line within ``depth``
    lines after this one scores strictly higher against it.
    """
    if score_fn is None:
        def score_fn(trans_index, cand):
            return evaluate_chain(trans[trans_index], cand, chain, context)

    if current_score is None:
        current_score = score_fn(source_index, candidate).score
    last = min(source_index + depth, len(trans) - 1)
    for later in range(source_index + 1, last + 1):
        if score_fn(later, candidate).score > current_score:
            return False
    return True


def align(
    source: Corpus, target: Corpus, trans: Corpus, config: AlignmentConfig
) -> AlignmentResult:
    """Assign every source line a target-side line.

    Source lines are processed in order. For each, the unconsumed target
    lines within the window around the expected position are scored with
    the comparator chain; the best accepted one is taken unless a
    following translation line contests it (lookahead), in which case the
    line re-selects without that candidate. Lines with no accepted
    candidate are filled with their own translation; the first
    |len(source) - len(target)| such fills are attributed to the size
    disproportion of the inputs. Each target line is consumed at most once
    and the output always has exactly one pair per source line.
    """
    if len(trans) != len(source):
        raise DataError(
            f"translation corpus has {len(trans)} lines, source has {len(source)}"
        )
    n_source, n_target = len(source), len(target)
    scorer = _PairScorer(trans, target, config.chain, config.context())
    unconsumed = sorted(range(n_target))

    picks: list[tuple[int, ChainDecision] | None] = []
    for i in range(n_source):
        expected = i * n_target / n_source
        if config.window > 0:
            lo, hi = expected - config.window, expected + config.window
            pool = [j for j in unconsumed if lo <= j <= hi]
        else:
            pool = list(unconsumed)

        rejected: set[int] = set()
        chosen = None
        while pool:
            candidates = [target[j] for j in pool if j not in rejected]
            if not candidates:
                break
            selected = select_candidate(
                trans[i],
                candidates,
                expected,
                config.chain,
                config.context(),
                score_fn=lambda cand: scorer.decide(i, cand.index),
            )
            if selected is None:
                break
            candidate, decision = selected
            keep = lookahead_resolve(
                i,
                candidate,
                trans,
                config.chain,
                config.lookahead_depth,
                current_score=decision.score,
                score_fn=lambda later, cand: scorer.decide(later, cand.index),
            )
            if keep:
                chosen = (candidate.index, decision)
                break
            rejected.add(candidate.index)  # at most one retry per candidate

        if chosen is not None:
            unconsumed.remove(chosen[0])
        picks.append(chosen)

    fill_quota = min(abs(n_source - n_target), sum(1 for p in picks if p is None))
    decisions: list[AlignmentDecision] = []
    pairs: list[tuple[str, str]] = []
    aligned = translated = attributed = 0
    for i, pick in enumerate(picks):
        if pick is not None:
            target_index, decision = pick
            text = target[target_index].raw
            decisions.append(
                AlignmentDecision(
                    i,
                    ALIGNED,
                    text,
                    target_index=target_index,
                    score=decision.score,
                    comparator=decision.comparator.kind,
                )
            )
            aligned += 1
        else:
            text = trans[i].raw
            if attributed < fill_quota:
                decisions.append(
                    AlignmentDecision(i, FILLED, text, disproportion=True)
                )
                attributed += 1
            else:
                decisions.append(AlignmentDecision(i, TRANSLATED, text))
                translated += 1
        pairs.append((source[i].raw, text))

    return AlignmentResult(
        decisions=tuple(decisions),
        output_pairs=tuple(pairs),
        aligned_count=aligned,
        translated_count=translated,
        disproportion_count=attributed,
        total=n_source,
        unmatched_target_indices=tuple(unconsumed),
    )


def write_alignment(
    result: AlignmentResult, out_source_path, out_target_path, report_path
) -> None:
    """Write the two parallel output files plus the JSON-lines report.

    Report: one record per output line with the decision details, then a
    trailer object with the counts and the never-consumed target indices.
    """
    source_lines = "".join(src + "\n" for src, _ in result.output_pairs)
    target_lines = "".join(tgt + "\n" for _, tgt in result.output_pairs)
    Path(out_source_path).write_text(source_lines, encoding="utf-8")
    Path(out_target_path).write_text(target_lines, encoding="utf-8")

    records = []
    for decision in result.decisions:
        record: dict = {"source_index": decision.source_index, "outcome": decision.outcome}
        if decision.outcome == ALIGNED:
            record["target_index"] = decision.target_index
            record["score"] = decision.score
            record["comparator"] = decision.comparator
        record["text"] = decision.text
        records.append(record)
    trailer = {
        "A": result.aligned_count,
        "T": result.translated_count,
        "D": result.disproportion_count,
        "L": result.total,
        "unmatched_targets": list(result.unmatched_target_indices),
    }
    payload = "".join(
        json.dumps(record, ensure_ascii=False) + "\n" for record in records + [trailer]
    )
    Path(report_path).write_text(payload, encoding="utf-8")


def read_report(report_path) -> AlignmentResult:
    """Rebuild a scoreable result from a JSON-lines report.

    The report does not carry source text, so ``output_pairs`` stays empty;
    decisions and counts are enough for gold-based scoring.
    """
    lines = Path(report_path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError(f"empty report file: {report_path}")
    try:
        objects = [json.loads(line) for line in lines if line.strip()]
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed report {report_path}: {exc}") from exc
    trailer = objects[-1]
    for key in ("A", "T", "D", "L"):
        if key not in trailer:
            raise DataError(f"report {report_path} has no counts trailer")
    decisions = []
    for record in objects[:-1]:
        outcome = record.get("outcome")
        if outcome not in (ALIGNED, TRANSLATED, FILLED):
            raise DataError(f"report record has unknown outcome: {outcome!r}")
        decisions.append(
            AlignmentDecision(
                source_index=record["source_index"],
                outcome=outcome,
                text=record.get("text", ""),
                target_index=record.get("target_index"),
                score=record.get("score"),
                comparator=record.get("comparator"),
                disproportion=outcome == FILLED,
            )
        )
    return AlignmentResult(
        decisions=tuple(decisions),
        output_pairs=(),
        aligned_count=trailer["A"],
        translated_count=trailer["T"],
        disproportion_count=trailer["D"],
        total=trailer["L"],
        unmatched_target_indices=tuple(trailer.get("unmatched_targets", ())),
    )
