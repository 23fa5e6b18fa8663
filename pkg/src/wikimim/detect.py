"""Defender-side forensics.

Four independent lenses on a suspected manipulation:

* ``diff_revisions`` aligns two revisions token-by-token and pulls out the
  one-for-one word replacements (the only mutation a substitution engine
  makes), reporting insertions and deletions separately.
* ``attribute_corpus`` ranks candidate training corpora by how well a chain
  trained on each explains the observed replacements.
* ``analyze_traces`` flags bot-like editing sessions from timing variance
  and clickpath shape.
* ``survival_metrics`` measures how long a manipulated revision lived and
  how many edits happened before it was corrected.
"""

from __future__ import annotations

import logging
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field

from wikimim._alignment import aligned_pairs
from wikimim.chain import ChainConfig, MarkovChain, train
from wikimim.corpus import Corpus, split_edges, tokenize
from wikimim.errors import DetectError
from wikimim.wikisim import Revision, SessionTrace

logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-9  # keeps zero-probability evidence finite
CONTEXT_HIT_WEIGHT = 1.0


@dataclass(frozen=True)
class Substitution:
    token_index: int  # index in the NEW revision's token stream
    old: str  # stripped word in the old revision
    new: str  # stripped word in the new revision
    left_context: tuple[str, ...]  # raw preceding token texts, new stream
    right_context: tuple[str, ...]


@dataclass(frozen=True)
class TokenChange:
    """An inserted or deleted token (index in its own stream)."""

    token_index: int
    word: str


@dataclass
class DiffResult:
    substitutions: list[Substitution]
    insertions: list[TokenChange]
    deletions: list[TokenChange]


def diff_revisions(old_text: str, new_text: str, context_width: int = 2) -> DiffResult:
    """Token-level alignment of two texts on their stripped word sequences.

    Punctuation-only differences ("wabe;" vs "wabe,") do not count as
    changes.  One-for-one replacements become Substitutions with up to
    ``context_width`` raw tokens of context from the new stream.
    """
    old_stream = tokenize(old_text)
    new_stream = tokenize(new_text)
    old_words = old_stream.stripped()
    new_words = new_stream.stripped()

    ids: dict[str, int] = {}
    old_ids = [ids.setdefault(w, len(ids)) for w in old_words]
    new_ids = [ids.setdefault(w, len(ids)) for w in new_words]

    pairs = aligned_pairs(old_ids, new_ids)
    new_texts = new_stream.texts()

    substitutions = []
    matched_old = set()
    matched_new = set()
    for i, j in pairs:
        matched_old.add(i)
        matched_new.add(j)
        if old_ids[i] != new_ids[j]:
            substitutions.append(
                Substitution(
                    token_index=j,
                    old=old_words[i],
                    new=new_words[j],
                    left_context=tuple(new_texts[max(0, j - context_width) : j]),
                    right_context=tuple(new_texts[j + 1 : j + 1 + context_width]),
                )
            )
    deletions = [
        TokenChange(i, old_words[i]) for i in range(len(old_words)) if i not in matched_old
    ]
    insertions = [
        TokenChange(j, new_words[j]) for j in range(len(new_words)) if j not in matched_new
    ]
    return DiffResult(substitutions=substitutions, insertions=insertions, deletions=deletions)


def context_search(phrase: list[str], corpus: Corpus) -> int:
    """Occurrences of a contiguous stripped-word phrase across the corpus."""
    if not phrase:
        raise DetectError("context_search needs a non-empty phrase")
    needle = [split_edges(w)[1] for w in phrase]
    hits = 0
    n = len(needle)
    for stream in corpus.token_streams():
        words = stream.stripped()
        for i in range(len(words) - n + 1):
            if words[i : i + n] == needle:
                hits += 1
    return hits


@dataclass(frozen=True)
class SubstitutionEvidence:
    substitution: Substitution
    chain_probability: float
    context_hits: int


@dataclass
class CandidateScore:
    corpus_label: str
    score: float
    evidence: list[SubstitutionEvidence]


@dataclass
class AttributionReport:
    order: int
    ranking: list[CandidateScore]  # sorted by descending score

    def best(self) -> CandidateScore:
        return self.ranking[0]


def _stripped_successor_probability(
    chain: MarkovChain, left_context: tuple[str, ...], word: str
) -> float:
    """Probability mass the chain puts on a core word after backoff.

    Walks from the longest available context to the shortest, exactly like
    the sampling engine, and sums the probability of every successor whose
    stripped form equals the word at the first context level that exists.
    """
    prefix = left_context[-chain.order :] if left_context else ()
    for order in range(len(prefix), 0, -1):
        dist = chain.tables[order].get(tuple(prefix[-order:]))
        if dist is not None:
            total = dist.total
            return (
                sum(c for w, c in zip(dist.nexts, dist.counts) if split_edges(w)[1] == word)
                / total
            )
    return 0.0


def attribute_corpus(
    substitutions: list[Substitution],
    candidates: list[Corpus],
    order: int = 2,
) -> AttributionReport:
    """Rank candidate corpora by how well each explains the substitutions.

    Per candidate, per substitution: the chain probability of the new word
    given the left context (after backoff), and the count of the context
    plus new word as a contiguous phrase in the candidate.  The score is
    sum(log(p + floor)) + weight * sum(hits); both raw terms are kept in
    the evidence so operators can re-weight.
    """
    if not substitutions:
        raise DetectError("attribution needs at least one substitution")
    if not candidates:
        raise DetectError("attribution needs at least one candidate corpus")

    ranking = []
    for candidate in sorted(candidates, key=lambda c: c.label):
        chain = train(candidate, ChainConfig(order=order))
        evidence = []
        score = 0.0
        for sub in substitutions:
            p = _stripped_successor_probability(chain, sub.left_context, sub.new)
            hits = context_search(list(sub.left_context) + [sub.new], candidate)
            evidence.append(
                SubstitutionEvidence(substitution=sub, chain_probability=p, context_hits=hits)
            )
            score += math.log(p + PROBABILITY_FLOOR) + CONTEXT_HIT_WEIGHT * hits
        ranking.append(CandidateScore(corpus_label=candidate.label, score=score, evidence=evidence))
    ranking.sort(key=lambda c: (-c.score, c.corpus_label))
    return AttributionReport(order=order, ranking=ranking)


# --- behavioral analysis ------------------------------------------------------


@dataclass(frozen=True)
class TraceThresholds:
    interval_cv: float = 0.05  # below this, pauses are suspiciously regular
    path_entropy: float = 1.0  # bits; below this, the clickpath is too uniform


@dataclass(frozen=True)
class AccountAnomaly:
    account: str
    interval_cv: float
    path_entropy: float
    straight_to_target: bool
    flagged: bool


@dataclass
class TraceAnomalyReport:
    thresholds: TraceThresholds
    accounts: list[AccountAnomaly]
    skipped: list[str] = field(default_factory=list)  # too short to analyze

    def flagged_accounts(self) -> list[str]:
        return [a.account for a in self.accounts if a.flagged]


def _path_entropy_bits(kinds: list[str]) -> float:
    counts = Counter(kinds)
    total = len(kinds)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def analyze_traces(
    traces: list[SessionTrace], thresholds: TraceThresholds | None = None
) -> TraceAnomalyReport:
    """Score each session for bot-like behavior.

    A session is flagged when its inter-event pauses are near-constant
    (coefficient of variation below threshold) or when it went straight to
    the target with a low-entropy clickpath.  Traces with fewer than three
    events carry no timing signal and are skipped with a warning.
    """
    thresholds = thresholds or TraceThresholds()
    accounts = []
    skipped = []
    for trace in traces:
        if len(trace.events) < 3:
            logger.warning(
                "trace for %r has %d events; skipping", trace.account, len(trace.events)
            )
            skipped.append(trace.account)
            continue
        pauses = trace.pauses()
        mean = statistics.fmean(pauses)
        cv = statistics.pstdev(pauses) / mean if mean > 0 else 0.0
        kinds = trace.kinds()
        entropy = _path_entropy_bits(kinds)
        opened = kinds.index("open_editor") if "open_editor" in kinds else len(kinds)
        straight = "view_page" not in kinds[:opened]
        flagged = cv < thresholds.interval_cv or (
            straight and entropy < thresholds.path_entropy
        )
        accounts.append(
            AccountAnomaly(
                account=trace.account,
                interval_cv=cv,
                path_entropy=entropy,
                straight_to_target=straight,
                flagged=flagged,
            )
        )
    return TraceAnomalyReport(thresholds=thresholds, accounts=accounts, skipped=skipped)


# --- survival metrics ---------------------------------------------------------


@dataclass(frozen=True)
class RevisionSurvival:
    revision_id: int
    corrected: bool
    intervening_edits: int  # revisions between the manipulation and its correction
    survival_time: float
    corrected_by: int | None


@dataclass
class SurvivalMetrics:
    article_id: str
    revisions: list[RevisionSurvival]


def survival_metrics(history: list[Revision], manipulated_ids: set[int]) -> SurvivalMetrics:
    """How long each manipulated revision's changes stayed in the article.

    A manipulated revision counts as corrected at the first later revision
    where none of its substituted words remain at their positions (checked
    by re-diffing that revision against the manipulated one).  Uncorrected
    revisions report the remaining history span as their survival time.
    """
    if not history:
        raise DetectError("empty revision history")
    by_id = {rev.revision_id: rev for rev in history}
    unknown = manipulated_ids - by_id.keys()
    if unknown:
        raise DetectError("unknown revision ids: %s" % sorted(unknown))

    article_id = history[0].article_id
    ordered = sorted(history, key=lambda r: r.revision_id)
    results = []
    for rev_id in sorted(manipulated_ids):
        rev = by_id[rev_id]
        if rev.parent is None:
            raise DetectError(
                "revision %d has no parent; cannot identify its substitutions" % rev_id
            )
        introduced = diff_revisions(by_id[rev.parent].text, rev.text).substitutions
        later = [r for r in ordered if r.revision_id > rev_id]
        corrected_by = None
        for candidate in later:
            if _cleans_all(rev.text, candidate.text, introduced):
                corrected_by = candidate.revision_id
                break
        if corrected_by is not None:
            intervening = sum(1 for r in later if r.revision_id < corrected_by)
            survival = by_id[corrected_by].timestamp - rev.timestamp
            results.append(
                RevisionSurvival(rev_id, True, intervening, survival, corrected_by)
            )
        else:
            span = ordered[-1].timestamp - rev.timestamp
            results.append(RevisionSurvival(rev_id, False, len(later), span, None))
    return SurvivalMetrics(article_id=article_id, revisions=results)


def _cleans_all(manipulated_text: str, later_text: str, introduced: list[Substitution]) -> bool:
    """True when no introduced word survives at its position in later_text."""
    if not introduced:
        return True
    manipulated_words = tokenize(manipulated_text).stripped()
    later_words = tokenize(later_text).stripped()

    ids: dict[str, int] = {}
    man_ids = [ids.setdefault(w, len(ids)) for w in manipulated_words]
    later_ids = [ids.setdefault(w, len(ids)) for w in later_words]
    aligned = dict(aligned_pairs(man_ids, later_ids))

    for sub in introduced:
        j = aligned.get(sub.token_index)
        if j is not None and later_words[j] == sub.new:
            return False  # the planted word is still there
    return True
