"""Order-k Markov chains over token sequences.

States are full token texts (punctuation attached, case preserved), exactly
as the tokenizer produces them.  Training records successor counts for every
context length 1..k so that sampling can back off to a shorter context when
the full one was never observed.  Counts are the ground truth; probabilities
are always the exact count ratio, recomputed on load.
"""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from dataclasses import dataclass, field

from wikimim.corpus import Corpus
from wikimim.errors import ChainError, ChainFormatError

CHAIN_FORMAT_VERSION = 1

Context = tuple[str, ...]


@dataclass(frozen=True)
class Transition:
    next: str
    count: int
    probability: float


@dataclass
class ChainConfig:
    order: int = 2
    document_boundaries: bool = True  # no n-gram spans two documents

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ChainError("chain order must be >= 1, got %d" % self.order)


class _Dist:
    """Successor distribution for one context.

    Successors are kept sorted lexicographically and sampled by cumulative
    count inversion, which makes seeded draws platform-independent.
    """

    __slots__ = ("nexts", "counts", "cumulative", "total")

    def __init__(self, counts_by_next: dict[str, int]):
        self.nexts = sorted(counts_by_next)
        self.counts = [counts_by_next[w] for w in self.nexts]
        self.cumulative = []
        total = 0
        for c in self.counts:
            total += c
            self.cumulative.append(total)
        self.total = total

    def transitions(self) -> list[Transition]:
        return [
            Transition(next=w, count=c, probability=c / self.total)
            for w, c in zip(self.nexts, self.counts)
        ]

    def sample(self, rng: random.Random) -> str:
        threshold = rng.random() * self.total
        return self.nexts[min(bisect_right(self.cumulative, threshold), len(self.nexts) - 1)]


@dataclass
class MarkovChain:
    order: int
    trained_on: str
    vocab_size: int
    # tables[o] maps an o-token context to its successor distribution
    tables: dict[int, dict[Context, _Dist]] = field(repr=False, default_factory=dict)

    @property
    def table(self) -> dict[Context, list[Transition]]:
        """The full-order context table as plain transition lists."""
        return {ctx: dist.transitions() for ctx, dist in self.tables[self.order].items()}

    def contexts(self, order: int | None = None) -> list[Context]:
        return sorted(self.tables[order if order is not None else self.order])

    def transition_count(self, order: int | None = None) -> int:
        o = order if order is not None else self.order
        return sum(len(d.nexts) for d in self.tables[o].values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MarkovChain):
            return NotImplemented
        return (
            self.order == other.order
            and self.trained_on == other.trained_on
            and {
                o: {ctx: dict(zip(d.nexts, d.counts)) for ctx, d in tbl.items()}
                for o, tbl in self.tables.items()
            }
            == {
                o: {ctx: dict(zip(d.nexts, d.counts)) for ctx, d in tbl.items()}
                for o, tbl in other.tables.items()
            }
        )


def train(corpus: Corpus, config: ChainConfig | None = None) -> MarkovChain:
    """Count every k-gram -> successor observation in the corpus.

    With document_boundaries on (the default), each document is its own
    token sequence and no context crosses from one into the next.
    """
    config = config or ChainConfig()
    if not corpus.documents:
        raise ChainError("cannot train on an empty corpus")

    sequences = [[t.text for t in s.tokens] for s in corpus.token_streams()]
    if not config.document_boundaries:
        merged: list[str] = []
        for seq in sequences:
            merged.extend(seq)
        sequences = [merged]

    counts: dict[int, dict[Context, dict[str, int]]] = {
        o: {} for o in range(1, config.order + 1)
    }
    vocab: set[str] = set()
    for seq in sequences:
        vocab.update(seq)
        for order in range(1, config.order + 1):
            table = counts[order]
            for i in range(len(seq) - order):
                ctx = tuple(seq[i : i + order])
                nxt = seq[i + order]
                successors = table.get(ctx)
                if successors is None:
                    successors = table[ctx] = {}
                successors[nxt] = successors.get(nxt, 0) + 1

    if not counts[config.order]:
        raise ChainError(
            "insufficient tokens: no document has %d+ tokens" % (config.order + 1)
        )

    tables = {
        o: {ctx: _Dist(successors) for ctx, successors in tbl.items()}
        for o, tbl in counts.items()
    }
    return MarkovChain(
        order=config.order,
        trained_on=corpus.label,
        vocab_size=len(vocab),
        tables=tables,
    )


def _check_context(chain: MarkovChain, context: Context) -> None:
    if len(context) != chain.order:
        raise ChainError(
            "context length %d does not match chain order %d"
            % (len(context), chain.order)
        )


def next_distribution(chain: MarkovChain, context: Context) -> list[Transition]:
    """Stored transitions for a full-order context; empty list when unseen."""
    _check_context(chain, context)
    dist = chain.tables[chain.order].get(tuple(context))
    return dist.transitions() if dist is not None else []


def distribution_at(chain: MarkovChain, context: Context) -> list[Transition]:
    """Transitions for a context of any trained order (1..k)."""
    if not 1 <= len(context) <= chain.order:
        raise ChainError("context length must be in 1..%d" % chain.order)
    dist = chain.tables[len(context)].get(tuple(context))
    return dist.transitions() if dist is not None else []


def sample(chain: MarkovChain, context: Context, rng: random.Random) -> str | None:
    """Weighted random successor for a full-order context, or None if unseen."""
    _check_context(chain, context)
    dist = chain.tables[chain.order].get(tuple(context))
    return dist.sample(rng) if dist is not None else None


def sample_prefix(
    chain: MarkovChain, prefix: Context, rng: random.Random
) -> tuple[str, int] | None:
    """Sample with backoff from a context of up to ``chain.order`` tokens.

    Tries the longest available context first; on a miss drops the oldest
    token and consults the next shorter table.  Returns (token, used order),
    or None when even the single-token context is unseen or no context is
    available at all.
    """
    if len(prefix) > chain.order:
        prefix = prefix[-chain.order :]
    for order in range(len(prefix), 0, -1):
        dist = chain.tables[order].get(tuple(prefix[-order:]))
        if dist is not None:
            return dist.sample(rng), order
    return None


def sample_with_backoff(
    chain: MarkovChain, context: Context, rng: random.Random
) -> tuple[str, int] | None:
    """Backoff sampling for a full-order context."""
    _check_context(chain, context)
    return sample_prefix(chain, context, rng)


def serialize(chain: MarkovChain) -> bytes:
    """Versioned JSON with stable ordering; stores counts only."""
    contexts = []
    for order in sorted(chain.tables):
        for ctx in sorted(chain.tables[order]):
            dist = chain.tables[order][ctx]
            contexts.append(
                {
                    "ctx": list(ctx),
                    "transitions": [
                        {"next": w, "count": c}
                        for w, c in zip(dist.nexts, dist.counts)
                    ],
                }
            )
    payload = {
        "format_version": CHAIN_FORMAT_VERSION,
        "order": chain.order,
        "label": chain.trained_on,
        "contexts": contexts,
    }
    return json.dumps(payload, ensure_ascii=False, indent=1).encode("utf-8")


def deserialize(data: bytes) -> MarkovChain:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ChainFormatError("malformed chain payload: %s" % exc) from exc
    if not isinstance(payload, dict):
        raise ChainFormatError("chain payload must be a JSON object")
    version = payload.get("format_version")
    if version != CHAIN_FORMAT_VERSION:
        raise ChainFormatError(
            "unsupported chain format version %r (expected %d)"
            % (version, CHAIN_FORMAT_VERSION)
        )
    order = payload.get("order")
    if not isinstance(order, int) or order < 1:
        raise ChainFormatError("chain order must be a positive integer, got %r" % order)
    label = payload.get("label")
    if not isinstance(label, str):
        raise ChainFormatError("chain label missing")

    tables: dict[int, dict[Context, _Dist]] = {o: {} for o in range(1, order + 1)}
    vocab: set[str] = set()
    for entry in payload.get("contexts", []):
        try:
            ctx = tuple(entry["ctx"])
            successors = {t["next"]: t["count"] for t in entry["transitions"]}
        except (KeyError, TypeError) as exc:
            raise ChainFormatError("malformed context entry: %r" % entry) from exc
        if not 1 <= len(ctx) <= order:
            raise ChainFormatError("context %r has bad length for order %d" % (ctx, order))
        if any(not isinstance(c, int) or c < 1 for c in successors.values()):
            raise ChainFormatError("transition counts must be positive integers")
        tables[len(ctx)][ctx] = _Dist(successors)
        vocab.update(ctx)
        vocab.update(successors)
    if not tables[order]:
        raise ChainFormatError("chain has no full-order contexts")
    return MarkovChain(order=order, trained_on=label, vocab_size=len(vocab), tables=tables)


def save_chain(chain: MarkovChain, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(chain))


def load_chain(path) -> MarkovChain:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
