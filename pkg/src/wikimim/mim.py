"""Build and apply substitution plans (MIM objects).

The engine scans a text left to right; whenever a token's core word is in
the target set it draws a replacement from the chain, conditioned on the
preceding tokens *as already substituted*, so later draws see the effect of
earlier ones.  The plan carries everything needed to reproduce or audit the
run: source text hash, seed, strategy, and per-edit context bookkeeping.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from wikimim.chain import MarkovChain, sample_prefix
from wikimim.corpus import Token, detokenize, split_edges, tokenize
from wikimim.errors import StaleMimError, StrategyError, WikimimError

MIM_FORMAT_VERSION = 1


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class TargetStrategy:
    """The adversary's target words, with matching rules."""

    targets: frozenset[str]
    case_sensitive: bool = False
    match_on_stripped: bool = True

    def __post_init__(self) -> None:
        if any((not w) or w.split() != [w] for w in self.targets):
            raise StrategyError("target words must be non-empty and whitespace-free")

    @classmethod
    def of(cls, *words: str, case_sensitive: bool = False) -> "TargetStrategy":
        return cls(targets=frozenset(words), case_sensitive=case_sensitive)

    def matches(self, token: Token) -> bool:
        candidate = token.stripped if self.match_on_stripped else token.text
        if self.case_sensitive:
            return candidate in self.targets
        folded = candidate.casefold()
        return any(folded == t.casefold() for t in self.targets)


def match_target(token: Token, strategy: TargetStrategy) -> bool:
    """True iff the token's core word is one of the targets (no substrings)."""
    return strategy.matches(token)


@dataclass(frozen=True)
class Edit:
    token_index: int
    original: str  # full token text at the time of the scan
    replacement: str  # raw chain token; its core word is what gets spliced in
    context_used: tuple[str, ...]
    backoff_order: int


@dataclass(frozen=True)
class SkippedTarget:
    """Diagnostic for a target occurrence that could not be replaced."""

    token_index: int
    original: str
    reason: str


@dataclass
class MimObject:
    article_id: str
    base_text_hash: str
    seed: int
    chain_label: str
    strategy: TargetStrategy
    edits: list[Edit] = field(default_factory=list)
    skips: list[SkippedTarget] = field(default_factory=list)

    def visible_edits(self) -> list[Edit]:
        """Edits whose core word actually changes the token."""
        return [
            e
            for e in self.edits
            if split_edges(e.original)[1] != split_edges(e.replacement)[1]
        ]


def build_mim_object(
    chain: MarkovChain,
    text: str,
    strategy: TargetStrategy,
    seed: int,
    article_id: str = "",
    require_visible_change: bool = False,
) -> MimObject:
    """Plan context-relevant replacements for every target occurrence.

    Target matches are replaced one at a time, left to right, drawing from
    the chain with backoff over the preceding (already substituted) tokens.
    A match at the very start of the text, an unseen context even at order
    1, or a draw whose core word is empty (a punctuation-only chain state
    cannot stand in for a word) all leave the token untouched and record a
    skip diagnostic.  With ``require_visible_change`` a draw equal to the
    original is retried up to 10 times.
    """
    if not strategy.targets:
        raise StrategyError("target strategy has no target words")
    if not text:
        raise WikimimError("cannot build a MIM object for empty text")

    rng = random.Random(seed)
    stream = tokenize(text)
    working = [t.text for t in stream.tokens]
    mim = MimObject(
        article_id=article_id,
        base_text_hash=text_digest(text),
        seed=seed,
        chain_label=chain.trained_on,
        strategy=strategy,
    )

    for index, token in enumerate(stream.tokens):
        if not strategy.matches(token):
            continue
        prefix = tuple(working[max(0, index - chain.order) : index])
        if not prefix:
            mim.skips.append(
                SkippedTarget(index, token.text, "no left context at start of text")
            )
            continue
        drawn = sample_prefix(chain, prefix, rng)
        if drawn is None:
            mim.skips.append(SkippedTarget(index, token.text, "context unseen at every order"))
            continue
        if require_visible_change:
            for _ in range(9):
                if split_edges(drawn[0])[1] != token.stripped:
                    break
                drawn = sample_prefix(chain, prefix, rng)
        replacement, used_order = drawn
        core = split_edges(replacement)[1]
        if not core:
            mim.skips.append(
                SkippedTarget(index, token.text, "drew punctuation-only token %r" % replacement)
            )
            continue
        if require_visible_change and core == token.stripped:
            mim.skips.append(
                SkippedTarget(index, token.text, "no visible change after 10 draws")
            )
            continue
        mim.edits.append(
            Edit(
                token_index=index,
                original=token.text,
                replacement=replacement,
                context_used=tuple(prefix[-used_order:]),
                backoff_order=used_order,
            )
        )
        working[index] = token.lead_punct + core + token.trail_punct

    return mim


def _check_applicable(mim: MimObject, text: str) -> None:
    if text_digest(text) != mim.base_text_hash:
        raise StaleMimError(
            "stale MIM object: text hash %s does not match %s"
            % (text_digest(text)[:12], mim.base_text_hash[:12])
        )


def apply(mim: MimObject, text: str) -> str:
    """Splice each edit's core word into the text, byte-exact elsewhere.

    The edited token keeps its own leading/trailing punctuation; the chain
    token's punctuation is dropped ("wabe;" drawn for "borogoves," yields
    "wabe,").  Separators and untouched tokens pass through unchanged.
    """
    _check_applicable(mim, text)
    stream = tokenize(text)
    out = stream
    for edit in mim.edits:
        if not 0 <= edit.token_index < len(stream.tokens):
            raise WikimimError("edit index %d out of range" % edit.token_index)
        token = stream.tokens[edit.token_index]
        if token.text != edit.original:
            raise StaleMimError(
                "edit %d expected token %r, found %r"
                % (edit.token_index, edit.original, token.text)
            )
        core = split_edges(edit.replacement)[1]
        out = out.replaced(edit.token_index, token.lead_punct + core + token.trail_punct)
    return detokenize(out)


def preview(mim: MimObject, text: str, context_tokens: int = 5) -> str:
    """Human-readable before/after listing of every edit. Pure report."""
    _check_applicable(mim, text)
    if not mim.edits:
        return "no edits"
    before = tokenize(text)
    after = tokenize(apply(mim, text))
    lines = []
    for n, edit in enumerate(mim.edits, 1):
        lo = max(0, edit.token_index - context_tokens)
        hi = edit.token_index + context_tokens + 1
        old_ctx = " ".join(t.text for t in before.tokens[lo:hi])
        new_ctx = " ".join(t.text for t in after.tokens[lo:hi])
        lines.append(
            "edit %d at token %d (order %d, context %s):\n  - %s\n  + %s"
            % (
                n,
                edit.token_index,
                edit.backoff_order,
                " ".join(edit.context_used),
                old_ctx,
                new_ctx,
            )
        )
    return "\n".join(lines)


def mim_to_json(mim: MimObject) -> bytes:
    payload = {
        "format_version": MIM_FORMAT_VERSION,
        "article_id": mim.article_id,
        "base_text_hash": mim.base_text_hash,
        "seed": mim.seed,
        "chain_label": mim.chain_label,
        "strategy": {
            "targets": sorted(mim.strategy.targets),
            "case_sensitive": mim.strategy.case_sensitive,
            "match_on_stripped": mim.strategy.match_on_stripped,
        },
        "edits": [
            {
                "token_index": e.token_index,
                "original": e.original,
                "replacement": e.replacement,
                "context_used": list(e.context_used),
                "backoff_order": e.backoff_order,
            }
            for e in mim.edits
        ],
        "skips": [
            {"token_index": s.token_index, "original": s.original, "reason": s.reason}
            for s in mim.skips
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=1).encode("utf-8")


def mim_from_json(data: bytes) -> MimObject:
    try:
        payload = json.loads(data.decode("utf-8"))
        if payload["format_version"] != MIM_FORMAT_VERSION:
            raise WikimimError(
                "unsupported MIM object version %r" % payload["format_version"]
            )
        strategy = TargetStrategy(
            targets=frozenset(payload["strategy"]["targets"]),
            case_sensitive=payload["strategy"]["case_sensitive"],
            match_on_stripped=payload["strategy"]["match_on_stripped"],
        )
        mim = MimObject(
            article_id=payload["article_id"],
            base_text_hash=payload["base_text_hash"],
            seed=payload["seed"],
            chain_label=payload["chain_label"],
            strategy=strategy,
            edits=[
                Edit(
                    token_index=e["token_index"],
                    original=e["original"],
                    replacement=e["replacement"],
                    context_used=tuple(e["context_used"]),
                    backoff_order=e["backoff_order"],
                )
                for e in payload["edits"]
            ],
            skips=[
                SkippedTarget(s["token_index"], s["original"], s["reason"])
                for s in payload.get("skips", [])
            ],
        )
    except (KeyError, TypeError, ValueError, UnicodeDecodeError) as exc:
        raise WikimimError("malformed MIM object payload: %s" % exc) from exc
    indices = [e.token_index for e in mim.edits]
    if indices != sorted(set(indices)):
        raise WikimimError("MIM object edits must be strictly increasing by index")
    return mim
