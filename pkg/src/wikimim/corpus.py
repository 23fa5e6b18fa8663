"""Text ingestion: documents, whitespace tokenization, wiki-markup stripping.

Tokenization is deliberately simple: tokens are maximal runs of
non-whitespace with punctuation left attached ("brillig," stays one token)
and case preserved, because that is what the substitution chain trains on.
Every whitespace run between tokens is kept, so a token stream can always be
re-assembled into the exact original string.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote, unquote

from wikimim.errors import CorpusError

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\S+")


def _is_edge_punct(ch: str) -> bool:
    # Unicode punctuation (P*) and symbols (S*) count as strippable edges.
    return unicodedata.category(ch)[0] in ("P", "S")


def split_edges(text: str) -> tuple[str, str, str]:
    """Split a token into (leading punctuation, core, trailing punctuation).

    Internal punctuation is untouched ("People's" keeps its apostrophe).
    A token that is punctuation through and through has an empty core and
    everything in the leading part.
    """
    start = 0
    end = len(text)
    while start < end and _is_edge_punct(text[start]):
        start += 1
    if start == end:
        return text, "", ""
    while end > start and _is_edge_punct(text[end - 1]):
        end -= 1
    return text[:start], text[start:end], text[end:]


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited token with its punctuation decomposition."""

    text: str
    lead_punct: str
    stripped: str
    trail_punct: str

    @classmethod
    def from_text(cls, text: str) -> "Token":
        lead, core, trail = split_edges(text)
        return cls(text=text, lead_punct=lead, stripped=core, trail_punct=trail)


@dataclass
class TokenStream:
    """Tokens plus the whitespace runs between them.

    ``separators`` always has one more entry than ``tokens``: the (possibly
    empty) leading and trailing whitespace are kept too, so detokenize is a
    byte-exact inverse of tokenize.
    """

    tokens: list[Token]
    separators: list[str]

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def stripped(self) -> list[str]:
        return [t.stripped for t in self.tokens]

    def replaced(self, index: int, new_text: str) -> "TokenStream":
        """Copy of the stream with one token's text swapped out."""
        tokens = list(self.tokens)
        tokens[index] = Token.from_text(new_text)
        return TokenStream(tokens=tokens, separators=list(self.separators))


def tokenize(text: str) -> TokenStream:
    """Split on whitespace, keeping every separator run."""
    tokens: list[Token] = []
    separators: list[str] = []
    last = 0
    for match in _TOKEN_RE.finditer(text):
        separators.append(text[last : match.start()])
        tokens.append(Token.from_text(match.group()))
        last = match.end()
    separators.append(text[last:])
    return TokenStream(tokens=tokens, separators=separators)


def detokenize(stream: TokenStream) -> str:
    """Inverse of tokenize. Raises CorpusError on a malformed stream."""
    if len(stream.separators) != len(stream.tokens) + 1:
        raise CorpusError(
            "malformed token stream: %d tokens need %d separators, got %d"
            % (len(stream.tokens), len(stream.tokens) + 1, len(stream.separators))
        )
    parts = [stream.separators[0]]
    for token, sep in zip(stream.tokens, stream.separators[1:]):
        parts.append(token.text)
        parts.append(sep)
    return "".join(parts)


# --- wiki markup stripping -------------------------------------------------

_TEMPLATE_RE = re.compile(r"\{\{[^{}]*\}\}")
_PIPED_LINK_RE = re.compile(r"\[\[[^\[\]|]*\|([^\[\]]*)\]\]")
_PLAIN_LINK_RE = re.compile(r"\[\[([^\[\]|]*)\]\]")
_REF_PAIR_RE = re.compile(r"<ref[^<>]*>.*?</ref>", re.DOTALL | re.IGNORECASE)
_REF_SINGLE_RE = re.compile(r"<ref[^<>]*/>", re.IGNORECASE)
_HEADING_RE = re.compile(r"^(={2,6})[ \t]*(.*?)[ \t]*\1[ \t]*$", re.MULTILINE)

_MAX_STRIP_PASSES = 50


def strip_wikitext(raw: str) -> str:
    """Best-effort removal of common wiki markup, keeping plain prose.

    Handles templates ``{{...}}``, link markup (``[[a|b]]`` -> b,
    ``[[a]]`` -> a), ``<ref>`` tags and heading markers.  Bracketed citation
    markers like ``[157]`` are ordinary text and stay put.  The passes run
    to a fixpoint, so the function is idempotent; unbalanced markup is left
    as-is with a warning rather than failing.
    """
    text = raw
    for _ in range(_MAX_STRIP_PASSES):
        previous = text
        text = _REF_PAIR_RE.sub("", text)
        text = _REF_SINGLE_RE.sub("", text)
        text = _TEMPLATE_RE.sub("", text)
        text = _PIPED_LINK_RE.sub(r"\1", text)
        text = _PLAIN_LINK_RE.sub(r"\1", text)
        text = _HEADING_RE.sub(r"\2", text)
        if text == previous:
            break
    else:
        logger.warning("wikitext stripping did not converge; returning best effort")
    if "{{" in text or "}}" in text or "[[" in text or "]]" in text:
        logger.warning("unbalanced wiki markup left in place")
    return text


# --- corpus ----------------------------------------------------------------


@dataclass(frozen=True)
class Document:
    """One article's worth of raw text."""

    id: str
    raw_text: str
    source: str = "local_file"  # or "remote_fetch"

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("document id must be non-empty")


@dataclass
class Corpus:
    label: str
    documents: list[Document] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate document ids in corpus %r" % self.label)

    def __len__(self) -> int:
        return len(self.documents)

    def token_streams(self) -> list[TokenStream]:
        return [tokenize(doc.raw_text) for doc in self.documents]


def load_corpus(paths: list[str | Path], label: str) -> Corpus:
    """One document per file, ordered as given. File name becomes the id."""
    if not paths:
        raise CorpusError("no input files given for corpus %r" % label)
    documents = []
    for p in paths:
        path = Path(p)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusError("cannot read corpus file %s: %s" % (path, exc)) from exc
        documents.append(
            Document(id=unquote(path.stem), raw_text=raw, source="local_file")
        )
    return Corpus(label=label, documents=documents)


def load_corpus_dir(directory: str | Path, label: str) -> Corpus:
    """Load every .txt file from a corpus directory (sorted by name)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError("corpus directory %s does not exist" % directory)
    paths = sorted(directory.glob("*.txt"))
    if not paths:
        raise CorpusError("no .txt documents in %s" % directory)
    return load_corpus(paths, label)


def save_corpus(corpus: Corpus, directory: str | Path) -> list[Path]:
    """Write one UTF-8 .txt per document; file name is the URL-encoded id."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for doc in corpus.documents:
        path = directory / (quote(doc.id, safe="") + ".txt")
        path.write_text(doc.raw_text, encoding="utf-8")
        written.append(path)
    return written
