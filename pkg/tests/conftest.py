import json
import random
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import pytest
from hypothesis import settings

from wikimim.chain import ChainConfig, train
from wikimim.corpus import Corpus, Document, load_corpus

settings.register_profile("ci", derandomize=True, max_examples=100)
settings.load_profile("ci")

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def stanza_training_text() -> str:
    return (FIXTURES / "jabberwocky" / "jabberwocky-lines-1-2.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def stanza_target_text() -> str:
    return (FIXTURES / "jabberwocky-target.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def stanza_corpus() -> Corpus:
    return load_corpus([FIXTURES / "jabberwocky" / "jabberwocky-lines-1-2.txt"], "jab")


@pytest.fixture(scope="session")
def stanza_chain(stanza_corpus):
    return train(stanza_corpus, ChainConfig(order=1))


@pytest.fixture(scope="session")
def article_pair() -> tuple[str, str]:
    old = (FIXTURES / "uyghur" / "original.txt").read_text(encoding="utf-8")
    new = (FIXTURES / "uyghur" / "manipulated.txt").read_text(encoding="utf-8")
    return old, new


def ngram_successor_counts(sequences, order):
    """Independent brute-force successor count, used as the training oracle."""
    counts = {}
    for seq in sequences:
        for i in range(len(seq) - order):
            counts.setdefault(tuple(seq[i : i + order]), Counter())[seq[i + order]] += 1
    return counts


WIKI_ARTICLES = {
    "Han Chinese": "The Han Chinese are an East Asian ethnic group.",
    "Korean War": "The Korean War was fought between 1950 and 1953.",
}


class StubWikiHandler(BaseHTTPRequestHandler):
    """Minimal Action API lookalike recording every request it serves."""

    def log_message(self, *args):
        pass

    def _respond(self, payload: dict, status=200):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        params = {k: v[0] for k, v in parse_qs(urlparse(self.path).query).items()}
        self.server.seen.append(
            {"method": "GET", "params": params, "user_agent": self.headers.get("User-Agent")}
        )
        title = params.get("titles", "")
        if title in WIKI_ARTICLES:
            pages = {"1": {"title": title, "extract": WIKI_ARTICLES[title]}}
        else:
            pages = {"-1": {"title": title, "missing": ""}}
        self._respond({"query": {"pages": pages}})

    def do_POST(self):
        self.server.seen.append({"method": "POST"})
        self._respond({"error": "writes are not allowed"}, status=405)


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubWikiHandler)
    server.seen = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server, "http://127.0.0.1:%d/w/api.php" % server.server_address[1]
    finally:
        server.shutdown()


WORD_POOL = [
    "alder", "birch", "cedar", "dogwood", "elm", "fir", "ginkgo", "hazel",
    "ironwood", "juniper", "katsura", "larch", "maple", "oak", "pine", "rowan",
]
DECOR = ["", ",", ".", ";", "!", "?"]


def random_document_text(rng: random.Random, n_tokens: int) -> str:
    """Plain prose-ish text: pooled words, occasional punctuation."""
    words = []
    for _ in range(n_tokens):
        w = rng.choice(WORD_POOL)
        if rng.random() < 0.25:
            w += rng.choice(DECOR[1:])
        if rng.random() < 0.05:
            w = "(" + w
        words.append(w)
    return " ".join(words)


def random_attack_fixture(rng: random.Random, order: int):
    """A (corpus, text, strategy seed words) triple for round-trip checks.

    The text shares the corpus vocabulary so chain lookups usually succeed,
    and targets are words that actually occur in the text.
    """
    docs = [
        Document(id="doc%d" % i, raw_text=random_document_text(rng, rng.randint(30, 90)))
        for i in range(rng.randint(1, 3))
    ]
    corpus = Corpus(label="corpus%d" % rng.randint(0, 10**6), documents=docs)
    text = random_document_text(rng, rng.randint(10, 40))
    stripped = [w.strip("".join(DECOR[1:]) + "(") for w in text.split()]
    candidates = sorted({w for w in stripped if w})
    rng.shuffle(candidates)
    targets = candidates[: rng.randint(1, 3)]
    return corpus, text, targets
