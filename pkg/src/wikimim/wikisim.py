"""Local wiki stand-in: revision store, synthetic accounts, bot sessions.

The store keeps a full append-only revision history per article; nothing is
ever mutated or deleted, a revert just appends a new revision with an old
revision's text.  Time comes from an explicit clock object so that scripted
scenarios and tests control it; the wall-clock variant actually sleeps and
exists for live demos only.
"""

from __future__ import annotations

import json
import math
import random
import string
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from wikimim.errors import StoreError, WikimimError
from wikimim.mim import MimObject, apply as apply_mim, text_digest

EVENT_KINDS = ("login", "view_page", "click_link", "open_editor", "submit_edit", "logout")

PASSWORD_ALPHABET = string.ascii_letters + string.digits + "!#$%&*+-=?@_~"


class SimClock:
    """Virtual clock: time moves only when advanced."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise WikimimError("cannot advance clock by a negative duration")
        self._now += seconds
        return self._now


class WallClock:
    """Real time; advance() sleeps. For demo runs, never for tests."""

    def now(self) -> float:
        return time.time()

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise WikimimError("cannot advance clock by a negative duration")
        time.sleep(seconds)
        return self.now()


# --- pause distributions -----------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    seconds: float

    def __post_init__(self):
        if self.seconds <= 0:
            raise WikimimError("pause duration must be positive")

    def sample(self, rng: random.Random) -> float:
        return self.seconds

    def to_json(self) -> dict:
        return {"kind": "fixed", "seconds": self.seconds}


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise WikimimError("uniform pause bounds must satisfy 0 < lo <= hi")

    def sample(self, rng: random.Random) -> float:
        return rng.uniform(self.lo, self.hi)

    def to_json(self) -> dict:
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class LogNormal:
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0 or not math.isfinite(self.mu):
            raise WikimimError("lognormal pause needs finite mu and sigma > 0")

    def sample(self, rng: random.Random) -> float:
        return rng.lognormvariate(self.mu, self.sigma)

    def to_json(self) -> dict:
        return {"kind": "lognormal", "mu": self.mu, "sigma": self.sigma}


PauseDistribution = Fixed | Uniform | LogNormal


def pause_from_json(payload: dict) -> PauseDistribution:
    kind = payload.get("kind")
    if kind == "fixed":
        return Fixed(payload["seconds"])
    if kind == "uniform":
        return Uniform(payload["lo"], payload["hi"])
    if kind == "lognormal":
        return LogNormal(payload["mu"], payload["sigma"])
    raise WikimimError("unknown pause distribution kind %r" % kind)


@dataclass(frozen=True)
class BehaviorConfig:
    pause: PauseDistribution = Fixed(1.0)
    browse_depth: int = 0  # related pages visited before the target
    seed: int = 0

    def __post_init__(self):
        if self.browse_depth < 0:
            raise WikimimError("browse_depth must be >= 0")


# --- accounts ----------------------------------------------------------------


@dataclass(frozen=True)
class Credentials:
    username: str
    password: str


# --- revisions ---------------------------------------------------------------


@dataclass(frozen=True)
class Revision:
    article_id: str
    revision_id: int
    text: str
    editor: str
    timestamp: float
    parent: int | None
    comment: str = ""

    def to_json(self) -> dict:
        return {
            "article_id": self.article_id,
            "revision_id": self.revision_id,
            "text": self.text,
            "editor": self.editor,
            "timestamp": self.timestamp,
            "parent": self.parent,
            "comment": self.comment,
        }


@dataclass(frozen=True)
class SessionEvent:
    kind: str
    page_id: str
    timestamp: float


@dataclass
class SessionTrace:
    account: str
    events: list[SessionEvent] = field(default_factory=list)

    def kinds(self) -> list[str]:
        return [e.kind for e in self.events]

    def pauses(self) -> list[float]:
        return [
            b.timestamp - a.timestamp for a, b in zip(self.events, self.events[1:])
        ]


class ArticleStore:
    """Append-only article history plus the account registry.

    All writes go through one lock, giving a total order of revision ids.
    When a journal path is set, every revision is appended to a JSON-lines
    file and the registry snapshot rewritten, so the full state can be
    reloaded later.
    """

    def __init__(
        self,
        clock: SimClock | WallClock | None = None,
        journal_path: str | Path | None = None,
        accounts_path: str | Path | None = None,
    ):
        self.clock = clock if clock is not None else SimClock()
        self._articles: dict[str, list[Revision]] = {}
        self._accounts: dict[str, Credentials] = {}
        self._lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None
        self._accounts_path = Path(accounts_path) if accounts_path else None

    # -- accounts --

    def generate_credentials(
        self,
        first_names: list[str],
        last_names: list[str],
        rng: random.Random,
        password_length: int = 16,
    ) -> Credentials:
        """Sample a realistic-looking username and register it atomically.

        Colliding usernames get a two-digit disambiguator ("AdaLovelace01").
        """
        if not first_names or not last_names:
            raise StoreError("first and last name lists must be non-empty")
        if password_length < 12:
            raise StoreError("password length must be >= 12")
        base = rng.choice(first_names).strip() + rng.choice(last_names).strip()
        password = "".join(rng.choice(PASSWORD_ALPHABET) for _ in range(password_length))
        with self._lock:
            username = base
            if username in self._accounts:
                for n in range(1, 100):
                    username = "%s%02d" % (base, n)
                    if username not in self._accounts:
                        break
                else:
                    raise StoreError("username space exhausted for %r" % base)
            creds = Credentials(username=username, password=password)
            self._accounts[username] = creds
            self._save_accounts()
        return creds

    def register_account(self, creds: Credentials) -> None:
        with self._lock:
            if creds.username in self._accounts:
                raise StoreError("account %r already registered" % creds.username)
            self._accounts[creds.username] = creds
            self._save_accounts()

    def accounts(self) -> list[str]:
        return sorted(self._accounts)

    def _require_account(self, username: str) -> None:
        if username not in self._accounts:
            raise StoreError("unknown account %r" % username)

    def _save_accounts(self) -> None:
        if self._accounts_path is None:
            return
        payload = {
            "format_version": 1,
            "accounts": [
                {"username": c.username, "password": c.password}
                for c in sorted(self._accounts.values(), key=lambda c: c.username)
            ],
        }
        self._accounts_path.write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )

    # -- articles --

    def _append(self, rev: Revision) -> Revision:
        self._articles.setdefault(rev.article_id, []).append(rev)
        if self._journal_path is not None:
            with open(self._journal_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rev.to_json(), ensure_ascii=False) + "\n")
        return rev

    def create_article(self, article_id: str, text: str, editor: str = "sim") -> Revision:
        with self._lock:
            if article_id in self._articles:
                raise StoreError("article %r already exists" % article_id)
            if not article_id:
                raise StoreError("article id must be non-empty")
            return self._append(
                Revision(
                    article_id=article_id,
                    revision_id=1,
                    text=text,
                    editor=editor,
                    timestamp=self.clock.now(),
                    parent=None,
                    comment="create",
                )
            )

    def _require_article(self, article_id: str) -> list[Revision]:
        revs = self._articles.get(article_id)
        if revs is None:
            raise StoreError("unknown article %r" % article_id)
        return revs

    def article_ids(self) -> list[str]:
        return sorted(self._articles)

    def get_text(self, article_id: str) -> str:
        return self._require_article(article_id)[-1].text

    def get_history(self, article_id: str) -> list[Revision]:
        return list(self._require_article(article_id))

    def get_revision(self, article_id: str, revision_id: int) -> Revision:
        revs = self._require_article(article_id)
        if not 1 <= revision_id <= len(revs):
            raise StoreError(
                "article %r has no revision %d" % (article_id, revision_id)
            )
        return revs[revision_id - 1]

    def submit_edit(
        self, account: str, article_id: str, new_text: str, comment: str = ""
    ) -> Revision:
        with self._lock:
            self._require_account(account)
            revs = self._require_article(article_id)
            head = revs[-1]
            return self._append(
                Revision(
                    article_id=article_id,
                    revision_id=head.revision_id + 1,
                    text=new_text,
                    editor=account,
                    timestamp=self.clock.now(),
                    parent=head.revision_id,
                    comment=comment,
                )
            )

    def revert(self, article_id: str, to_revision_id: int, moderator: str = "moderator") -> Revision:
        """Append a new revision restoring an earlier revision's text."""
        with self._lock:
            target = self.get_revision(article_id, to_revision_id)
            head = self._articles[article_id][-1]
            return self._append(
                Revision(
                    article_id=article_id,
                    revision_id=head.revision_id + 1,
                    text=target.text,
                    editor=moderator,
                    timestamp=self.clock.now(),
                    parent=head.revision_id,
                    comment="revert to %d" % to_revision_id,
                )
            )

    @classmethod
    def load(
        cls,
        journal_path: str | Path,
        accounts_path: str | Path | None = None,
        clock: SimClock | None = None,
    ) -> "ArticleStore":
        """Rebuild a store from its journal (and registry file, if present)."""
        store = cls(clock=clock, journal_path=journal_path, accounts_path=accounts_path)
        journal = Path(journal_path)
        last_ts = 0.0
        if journal.exists():
            with open(journal, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    raw = json.loads(line)
                    rev = Revision(
                        article_id=raw["article_id"],
                        revision_id=raw["revision_id"],
                        text=raw["text"],
                        editor=raw["editor"],
                        timestamp=raw["timestamp"],
                        parent=raw["parent"],
                        comment=raw.get("comment", ""),
                    )
                    store._articles.setdefault(rev.article_id, []).append(rev)
                    last_ts = max(last_ts, rev.timestamp)
        if accounts_path and Path(accounts_path).exists():
            payload = json.loads(Path(accounts_path).read_text(encoding="utf-8"))
            for entry in payload.get("accounts", []):
                store._accounts[entry["username"]] = Credentials(
                    username=entry["username"], password=entry["password"]
                )
        if clock is None and isinstance(store.clock, SimClock):
            store.clock = SimClock(start=last_ts)
        return store


def run_bot_session(
    store: ArticleStore,
    account: str,
    target_article: str,
    mim: MimObject,
    behavior: BehaviorConfig,
    clock: SimClock | WallClock | None = None,
) -> tuple[Revision | None, SessionTrace]:
    """Play out one editing session: login, browse, edit, logout.

    Browsing visits ``browse_depth`` randomly chosen other articles (a
    click_link plus a view_page each).  Every step advances the clock by a
    pause drawn from the behavior's distribution.  If the article text no
    longer matches the MIM object, the session is abandoned at the editor:
    no revision is written and the trace simply has no submit_edit event.
    """
    clock = clock if clock is not None else store.clock
    store._require_account(account)
    rng = random.Random(behavior.seed)
    trace = SessionTrace(account=account)

    def step(kind: str, page_id: str, first: bool = False) -> None:
        if not first:
            clock.advance(behavior.pause.sample(rng))
        trace.events.append(SessionEvent(kind=kind, page_id=page_id, timestamp=clock.now()))

    step("login", "", first=True)
    related = [a for a in store.article_ids() if a != target_article] or [target_article]
    for _ in range(behavior.browse_depth):
        page = rng.choice(related)
        step("click_link", page)
        step("view_page", page)
    step("open_editor", target_article)

    current = store.get_text(target_article)
    revision = None
    if text_digest(current) == mim.base_text_hash:
        new_text = apply_mim(mim, current)
        step("submit_edit", target_article)
        revision = store.submit_edit(
            account, target_article, new_text, comment="minor wording"
        )
    step("logout", "")
    return revision, trace


# --- trace files ---------------------------------------------------------------


def save_traces(traces: list[SessionTrace], path: str | Path) -> None:
    payload = {
        "format_version": 1,
        "traces": [
            {
                "account": t.account,
                "events": [[e.kind, e.page_id, e.timestamp] for e in t.events],
            }
            for t in traces
        ],
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8")


def load_traces(path: str | Path) -> list[SessionTrace]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != 1:
        raise WikimimError("unsupported trace file version")
    traces = []
    for raw in payload["traces"]:
        trace = SessionTrace(account=raw["account"])
        for kind, page_id, ts in raw["events"]:
            if kind not in EVENT_KINDS:
                raise WikimimError("unknown event kind %r in trace file" % kind)
            trace.events.append(SessionEvent(kind=kind, page_id=page_id, timestamp=ts))
        traces.append(trace)
    return traces


def load_name_list(path: str | Path) -> list[str]:
    """Newline-delimited UTF-8 name list; blank lines ignored."""
    names = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not names:
        raise StoreError("name list %s is empty" % path)
    return names
