"""Read-only article fetching over the MediaWiki Action API.

This is the optional ingestion path; local files are the primary one.  The
fetcher only ever issues GET requests for plain-text extracts, identifies
itself with a clear user agent, never authenticates, and enforces at least
one second between requests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import requests

from wikimim.corpus import Corpus, Document
from wikimim.errors import FetchError

USER_AGENT = "wikimim-fetch/0.1 (offline-first research sandbox; read-only)"
MIN_RATE_LIMIT = 1.0


@dataclass
class FetchReport:
    corpus: Corpus
    missing: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)  # title -> error

    @property
    def ok(self) -> bool:
        return not self.missing and not self.failed


def fetch_articles(
    titles: list[str],
    endpoint: str,
    rate_limit: float = MIN_RATE_LIMIT,
    label: str = "fetched",
    timeout: float = 30.0,
    _sleep=time.sleep,
) -> FetchReport:
    """Fetch plain-text extracts, one GET per title, serialized.

    Per-title failures are collected rather than raised, so a partial
    corpus always comes back with a report of what is missing or failed.
    """
    if not titles:
        raise FetchError("no titles requested")
    if rate_limit < MIN_RATE_LIMIT:
        raise FetchError("rate limit must be at least %.0f second" % MIN_RATE_LIMIT)

    session = requests.Session()
    session.headers["User-Agent"] = USER_AGENT

    report = FetchReport(corpus=Corpus(label=label))
    for n, title in enumerate(titles):
        if n:
            _sleep(rate_limit)
        params = {
            "action": "query",
            "prop": "extracts",
            "explaintext": "1",
            "format": "json",
            "titles": title,
        }
        try:
            resp = session.get(endpoint, params=params, timeout=timeout)
            resp.raise_for_status()
            pages = resp.json()["query"]["pages"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            report.failed[title] = str(exc)
            continue
        page = next(iter(pages.values()), None)
        if page is None or "missing" in page or "extract" not in page:
            report.missing.append(title)
            continue
        report.corpus.documents.append(
            Document(id=page.get("title", title), raw_text=page["extract"], source="remote_fetch")
        )
    return report
