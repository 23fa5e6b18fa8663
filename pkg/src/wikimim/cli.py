"""Command-line front end.

Commands operate on a workspace directory holding corpora, trained chains,
the simulated wiki store, and report files.  Exit codes: 0 success, 1
operational error, 2 usage error, 3 when detection flagged something.
Attack planning is a dry run unless --execute is given; the only command
that touches the network is ``ingest --fetch-titles``, and it only GETs.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from wikimim import chain as chain_mod
from wikimim import detect as detect_mod
from wikimim import mim as mim_mod
from wikimim import wikisim
from wikimim.corpus import load_corpus_dir, save_corpus, strip_wikitext
from wikimim.errors import WikimimError
from wikimim.fetch import fetch_articles

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_FLAGGED = 3

CONFIG_VERSION = 1

DEFAULT_CONFIG = {
    "chain_order": 2,
    "seed": 0,
    "behavior": {"pause": {"kind": "fixed", "seconds": 1.0}, "browse_depth": 0, "seed": 0},
    "thresholds": {"interval_cv": 0.05, "path_entropy": 1.0},
}


class Workspace:
    """Paths and lazily-loaded state for one workspace directory."""

    def __init__(self, root: Path, config: dict):
        self.root = root
        self.config = config
        self._store = None

    @property
    def corpora_dir(self) -> Path:
        return self.root / "corpora"

    @property
    def chains_dir(self) -> Path:
        return self.root / "chains"

    @property
    def store_path(self) -> Path:
        return self.root / "store.jsonl"

    @property
    def accounts_path(self) -> Path:
        return self.root / "accounts.json"

    def corpus(self, label: str):
        return load_corpus_dir(self.corpora_dir / label, label)

    @property
    def store(self) -> wikisim.ArticleStore:
        if self._store is None:
            self.root.mkdir(parents=True, exist_ok=True)
            self._store = wikisim.ArticleStore.load(
                self.store_path, accounts_path=self.accounts_path
            )
        return self._store


def load_workspace(args) -> Workspace:
    root = Path(
        args.workspace
        or os.environ.get("WIKIMIM_WORKSPACE")
        or "workspace"
    )
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    config_path = Path(args.config) if args.config else root / "workspace.json"
    if config_path.exists():
        loaded = json.loads(config_path.read_text(encoding="utf-8"))
        if loaded.get("format_version", CONFIG_VERSION) != CONFIG_VERSION:
            raise WikimimError("unsupported config version in %s" % config_path)
        for key in DEFAULT_CONFIG:
            if key in loaded:
                config[key] = loaded[key]
    return Workspace(root, config)


def _parse_order(value: str) -> int:
    try:
        order = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("order must be an integer")
    if order < 1:
        raise argparse.ArgumentTypeError("order must be >= 1")
    return order


def _parse_word_list(value: str) -> list[str]:
    words = [w for w in value.split(",") if w]
    return words


# --- commands ---------------------------------------------------------------


def cmd_ingest(ws: Workspace, args) -> int:
    if bool(args.from_dir) == bool(args.fetch_titles):
        raise UsageError("exactly one of --from-dir or --fetch-titles is required")
    if args.from_dir:
        corpus = load_corpus_dir(args.from_dir, args.label)
        if args.strip_markup:
            for i, doc in enumerate(corpus.documents):
                corpus.documents[i] = type(doc)(
                    id=doc.id, raw_text=strip_wikitext(doc.raw_text), source=doc.source
                )
    else:
        titles = _parse_word_list(args.fetch_titles)
        if not titles:
            raise UsageError("--fetch-titles needs at least one title")
        if not args.endpoint:
            raise UsageError("--fetch-titles requires --endpoint")
        report = fetch_articles(
            titles, args.endpoint, rate_limit=args.rate_limit, label=args.label
        )
        for title in report.missing:
            print("missing: %s" % title, file=sys.stderr)
        for title, err in report.failed.items():
            print("failed: %s: %s" % (title, err), file=sys.stderr)
        corpus = report.corpus  # extracts are already plain text
        if not corpus.documents:
            raise WikimimError("fetch produced no documents")
    out_dir = ws.corpora_dir / args.label
    save_corpus(corpus, out_dir)
    print("corpus %r: %d document(s) -> %s" % (args.label, len(corpus), out_dir))
    return EXIT_OK


def cmd_train(ws: Workspace, args) -> int:
    corpus = ws.corpus(args.corpus)
    order = args.order if args.order is not None else ws.config["chain_order"]
    chain = chain_mod.train(corpus, chain_mod.ChainConfig(order=order))
    out = Path(args.out) if args.out else ws.chains_dir / ("%s-k%d.chain.json" % (args.corpus, order))
    out.parent.mkdir(parents=True, exist_ok=True)
    chain_mod.save_chain(chain, out)
    print(
        "chain trained on %r: order %d, %d contexts, %d transitions -> %s"
        % (
            args.corpus,
            chain.order,
            len(chain.tables[chain.order]),
            chain.transition_count(),
            out,
        )
    )
    if args.dump:
        for ctx in chain.contexts():
            for t in chain_mod.next_distribution(chain, ctx):
                print("%s -> %s  %d  %.6f" % (" ".join(ctx), t.next, t.count, t.probability))
    return EXIT_OK


def cmd_attack(ws: Workspace, args) -> int:
    store = ws.store
    text = store.get_text(args.article)
    if args.mim:
        if args.chain or args.targets:
            raise UsageError("--mim replaces --chain/--targets")
        mim = mim_mod.mim_from_json(Path(args.mim).read_bytes())
        fresh = mim_mod.text_digest(text) == mim.base_text_hash
        print(
            "loaded MIM object %s: %d edit(s), %s"
            % (args.mim, len(mim.edits), "fresh" if fresh else "STALE")
        )
        if fresh:
            print(mim_mod.preview(mim, text))
    else:
        if not args.chain or not args.targets:
            raise UsageError("either --mim or both --chain and --targets are required")
        targets = _parse_word_list(args.targets)
        if not targets:
            raise UsageError("--targets needs at least one word")
        chain = chain_mod.load_chain(args.chain)
        seed = args.seed if args.seed is not None else ws.config["seed"]
        strategy = mim_mod.TargetStrategy(targets=frozenset(targets))
        mim = mim_mod.build_mim_object(
            chain, text, strategy, seed=seed, article_id=args.article
        )
        out = Path(args.out) if args.out else ws.root / "mim" / ("%s-seed%d.mim.json" % (args.article, seed))
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(mim_mod.mim_to_json(mim))
        print("MIM object: %d edit(s), %d skip(s) -> %s" % (len(mim.edits), len(mim.skips), out))
        print(mim_mod.preview(mim, text))
    if not args.execute:
        print("dry run; store unchanged (use --execute to submit)")
        return EXIT_OK

    account = args.account
    if account is None:
        raise UsageError("--execute requires --account")
    behavior = _behavior_from(ws.config, args)
    if args.wall_clock:
        store.clock = wikisim.WallClock()  # demo mode: pauses really sleep
    revision, trace = wikisim.run_bot_session(store, account, args.article, mim, behavior)
    if args.trace_out:
        existing = (
            wikisim.load_traces(args.trace_out) if Path(args.trace_out).exists() else []
        )
        wikisim.save_traces(existing + [trace], args.trace_out)
        print("session trace appended to %s" % args.trace_out)
    if revision is None:
        print("stale MIM object: article changed since the plan was built", file=sys.stderr)
        return EXIT_ERROR
    print(
        "executed: revision %d of %r by %s at t=%.3f"
        % (revision.revision_id, revision.article_id, revision.editor, revision.timestamp)
    )
    return EXIT_OK


def _behavior_from(config: dict, args) -> wikisim.BehaviorConfig:
    pause = wikisim.pause_from_json(config["behavior"]["pause"])
    if args.pause_fixed is not None:
        pause = wikisim.Fixed(args.pause_fixed)
    elif args.pause_uniform:
        lo, hi = (float(x) for x in args.pause_uniform.split(",", 1))
        pause = wikisim.Uniform(lo, hi)
    elif args.pause_lognormal:
        mu, sigma = (float(x) for x in args.pause_lognormal.split(",", 1))
        pause = wikisim.LogNormal(mu, sigma)
    browse = args.browse_depth if args.browse_depth is not None else config["behavior"]["browse_depth"]
    seed = args.behavior_seed if args.behavior_seed is not None else config["behavior"]["seed"]
    return wikisim.BehaviorConfig(pause=pause, browse_depth=browse, seed=seed)


def cmd_detect(ws: Workspace, args) -> int:
    store = ws.store
    old = store.get_revision(args.article, args.old)
    new = store.get_revision(args.article, args.new)
    order = args.order if args.order is not None else ws.config["chain_order"]
    diff = detect_mod.diff_revisions(old.text, new.text, context_width=order)

    report: dict = {
        "format_version": 1,
        "article_id": args.article,
        "old_revision": args.old,
        "new_revision": args.new,
        "substitutions": [
            {
                "token_index": s.token_index,
                "old": s.old,
                "new": s.new,
                "left_context": list(s.left_context),
                "right_context": list(s.right_context),
            }
            for s in diff.substitutions
        ],
        "insertions": [{"token_index": c.token_index, "word": c.word} for c in diff.insertions],
        "deletions": [{"token_index": c.token_index, "word": c.word} for c in diff.deletions],
    }
    print(
        "diff %s r%d -> r%d: %d substitution(s), %d insertion(s), %d deletion(s)"
        % (
            args.article,
            args.old,
            args.new,
            len(diff.substitutions),
            len(diff.insertions),
            len(diff.deletions),
        )
    )
    for s in diff.substitutions:
        print(
            "  token %d: %s -> %s   [... %s _ %s ...]"
            % (s.token_index, s.old, s.new, " ".join(s.left_context), " ".join(s.right_context))
        )

    flagged = bool(diff.substitutions)

    if args.candidates and diff.substitutions:
        labels = _parse_word_list(args.candidates)
        candidates = [ws.corpus(label) for label in labels]
        attribution = detect_mod.attribute_corpus(diff.substitutions, candidates, order=order)
        print("attribution (order %d):" % order)
        for rank, cand in enumerate(attribution.ranking, 1):
            print("  %d. %-20s score %.3f" % (rank, cand.corpus_label, cand.score))
        report["attribution"] = [
            {
                "corpus_label": c.corpus_label,
                "score": c.score,
                "evidence": [
                    {
                        "token_index": ev.substitution.token_index,
                        "new": ev.substitution.new,
                        "chain_probability": ev.chain_probability,
                        "context_hits": ev.context_hits,
                    }
                    for ev in c.evidence
                ],
            }
            for c in attribution.ranking
        ]

    if args.traces:
        traces = wikisim.load_traces(args.traces)
        thresholds = detect_mod.TraceThresholds(
            interval_cv=ws.config["thresholds"]["interval_cv"],
            path_entropy=ws.config["thresholds"]["path_entropy"],
        )
        anomaly = detect_mod.analyze_traces(traces, thresholds)
        for acct in anomaly.accounts:
            mark = "FLAGGED" if acct.flagged else "ok"
            print(
                "  account %-20s cv=%.4f entropy=%.3f straight=%s  %s"
                % (
                    acct.account,
                    acct.interval_cv,
                    acct.path_entropy,
                    acct.straight_to_target,
                    mark,
                )
            )
        report["trace_anomalies"] = [
            {
                "account": a.account,
                "interval_cv": a.interval_cv,
                "path_entropy": a.path_entropy,
                "straight_to_target": a.straight_to_target,
                "flagged": a.flagged,
            }
            for a in anomaly.accounts
        ]
        flagged = flagged or bool(anomaly.flagged_accounts())

    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(
            json.dumps(report, ensure_ascii=False, indent=1), encoding="utf-8"
        )
        print("report -> %s" % args.out)
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_metrics(ws: Workspace, args) -> int:
    store = ws.store
    history = store.get_history(args.article)
    ids = {int(x) for x in _parse_word_list(args.manipulated)}
    if not ids:
        raise UsageError("--manipulated needs at least one revision id")
    metrics = detect_mod.survival_metrics(history, ids)
    for r in metrics.revisions:
        state = "corrected by r%d" % r.corrected_by if r.corrected else "not corrected"
        print(
            "revision %d: %s; intervening edits %d; survival %.3f"
            % (r.revision_id, state, r.intervening_edits, r.survival_time)
        )
    if args.out:
        payload = {
            "format_version": 1,
            "article_id": metrics.article_id,
            "revisions": [
                {
                    "revision_id": r.revision_id,
                    "corrected": r.corrected,
                    "intervening_edits": r.intervening_edits,
                    "survival_time": r.survival_time,
                    "corrected_by": r.corrected_by,
                }
                for r in metrics.revisions
            ],
        }
        Path(args.out).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )
    return EXIT_OK


def cmd_article(ws: Workspace, args) -> int:
    store = ws.store
    if getattr(args, "advance", 0):
        store.clock.advance(args.advance)
    if args.article_cmd == "create":
        text = Path(args.file).read_text(encoding="utf-8")
        rev = store.create_article(args.id, text, editor=args.editor)
        print("created %r revision %d" % (args.id, rev.revision_id))
    elif args.article_cmd == "edit":
        text = Path(args.file).read_text(encoding="utf-8")
        rev = store.submit_edit(args.account, args.id, text, comment=args.comment)
        print("revision %d of %r" % (rev.revision_id, args.id))
    elif args.article_cmd == "show":
        sys.stdout.write(store.get_text(args.id))
    elif args.article_cmd == "history":
        for rev in store.get_history(args.id):
            print(
                "r%-4d t=%-10.3f %-20s %s"
                % (rev.revision_id, rev.timestamp, rev.editor, rev.comment)
            )
    elif args.article_cmd == "revert":
        rev = store.revert(args.id, args.to, moderator=args.moderator)
        print("revision %d reverts %r to %d" % (rev.revision_id, args.id, args.to))
    return EXIT_OK


def cmd_accounts(ws: Workspace, args) -> int:
    store = ws.store
    if args.accounts_cmd == "generate":
        first = wikisim.load_name_list(args.first_names)
        last = wikisim.load_name_list(args.last_names)
        rng = random.Random(args.seed if args.seed is not None else ws.config["seed"])
        for _ in range(args.count):
            creds = store.generate_credentials(
                first, last, rng, password_length=args.password_length
            )
            print("%s %s" % (creds.username, creds.password))
    else:
        for name in store.accounts():
            print(name)
    return EXIT_OK


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wikimim",
        description="Simulated-wiki word substitution attacks and their forensics.",
    )
    parser.add_argument("--workspace", help="workspace directory (or $WIKIMIM_WORKSPACE)")
    parser.add_argument("--config", help="config file (default: <workspace>/workspace.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a corpus from files or a remote wiki")
    p.add_argument("--label", required=True)
    p.add_argument("--from-dir", help="directory of .txt documents")
    p.add_argument("--fetch-titles", help="comma-separated article titles")
    p.add_argument("--endpoint", help="MediaWiki Action API URL")
    p.add_argument("--rate-limit", type=float, default=1.0, help="seconds between requests")
    p.add_argument("--strip-markup", action="store_true", help="strip wiki markup on ingest")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a chain on an ingested corpus")
    p.add_argument("--corpus", required=True, help="corpus label")
    p.add_argument("--order", type=_parse_order, default=None)
    p.add_argument("--out")
    p.add_argument("--dump", action="store_true", help="print every transition")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("attack", help="plan (and optionally execute) substitutions")
    p.add_argument("--chain", help="chain file (builds a fresh plan)")
    p.add_argument("--article", required=True)
    p.add_argument("--targets", help="comma-separated target words")
    p.add_argument("--mim", help="execute a previously saved MIM object file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="MIM object output file")
    p.add_argument("--execute", action="store_true", help="run a bot session against the store")
    p.add_argument("--account")
    p.add_argument("--browse-depth", type=int, default=None)
    p.add_argument("--behavior-seed", type=int, default=None)
    p.add_argument("--pause-fixed", type=float, default=None)
    p.add_argument("--pause-uniform", help="LO,HI seconds")
    p.add_argument("--pause-lognormal", help="MU,SIGMA")
    p.add_argument(
        "--wall-clock", action="store_true",
        help="demo mode: session pauses really sleep instead of using the simulated clock",
    )
    p.add_argument("--trace-out", help="append the session trace to this file")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("detect", help="diff two revisions and run forensics")
    p.add_argument("--article", required=True)
    p.add_argument("--old", type=int, required=True)
    p.add_argument("--new", type=int, required=True)
    p.add_argument("--candidates", help="comma-separated corpus labels to attribute against")
    p.add_argument("--traces", help="session trace file to analyze")
    p.add_argument("--order", type=_parse_order, default=None)
    p.add_argument("--out", help="JSON report output file")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("metrics", help="edit-survival metrics for manipulated revisions")
    p.add_argument("--article", required=True)
    p.add_argument("--manipulated", required=True, help="comma-separated revision ids")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("article", help="manage articles in the simulated wiki")
    asub = p.add_subparsers(dest="article_cmd", required=True)
    for name in ("create", "edit", "show", "history", "revert"):
        ap = asub.add_parser(name)
        ap.add_argument("--id", required=True)
        if name in ("create", "edit", "revert"):
            ap.add_argument(
                "--advance", type=float, default=1.0, help="advance the clock first"
            )
        if name == "create":
            ap.add_argument("--file", required=True)
            ap.add_argument("--editor", default="sim")
        elif name == "edit":
            ap.add_argument("--file", required=True)
            ap.add_argument("--account", required=True)
            ap.add_argument("--comment", default="")
        elif name == "revert":
            ap.add_argument("--to", type=int, required=True)
            ap.add_argument("--moderator", default="moderator")
    p.set_defaults(func=cmd_article)

    p = sub.add_parser("accounts", help="manage simulated editor accounts")
    acsub = p.add_subparsers(dest="accounts_cmd", required=True)
    gp = acsub.add_parser("generate")
    gp.add_argument("--first-names", required=True, help="newline-delimited name file")
    gp.add_argument("--last-names", required=True)
    gp.add_argument("--count", type=int, default=1)
    gp.add_argument("--password-length", type=int, default=16)
    gp.add_argument("--seed", type=int, default=None)
    acsub.add_parser("list")
    p.set_defaults(func=cmd_accounts)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = load_workspace(args)
        return args.func(ws, args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except WikimimError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
