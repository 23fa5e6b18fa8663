"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line so the whole gate can be read off `pytest -s` output.

Run with:  pytest tests/test_acceptance.py -v -s
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import random_attack_fixture
from wikimim.chain import ChainConfig, deserialize, serialize, train
from wikimim.corpus import Corpus, Document, detokenize, split_edges, tokenize
from wikimim.detect import (
    PROBABILITY_FLOOR,
    analyze_traces,
    attribute_corpus,
    diff_revisions,
    survival_metrics,
)
from wikimim.mim import TargetStrategy, apply, build_mim_object
from wikimim.wikisim import (
    ArticleStore,
    BehaviorConfig,
    Fixed,
    LogNormal,
    SimClock,
    run_bot_session,
)


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print("ACCEPTANCE %d FAIL: %s" % (number, description))
        raise
    print("ACCEPTANCE %d PASS: %s" % (number, description))


def test_criterion_1_transition_table_reproduction(stanza_corpus):
    with criterion(1, "order-1 stanza chain yields exactly the expected 12 transitions"):
        start = time.perf_counter()
        chain = train(stanza_corpus, ChainConfig(order=1))
        rows = set()
        for ctx, transitions in chain.table.items():
            total = sum(t.count for t in transitions)
            for t in transitions:
                rows.add((ctx[0], t.next, Fraction(t.count, total)))
        expected = {
            ("‘Twas", "brillig,", Fraction(1)),
            ("brillig,", "and", Fraction(1)),
            ("and", "the", Fraction(1, 2)),
            ("the", "slithy", Fraction(1, 2)),
            ("slithy", "toves", Fraction(1)),
            ("toves", "Did", Fraction(1)),
            ("Did", "gyre", Fraction(1)),
            ("gyre", "and", Fraction(1)),
            ("and", "gimble", Fraction(1, 2)),
            ("gimble", "in", Fraction(1)),
            ("in", "the", Fraction(1)),
            ("the", "wabe;", Fraction(1, 2)),
        }
        assert rows == expected
        assert len(rows) == 12
        assert time.perf_counter() - start < 1.0


def test_criterion_2_substitution_reachability(stanza_chain, stanza_target_text):
    with criterion(2, "verse substitutions reachable and correctly distributed"):
        strategy = TargetStrategy.of("borogoves", "mome")
        outputs_in_first_100 = set()
        slithy_first = slithy_second = 0
        n = 10_000
        for seed in range(n):
            mim = build_mim_object(stanza_chain, stanza_target_text, strategy, seed=seed)
            cores = tuple(split_edges(e.replacement)[1] for e in mim.edits)
            assert len(cores) == 2
            assert set(cores) <= {"slithy", "wabe"}
            if seed < 100:
                outputs_in_first_100.add(apply(mim, stanza_target_text))
            slithy_first += cores[0] == "slithy"
            slithy_second += cores[1] == "slithy"
        # Both canonical manipulated verses, under the punctuation rule that
        # keeps the original token's comma.
        assert (
            "All mimsy were the wabe,\nAnd the slithy raths outgrabe.\n"
            in outputs_in_first_100
        )
        assert (
            "All mimsy were the slithy,\nAnd the slithy raths outgrabe.\n"
            in outputs_in_first_100
        )
        assert abs(slithy_first / n - 0.50) <= 0.02
        assert abs(slithy_second / n - 0.50) <= 0.02


def test_criterion_3_article_pair_diff(article_pair):
    with criterion(3, "article fixture pair yields exactly the 4 known substitutions"):
        old, new = article_pair
        diff = diff_revisions(old, new)
        assert [(s.old, s.new) for s in diff.substitutions] == [
            ("Uyghurs", "Manchus"),
            ("Uyghurs", "groups"),
            ("Uyghur", "man"),
            ("Uyghur", "War"),
        ]
        assert diff.insertions == [] and diff.deletions == []


def test_criterion_4_round_trip_property_suite():
    with criterion(4, "500 randomized engine/detector round trips are exact"):
        start = time.perf_counter()
        instances = 0
        for order in (1, 2):
            for i in range(250):
                rng = random.Random(10_000 * order + i)
                corpus, text, targets = random_attack_fixture(rng, order)
                chain = train(corpus, ChainConfig(order=order))
                mim = build_mim_object(
                    chain, text, TargetStrategy(targets=frozenset(targets)), seed=i
                )
                out = apply(mim, text)

                assert detokenize(tokenize(text)) == text
                assert detokenize(tokenize(out)) == out
                assert deserialize(serialize(chain)) == chain

                expected = {
                    (e.token_index, split_edges(e.original)[1], split_edges(e.replacement)[1])
                    for e in mim.visible_edits()
                }
                diff = diff_revisions(text, out)
                actual = {(s.token_index, s.old, s.new) for s in diff.substitutions}
                assert actual == expected
                assert diff.insertions == [] and diff.deletions == []
                instances += 1
        assert instances == 500
        assert time.perf_counter() - start < 60.0


DECOY_POOLS = (
    ["quill", "quart", "quake", "query", "quest", "quich", "quota", "quirk"],
    ["vesta", "vigil", "vivid", "vocal", "vowel", "vying", "vapor", "venom"],
)


def _decoy_corpus(rng: random.Random, label: str, pool: list[str]) -> Corpus:
    docs = [
        Document(
            id="%s%d" % (label, i),
            raw_text=" ".join(rng.choice(pool) for _ in range(rng.randint(30, 60))),
        )
        for i in range(2)
    ]
    return Corpus(label=label, documents=docs)


def test_criterion_5_attribution_trials():
    with criterion(5, "true training corpus ranks first in 50/50 attribution trials"):
        wins = 0
        order = 2
        for trial in range(50):
            rng = random.Random(7_000 + trial)
            subs = []
            for attempt in range(40):
                corpus, text, targets = random_attack_fixture(rng, order)
                chain = train(corpus, ChainConfig(order=order))
                mim = build_mim_object(
                    chain, text, TargetStrategy(targets=frozenset(targets)), seed=attempt
                )
                out = apply(mim, text)
                subs = diff_revisions(text, out).substitutions
                if subs:
                    break
            assert subs, "trial %d produced no visible substitution" % trial
            decoys = [
                _decoy_corpus(rng, "decoy_a", DECOY_POOLS[0]),
                _decoy_corpus(rng, "decoy_b", DECOY_POOLS[1]),
            ]
            report = attribute_corpus(subs, decoys + [corpus], order=order)
            if report.best().corpus_label == corpus.label:
                wins += 1
            floor = len(subs) * math.log(PROBABILITY_FLOOR)
            for cand in report.ranking:
                if cand.corpus_label.startswith("decoy"):
                    assert cand.score == pytest.approx(floor, rel=1e-12)
        assert wins == 50


def _session_store(texts_seed: int, stanza_target_text: str):
    store = ArticleStore(clock=SimClock())
    store.generate_credentials(["Bot"], ["Account"], random.Random(texts_seed))
    store.create_article("target", stanza_target_text)
    for i in range(4):
        store.create_article("related%d" % i, "some related article text %d" % i)
    return store


def test_criterion_6_behavioral_detection(stanza_chain, stanza_target_text):
    with criterion(6, "naive bots flagged 100/100, humanized sessions under 10/100"):
        strategy = TargetStrategy.of("borogoves", "mome")

        def run_session(behavior, seed):
            store = _session_store(seed, stanza_target_text)
            mim = build_mim_object(stanza_chain, stanza_target_text, strategy, seed=seed)
            _, trace = run_bot_session(store, "BotAccount", "target", mim, behavior)
            return trace

        naive = [
            run_session(BehaviorConfig(pause=Fixed(1.0), browse_depth=0, seed=s), s)
            for s in range(100)
        ]
        report = analyze_traces(naive)
        assert len(report.flagged_accounts()) == 100

        humanized = [
            run_session(
                BehaviorConfig(
                    pause=LogNormal(0.0, 0.5), browse_depth=3 + s % 3, seed=s
                ),
                s,
            )
            for s in range(100)
        ]
        report = analyze_traces(humanized)
        assert len(report.flagged_accounts()) < 10


def test_criterion_7_survival_metrics(stanza_chain, stanza_target_text):
    with criterion(7, "vandal edit + 2 benign edits + revert measures exactly"):
        store = ArticleStore(clock=SimClock())
        store.generate_credentials(["Vandal"], ["Bot"], random.Random(0))
        store.generate_credentials(["Honest"], ["Editor"], random.Random(1))
        store.create_article("target", stanza_target_text)

        mim = build_mim_object(
            stanza_chain, stanza_target_text, TargetStrategy.of("borogoves", "mome"), seed=4
        )
        store.clock.advance(10.0)
        vandal_rev = store.submit_edit(
            "VandalBot", "target", apply(mim, stanza_target_text), comment="minor wording"
        )
        store.clock.advance(30.0)
        store.submit_edit("HonestEditor", "target", store.get_text("target") + "more\n")
        store.clock.advance(30.0)
        store.submit_edit("HonestEditor", "target", store.get_text("target") + "again\n")
        store.clock.advance(30.0)
        store.revert("target", 1)

        metrics = survival_metrics(store.get_history("target"), {vandal_rev.revision_id})
        [result] = metrics.revisions
        assert result.corrected is True
        assert result.intervening_edits == 2
        assert result.survival_time == 90.0
        assert result.corrected_by == 5
