"""Context-aware word-substitution attacks and forensics on a local wiki sandbox."""

from wikimim.chain import (
    ChainConfig,
    MarkovChain,
    Transition,
    deserialize,
    next_distribution,
    sample,
    sample_with_backoff,
    serialize,
    train,
)
from wikimim.corpus import (
    Corpus,
    Document,
    Token,
    TokenStream,
    detokenize,
    load_corpus,
    load_corpus_dir,
    save_corpus,
    strip_wikitext,
    tokenize,
)
from wikimim.detect import (
    AttributionReport,
    DiffResult,
    Substitution,
    SurvivalMetrics,
    TraceAnomalyReport,
    TraceThresholds,
    analyze_traces,
    attribute_corpus,
    context_search,
    diff_revisions,
    survival_metrics,
)
from wikimim.errors import WikimimError
from wikimim.fetch import FetchReport, fetch_articles
from wikimim.mim import (
    Edit,
    MimObject,
    TargetStrategy,
    apply,
    build_mim_object,
    match_target,
    preview,
)
from wikimim.wikisim import (
    ArticleStore,
    BehaviorConfig,
    Credentials,
    Fixed,
    LogNormal,
    Revision,
    SessionTrace,
    SimClock,
    Uniform,
    WallClock,
    run_bot_session,
)

__version__ = "0.1.0"
