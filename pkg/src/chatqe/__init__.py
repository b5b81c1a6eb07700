"""chatqe: scoring and meta-evaluation harness for machine-translated chats."""

__version__ = "0.1.0"

from .bridge import (
    MetricRun,
    ScoreTable,
    SegmentBatch,
    export_batch,
    import_scores,
    native_score_batch,
    read_batch,
    read_scores,
    write_scores,
)
from .context import (
    ContextSetting,
    ContextualizedPair,
    TargetContextMode,
    build_context,
    contextify_corpus,
    select_context_turns,
)
from .corpus import (
    Conversation,
    Corpus,
    LanguagePair,
    MqmError,
    Severity,
    Speaker,
    SystemOutput,
    Turn,
    parse_corpus,
    serialize_corpus,
    validate,
)
from .lexical import BleuConfig, ChrfConfig, sentence_bleu, sentence_chrf, tokenize_13a
from .metaeval import (
    CorrelationResult,
    MetaEvalReport,
    SubsetSpec,
    average_ranks,
    filter_subset,
    metaeval,
    spearman,
)
from .mqm import (
    CuaBucket,
    MqmScore,
    SeverityCounts,
    count_severities,
    cua_bucket,
    is_imperfect,
    mqm_score,
    score_errors,
)
from .perturb import NoiseKind, NoiseSide, NoiseSpec, perturb, perturb_batch
from .stats import StatsReport, corpus_stats
from .synthetic import make_corpus
