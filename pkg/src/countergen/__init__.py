"""Evidence-grounded counter-response generation with element-level critique feedback."""

from .bench import LatencyModel, ThroughputResult, measure_throughput
from .core import (
    CounterResponse,
    ElementKind,
    FactCheckArticle,
    VeracityLabel,
    normalize_label,
)
from .critics import (
    AggregatedCritique,
    Critique,
    FlaggedElement,
    ModelCritics,
    RuleCritics,
    aggregate,
    critique_entities,
    critique_numbers,
    critique_topic,
    model_critique,
)
from .datagen import (
    AFFIRMATIVE_CRITIQUES,
    Replacement,
    TrainingInstance,
    emit_jsonl,
    make_entity_replacements,
    make_factual_instances,
    make_number_replacements,
    make_offtopic_instances,
    read_jsonl,
)
from .elements import (
    ElementSpan,
    TaggerClient,
    TermProfile,
    content_terms,
    extract_entities,
    extract_numbers,
    normalize_number,
)
from .errors import (
    ConfigError,
    CountergenError,
    CriticError,
    ExtractionError,
    GenerationError,
    MetricError,
    PromptError,
    ProtocolError,
    SchemaError,
    TransportError,
)
from .ingest import (
    DatasetStats,
    FieldMap,
    LoadResult,
    RejectRecord,
    SectionStats,
    dataset_stats,
    filter_by_label,
    load_shared_evidence,
    load_tsv,
    split,
)
from .llm import CompletionClient, CompletionResult
from .metrics import (
    MetricReport,
    factscore,
    geval_score,
    grounding_score,
    overall,
    score_response,
)
from .pipeline import (
    GenerationConfig,
    GenerationTrace,
    PromptMessages,
    build_initial_prompt,
    build_refine_prompt,
    chat_complete,
    generate_counter_response,
)

__version__ = "0.1.0"
