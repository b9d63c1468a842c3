"""Diversity-controlled prompt exploration for text-to-image ideation."""

from .concreteness import (
    ConcretenessAnnotation,
    annotate_prompt,
    load_lexicon,
    opacity_for,
    tokenize,
)
from .config import AppConfig, EngineConfig, ProviderConfig, load_config
from .engine import (
    Candidate,
    ExpansionMode,
    ExpansionRequest,
    SpanSelection,
    SuggestionSet,
    build_generation_prompt,
    build_pool,
    cluster_and_select,
    cosine_distance,
    expand,
    novelty_filter,
    parse_candidates,
    select_replacement,
    splice,
)
from .errors import (
    EmptyPoolError,
    FormatError,
    InvalidStateError,
    NotFoundError,
    PartialResultError,
    PoolExhaustedError,
    PromptMapError,
    ProviderError,
    ValidationError,
)
from .metrics import DiversityReport, diversity_report
from .providers import (
    EmbeddingCache,
    EmbeddingClient,
    MockChatProvider,
    MockEmbeddingProvider,
    MockImageProvider,
    Providers,
    build_providers,
)
from .session import (
    GraphNode,
    ImageRef,
    LogicalClock,
    NodeKind,
    Session,
    create_session,
    deserialize,
    load_session,
    save_session,
    serialize,
)

__version__ = "0.1.0"
