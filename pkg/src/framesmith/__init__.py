"""framesmith: a self-hostable semantic frame database with a guided,
check-enforcing creation wizard, a multilingual synset lexicon for
redundancy detection, an HTTP API and an operator CLI."""

from .errors import (
    FramesmithError,
    LanguageError,
    LexiconError,
    MappingError,
    StoreError,
    WizardError,
)
from .languages import Language, LanguageRegistry, default_registry
from .lexicon import (
    CrossLingualHit,
    FrameSummary,
    IngestResult,
    Lemma,
    LemmaSearchResult,
    SynonymHit,
    Synset,
    SynsetLexicon,
    normalized_edit_distance,
)
from .model import (
    POS,
    CorenessStatus,
    FEOrigin,
    FEOriginKind,
    FERelation,
    FERelationKind,
    Finding,
    Frame,
    FrameElement,
    FrameRelation,
    FrameRelationKind,
    FrameType,
    Lexicality,
    LexicalUnit,
    Severity,
    ValidationReport,
    Verdict,
)
from .rules import (
    FESuggestion,
    apply_relation_mapping,
    suggest_frame_elements,
    validate_fe_relations,
    validate_frame_draft,
    validate_frame_name,
)
from .store import FramePage, FrameStore, FrameStoreSnapshot, ImportMode, ImportResult
from .wizard import (
    CommitOutcome,
    FlowKind,
    ReviewDecision,
    StepRejection,
    Wizard,
    WizardSession,
    WizardStep,
)

__version__ = "0.1.0"
