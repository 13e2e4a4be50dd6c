"""Domain types for frames, frame elements, lexical units and relations.

Values are immutable; all mutation happens by building replacements with
``dataclasses.replace``. Validation is deliberately NOT enforced in the
constructors: drafts move through the creation wizard in partially-built
states, and the validators in :mod:`framesmith.rules` report problems as
structured findings instead of exceptions.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum

from .languages import Language

NAME_PATTERN = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")

SCENARIO_SUFFIX = "_scenario"
STATE_PREFIX = "Being_"
STATE_SUFFIX = "_state"


def new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class FrameType(Enum):
    """Root type selected at the start of frame creation."""

    EVENT = "event"
    ENTITY = "entity"
    RELATION = "relation"
    ATTRIBUTE = "attribute"
    STATE = "state"
    UNDEFINED = "undefined"


class Lexicality(Enum):
    LEXICAL = "lexical"
    NON_LEXICAL = "non_lexical"


class CorenessStatus(Enum):
    CORE = "core"
    CORE_UNEXPRESSED = "core_unexpressed"
    PERIPHERAL = "peripheral"
    EXTRA_THEMATIC = "extra_thematic"


class POS(Enum):
    """Part of speech; values match the single-letter wire codes."""

    NOUN = "n"
    VERB = "v"
    ADJECTIVE = "a"
    ADVERB = "r"
    PREPOSITION = "p"
    OTHER = "x"


class FEOriginKind(Enum):
    MANUAL = "manual"
    SUGGESTED_BY_TYPE = "suggested"
    MAPPED_FROM_RELATION = "mapped"


@dataclass(frozen=True)
class FEOrigin:
    """Where a frame element came from.

    ``relation`` is set only for mapped FEs and holds the owning relation's
    key (``kind:casefolded-mother-name``), which survives interchange
    round-trips because it contains no store-local ids.
    """

    kind: FEOriginKind
    relation: str | None = None

    @classmethod
    def manual(cls) -> "FEOrigin":
        return cls(FEOriginKind.MANUAL)

    @classmethod
    def suggested(cls) -> "FEOrigin":
        return cls(FEOriginKind.SUGGESTED_BY_TYPE)

    @classmethod
    def mapped(cls, relation_key: str) -> "FEOrigin":
        return cls(FEOriginKind.MAPPED_FROM_RELATION, relation_key)


@dataclass(frozen=True)
class FrameElement:
    id: str
    name: str
    definition: str
    coreness: CorenessStatus
    origin: FEOrigin = field(default_factory=FEOrigin.manual)

    @property
    def is_core(self) -> bool:
        return self.coreness is CorenessStatus.CORE


class FERelationKind(Enum):
    REQUIRES = "requires"
    EXCLUDES = "excludes"
    CORE_SET = "core_set"


@dataclass(frozen=True)
class FERelation:
    """Intra-frame relation between FEs, members referenced by FE id.

    Requires/Excludes are unordered pairs; member order is kept as given but
    carries no meaning. Self-pairs and dangling ids are representable so the
    validators can report them.
    """

    kind: FERelationKind
    members: tuple[str, ...]

    def __post_init__(self):
        n = len(self.members)
        if self.kind in (FERelationKind.REQUIRES, FERelationKind.EXCLUDES) and n != 2:
            raise ValueError(f"{self.kind.value} relation needs exactly 2 members, got {n}")
        if self.kind is FERelationKind.CORE_SET and n < 2:
            raise ValueError(f"core_set relation needs at least 2 members, got {n}")

    @property
    def pair(self) -> frozenset[str]:
        return frozenset(self.members)


class FrameRelationKind(Enum):
    INHERITANCE = "inheritance"
    USING = "using"
    SUBFRAME_OF = "subframe_of"
    PERSPECTIVE_ON = "perspective_on"
    PRECEDES = "precedes"
    CAUSATIVE_OF = "causative_of"
    INCHOATIVE_OF = "inchoative_of"
    SEE_ALSO = "see_also"


@dataclass(frozen=True)
class FrameRelation:
    """Directed mother -> daughter link, stored on the daughter frame.

    ``mother`` holds the mother's store id while resolved; unresolved
    relations (references to frames outside the local store) keep only the
    name and flip ``resolved`` off. ``fe_mappings`` pairs a mother FE id
    (FE name when unresolved) with the daughter-side FE name it creates.
    """

    kind: FrameRelationKind
    mother: str
    daughter: str
    mother_name: str
    fe_mappings: tuple[tuple[str, str], ...] = ()
    resolved: bool = True

    @property
    def key(self) -> str:
        return f"{self.kind.value}:{self.mother_name.casefold()}"


@dataclass(frozen=True)
class LexicalUnit:
    """A lemma/POS/language pairing evoking exactly one frame.

    ``id`` is assigned by the store at commit time and is empty on drafts.
    """

    lemma: str
    pos: POS
    language: Language
    frame: str
    example_sentence: str
    incorporated_fe: str | None = None
    id: str = ""


@dataclass(frozen=True)
class Frame:
    id: str
    name: str
    definition: str
    frame_type: FrameType
    lexicality: Lexicality
    languages: frozenset[Language] = frozenset()
    fes: tuple[FrameElement, ...] = ()
    fe_relations: tuple[FERelation, ...] = ()
    relations: tuple[FrameRelation, ...] = ()
    lus: tuple[LexicalUnit, ...] = ()
    is_scenario: bool = False
    created_by: str = ""
    created_at: datetime = field(default_factory=utcnow)

    def fe_by_id(self, fe_id: str) -> FrameElement | None:
        for fe in self.fes:
            if fe.id == fe_id:
                return fe
        return None

    def fe_named(self, name: str) -> FrameElement | None:
        wanted = name.casefold()
        for fe in self.fes:
            if fe.name.casefold() == wanted:
                return fe
        return None

    @property
    def core_fes(self) -> tuple[FrameElement, ...]:
        return tuple(fe for fe in self.fes if fe.is_core)

    def effective_languages(self) -> frozenset[Language]:
        """Declared languages plus the languages of all attached LUs."""
        return self.languages | frozenset(lu.language for lu in self.lus)

    def with_fes(self, fes: tuple[FrameElement, ...]) -> "Frame":
        return replace(self, fes=fes)


class Severity(Enum):
    WARNING = "warning"
    ERROR = "error"


class Verdict(Enum):
    PASS = "pass"
    PASS_WITH_WARNINGS = "pass_with_warnings"
    FAIL = "fail"


@dataclass(frozen=True)
class Finding:
    code: str
    severity: Severity
    message: str
    subject: str = ""


def warning(code: str, message: str, subject: str = "") -> Finding:
    return Finding(code, Severity.WARNING, message, subject)


def error(code: str, message: str, subject: str = "") -> Finding:
    return Finding(code, Severity.ERROR, message, subject)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation pass; verdict is derived from the findings."""

    verdict: Verdict
    findings: tuple[Finding, ...] = ()

    @classmethod
    def from_findings(cls, findings) -> "ValidationReport":
        findings = tuple(findings)
        if any(f.severity is Severity.ERROR for f in findings):
            verdict = Verdict.FAIL
        elif findings:
            verdict = Verdict.PASS_WITH_WARNINGS
        else:
            verdict = Verdict.PASS
        return cls(verdict, findings)

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.FAIL

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport.from_findings(self.findings + other.findings)
