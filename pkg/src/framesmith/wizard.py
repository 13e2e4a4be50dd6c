"""Step-gated frame creation sessions.

Creation runs as a linear wizard with two flows: the lexical flow starts
from a lemma search (so redundant frames are caught before any work
happens), the non-lexical flow starts at type selection and takes the
frame's languages there. Every advance applies the stateless validators;
error findings reject the step and leave the session exactly as it was.
Backward navigation is allowed, and resubmitting an earlier step drops the
later data that depended on it (changing the frame type drops suggested
FEs, redoing relations drops mapped FEs).

Sessions are single-writer: calls on one session serialize through a
per-session lock. Distinct sessions only meet at finalize, where the
store's atomic commit decides name races.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Any, Callable

from . import interchange
from .errors import MappingError, StoreError, WizardError
from .languages import Language, LanguageRegistry, default_registry
from .lexicon import (
    CrossLingualHit,
    FrameSummary,
    Lemma,
    LemmaSearchResult,
    SynonymHit,
    SynsetLexicon,
)
from .model import (
    NAME_PATTERN,
    POS,
    CorenessStatus,
    FERelation,
    FERelationKind,
    FEOrigin,
    FEOriginKind,
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
    error,
    new_id,
    utcnow,
)
from .rules import (
    apply_relation_mapping,
    suggest_frame_elements,
    validate_fe_relations,
    validate_frame_draft,
    validate_frame_name,
)
from .store import FrameStore


class FlowKind(Enum):
    LEXICAL = "lexical"
    NON_LEXICAL = "non_lexical"


class WizardStep(Enum):
    LEMMA_SEARCH = "lemma_search"
    EXISTING_FRAME_REVIEW = "existing_frame_review"
    TYPE_SELECTION = "type_selection"
    NAME_AND_DEFINITION = "name_and_definition"
    FRAME_RELATIONS = "frame_relations"
    FRAME_ELEMENTS = "frame_elements"
    FE_RELATIONS = "fe_relations"
    SUMMARY = "summary"
    EXAMPLE_SENTENCE = "example_sentence"
    COMMITTED = "committed"


FLOW_ORDERS: dict[FlowKind, tuple[WizardStep, ...]] = {
    FlowKind.LEXICAL: (
        WizardStep.LEMMA_SEARCH,
        WizardStep.EXISTING_FRAME_REVIEW,
        WizardStep.TYPE_SELECTION,
        WizardStep.NAME_AND_DEFINITION,
        WizardStep.FRAME_RELATIONS,
        WizardStep.FRAME_ELEMENTS,
        WizardStep.FE_RELATIONS,
        WizardStep.SUMMARY,
        WizardStep.EXAMPLE_SENTENCE,
        WizardStep.COMMITTED,
    ),
    FlowKind.NON_LEXICAL: (
        WizardStep.TYPE_SELECTION,
        WizardStep.NAME_AND_DEFINITION,
        WizardStep.FRAME_RELATIONS,
        WizardStep.FRAME_ELEMENTS,
        WizardStep.FE_RELATIONS,
        WizardStep.SUMMARY,
        WizardStep.COMMITTED,
    ),
}

# Steps whose payloads go through submit_step; the others have dedicated ops.
_PAYLOAD_STEPS = (
    WizardStep.TYPE_SELECTION,
    WizardStep.NAME_AND_DEFINITION,
    WizardStep.FRAME_RELATIONS,
    WizardStep.FRAME_ELEMENTS,
    WizardStep.FE_RELATIONS,
    WizardStep.SUMMARY,
)


class ReviewDecision(Enum):
    CREATE_NEW_FRAME = "create_new_frame"
    ATTACH_TO_FRAME = "attach_to_frame"


@dataclass
class WizardSession:
    id: str
    contributor: str
    flow: FlowKind
    step: WizardStep
    draft: Frame
    pending_lemma: Lemma | None = None
    search_result: LemmaSearchResult | None = None
    attach_to: str | None = None
    last_report: ValidationReport | None = None
    committed_frame: str | None = None
    created_at: datetime = field(default_factory=utcnow)
    updated_at: datetime = field(default_factory=utcnow)

    def fingerprint(self) -> tuple:
        """Deep-comparable view of everything a step may change."""
        return (
            self.step,
            self.draft,
            self.pending_lemma,
            self.search_result,
            self.attach_to,
            self.last_report,
            self.committed_frame,
        )

    def step_index(self) -> int:
        return FLOW_ORDERS[self.flow].index(self.step)


@dataclass(frozen=True)
class StepRejection:
    report: ValidationReport
    stayed_at: WizardStep


@dataclass(frozen=True)
class CommitOutcome:
    frame_id: str
    frame_name: str
    lu_id: str | None = None


class _Reject(Exception):
    def __init__(self, findings: list[Finding]):
        super().__init__("step rejected")
        self.findings = findings


class Wizard:
    def __init__(
        self,
        store: FrameStore,
        lexicon: SynsetLexicon,
        *,
        registry: LanguageRegistry | None = None,
        similarity_threshold: float = 0.25,
        session_ttl: timedelta = timedelta(days=30),
        sessions_path: str | Path | None = None,
        clock: Callable[[], datetime] = utcnow,
    ):
        self._store = store
        self._lexicon = lexicon
        self._registry = registry or default_registry()
        self._threshold = similarity_threshold
        self._ttl = session_ttl
        self._clock = clock
        self._sessions: dict[str, WizardSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._manager_lock = threading.Lock()
        self._sessions_path = Path(sessions_path) if sessions_path else None
        if self._sessions_path is not None and self._sessions_path.exists():
            self._load_sessions()

    # -- session lifecycle --------------------------------------------------

    def start_session(self, contributor: str, flow: FlowKind) -> WizardSession:
        if not contributor:
            raise WizardError("INVALID_PAYLOAD", "a contributor id is required")
        now = self._clock()
        draft = Frame(
            id=new_id("draft"),
            name="",
            definition="",
            frame_type=FrameType.UNDEFINED,
            lexicality=(
                Lexicality.LEXICAL if flow is FlowKind.LEXICAL else Lexicality.NON_LEXICAL
            ),
            created_by=contributor,
            created_at=now,
        )
        first = FLOW_ORDERS[flow][0]
        session = WizardSession(
            id=new_id("sess"),
            contributor=contributor,
            flow=flow,
            step=first,
            draft=draft,
            created_at=now,
            updated_at=now,
        )
        with self._manager_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
        self._save_sessions()
        return session

    def get_session(self, session_id: str) -> WizardSession:
        return self._fetch(session_id)

    def _fetch(self, session_id: str) -> WizardSession:
        with self._manager_lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise WizardError("UNKNOWN_SESSION", f"no session {session_id!r}")
            if self._clock() - session.updated_at > self._ttl:
                del self._sessions[session_id]
                self._locks.pop(session_id, None)
                raise WizardError("SESSION_EXPIRED", f"session {session_id!r} has expired")
            return session

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._manager_lock:
            lock = self._locks.get(session_id)
        if lock is None:
            # Session vanished or expired; surface the right error.
            self._fetch(session_id)
            raise WizardError("UNKNOWN_SESSION", f"no session {session_id!r}")
        return lock

    def _touch(self, session: WizardSession) -> None:
        session.updated_at = self._clock()
        self._save_sessions()

    # -- lexical entry ------------------------------------------------------

    def submit_lemma(self, session_id: str, lemma: Lemma) -> WizardSession:
        """Run the redundancy search; hits branch into the review step."""
        with self._session_lock(session_id):
            session = self._fetch(session_id)
            if session.flow is not FlowKind.LEXICAL or session.step is not WizardStep.LEMMA_SEARCH:
                raise WizardError(
                    "WRONG_STEP",
                    f"lemma search is not available at step {session.step.value!r}",
                )
            result = self._lexicon.search(lemma, self._store, self._threshold)
            session.pending_lemma = lemma
            session.search_result = result
            session.attach_to = None
            session.step = (
                WizardStep.EXISTING_FRAME_REVIEW if result.has_hits else WizardStep.TYPE_SELECTION
            )
            session.last_report = None
            self._touch(session)
            return session

    def resolve_review(
        self,
        session_id: str,
        decision: ReviewDecision,
        frame_id: str | None = None,
    ) -> WizardSession:
        with self._session_lock(session_id):
            session = self._fetch(session_id)
            if session.step is not WizardStep.EXISTING_FRAME_REVIEW:
                raise WizardError(
                    "WRONG_STEP",
                    f"there is no review to resolve at step {session.step.value!r}",
                )
            if decision is ReviewDecision.CREATE_NEW_FRAME:
                session.step = WizardStep.TYPE_SELECTION
                session.attach_to = None
            else:
                if not frame_id:
                    raise WizardError("INVALID_PAYLOAD", "attach_to_frame needs a frame id")
                try:
                    self._store.get_frame(frame_id)
                except StoreError as exc:
                    raise WizardError("UNKNOWN_FRAME", exc.message) from exc
                session.attach_to = frame_id
                session.step = WizardStep.EXAMPLE_SENTENCE
            self._touch(session)
            return session

    # -- step submission ----------------------------------------------------

    def submit_step(
        self,
        session_id: str,
        step: WizardStep,
        payload: dict[str, Any],
    ) -> WizardSession | StepRejection:
        with self._session_lock(session_id):
            session = self._fetch(session_id)
            if session.attach_to is not None:
                raise WizardError(
                    "WRONG_STEP", "this session is attaching an LU; only finalize applies"
                )
            if step not in _PAYLOAD_STEPS or session.step is not step:
                raise WizardError(
                    "WRONG_STEP",
                    f"session is at step {session.step.value!r}, not {step.value!r}",
                )
            if step is WizardStep.SUMMARY and session.flow is not FlowKind.LEXICAL:
                raise WizardError(
                    "WRONG_STEP", "non-lexical sessions finalize at the summary step"
                )
            handler = {
                WizardStep.TYPE_SELECTION: self._step_type_selection,
                WizardStep.NAME_AND_DEFINITION: self._step_name_and_definition,
                WizardStep.FRAME_RELATIONS: self._step_frame_relations,
                WizardStep.FRAME_ELEMENTS: self._step_frame_elements,
                WizardStep.FE_RELATIONS: self._step_fe_relations,
                WizardStep.SUMMARY: self._step_summary,
            }[step]
            try:
                draft, findings = handler(session, payload or {})
            except _Reject as rejection:
                return StepRejection(
                    report=ValidationReport.from_findings(rejection.findings),
                    stayed_at=session.step,
                )
            report = ValidationReport.from_findings(findings)
            if report.verdict is Verdict.FAIL:
                return StepRejection(report=report, stayed_at=session.step)
            order = FLOW_ORDERS[session.flow]
            session.draft = draft
            session.step = order[order.index(step) + 1]
            session.last_report = report
            self._touch(session)
            return session

    def go_back(self, session_id: str, to_step: WizardStep) -> WizardSession:
        """Navigate to an earlier, previously visited step."""
        with self._session_lock(session_id):
            session = self._fetch(session_id)
            if session.step is WizardStep.COMMITTED:
                raise WizardError("WRONG_STEP", "committed sessions cannot be reopened")
            order = FLOW_ORDERS[session.flow]
            if to_step not in order:
                raise WizardError(
                    "WRONG_STEP", f"step {to_step.value!r} is not part of this flow"
                )
            if order.index(to_step) >= session.step_index():
                raise WizardError("WRONG_STEP", "can only navigate to an earlier step")
            if session.attach_to is not None and to_step not in (
                WizardStep.LEMMA_SEARCH,
                WizardStep.EXISTING_FRAME_REVIEW,
            ):
                raise WizardError(
                    "WRONG_STEP", "an attaching session only visited the search steps"
                )
            if to_step is WizardStep.EXISTING_FRAME_REVIEW and not (
                session.search_result and session.search_result.has_hits
            ):
                raise WizardError("WRONG_STEP", "there are no search results to review")
            if to_step in (WizardStep.LEMMA_SEARCH, WizardStep.EXISTING_FRAME_REVIEW):
                session.attach_to = None
            session.step = to_step
            session.last_report = None
            self._touch(session)
            return session

    # -- step handlers ------------------------------------------------------

    def _step_type_selection(
        self, session: WizardSession, payload: dict
    ) -> tuple[Frame, list[Finding]]:
        findings: list[Finding] = []
        frame_type = self._parse_enum(FrameType, payload, "frame_type")
        is_scenario = bool(payload.get("is_scenario", False))
        languages: frozenset[Language] = session.draft.languages
        raw_languages = payload.get("languages")
        if raw_languages is not None:
            parsed = []
            for code in raw_languages:
                try:
                    parsed.append(self._registry.parse(str(code)))
                except Exception as exc:
                    raise _Reject([error("INVALID_PAYLOAD", f"bad language tag {code!r}: {exc}")])
            languages = frozenset(parsed)
        if session.flow is FlowKind.NON_LEXICAL and not languages:
            findings.append(error(
                "NONLEXICAL_NO_LANGUAGE",
                "non-lexical frames must declare at least one language",
                "languages",
            ))
        draft = session.draft
        if frame_type is not draft.frame_type:
            # Re-typing re-offers suggestions; drop the old type's suggested FEs.
            kept = tuple(
                fe for fe in draft.fes if fe.origin.kind is not FEOriginKind.SUGGESTED_BY_TYPE
            )
            dropped = {fe.id for fe in draft.fes} - {fe.id for fe in kept}
            fe_relations = tuple(
                rel for rel in draft.fe_relations if not (set(rel.members) & dropped)
            )
            draft = replace(draft, fes=kept, fe_relations=fe_relations)
        draft = replace(draft, frame_type=frame_type, is_scenario=is_scenario, languages=languages)
        return draft, findings

    def _step_name_and_definition(
        self, session: WizardSession, payload: dict
    ) -> tuple[Frame, list[Finding]]:
        name = str(self._require(payload, "name")).strip()
        definition = str(self._require(payload, "definition")).strip()
        findings = list(
            validate_frame_name(name, session.draft.frame_type, session.draft.is_scenario).findings
        )
        if not definition:
            findings.append(error("EMPTY_DEFINITION", "frame definition is empty", "definition"))
        if self._store.has_name(name):
            findings.append(error(
                "DUPLICATE_NAME", f"a frame named {name!r} already exists", "name"
            ))
        return replace(session.draft, name=name, definition=definition), findings

    def _step_frame_relations(
        self, session: WizardSession, payload: dict
    ) -> tuple[Frame, list[Finding]]:
        findings: list[Finding] = []
        specs = payload.get("relations", [])
        if not isinstance(specs, list):
            raise _Reject([error("INVALID_PAYLOAD", "'relations' must be a list")])

        # Resubmission replaces the relation set: drop previously mapped FEs
        # and any FE relations that referenced them.
        draft = session.draft
        kept = tuple(
            fe for fe in draft.fes if fe.origin.kind is not FEOriginKind.MAPPED_FROM_RELATION
        )
        dropped = {fe.id for fe in draft.fes} - {fe.id for fe in kept}
        fe_relations = tuple(
            rel for rel in draft.fe_relations if not (set(rel.members) & dropped)
        )
        draft = replace(draft, fes=kept, fe_relations=fe_relations, relations=())

        for i, spec in enumerate(specs):
            subject = f"relations[{i}]"
            kind = self._parse_enum(FrameRelationKind, spec, "kind")
            mother_name = str(self._require(spec, "mother")).strip()
            mother = self._store.frame_by_name(mother_name)
            if mother is None:
                findings.append(error(
                    "UNKNOWN_FRAME", f"no frame named {mother_name!r} in the store", subject
                ))
                continue
            mappings = spec.get("fe_mappings", {})
            if not isinstance(mappings, dict):
                raise _Reject([error("INVALID_PAYLOAD", "'fe_mappings' must be an object", subject)])
            pairs = []
            bad = False
            for mother_fe_name, daughter_name in sorted(mappings.items()):
                source = mother.fe_named(str(mother_fe_name))
                if source is None:
                    findings.append(error(
                        "UNKNOWN_MOTHER_FE",
                        f"{mother.name!r} has no FE named {mother_fe_name!r}",
                        subject,
                    ))
                    bad = True
                    continue
                pairs.append((source.id, str(daughter_name).strip()))
            if bad:
                continue
            relation = FrameRelation(
                kind=kind,
                mother=mother.id,
                daughter=draft.id,
                mother_name=mother.name,
                fe_mappings=tuple(pairs),
            )
            try:
                draft = apply_relation_mapping(draft, relation, mother)
            except MappingError as exc:
                findings.append(error(exc.code, exc.message, subject))
                continue
            draft = replace(draft, relations=draft.relations + (relation,))
        return draft, findings

    def _step_frame_elements(
        self, session: WizardSession, payload: dict
    ) -> tuple[Frame, list[Finding]]:
        findings: list[Finding] = []
        draft = session.draft
        fes = list(draft.fes)
        suggestions = {s.name: s for s in suggest_frame_elements(draft.frame_type)}

        for spec in payload.get("add", []):
            name = str(self._require(spec, "name")).strip()
            if bool(spec.get("from_suggestion", False)):
                suggestion = suggestions.get(name)
                if suggestion is None:
                    findings.append(error(
                        "UNKNOWN_SUGGESTION",
                        f"{name!r} is not a suggested FE for {draft.frame_type.value} frames",
                        f"fes[{name}]",
                    ))
                    continue
                definition = str(spec.get("definition") or suggestion.definition_stub)
                coreness = (
                    self._parse_enum(CorenessStatus, spec, "coreness")
                    if "coreness" in spec
                    else suggestion.coreness
                )
                origin = FEOrigin.suggested()
            else:
                definition = str(spec.get("definition", "")).strip()
                coreness = self._parse_enum(CorenessStatus, spec, "coreness")
                origin = FEOrigin.manual()
            fes.append(FrameElement(new_id("fe"), name, definition, coreness, origin))

        for spec in payload.get("edit", []):
            name = str(self._require(spec, "name")).strip()
            index = self._find_fe(fes, name)
            if index is None:
                findings.append(error(
                    "UNKNOWN_FE", f"no FE named {name!r} to edit", f"fes[{name}]"
                ))
                continue
            fe = fes[index]
            fes[index] = replace(
                fe,
                name=str(spec.get("new_name", fe.name)).strip(),
                definition=str(spec.get("definition", fe.definition)),
                coreness=(
                    self._parse_enum(CorenessStatus, spec, "coreness")
                    if "coreness" in spec
                    else fe.coreness
                ),
            )

        removed_ids: set[str] = set()
        for raw in payload.get("remove", []):
            name = str(raw).strip()
            index = self._find_fe(fes, name)
            if index is None:
                findings.append(error(
                    "UNKNOWN_FE", f"no FE named {name!r} to remove", f"fes[{name}]"
                ))
                continue
            removed_ids.add(fes[index].id)
            del fes[index]

        fe_relations = tuple(
            rel for rel in draft.fe_relations if not (set(rel.members) & removed_ids)
        )
        candidate = replace(draft, fes=tuple(fes), fe_relations=fe_relations)
        findings.extend(self._fe_step_findings(candidate))
        return candidate, findings

    @staticmethod
    def _find_fe(fes: list[FrameElement], name: str) -> int | None:
        wanted = name.casefold()
        for i, fe in enumerate(fes):
            if fe.name.casefold() == wanted:
                return i
        return None

    @staticmethod
    def _fe_step_findings(draft: Frame) -> list[Finding]:
        findings: list[Finding] = []
        if not draft.fes:
            findings.append(error("NO_FES", "a frame needs at least one frame element", "fes"))
        seen: set[str] = set()
        for fe in draft.fes:
            subject = f"fes[{fe.name}]"
            if not NAME_PATTERN.match(fe.name):
                findings.append(error(
                    "FE_NAME_CHARSET",
                    f"FE name {fe.name!r} must start with an uppercase letter and use "
                    "only letters, digits and underscores",
                    subject,
                ))
            key = fe.name.casefold()
            if key in seen:
                findings.append(error("DUPLICATE_FE_NAME", f"duplicate FE name {fe.name!r}", subject))
            seen.add(key)
            if not fe.definition.strip():
                findings.append(error(
                    "EMPTY_DEFINITION", f"FE {fe.name!r} has no definition", subject
                ))
        fe_names = {fe.name.casefold() for fe in draft.fes}
        for i, rel in enumerate(draft.relations):
            for _, target in rel.fe_mappings:
                if target.casefold() not in fe_names:
                    findings.append(error(
                        "MAPPING_TARGET_MISSING",
                        f"FE {target!r} is the target of a relation mapping and cannot go away",
                        f"relations[{i}]",
                    ))
        return findings

    def _step_fe_relations(
        self, session: WizardSession, payload: dict
    ) -> tuple[Frame, list[Finding]]:
        findings: list[Finding] = []
        specs = payload.get("relations", [])
        if not isinstance(specs, list):
            raise _Reject([error("INVALID_PAYLOAD", "'relations' must be a list")])
        draft = session.draft
        by_name = {fe.name.casefold(): fe.id for fe in draft.fes}
        relations = []
        for spec in specs:
            kind = self._parse_enum(FERelationKind, spec, "kind")
            raw_members = self._require(spec, "members")
            if not isinstance(raw_members, list):
                raise _Reject([error("INVALID_PAYLOAD", "'members' must be a list of FE names")])
            # Unknown names pass through and get flagged as dangling below.
            members = tuple(
                by_name.get(str(m).strip().casefold(), str(m).strip()) for m in raw_members
            )
            try:
                relations.append(FERelation(kind, members))
            except ValueError as exc:
                raise _Reject([error("INVALID_PAYLOAD", str(exc))])
        candidate = replace(draft, fe_relations=tuple(relations))
        findings.extend(validate_fe_relations(candidate).findings)
        return candidate, findings

    def _step_summary(self, session: WizardSession, payload: dict) -> tuple[Frame, list[Finding]]:
        return session.draft, []

    # -- finalize -----------------------------------------------------------

    def finalize(
        self,
        session_id: str,
        sentence: str | None = None,
        incorporated_fe: str | None = None,
    ) -> CommitOutcome:
        """Build the final frame (or LU), validate, and commit atomically.

        ``incorporated_fe`` is an FE name of the evoked frame. Lexical
        sessions finalize at the example-sentence step, non-lexical ones at
        the summary (they have no evoking lemma, hence no example).
        """
        with self._session_lock(session_id):
            session = self._fetch(session_id)
            if session.attach_to is not None:
                outcome = self._finalize_attach(session, sentence, incorporated_fe)
            elif session.flow is FlowKind.LEXICAL:
                outcome = self._finalize_lexical(session, sentence, incorporated_fe)
            else:
                outcome = self._finalize_non_lexical(session)
            session.step = WizardStep.COMMITTED
            session.committed_frame = outcome.frame_id
            self._touch(session)
            return outcome

    def _finalize_attach(
        self, session: WizardSession, sentence: str | None, incorporated_fe: str | None
    ) -> CommitOutcome:
        if session.step is not WizardStep.EXAMPLE_SENTENCE:
            raise WizardError("WRONG_STEP", "nothing to finalize yet")
        frame = self._store.get_frame(session.attach_to)
        lemma = session.pending_lemma
        report = self._example_report(frame, sentence, incorporated_fe)
        if report.verdict is Verdict.FAIL:
            raise WizardError("VALIDATION_FAILED", "the lexical unit is not valid", report=report)
        fe_id = frame.fe_named(incorporated_fe).id if incorporated_fe else None
        try:
            lu_id = self._store.commit_lu(
                frame.id, lemma.text, lemma.pos, lemma.language, sentence, fe_id
            )
        except StoreError as exc:
            raise WizardError(exc.code, exc.message) from exc
        return CommitOutcome(frame.id, frame.name, lu_id)

    def _finalize_lexical(
        self, session: WizardSession, sentence: str | None, incorporated_fe: str | None
    ) -> CommitOutcome:
        if session.step is not WizardStep.EXAMPLE_SENTENCE:
            raise WizardError(
                "WRONG_STEP",
                f"lexical sessions finalize at the example sentence step, not "
                f"{session.step.value!r}",
            )
        draft = session.draft
        report = self._example_report(draft, sentence, incorporated_fe)
        fe = draft.fe_named(incorporated_fe) if incorporated_fe else None
        lu = LexicalUnit(
            lemma=session.pending_lemma.text,
            pos=session.pending_lemma.pos,
            language=session.pending_lemma.language,
            frame=draft.id,
            example_sentence=sentence or "",
            incorporated_fe=fe.id if fe else None,
        )
        final = replace(draft, lus=(lu,), created_at=self._clock())
        report = report.merged(validate_frame_draft(final))
        if report.verdict is Verdict.FAIL:
            raise WizardError("VALIDATION_FAILED", "the frame draft is not valid", report=report)
        frame_id = self._commit(final)
        session.draft = final
        committed = self._store.get_frame(frame_id)
        return CommitOutcome(frame_id, committed.name, committed.lus[0].id)

    def _finalize_non_lexical(self, session: WizardSession) -> CommitOutcome:
        if session.step is not WizardStep.SUMMARY:
            raise WizardError(
                "WRONG_STEP",
                f"non-lexical sessions finalize at the summary step, not "
                f"{session.step.value!r}",
            )
        final = replace(session.draft, created_at=self._clock())
        report = validate_frame_draft(final)
        if report.verdict is Verdict.FAIL:
            raise WizardError("VALIDATION_FAILED", "the frame draft is not valid", report=report)
        frame_id = self._commit(final)
        session.draft = final
        return CommitOutcome(frame_id, final.name)

    def _commit(self, final: Frame) -> str:
        try:
            return self._store.commit_frame(final)
        except StoreError as exc:
            if exc.code == "DUPLICATE_NAME":
                raise WizardError("DUPLICATE_NAME", exc.message) from exc
            raise

    @staticmethod
    def _example_report(
        frame: Frame, sentence: str | None, incorporated_fe: str | None
    ) -> ValidationReport:
        findings = []
        if not (sentence or "").strip():
            findings.append(error(
                "LU_NO_EXAMPLE", "an example sentence for the lemma is required", "example"
            ))
        if incorporated_fe and frame.fe_named(incorporated_fe) is None:
            findings.append(error(
                "LU_INCORPORATED_FE_UNKNOWN",
                f"the frame has no FE named {incorporated_fe!r}",
                "incorporated_fe",
            ))
        return ValidationReport.from_findings(findings)

    # -- payload helpers ----------------------------------------------------

    @staticmethod
    def _require(payload: dict, key: str):
        if not isinstance(payload, dict) or key not in payload:
            raise _Reject([error("INVALID_PAYLOAD", f"missing required field {key!r}")])
        return payload[key]

    @staticmethod
    def _parse_enum(enum_cls, payload: dict, key: str):
        raw = Wizard._require(payload, key)
        try:
            return enum_cls(str(raw))
        except ValueError:
            allowed = ", ".join(e.value for e in enum_cls)
            raise _Reject([error(
                "INVALID_PAYLOAD", f"{key} must be one of: {allowed} (got {raw!r})"
            )]) from None

    # -- session persistence --------------------------------------------------

    def _save_sessions(self) -> None:
        if self._sessions_path is None:
            return
        with self._manager_lock:
            payload = {
                "sessions": [self._session_to_json(s) for s in self._sessions.values()]
            }
        tmp = self._sessions_path.with_name(self._sessions_path.name + ".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        tmp.replace(self._sessions_path)

    def _load_sessions(self) -> None:
        payload = json.loads(self._sessions_path.read_text(encoding="utf-8"))
        for doc in payload.get("sessions", []):
            session = self._session_from_json(doc)
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()

    @staticmethod
    def _lemma_to_json(lemma: Lemma | None):
        if lemma is None:
            return None
        return {"text": lemma.text, "pos": lemma.pos.value, "language": lemma.language.code}

    @staticmethod
    def _lemma_from_json(doc) -> Lemma | None:
        if doc is None:
            return None
        return Lemma(doc["text"], POS(doc["pos"]), Language(doc["language"]))

    @classmethod
    def _result_to_json(cls, result: LemmaSearchResult | None):
        if result is None:
            return None
        return {
            "exact_lus": [
                {
                    "lemma": lu.lemma,
                    "pos": lu.pos.value,
                    "language": lu.language.code,
                    "frame": lu.frame,
                    "example_sentence": lu.example_sentence,
                    "incorporated_fe": lu.incorporated_fe,
                    "id": lu.id,
                    "summary": cls._summary_to_json(summary),
                }
                for lu, summary in result.exact_lus
            ],
            "synonym_hits": [
                {
                    "lemma": cls._lemma_to_json(hit.lemma),
                    "frames": [cls._summary_to_json(s) for s in hit.frames],
                }
                for hit in result.synonym_hits
            ],
            "cross_lingual_hits": [
                {
                    "lemma": cls._lemma_to_json(hit.lemma),
                    "similarity": hit.similarity,
                    "frames": [cls._summary_to_json(s) for s in hit.frames],
                }
                for hit in result.cross_lingual_hits
            ],
        }

    @staticmethod
    def _summary_to_json(summary: FrameSummary):
        return {"id": summary.id, "name": summary.name, "definition": summary.definition}

    @classmethod
    def _result_from_json(cls, doc) -> LemmaSearchResult | None:
        if doc is None:
            return None

        def summary(s):
            return FrameSummary(s["id"], s["name"], s["definition"])

        return LemmaSearchResult(
            exact_lus=tuple(
                (
                    LexicalUnit(
                        lemma=e["lemma"],
                        pos=POS(e["pos"]),
                        language=Language(e["language"]),
                        frame=e["frame"],
                        example_sentence=e["example_sentence"],
                        incorporated_fe=e.get("incorporated_fe"),
                        id=e.get("id", ""),
                    ),
                    summary(e["summary"]),
                )
                for e in doc["exact_lus"]
            ),
            synonym_hits=tuple(
                SynonymHit(
                    cls._lemma_from_json(h["lemma"]),
                    tuple(summary(s) for s in h["frames"]),
                )
                for h in doc["synonym_hits"]
            ),
            cross_lingual_hits=tuple(
                CrossLingualHit(
                    cls._lemma_from_json(h["lemma"]),
                    h["similarity"],
                    tuple(summary(s) for s in h["frames"]),
                )
                for h in doc["cross_lingual_hits"]
            ),
        )

    @classmethod
    def _report_to_json(cls, report: ValidationReport | None):
        if report is None:
            return None
        return report_to_json(report)

    def _session_to_json(self, session: WizardSession) -> dict:
        return {
            "id": session.id,
            "contributor": session.contributor,
            "flow": session.flow.value,
            "step": session.step.value,
            "draft": interchange.frame_to_state(session.draft),
            "pending_lemma": self._lemma_to_json(session.pending_lemma),
            "search_result": self._result_to_json(session.search_result),
            "attach_to": session.attach_to,
            "last_report": self._report_to_json(session.last_report),
            "committed_frame": session.committed_frame,
            "created_at": session.created_at.isoformat(),
            "updated_at": session.updated_at.isoformat(),
        }

    def _session_from_json(self, doc: dict) -> WizardSession:
        return WizardSession(
            id=doc["id"],
            contributor=doc["contributor"],
            flow=FlowKind(doc["flow"]),
            step=WizardStep(doc["step"]),
            draft=interchange.frame_from_state(doc["draft"]),
            pending_lemma=self._lemma_from_json(doc["pending_lemma"]),
            search_result=self._result_from_json(doc["search_result"]),
            attach_to=doc.get("attach_to"),
            last_report=report_from_json(doc.get("last_report")),
            committed_frame=doc.get("committed_frame"),
            created_at=interchange.parse_timestamp(doc["created_at"]),
            updated_at=interchange.parse_timestamp(doc["updated_at"]),
        )


def report_to_json(report: ValidationReport) -> dict:
    return {
        "verdict": report.verdict.value,
        "findings": [
            {
                "code": f.code,
                "severity": f.severity.value,
                "message": f.message,
                "subject": f.subject,
            }
            for f in report.findings
        ],
    }


def report_from_json(doc) -> ValidationReport | None:
    if doc is None:
        return None
    return ValidationReport(
        verdict=Verdict(doc["verdict"]),
        findings=tuple(
            Finding(f["code"], Severity(f["severity"]), f["message"], f.get("subject", ""))
            for f in doc["findings"]
        ),
    )
