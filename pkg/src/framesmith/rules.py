"""Stateless validation, FE suggestion and relation-mapping logic.

These functions are pure: the same inputs always produce the same report
with findings in the same order, so they are safe to call from any thread
and trivially cacheable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import MappingError
from .model import (
    NAME_PATTERN,
    SCENARIO_SUFFIX,
    STATE_PREFIX,
    STATE_SUFFIX,
    CorenessStatus,
    FERelationKind,
    FEOrigin,
    Finding,
    Frame,
    FrameElement,
    FrameRelation,
    FrameRelationKind,
    FrameType,
    Lexicality,
    ValidationReport,
    error,
    new_id,
    warning,
)


def validate_frame_name(name: str, frame_type: FrameType, is_scenario: bool) -> ValidationReport:
    """Check a frame name against the charset rule and naming standards.

    Charset violations are errors; naming-standard violations (scenario
    suffix, state-frame patterns) are warnings and never block creation.
    Database-wide uniqueness is the store's job, not checked here.
    """
    findings: list[Finding] = []
    if not NAME_PATTERN.match(name):
        findings.append(error(
            "NAME_CHARSET",
            f"name {name!r} must start with an uppercase letter and use only "
            "letters, digits and underscores",
            "name",
        ))
    if is_scenario and not name.endswith(SCENARIO_SUFFIX):
        findings.append(warning(
            "SCENARIO_SUFFIX",
            f"scenario frame names conventionally end with {SCENARIO_SUFFIX!r}",
            "name",
        ))
    if not is_scenario and name.endswith(SCENARIO_SUFFIX):
        findings.append(warning(
            "SCENARIO_SUFFIX_UNEXPECTED",
            f"name ends with {SCENARIO_SUFFIX!r} but the frame is not flagged as a scenario",
            "name",
        ))
    if frame_type is FrameType.STATE and not _matches_state_pattern(name):
        findings.append(warning(
            "STATE_PATTERN",
            "state frame names conventionally follow the 'Being_x' or 'x_state' pattern",
            "name",
        ))
    return ValidationReport.from_findings(findings)


def _matches_state_pattern(name: str) -> bool:
    if name.startswith(STATE_PREFIX) and len(name) > len(STATE_PREFIX):
        return True
    return name.endswith(STATE_SUFFIX) and len(name) > len(STATE_SUFFIX)


@dataclass(frozen=True)
class FESuggestion:
    name: str
    coreness: CorenessStatus
    definition_stub: str


def _peripheral(name: str, stub: str) -> FESuggestion:
    return FESuggestion(name, CorenessStatus.PERIPHERAL, stub)


# Static per-type suggestion table; each entry list is kept alphabetical.
SUGGESTION_TABLE: dict[FrameType, tuple[FESuggestion, ...]] = {
    FrameType.EVENT: (
        _peripheral("Duration", "The length of time the event goes on for."),
        _peripheral("Manner", "The way in which the event is carried out."),
        _peripheral("Means", "The action or instrument by which the event is achieved."),
        _peripheral("Place", "The location where the event takes place."),
        _peripheral("Purpose", "The aim the protagonist pursues with the event."),
        _peripheral("Time", "The time at which the event occurs."),
    ),
    FrameType.ENTITY: (
        _peripheral("Material", "The substance the entity is made of."),
        _peripheral("Name", "The name by which the entity is known."),
        _peripheral("Type", "The subtype distinguishing the entity from similar ones."),
    ),
    FrameType.RELATION: (
        _peripheral("Direction", "The direction in which the relation holds between the relata."),
        _peripheral("Duration", "The length of time the relation holds."),
        _peripheral("Time", "The time at which the relation holds."),
    ),
    FrameType.ATTRIBUTE: (
        _peripheral("Circumstances", "The conditions under which the attribute applies."),
        _peripheral("Degree", "The extent to which the attribute holds."),
        _peripheral("Time", "The time at which the attribute holds."),
    ),
    FrameType.STATE: (
        _peripheral("Duration", "The length of time the state persists."),
        _peripheral("Place", "The location where the state holds."),
        _peripheral("Time", "The time at which the state holds."),
    ),
}


def suggest_frame_elements(frame_type: FrameType) -> list[FESuggestion]:
    """FE suggestions for a root type, alphabetically ordered.

    Undefined frames get no suggestions: there is nothing to key them on.
    """
    return list(SUGGESTION_TABLE.get(frame_type, ()))


def validate_fe_relations(frame: Frame) -> ValidationReport:
    """Check FE relations for dangling members, self-pairs, contradictory
    Requires/Excludes pairs and non-core CoreSet members."""
    findings: list[Finding] = []
    ids = {fe.id for fe in frame.fes}
    names = {fe.id: fe.name for fe in frame.fes}
    core = {fe.id for fe in frame.fes if fe.is_core}
    pair_kinds: dict[frozenset[str], set[FERelationKind]] = {}

    for i, rel in enumerate(frame.fe_relations):
        subject = f"fe_relations[{i}]"
        for member in rel.members:
            if member not in ids:
                findings.append(error(
                    "FE_REL_DANGLING",
                    f"{rel.kind.value} relation references unknown FE id {member!r}",
                    subject,
                ))
        if len(set(rel.members)) < len(rel.members):
            findings.append(error(
                "FE_REL_SELF",
                f"{rel.kind.value} relation pairs an FE with itself",
                subject,
            ))
        elif rel.kind in (FERelationKind.REQUIRES, FERelationKind.EXCLUDES):
            pair_kinds.setdefault(rel.pair, set()).add(rel.kind)
        if rel.kind is FERelationKind.CORE_SET:
            for member in rel.members:
                if member in ids and member not in core:
                    findings.append(warning(
                        "CORESET_NONCORE",
                        f"core_set member {names[member]!r} is not a core FE",
                        subject,
                    ))

    contradictions = sorted(
        (pair for pair, kinds in pair_kinds.items()
         if {FERelationKind.REQUIRES, FERelationKind.EXCLUDES} <= kinds),
        key=lambda pair: sorted(pair),
    )
    for pair in contradictions:
        labels = " and ".join(sorted(names.get(m, m) for m in pair))
        findings.append(error(
            "FE_REL_CONTRADICTION",
            f"{labels} are related by both requires and excludes",
            "fe_relations",
        ))
    return ValidationReport.from_findings(findings)


def validate_frame_draft(draft: Frame) -> ValidationReport:
    """Full stateless validation of a frame draft.

    Aggregates the name report, structural checks, per-FE checks, relation
    mapping integrity, the FE-relation report and per-LU checks. A Pass
    verdict guarantees every intra-frame type invariant holds; database-wide
    name uniqueness still belongs to the store.
    """
    findings: list[Finding] = list(
        validate_frame_name(draft.name, draft.frame_type, draft.is_scenario).findings
    )
    if not draft.definition.strip():
        findings.append(error("EMPTY_DEFINITION", "frame definition is empty", "definition"))
    if not draft.fes:
        findings.append(error("NO_FES", "a frame needs at least one frame element", "fes"))
    if draft.lexicality is Lexicality.NON_LEXICAL:
        if not draft.languages:
            findings.append(error(
                "NONLEXICAL_NO_LANGUAGE",
                "non-lexical frames must declare at least one language",
                "languages",
            ))
        if draft.lus:
            findings.append(error(
                "NONLEXICAL_HAS_LU",
                "non-lexical frames cannot carry lexical units",
                "lus",
            ))
    elif not draft.lus:
        findings.append(error("LEXICAL_NO_LU", "lexical frames need at least one lexical unit", "lus"))

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
            findings.append(error("EMPTY_DEFINITION", f"FE {fe.name!r} has no definition", subject))

    fe_names = {fe.name.casefold() for fe in draft.fes}
    for i, rel in enumerate(draft.relations):
        subject = f"relations[{i}]"
        if rel.mother_name.casefold() == draft.name.casefold() or (
            rel.resolved and rel.mother == draft.id
        ):
            findings.append(error(
                "FRAME_REL_SELF",
                f"{rel.kind.value} relation links the frame to itself",
                subject,
            ))
        for _, target in rel.fe_mappings:
            if target.casefold() not in fe_names:
                findings.append(error(
                    "MAPPING_TARGET_MISSING",
                    f"FE mapping targets {target!r}, which is not an FE of this frame",
                    subject,
                ))

    findings.extend(validate_fe_relations(draft).findings)

    fe_ids = {fe.id for fe in draft.fes}
    for i, lu in enumerate(draft.lus):
        subject = f"lus[{i}]"
        if not lu.example_sentence.strip():
            findings.append(error(
                "LU_NO_EXAMPLE",
                f"lexical unit {lu.lemma!r} has no example sentence",
                subject,
            ))
        if lu.incorporated_fe is not None and lu.incorporated_fe not in fe_ids:
            findings.append(error(
                "LU_INCORPORATED_FE_UNKNOWN",
                f"lexical unit {lu.lemma!r} incorporates an FE that is not in the frame",
                subject,
            ))
    return ValidationReport.from_findings(findings)


def apply_relation_mapping(draft: Frame, relation: FrameRelation, mother: Frame) -> Frame:
    """Extend ``draft`` with the FEs a relation maps in from ``mother``.

    Each mapping entry creates one FE (daughter name, mother's coreness and
    definition). Under inheritance every core mother FE must be mapped, and
    unmapped non-core mother FEs are copied over verbatim. Existing draft
    FEs are never touched; produced names colliding with them (or with each
    other) abort the whole mapping.

    Raises MappingError(INCOMPLETE_MAPPING | NAME_COLLISION); precondition
    violations (mismatched frame ids, unknown mother FE ids) raise ValueError.
    """
    if relation.daughter != draft.id:
        raise ValueError(f"relation daughter {relation.daughter!r} is not the draft {draft.id!r}")
    if relation.resolved and relation.mother != mother.id:
        raise ValueError(f"relation mother {relation.mother!r} is not {mother.id!r}")
    mother_fes = {fe.id: fe for fe in mother.fes}
    unknown = [src for src, _ in relation.fe_mappings if src not in mother_fes]
    if unknown:
        raise ValueError(f"mapped FE ids not present in mother frame: {unknown}")

    mapped_ids = {src for src, _ in relation.fe_mappings}
    if relation.kind is FrameRelationKind.INHERITANCE:
        missing = [fe.name for fe in mother.fes if fe.is_core and fe.id not in mapped_ids]
        if missing:
            raise MappingError(
                "INCOMPLETE_MAPPING",
                f"inheritance from {mother.name!r} leaves core FEs unmapped: {', '.join(missing)}",
            )

    taken = {fe.name.casefold() for fe in draft.fes}
    origin = FEOrigin.mapped(relation.key)
    new_fes: list[FrameElement] = []

    def _add(name: str, source: FrameElement) -> None:
        if name.casefold() in taken:
            raise MappingError(
                "NAME_COLLISION",
                f"mapping would create FE {name!r}, which already exists in the draft",
            )
        taken.add(name.casefold())
        new_fes.append(FrameElement(new_id("fe"), name, source.definition, source.coreness, origin))

    for src_id, daughter_name in relation.fe_mappings:
        _add(daughter_name, mother_fes[src_id])
    if relation.kind is FrameRelationKind.INHERITANCE:
        for fe in mother.fes:
            if fe.id in mapped_ids or fe.is_core:
                continue
            _add(fe.name, fe)

    return replace(draft, fes=draft.fes + tuple(new_fes))
