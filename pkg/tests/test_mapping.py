"""Relation FE-mapping behaviour, mirroring the culturally-grounded
walkthrough: an event frame inheriting from a scenario frame maps the
scenario's Agent onto Interested_party and picks up the non-core FEs."""

from __future__ import annotations

import random
from dataclasses import replace

import pytest

from framesmith import (
    CorenessStatus,
    FEOriginKind,
    Frame,
    FrameRelation,
    FrameRelationKind,
    FrameType,
    Lexicality,
    MappingError,
    apply_relation_mapping,
)

from conftest import make_fe, make_frame


def scenario_mother() -> Frame:
    return make_frame(
        name="Attempting_and_resolving_scenario",
        frame_id="f-mother",
        lexicality=Lexicality.NON_LEXICAL,
        languages=frozenset(),
        fes=(
            make_fe("Agent", CorenessStatus.CORE, fe_id="fe-agent"),
            make_fe("Goal", CorenessStatus.PERIPHERAL, fe_id="fe-goal"),
            make_fe("Manner", CorenessStatus.PERIPHERAL, fe_id="fe-manner"),
        ),
        lus=(),
        is_scenario=True,
    )


def empty_draft(frame_id: str = "draft-1") -> Frame:
    return make_frame(name="Brazilian_way", frame_id=frame_id, fes=(), lus=())


def inheritance(draft: Frame, mother: Frame, mappings: tuple[tuple[str, str], ...]) -> FrameRelation:
    return FrameRelation(
        kind=FrameRelationKind.INHERITANCE,
        mother=mother.id,
        daughter=draft.id,
        mother_name=mother.name,
        fe_mappings=mappings,
    )


class TestInheritanceMapping:
    def test_scenario_inheritance_maps_agent_and_copies_non_core(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = inheritance(draft, mother, (("fe-agent", "Interested_party"),))
        result = apply_relation_mapping(draft, relation, mother)
        by_name = {fe.name: fe for fe in result.fes}
        assert set(by_name) == {"Interested_party", "Goal", "Manner"}
        assert by_name["Interested_party"].coreness is CorenessStatus.CORE
        assert by_name["Goal"].coreness is CorenessStatus.PERIPHERAL
        assert by_name["Manner"].coreness is CorenessStatus.PERIPHERAL
        for fe in result.fes:
            assert fe.origin.kind is FEOriginKind.MAPPED_FROM_RELATION
            assert fe.origin.relation == relation.key

    def test_mother_without_fes_leaves_draft_unchanged(self):
        mother = replace(scenario_mother(), fes=())
        draft = empty_draft()
        relation = inheritance(draft, mother, ())
        assert apply_relation_mapping(draft, relation, mother) == draft

    def test_unmapped_core_fe_is_incomplete(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = inheritance(draft, mother, ())
        with pytest.raises(MappingError) as exc:
            apply_relation_mapping(draft, relation, mother)
        assert exc.value.code == "INCOMPLETE_MAPPING"

    def test_collision_with_existing_draft_fe_rejected(self):
        mother = scenario_mother()
        draft = replace(empty_draft(), fes=(make_fe("Goal", CorenessStatus.CORE),))
        relation = inheritance(draft, mother, (("fe-agent", "Interested_party"),))
        with pytest.raises(MappingError) as exc:
            apply_relation_mapping(draft, relation, mother)
        assert exc.value.code == "NAME_COLLISION"

    def test_collision_between_mapped_names_rejected(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = inheritance(
            draft, mother, (("fe-agent", "Party"), ("fe-goal", "party"))
        )
        with pytest.raises(MappingError) as exc:
            apply_relation_mapping(draft, relation, mother)
        assert exc.value.code == "NAME_COLLISION"

    def test_non_inheritance_copies_nothing_extra(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = FrameRelation(
            kind=FrameRelationKind.USING,
            mother=mother.id,
            daughter=draft.id,
            mother_name=mother.name,
            fe_mappings=(("fe-goal", "Aim"),),
        )
        result = apply_relation_mapping(draft, relation, mother)
        assert {fe.name for fe in result.fes} == {"Aim"}

    def test_existing_fes_never_touched(self):
        mother = scenario_mother()
        existing = make_fe("Authority", CorenessStatus.CORE)
        draft = replace(empty_draft(), fes=(existing,))
        relation = inheritance(draft, mother, (("fe-agent", "Interested_party"),))
        result = apply_relation_mapping(draft, relation, mother)
        assert result.fes[0] == existing
        assert len(result.fes) >= len(draft.fes)

    def test_mismatched_daughter_id_is_a_programming_error(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = replace(inheritance(draft, mother, ()), daughter="someone-else")
        with pytest.raises(ValueError):
            apply_relation_mapping(draft, relation, mother)

    def test_unknown_mapped_fe_id_is_a_programming_error(self):
        mother = scenario_mother()
        draft = empty_draft()
        relation = inheritance(draft, mother, (("fe-ghost", "X"),))
        with pytest.raises(ValueError):
            apply_relation_mapping(draft, relation, mother)


CORENESS_POOL = (
    CorenessStatus.CORE,
    CorenessStatus.CORE,
    CorenessStatus.CORE_UNEXPRESSED,
    CorenessStatus.PERIPHERAL,
    CorenessStatus.EXTRA_THEMATIC,
)


def random_mother(rng: random.Random, index: int) -> Frame:
    n_fes = rng.randint(0, 6)
    fes = tuple(
        make_fe(
            f"Element_{index}_{i}",
            rng.choice(CORENESS_POOL),
            fe_id=f"fe-{index}-{i}",
        )
        for i in range(n_fes)
    )
    return make_frame(
        name=f"Mother_{index}",
        frame_id=f"f-mother-{index}",
        lexicality=Lexicality.NON_LEXICAL,
        fes=fes,
        lus=(),
    )


class TestCoreCountPreservation:
    def test_complete_core_mapping_preserves_core_count_over_500_mothers(self):
        rng = random.Random(6542)
        for index in range(500):
            mother = random_mother(rng, index)
            draft = empty_draft(frame_id=f"draft-{index}")
            mappings = tuple(
                (fe.id, f"Mapped_{fe.name}") for fe in mother.fes if fe.is_core
            )
            relation = inheritance(draft, mother, mappings)
            result = apply_relation_mapping(draft, relation, mother)
            assert len(result.core_fes) == len(mother.core_fes)
            # every non-core mother FE must have come across verbatim
            non_core = {fe.name for fe in mother.fes if not fe.is_core}
            assert non_core <= {fe.name for fe in result.fes}

    def test_any_omitted_core_mapping_is_incomplete_over_500_mothers(self):
        rng = random.Random(977)
        checked = 0
        for index in range(500):
            mother = random_mother(rng, index)
            core = [fe for fe in mother.fes if fe.is_core]
            if not core:
                continue
            omitted = rng.choice(core)
            draft = empty_draft(frame_id=f"draft-omit-{index}")
            mappings = tuple(
                (fe.id, f"Mapped_{fe.name}") for fe in core if fe.id != omitted.id
            )
            relation = inheritance(draft, mother, mappings)
            with pytest.raises(MappingError) as exc:
                apply_relation_mapping(draft, relation, mother)
            assert exc.value.code == "INCOMPLETE_MAPPING"
            checked += 1
        assert checked > 200
