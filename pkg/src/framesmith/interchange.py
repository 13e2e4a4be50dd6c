"""JSON codecs: the public interchange document plus internal state coding.

The interchange document is the compatibility surface for import/export.
It is canonical by construction -- frames sorted by name, FEs by name,
relations by (kind, mother, daughter), sorted object keys, two-space
indent, UTF-8 -- so exporting the same store twice is byte-identical and
export -> import -> export is a fixed point. Everything is referenced by
name; ids are store-local and never leave the process.

Internal ("state") encodings keep ids and feed store persistence and
session snapshots; their layout is private.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import Any, Iterable

from .errors import StoreError
from .languages import Language, LanguageRegistry, default_registry
from .model import (
    POS,
    CorenessStatus,
    FEOrigin,
    FEOriginKind,
    FERelation,
    FERelationKind,
    Frame,
    FrameElement,
    FrameRelation,
    FrameRelationKind,
    FrameType,
    Lexicality,
    LexicalUnit,
)

SCHEMA_VERSION = 1
DEFAULT_LICENSE = "GPL-3.0-or-later"


def _fe_sort_key(fe: FrameElement) -> tuple[str, str]:
    return (fe.name.casefold(), fe.name)


def _fe_relation_sort_key(rel: FERelation, names: dict[str, str]) -> tuple:
    members = sorted(names.get(m, m) for m in rel.members)
    return (rel.kind.value, members)


def origin_to_json(origin: FEOrigin) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": origin.kind.value}
    if origin.relation is not None:
        out["relation"] = origin.relation
    return out


def origin_from_json(doc: dict[str, Any]) -> FEOrigin:
    return FEOrigin(FEOriginKind(doc["kind"]), doc.get("relation"))


def fe_to_json(fe: FrameElement) -> dict[str, Any]:
    return {
        "name": fe.name,
        "definition": fe.definition,
        "coreness": fe.coreness.value,
        "origin": origin_to_json(fe.origin),
    }


def lu_to_json(lu: LexicalUnit, frame_name: str, fe_names: dict[str, str]) -> dict[str, Any]:
    return {
        "lemma": lu.lemma,
        "pos": lu.pos.value,
        "language": lu.language.code,
        "frame": frame_name,
        "example_sentence": lu.example_sentence,
        "incorporated_fe": fe_names.get(lu.incorporated_fe) if lu.incorporated_fe else None,
    }


def relation_to_json(rel: FrameRelation, daughter_name: str, mother_fe_names: dict[str, str]) -> dict[str, Any]:
    mappings = sorted(
        ({"mother_fe": mother_fe_names.get(src, src), "daughter_fe": target}
         for src, target in rel.fe_mappings),
        key=lambda m: (m["mother_fe"], m["daughter_fe"]),
    )
    return {
        "kind": rel.kind.value,
        "mother": rel.mother_name,
        "daughter": daughter_name,
        "fe_mappings": mappings,
        "resolved": rel.resolved,
    }


def frame_to_json(frame: Frame) -> dict[str, Any]:
    """Interchange entry for one frame: no ids, FEs and FE relations by name."""
    fe_names = {fe.id: fe.name for fe in frame.fes}
    return {
        "name": frame.name,
        "definition": frame.definition,
        "frame_type": frame.frame_type.value,
        "lexicality": frame.lexicality.value,
        "is_scenario": frame.is_scenario,
        "languages": sorted(lang.code for lang in frame.languages),
        "created_by": frame.created_by,
        "created_at": frame.created_at.isoformat(),
        "fes": [fe_to_json(fe) for fe in sorted(frame.fes, key=_fe_sort_key)],
        "fe_relations": sorted(
            ({"kind": rel.kind.value, "members": sorted(fe_names.get(m, m) for m in rel.members)}
             for rel in frame.fe_relations),
            key=lambda r: (r["kind"], r["members"]),
        ),
    }


def document_to_text(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def build_document(
    frames: list[Frame],
    mother_fe_names: dict[str, dict[str, str]],
    license: str = DEFAULT_LICENSE,
) -> dict[str, Any]:
    """Assemble the canonical top-level document.

    ``mother_fe_names`` maps a mother frame id to its FE id->name table so
    relation mappings can be rendered by name.
    """
    ordered = sorted(frames, key=lambda f: (f.name.casefold(), f.name))
    lus = []
    relations = []
    for frame in ordered:
        fe_names = {fe.id: fe.name for fe in frame.fes}
        for lu in frame.lus:
            lus.append(lu_to_json(lu, frame.name, fe_names))
        for rel in frame.relations:
            relations.append(relation_to_json(rel, frame.name, mother_fe_names.get(rel.mother, {})))
    lus.sort(key=lambda d: (d["frame"], d["lemma"], d["pos"], d["language"]))
    relations.sort(key=lambda d: (d["kind"], d["mother"], d["daughter"]))
    return {
        "schema_version": SCHEMA_VERSION,
        "license": license,
        "frames": [frame_to_json(f) for f in ordered],
        "lus": lus,
        "relations": relations,
    }


def parse_document(text: str) -> dict[str, Any]:
    """Parse and structurally check an interchange document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreError("SCHEMA_MISMATCH", f"document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise StoreError("SCHEMA_MISMATCH", "document root must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise StoreError("SCHEMA_MISMATCH", f"unsupported schema_version {version!r}")
    for key, kind in (("frames", list), ("lus", list), ("relations", list)):
        if not isinstance(doc.get(key), kind):
            raise StoreError("SCHEMA_MISMATCH", f"document is missing the {key!r} list")
    return doc


def parse_timestamp(value: str) -> datetime:
    return datetime.fromisoformat(value)


def parse_pos(value: str) -> POS:
    return POS(value)


def parse_language(code: str, registry: LanguageRegistry | None = None) -> Language:
    return (registry or default_registry()).parse(code)


def decode_frame_entry(
    entry: dict[str, Any],
    lu_entries: Iterable[dict[str, Any]],
    registry: LanguageRegistry | None = None,
    provisional_id: str = "import-0",
) -> Frame:
    """Build a draft Frame (fresh deterministic FE ids) from an interchange
    frame entry plus its top-level LU entries. Relations are attached
    separately because their mothers live elsewhere in the document."""
    registry = registry or default_registry()
    try:
        fes = []
        fe_ids: dict[str, str] = {}
        for i, fe in enumerate(entry.get("fes", [])):
            fe_id = f"{provisional_id}-fe{i}"
            name = str(fe["name"])
            fe_ids[name.casefold()] = fe_id
            origin = fe.get("origin", {"kind": "manual"})
            fes.append(FrameElement(
                id=fe_id,
                name=name,
                definition=str(fe.get("definition", "")),
                coreness=CorenessStatus(fe["coreness"]),
                origin=origin_from_json(origin),
            ))
        fe_relations = tuple(
            FERelation(
                FERelationKind(rel["kind"]),
                tuple(fe_ids.get(str(m).casefold(), str(m)) for m in rel["members"]),
            )
            for rel in entry.get("fe_relations", [])
        )
        lus = tuple(
            LexicalUnit(
                lemma=str(lu["lemma"]),
                pos=POS(lu["pos"]),
                language=registry.parse(str(lu["language"])),
                frame=provisional_id,
                example_sentence=str(lu.get("example_sentence", "")),
                incorporated_fe=(
                    fe_ids.get(str(lu["incorporated_fe"]).casefold())
                    if lu.get("incorporated_fe")
                    else None
                ),
            )
            for lu in lu_entries
        )
        return Frame(
            id=provisional_id,
            name=str(entry["name"]),
            definition=str(entry.get("definition", "")),
            frame_type=FrameType(entry["frame_type"]),
            lexicality=Lexicality(entry["lexicality"]),
            languages=frozenset(
                registry.parse(code) for code in entry.get("languages", [])
            ),
            fes=tuple(fes),
            fe_relations=fe_relations,
            lus=lus,
            is_scenario=bool(entry.get("is_scenario", False)),
            created_by=str(entry.get("created_by", "")),
            created_at=parse_timestamp(entry["created_at"]),
        )
    except StoreError:
        raise
    except Exception as exc:
        raise StoreError("SCHEMA_MISMATCH", f"malformed frame entry: {exc}") from exc


# --- internal full-fidelity state encoding (ids included) ---------------


def frame_to_state(frame: Frame) -> dict[str, Any]:
    return {
        "id": frame.id,
        "name": frame.name,
        "definition": frame.definition,
        "frame_type": frame.frame_type.value,
        "lexicality": frame.lexicality.value,
        "is_scenario": frame.is_scenario,
        "languages": sorted(lang.code for lang in frame.languages),
        "created_by": frame.created_by,
        "created_at": frame.created_at.isoformat(),
        "fes": [
            {
                "id": fe.id,
                "name": fe.name,
                "definition": fe.definition,
                "coreness": fe.coreness.value,
                "origin": origin_to_json(fe.origin),
            }
            for fe in frame.fes
        ],
        "fe_relations": [
            {"kind": rel.kind.value, "members": list(rel.members)}
            for rel in frame.fe_relations
        ],
        "relations": [
            {
                "kind": rel.kind.value,
                "mother": rel.mother,
                "daughter": rel.daughter,
                "mother_name": rel.mother_name,
                "fe_mappings": [list(pair) for pair in rel.fe_mappings],
                "resolved": rel.resolved,
            }
            for rel in frame.relations
        ],
        "lus": [
            {
                "id": lu.id,
                "lemma": lu.lemma,
                "pos": lu.pos.value,
                "language": lu.language.code,
                "frame": lu.frame,
                "example_sentence": lu.example_sentence,
                "incorporated_fe": lu.incorporated_fe,
            }
            for lu in frame.lus
        ],
    }


def frame_from_state(doc: dict[str, Any]) -> Frame:
    return Frame(
        id=doc["id"],
        name=doc["name"],
        definition=doc["definition"],
        frame_type=FrameType(doc["frame_type"]),
        lexicality=Lexicality(doc["lexicality"]),
        languages=frozenset(Language(code) for code in doc["languages"]),
        fes=tuple(
            FrameElement(
                id=fe["id"],
                name=fe["name"],
                definition=fe["definition"],
                coreness=CorenessStatus(fe["coreness"]),
                origin=origin_from_json(fe["origin"]),
            )
            for fe in doc["fes"]
        ),
        fe_relations=tuple(
            FERelation(FERelationKind(rel["kind"]), tuple(rel["members"]))
            for rel in doc["fe_relations"]
        ),
        relations=tuple(
            FrameRelation(
                kind=FrameRelationKind(rel["kind"]),
                mother=rel["mother"],
                daughter=rel["daughter"],
                mother_name=rel["mother_name"],
                fe_mappings=tuple((src, dst) for src, dst in rel["fe_mappings"]),
                resolved=rel["resolved"],
            )
            for rel in doc["relations"]
        ),
        lus=tuple(
            LexicalUnit(
                lemma=lu["lemma"],
                pos=POS(lu["pos"]),
                language=Language(lu["language"]),
                frame=lu["frame"],
                example_sentence=lu["example_sentence"],
                incorporated_fe=lu.get("incorporated_fe"),
                id=lu.get("id", ""),
            )
            for lu in doc["lus"]
        ),
        is_scenario=doc["is_scenario"],
        created_by=doc["created_by"],
        created_at=parse_timestamp(doc["created_at"]),
    )
