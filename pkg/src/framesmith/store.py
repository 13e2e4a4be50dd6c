"""Persistent frame database with atomic commits and name uniqueness.

Storage is a single JSON state file rewritten through a write-temp,
fsync, rename sequence, so a crash at any point leaves the previous
snapshot intact. In-memory indexes are replaced wholesale only after a
successful persist; readers always see either the pre- or post-commit
state, never something in between. All writes serialize through one lock,
which makes name uniqueness linearizable.
"""

from __future__ import annotations

import json
import os
import threading
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Iterable

from . import interchange
from .errors import StoreError
from .languages import Language, LanguageRegistry, default_registry
from .model import (
    POS,
    Frame,
    FrameRelation,
    FrameRelationKind,
    FrameType,
    Lexicality,
    LexicalUnit,
    Verdict,
)
from .rules import validate_frame_draft

LuKey = tuple[str, str, str]


def _lu_key(lemma: str, pos: POS, language: Language) -> LuKey:
    return (unicodedata.normalize("NFC", lemma).casefold(), pos.value, language.code)


@dataclass(frozen=True)
class FrameStoreSnapshot:
    frames: dict[str, Frame]
    name_index: dict[str, str]
    lu_index: dict[LuKey, tuple[tuple[str, str], ...]]
    schema_version: int
    license: str


@dataclass(frozen=True)
class FramePage:
    items: tuple[Frame, ...]
    total: int
    page: int
    page_size: int


@dataclass(frozen=True)
class ImportIssue:
    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class ImportResult:
    imported: int
    skipped: int
    errors: tuple[ImportIssue, ...]


class ImportMode:
    STRICT = "strict"
    SKIP_CONFLICTS = "skip_conflicts"


class FrameStore:
    """Frame/LU database. ``path=None`` keeps everything in memory."""

    def __init__(
        self,
        path: str | Path | None = None,
        license: str = interchange.DEFAULT_LICENSE,
        registry: LanguageRegistry | None = None,
    ):
        self._path = Path(path) if path is not None else None
        self._license = license
        self._registry = registry or default_registry()
        self._lock = threading.RLock()
        self._frames: dict[str, Frame] = {}
        self._name_index: dict[str, str] = {}
        self._lu_index: dict[LuKey, tuple[tuple[str, str], ...]] = {}
        self._next_frame = 1
        self._next_lu = 1
        # Test hook: called with a stage label at each point of the persist
        # sequence; raising simulates a crash at that point.
        self.fail_hook: Callable[[str], None] | None = None
        if self._path is not None and self._path.exists():
            self._load()

    # -- reads ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._frames)

    def get_frame(self, frame_id: str) -> Frame:
        frame = self._frames.get(frame_id)
        if frame is None:
            raise StoreError("NOT_FOUND", f"no frame with id {frame_id!r}")
        return frame

    def frame_by_name(self, name: str) -> Frame | None:
        frame_id = self._name_index.get(name.strip().casefold())
        return self._frames.get(frame_id) if frame_id else None

    def has_name(self, name: str) -> bool:
        return name.strip().casefold() in self._name_index

    def list_frames(
        self,
        language: Language | None = None,
        frame_type: FrameType | None = None,
        lexicality: Lexicality | None = None,
        name_contains: str | None = None,
        page: int = 1,
        page_size: int = 50,
    ) -> FramePage:
        frames = self._filtered(language, frame_type, lexicality, name_contains)
        total = len(frames)
        page = max(page, 1)
        start = (page - 1) * page_size
        return FramePage(tuple(frames[start:start + page_size]), total, page, page_size)

    def _filtered(self, language, frame_type, lexicality, name_contains) -> list[Frame]:
        out = []
        needle = name_contains.casefold() if name_contains else None
        for frame in self._frames.values():
            if language is not None and language not in frame.effective_languages():
                continue
            if frame_type is not None and frame.frame_type is not frame_type:
                continue
            if lexicality is not None and frame.lexicality is not lexicality:
                continue
            if needle is not None and needle not in frame.name.casefold():
                continue
            out.append(frame)
        out.sort(key=lambda f: (f.name.casefold(), f.name))
        return out

    def find_lus(self, lemma: str, pos: POS, language: Language) -> list[LexicalUnit]:
        """Exact-triple LU lookup after NFC normalization and casefolding."""
        out = []
        for frame_id, lu_id in self._lu_index.get(_lu_key(lemma, pos, language), ()):
            frame = self._frames.get(frame_id)
            if frame is None:
                continue
            for lu in frame.lus:
                if lu.id == lu_id:
                    out.append(lu)
        out.sort(key=lambda lu: lu.id)
        return out

    def snapshot(self) -> FrameStoreSnapshot:
        return FrameStoreSnapshot(
            frames=dict(self._frames),
            name_index=dict(self._name_index),
            lu_index=dict(self._lu_index),
            schema_version=interchange.SCHEMA_VERSION,
            license=self._license,
        )

    # -- writes -----------------------------------------------------------

    def commit_frame(self, draft: Frame) -> str:
        """Atomically register a validated draft; returns the assigned id.

        The draft id is provisional and gets remapped; FE ids are kept.
        Raises DUPLICATE_NAME on a casefolded name clash and STORAGE_FAILURE
        if persisting fails (in which case nothing is applied).
        """
        report = validate_frame_draft(draft)
        if report.verdict is Verdict.FAIL:
            codes = ", ".join(sorted(report.codes()))
            raise StoreError("VALIDATION_FAILED", f"draft {draft.name!r} fails validation: {codes}")
        with self._lock:
            name_key = draft.name.strip().casefold()
            if name_key in self._name_index:
                raise StoreError("DUPLICATE_NAME", f"a frame named {draft.name!r} already exists")
            for rel in draft.relations:
                if rel.resolved and rel.mother not in self._frames:
                    raise StoreError(
                        "VALIDATION_FAILED",
                        f"relation mother {rel.mother_name!r} is not in the store",
                    )
            frame_id = f"f{self._next_frame:05d}"
            next_lu = self._next_lu
            lus = []
            seen_triples: set[LuKey] = set()
            for lu in draft.lus:
                key = _lu_key(lu.lemma, lu.pos, lu.language)
                if key in seen_triples:
                    raise StoreError(
                        "DUPLICATE_LU",
                        f"draft carries duplicate lexical unit {lu.lemma!r} ({lu.pos.value}, {lu.language})",
                    )
                seen_triples.add(key)
                lus.append(replace(lu, frame=frame_id, id=f"lu{next_lu:05d}"))
                next_lu += 1
            frame = replace(
                draft,
                id=frame_id,
                lus=tuple(lus),
                relations=tuple(replace(rel, daughter=frame_id) for rel in draft.relations),
            )
            frames = dict(self._frames)
            frames[frame_id] = frame
            name_index = dict(self._name_index)
            name_index[name_key] = frame_id
            lu_index = dict(self._lu_index)
            for lu in frame.lus:
                key = _lu_key(lu.lemma, lu.pos, lu.language)
                lu_index[key] = tuple(sorted(lu_index.get(key, ()) + ((frame_id, lu.id),)))
            self._persist(frames, next_frame=self._next_frame + 1, next_lu=next_lu)
            self._frames = frames
            self._name_index = name_index
            self._lu_index = lu_index
            self._next_frame += 1
            self._next_lu = next_lu
            return frame_id

    def commit_lu(
        self,
        frame_id: str,
        lemma: str,
        pos: POS,
        language: Language,
        example_sentence: str,
        incorporated_fe: str | None = None,
    ) -> str:
        """Attach a new lexical unit to an existing lexical frame."""
        with self._lock:
            frame = self.get_frame(frame_id)
            if frame.lexicality is not Lexicality.LEXICAL:
                raise StoreError(
                    "VALIDATION_FAILED",
                    f"frame {frame.name!r} is non-lexical and cannot carry lexical units",
                )
            if not example_sentence.strip():
                raise StoreError("VALIDATION_FAILED", "lexical units need an example sentence")
            if incorporated_fe is not None and frame.fe_by_id(incorporated_fe) is None:
                raise StoreError(
                    "VALIDATION_FAILED",
                    f"incorporated FE {incorporated_fe!r} is not an FE of {frame.name!r}",
                )
            key = _lu_key(lemma, pos, language)
            for existing in frame.lus:
                if _lu_key(existing.lemma, existing.pos, existing.language) == key:
                    raise StoreError(
                        "DUPLICATE_LU",
                        f"{frame.name!r} already has the lexical unit {lemma!r} ({pos.value}, {language})",
                    )
            lu_id = f"lu{self._next_lu:05d}"
            lu = LexicalUnit(
                lemma=unicodedata.normalize("NFC", lemma).strip(),
                pos=pos,
                language=language,
                frame=frame_id,
                example_sentence=example_sentence,
                incorporated_fe=incorporated_fe,
                id=lu_id,
            )
            frames = dict(self._frames)
            frames[frame_id] = replace(frame, lus=frame.lus + (lu,))
            lu_index = dict(self._lu_index)
            lu_index[key] = tuple(sorted(lu_index.get(key, ()) + ((frame_id, lu_id),)))
            self._persist(frames, next_frame=self._next_frame, next_lu=self._next_lu + 1)
            self._frames = frames
            self._lu_index = lu_index
            self._next_lu += 1
            return lu_id

    def _set_relations(self, frame_id: str, relations: tuple[FrameRelation, ...]) -> None:
        """Replace a frame's relations (import plumbing)."""
        with self._lock:
            frame = self.get_frame(frame_id)
            frames = dict(self._frames)
            frames[frame_id] = replace(frame, relations=relations)
            self._persist(frames, next_frame=self._next_frame, next_lu=self._next_lu)
            self._frames = frames

    @staticmethod
    def _index_lus(frames: dict[str, Frame]) -> dict[LuKey, tuple[tuple[str, str], ...]]:
        index: dict[LuKey, list[tuple[str, str]]] = {}
        for frame in frames.values():
            for lu in frame.lus:
                index.setdefault(_lu_key(lu.lemma, lu.pos, lu.language), []).append((frame.id, lu.id))
        return {key: tuple(sorted(entries)) for key, entries in index.items()}

    # -- persistence ------------------------------------------------------

    def _hook(self, stage: str) -> None:
        if self.fail_hook is not None:
            self.fail_hook(stage)

    def _persist(self, frames: dict[str, Frame], next_frame: int, next_lu: int) -> None:
        if self._path is None:
            return
        try:
            state = {
                "schema_version": interchange.SCHEMA_VERSION,
                "license": self._license,
                "next_frame": next_frame,
                "next_lu": next_lu,
                "frames": [
                    interchange.frame_to_state(frames[fid]) for fid in sorted(frames)
                ],
            }
            self._hook("serialize")
            data = interchange.document_to_text(state).encode("utf-8")
            tmp = self._path.with_name(self._path.name + ".tmp")
            with open(tmp, "wb") as fh:
                fh.write(data)
                self._hook("tmp_written")
                fh.flush()
                os.fsync(fh.fileno())
            self._hook("before_replace")
            os.replace(tmp, self._path)
        except StoreError:
            raise
        except Exception as exc:
            raise StoreError("STORAGE_FAILURE", f"could not persist store: {exc}") from exc

    def _load(self) -> None:
        try:
            text = self._path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreError("STORAGE_FAILURE", f"could not read store file: {exc}") from exc
        try:
            state = json.loads(text)
            self._license = state.get("license", self._license)
            self._next_frame = state["next_frame"]
            self._next_lu = state["next_lu"]
            frames = {}
            for doc in state["frames"]:
                frame = interchange.frame_from_state(doc)
                frames[frame.id] = frame
            self._frames = frames
            self._name_index = {f.name.strip().casefold(): f.id for f in frames.values()}
            self._lu_index = self._index_lus(frames)
        except (KeyError, ValueError, TypeError) as exc:
            raise StoreError("STORAGE_FAILURE", f"store file is corrupt: {exc}") from exc

    # -- interchange ------------------------------------------------------

    def export_document(
        self,
        language: Language | None = None,
        frame_type: FrameType | None = None,
        lexicality: Lexicality | None = None,
        name_contains: str | None = None,
    ) -> dict[str, Any]:
        frames = self._filtered(language, frame_type, lexicality, name_contains)
        mother_fe_names = {
            frame.id: {fe.id: fe.name for fe in frame.fes} for frame in self._frames.values()
        }
        return interchange.build_document(frames, mother_fe_names, license=self._license)

    def export_text(self, **filters) -> str:
        return interchange.document_to_text(self.export_document(**filters))

    def import_text(self, text: str, mode: str = ImportMode.SKIP_CONFLICTS) -> ImportResult:
        return self.import_document(interchange.parse_document(text), mode)

    def import_document(self, doc: dict[str, Any], mode: str = ImportMode.SKIP_CONFLICTS) -> ImportResult:
        """Import an interchange document.

        Frames are planned in document order, checked for name conflicts,
        validity and relation resolvability, then committed; relations are
        attached in a second pass once all document-mate mothers have ids.
        Strict mode pre-scans the full document and aborts (importing
        nothing) on the first conflict; skip mode imports what it can and
        reports an issue per skipped frame.
        """
        if mode not in (ImportMode.STRICT, ImportMode.SKIP_CONFLICTS):
            raise ValueError(f"unknown import mode {mode!r}")
        with self._lock:
            plans, issues = self._plan_import(doc)
            if mode == ImportMode.STRICT and issues:
                first = issues[0]
                raise StoreError("CONFLICT", f"{first.subject}: {first.message}")
            committed: dict[str, str] = {}
            imported = 0
            for plan in plans:
                frame_id = self.commit_frame(plan["draft"])
                committed[plan["name_key"]] = frame_id
                imported += 1
            for plan in plans:
                relations = self._build_relations(plan, committed)
                if relations:
                    self._set_relations(committed[plan["name_key"]], relations)
            return ImportResult(imported, len(issues), tuple(issues))

    def _plan_import(self, doc: dict[str, Any]) -> tuple[list[dict], list[ImportIssue]]:
        entries = doc["frames"]
        lus_by_frame: dict[str, list[dict]] = {}
        for lu in doc["lus"]:
            lus_by_frame.setdefault(str(lu.get("frame", "")).casefold(), []).append(lu)
        rels_by_daughter: dict[str, list[dict]] = {}
        for rel in doc["relations"]:
            rels_by_daughter.setdefault(str(rel.get("daughter", "")).casefold(), []).append(rel)

        doc_fes: dict[str, dict[str, str]] = {}  # name_key -> FE name casefold -> FE name
        for entry in entries:
            name = str(entry.get("name", ""))
            doc_fes[name.casefold()] = {
                str(fe.get("name", "")).casefold(): str(fe.get("name", ""))
                for fe in entry.get("fes", [])
            }

        plans: list[dict] = []
        issues: list[ImportIssue] = []
        planned: set[str] = set()
        for position, entry in enumerate(entries):
            name = str(entry.get("name", f"frames[{position}]"))
            name_key = name.casefold()
            try:
                if name_key in self._name_index or name_key in planned:
                    raise StoreError("CONFLICT", f"a frame named {name!r} already exists")
                draft = self._decode_frame_entry(entry, lus_by_frame.get(name_key, ()), position)
                report = validate_frame_draft(draft)
                if report.verdict is Verdict.FAIL:
                    codes = ", ".join(sorted(report.codes()))
                    raise StoreError("VALIDATION_FAILED", f"frame fails validation: {codes}")
                relation_entries = rels_by_daughter.get(name_key, [])
                for rel in relation_entries:
                    self._check_relation_entry(rel, name, doc_fes)
            except StoreError as exc:
                issues.append(ImportIssue(exc.code, name, exc.message))
                continue
            planned.add(name_key)
            plans.append({
                "name_key": name_key,
                "draft": draft,
                "relations": relation_entries,
            })
        return plans, issues

    def _check_relation_entry(self, rel: dict, daughter: str, doc_fes: dict[str, dict[str, str]]) -> None:
        mother_name = str(rel.get("mother", ""))
        mother_key = mother_name.casefold()
        if rel.get("resolved") is False:
            return
        mother_frame = self.frame_by_name(mother_name)
        if mother_frame is not None:
            fe_names = {fe.name.casefold() for fe in mother_frame.fes}
            core_names = {fe.name.casefold() for fe in mother_frame.fes if fe.is_core}
        elif mother_key in doc_fes:
            fe_names = set(doc_fes[mother_key])
            core_names = None  # core statuses checked only against live frames
        else:
            raise StoreError(
                "CONFLICT",
                f"relation references unknown mother frame {mother_name!r}",
            )
        mapped = set()
        for mapping in rel.get("fe_mappings", []):
            src = str(mapping.get("mother_fe", "")).casefold()
            mapped.add(src)
            if src not in fe_names:
                raise StoreError(
                    "CONFLICT",
                    f"relation maps unknown FE {mapping.get('mother_fe')!r} of {mother_name!r}",
                )
        if core_names is not None and rel.get("kind") == FrameRelationKind.INHERITANCE.value:
            missing = sorted(core_names - mapped)
            if missing:
                raise StoreError(
                    "VALIDATION_FAILED",
                    f"inheritance from {mother_name!r} leaves core FEs unmapped: {', '.join(missing)}",
                )

    def _decode_frame_entry(self, entry: dict, lu_entries: Iterable[dict], position: int) -> Frame:
        return interchange.decode_frame_entry(
            entry, lu_entries, self._registry, provisional_id=f"import-{position}"
        )

    def _build_relations(self, plan: dict, committed: dict[str, str]) -> tuple[FrameRelation, ...]:
        daughter_id = committed[plan["name_key"]]
        out = []
        for rel in plan["relations"]:
            mother_name = str(rel.get("mother", ""))
            kind = FrameRelationKind(rel["kind"])
            explicit_unresolved = rel.get("resolved") is False
            mother_frame = None if explicit_unresolved else self.frame_by_name(mother_name)
            if mother_frame is not None:
                fe_ids = {fe.name.casefold(): fe.id for fe in mother_frame.fes}
                mappings = tuple(
                    (fe_ids.get(str(m["mother_fe"]).casefold(), str(m["mother_fe"])), str(m["daughter_fe"]))
                    for m in rel.get("fe_mappings", [])
                )
                out.append(FrameRelation(
                    kind=kind,
                    mother=mother_frame.id,
                    daughter=daughter_id,
                    mother_name=mother_frame.name,
                    fe_mappings=mappings,
                    resolved=True,
                ))
            else:
                # External reference, or a document mate that was skipped:
                # keep it as an unresolved named reference.
                mappings = tuple(
                    (str(m["mother_fe"]), str(m["daughter_fe"]))
                    for m in rel.get("fe_mappings", [])
                )
                out.append(FrameRelation(
                    kind=kind,
                    mother=mother_name,
                    daughter=daughter_id,
                    mother_name=mother_name,
                    fe_mappings=mappings,
                    resolved=False,
                ))
        return tuple(out)
