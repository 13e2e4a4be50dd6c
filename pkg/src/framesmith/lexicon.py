"""Multilingual synset lexicon backing the duplicate-detection searches.

Two redundancy checks run against this store before a new frame is created:
same-language synonym expansion, and a cross-lingual similar-spelling scan
over co-synset members. Synsets are ingested from a plain 4-column
tab-separated file (``synset_id  language  pos  lemma``) so deployments can
convert whichever wordnet release they have access to.
"""

from __future__ import annotations

import threading
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import LanguageError, LexiconError
from .languages import Language, LanguageRegistry, default_registry
from .model import POS, Frame, LexicalUnit


@dataclass(frozen=True)
class Lemma:
    """A lemma occurrence: NFC text plus POS and language."""

    text: str
    pos: POS
    language: Language

    def __post_init__(self):
        text = unicodedata.normalize("NFC", self.text).strip()
        if not text:
            raise ValueError("lemma text is empty")
        object.__setattr__(self, "text", text)

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.text.casefold(), self.pos.value, self.language.code)


@dataclass(frozen=True)
class Synset:
    id: str
    members: frozenset[Lemma]


def _fold(text: str) -> str:
    """Casefold and strip combining marks, e.g. ``Ação`` -> ``acao``."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return unicodedata.normalize("NFC", stripped).casefold()


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    """Levenshtein distance over casefolded, accent-stripped text, divided
    by the longer length. 0.0 means identical spellings, 1.0 fully distinct;
    two empty strings compare as 0.0."""
    fa, fb = _fold(a), _fold(b)
    if not fa and not fb:
        return 0.0
    return _levenshtein(fa, fb) / max(len(fa), len(fb))


@dataclass(frozen=True)
class FrameSummary:
    id: str
    name: str
    definition: str

    @classmethod
    def of(cls, frame: Frame) -> "FrameSummary":
        return cls(frame.id, frame.name, frame.definition)


@dataclass(frozen=True)
class SynonymHit:
    lemma: Lemma
    frames: tuple[FrameSummary, ...]


@dataclass(frozen=True)
class CrossLingualHit:
    """Other-language co-synset lemma with similar spelling.

    ``similarity`` carries the normalized edit distance to the query text
    (0.0 = identical); a lemma is a hit when that distance is at or below
    the search threshold.
    """

    lemma: Lemma
    similarity: float
    frames: tuple[FrameSummary, ...]


@dataclass(frozen=True)
class LemmaSearchResult:
    exact_lus: tuple[tuple[LexicalUnit, FrameSummary], ...] = ()
    synonym_hits: tuple[SynonymHit, ...] = ()
    cross_lingual_hits: tuple[CrossLingualHit, ...] = ()

    @property
    def has_hits(self) -> bool:
        return bool(self.exact_lus or self.synonym_hits or self.cross_lingual_hits)


@dataclass(frozen=True)
class IngestResult:
    synsets_loaded: int
    lemmas_loaded: int
    lines_rejected: int


class SynsetLexicon:
    """In-memory synset store with atomic, idempotent file ingestion.

    Reads are lock-free over immutable snapshots; ingestion parses the whole
    file first and swaps the indexes in one short critical section, so a
    reader never observes a half-ingested file.
    """

    def __init__(self, registry: LanguageRegistry | None = None):
        self._registry = registry or default_registry()
        self._members: dict[str, frozenset[Lemma]] = {}
        self._synsets_by_lemma: dict[tuple[str, str, str], frozenset[str]] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._members)

    @property
    def lemma_count(self) -> int:
        return sum(len(m) for m in self._members.values())

    def ingest(self, source: str | Path) -> IngestResult:
        """Load a tab-separated synset file.

        Returns counts of newly added synsets and memberships; re-ingesting
        the same file is a no-op reported as (0, 0, 0). Malformed lines are
        counted, never fatal. Raises LexiconError(SOURCE_UNREADABLE) when the
        file cannot be read and LexiconError(EMPTY_SOURCE) when it contains
        no valid line.
        """
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise LexiconError("SOURCE_UNREADABLE", f"cannot read synset source {source}: {exc}") from exc

        parsed: list[tuple[str, Lemma]] = []
        rejected = 0
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = raw.rstrip("\n").split("\t")
            if len(fields) != 4:
                rejected += 1
                continue
            synset_id, language, pos, lemma_text = (f.strip() for f in fields)
            if not synset_id or not lemma_text:
                rejected += 1
                continue
            try:
                lemma = Lemma(lemma_text, POS(pos), self._registry.parse(language))
            except (ValueError, LanguageError):
                rejected += 1
                continue
            parsed.append((synset_id, lemma))

        if not parsed:
            raise LexiconError("EMPTY_SOURCE", f"no valid synset lines in {source}")

        with self._write_lock:
            members = dict(self._members)
            new_synsets = 0
            new_lemmas = 0
            for synset_id, lemma in parsed:
                current = members.get(synset_id)
                if current is None:
                    members[synset_id] = frozenset([lemma])
                    new_synsets += 1
                    new_lemmas += 1
                elif lemma not in current:
                    members[synset_id] = current | {lemma}
                    new_lemmas += 1
            if new_synsets or new_lemmas:
                by_lemma: dict[tuple[str, str, str], set[str]] = {}
                for sid, lemmas in members.items():
                    for member in lemmas:
                        by_lemma.setdefault(member.key, set()).add(sid)
                self._members = members
                self._synsets_by_lemma = {k: frozenset(v) for k, v in by_lemma.items()}
        return IngestResult(new_synsets, new_lemmas, rejected)

    def synsets(self) -> list[Synset]:
        return [Synset(sid, members) for sid, members in sorted(self._members.items())]

    def dump_tsv(self, path: str | Path) -> None:
        """Write the whole store back out as a canonical sorted TSV."""
        lines = sorted(
            f"{sid}\t{m.language.code}\t{m.pos.value}\t{m.text}"
            for sid, members in self._members.items()
            for m in members
        )
        target = Path(path)
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        tmp.replace(target)

    def synset_ids_for(self, lemma: Lemma) -> frozenset[str]:
        return self._synsets_by_lemma.get(lemma.key, frozenset())

    def co_members(self, lemma: Lemma) -> set[Lemma]:
        """All lemmas sharing at least one synset with ``lemma``, excluding
        the query triple itself."""
        members_map = self._members
        out: set[Lemma] = set()
        for sid in self.synset_ids_for(lemma):
            out.update(members_map.get(sid, frozenset()))
        return {m for m in out if m.key != lemma.key}

    def search(self, query: Lemma, store, threshold: float = 0.25) -> LemmaSearchResult:
        """Run the full redundancy search for ``query`` against a frame store.

        ``store`` must provide ``find_lus(lemma, pos, language)`` and
        ``get_frame(id)``. Exact LU matches come first; then same-language
        co-synset lemmas that are LUs in the store; then other-language
        co-synset lemmas whose spelling is within ``threshold`` normalized
        edit distance. All hits carry the frames they evoke.
        """
        if not 0.0 <= threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {threshold}")

        exact = tuple(
            (lu, FrameSummary.of(store.get_frame(lu.frame)))
            for lu in store.find_lus(query.text, query.pos, query.language)
        )

        synonym_hits: list[SynonymHit] = []
        cross_hits: list[CrossLingualHit] = []
        for member in sorted(self.co_members(query), key=lambda m: m.key):
            if member.pos is not query.pos:
                continue
            lus = store.find_lus(member.text, member.pos, member.language)
            if not lus:
                continue
            frames: dict[str, FrameSummary] = {}
            for lu in lus:
                frames.setdefault(lu.frame, FrameSummary.of(store.get_frame(lu.frame)))
            summaries = tuple(sorted(frames.values(), key=lambda s: (s.name.casefold(), s.id)))
            if member.language == query.language:
                synonym_hits.append(SynonymHit(member, summaries))
            else:
                distance = normalized_edit_distance(query.text, member.text)
                if distance <= threshold:
                    cross_hits.append(CrossLingualHit(member, distance, summaries))

        synonym_hits.sort(key=lambda h: h.lemma.key)
        cross_hits.sort(key=lambda h: (h.similarity, h.lemma.key))
        return LemmaSearchResult(exact, tuple(synonym_hits), tuple(cross_hits))
