"""Shared builders for frames and lexicon fixtures."""

from __future__ import annotations

import itertools

import pytest

from framesmith import (
    CorenessStatus,
    FEOrigin,
    Frame,
    FrameElement,
    FrameStore,
    FrameType,
    Language,
    Lexicality,
    LexicalUnit,
    POS,
    SynsetLexicon,
)

_counter = itertools.count(1)


def make_fe(
    name: str,
    coreness: CorenessStatus = CorenessStatus.CORE,
    definition: str | None = None,
    fe_id: str | None = None,
    origin: FEOrigin | None = None,
) -> FrameElement:
    return FrameElement(
        id=fe_id or f"fe-test-{next(_counter)}",
        name=name,
        definition=definition if definition is not None else f"The {name} of the situation.",
        coreness=coreness,
        origin=origin or FEOrigin.manual(),
    )


def make_lu(
    lemma: str = "testword",
    pos: POS = POS.NOUN,
    language: str = "en",
    frame: str = "frame-test",
    example: str = "An example sentence with the testword in it.",
    incorporated_fe: str | None = None,
) -> LexicalUnit:
    return LexicalUnit(
        lemma=lemma,
        pos=pos,
        language=Language(language),
        frame=frame,
        example_sentence=example,
        incorporated_fe=incorporated_fe,
    )


def make_frame(
    name: str = "Test_frame",
    frame_type: FrameType = FrameType.EVENT,
    lexicality: Lexicality = Lexicality.LEXICAL,
    fes: tuple[FrameElement, ...] | None = None,
    lus: tuple[LexicalUnit, ...] | None = None,
    languages: frozenset[Language] = frozenset(),
    frame_id: str | None = None,
    **kwargs,
) -> Frame:
    frame_id = frame_id or f"frame-test-{next(_counter)}"
    if fes is None:
        fes = (make_fe("Agent"),)
    if lus is None and lexicality is Lexicality.LEXICAL:
        lus = (make_lu(frame=frame_id),)
    return Frame(
        id=frame_id,
        name=name,
        definition=f"A situation described reasonably well by the name {name}.",
        frame_type=frame_type,
        lexicality=lexicality,
        languages=languages,
        fes=fes,
        lus=lus or (),
        created_by="tests",
        **kwargs,
    )


SYNSET_FIXTURE_FOUR = """\
# minimal fixture: one noun synset shared across languages plus a verb synset
s1\ten\tn\tpurchase
s1\ten\tn\tbuy
s1\tpt-BR\tn\tcompra
s2\ten\tv\tfix
"""

SYNSET_FIXTURE_SOCIAL = """\
s3\ten\ta\tsocial
s3\tde\ta\tsozial
"""


@pytest.fixture
def four_line_synsets(tmp_path):
    path = tmp_path / "synsets_four.tsv"
    path.write_text(SYNSET_FIXTURE_FOUR, encoding="utf-8")
    return path


@pytest.fixture
def social_synsets(tmp_path):
    path = tmp_path / "synsets_social.tsv"
    path.write_text(SYNSET_FIXTURE_SOCIAL, encoding="utf-8")
    return path


@pytest.fixture
def mem_store():
    return FrameStore(path=None)


@pytest.fixture
def lexicon(four_line_synsets):
    lex = SynsetLexicon()
    lex.ingest(four_line_synsets)
    return lex
