"""Acceptance suite. Each criterion prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
print; without ``-s`` they appear in pytest's captured output.
"""

from __future__ import annotations

import functools
import random
import re
import threading
import time
from pathlib import Path

import pytest

from framesmith import (
    CorenessStatus,
    FlowKind,
    FrameRelation,
    FrameRelationKind,
    FrameStore,
    FrameType,
    Language,
    Lemma,
    Lexicality,
    MappingError,
    POS,
    ReviewDecision,
    StepRejection,
    StoreError,
    SynsetLexicon,
    Verdict,
    Wizard,
    WizardError,
    WizardStep,
    apply_relation_mapping,
    validate_frame_draft,
    validate_frame_name,
)
from framesmith.cli import main as cli_main
from framesmith.wizard import FLOW_ORDERS

from conftest import SYNSET_FIXTURE_FOUR, SYNSET_FIXTURE_SOCIAL, make_fe, make_frame, make_lu

FIXTURES = Path(__file__).parent / "fixtures"


def criterion(number: int, label: str):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE {number} {label}: FAIL")
                raise
            print(f"\nACCEPTANCE {number} {label}: PASS")
            return result

        return wrapper

    return decorate


# --- 1: scripted end-to-end walkthrough ------------------------------------


@criterion(1, "scripted end-to-end walkthrough")
def test_criterion_1_scripted_walkthrough(tmp_path, capsys):
    store_path = tmp_path / "frames.db"
    started = time.perf_counter()
    code = cli_main([
        "--store", str(store_path),
        "create", "--script", str(FIXTURES / "brazilian_way.script"),
    ])
    elapsed = time.perf_counter() - started
    out = capsys.readouterr().out
    assert code == 0
    assert elapsed < 5.0, f"walkthrough took {elapsed:.2f}s"
    assert "committed Attempting_and_resolving_scenario" in out
    assert "lemma 'jeitinho': 0 hits" in out
    assert "committed Brazilian_way" in out

    store = FrameStore(store_path)
    frame = store.frame_by_name("Brazilian_way")
    assert frame is not None
    core = {fe.name for fe in frame.core_fes}
    assert core == {"Interested_party", "Authority", "Norm"}
    names = {fe.name for fe in frame.fes}
    assert {"Goal", "Manner"} <= names
    non_core = {fe.name for fe in frame.fes if not fe.is_core}
    assert {"Goal", "Manner"} <= non_core
    assert len(frame.lus) == 1
    lu = frame.lus[0]
    assert (lu.lemma, lu.pos, lu.language) == ("jeitinho", POS.NOUN, Language("pt-BR"))
    assert lu.example_sentence == "Alguém deu um jeitinho no problema do visto"
    assert frame.relations[0].kind is FrameRelationKind.INHERITANCE
    assert validate_frame_draft(frame).verdict is Verdict.PASS

    code = cli_main([
        "--store", str(store_path),
        "search", "jeitinho", "--pos", "n", "--lang", "pt-BR",
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "Brazilian_way" in out


# --- 2: naming-rule matrix ---------------------------------------------------


def oracle_name_codes(name: str, frame_type: FrameType, is_scenario: bool) -> set[str]:
    codes = set()
    if not re.fullmatch(r"[A-Z][A-Za-z0-9_]*", name):
        codes.add("NAME_CHARSET")
    if is_scenario and not name.endswith("_scenario"):
        codes.add("SCENARIO_SUFFIX")
    if not is_scenario and name.endswith("_scenario"):
        codes.add("SCENARIO_SUFFIX_UNEXPECTED")
    if frame_type is FrameType.STATE and not (
        re.fullmatch(r"Being_.+", name) or re.fullmatch(r".+_state", name)
    ):
        codes.add("STATE_PATTERN")
    return codes


ORACLE_ERRORS = {"NAME_CHARSET"}

SPEC_NAME_CASES = [
    ("Brazilian_way", FrameType.EVENT, False, Verdict.PASS),
    ("Being_happy", FrameType.STATE, False, Verdict.PASS),
    ("Happiness", FrameType.STATE, False, Verdict.PASS_WITH_WARNINGS),
    ("lowercase_name", FrameType.EVENT, False, Verdict.FAIL),
]

GENERATED_NAME_CASES = [
    ("Commerce_buy", FrameType.EVENT, False),
    ("X", FrameType.ENTITY, False),
    ("A1_frame", FrameType.EVENT, False),
    ("Frame_with_many_parts_9", FrameType.RELATION, False),
    ("Attempting_scenario", FrameType.EVENT, True),
    ("Attempting_scenario", FrameType.EVENT, False),
    ("Attempting", FrameType.EVENT, True),
    ("Being_ready", FrameType.STATE, False),
    ("Being_", FrameType.STATE, False),
    ("Readiness_state", FrameType.STATE, False),
    ("_state", FrameType.STATE, False),
    ("State_of_affairs", FrameType.STATE, False),
    ("Being_x_scenario", FrameType.STATE, True),
    ("smallcaps", FrameType.STATE, False),
    ("9starts_with_digit", FrameType.EVENT, False),
    ("Name with spaces", FrameType.EVENT, False),
    ("Hyphen-ated", FrameType.EVENT, False),
    ("Ação_frame", FrameType.EVENT, False),
    ("_Leading_underscore", FrameType.EVENT, True),
    ("Trailing_scenario", FrameType.STATE, True),
]


@criterion(2, "naming-rule matrix vs regex oracle")
def test_criterion_2_naming_matrix():
    assert len(GENERATED_NAME_CASES) == 20
    for name, frame_type, is_scenario, expected_verdict in SPEC_NAME_CASES:
        report = validate_frame_name(name, frame_type, is_scenario)
        assert report.verdict is expected_verdict, (name, report)
        assert report.codes() == oracle_name_codes(name, frame_type, is_scenario)

    for name, frame_type, is_scenario in GENERATED_NAME_CASES:
        report = validate_frame_name(name, frame_type, is_scenario)
        expected_codes = oracle_name_codes(name, frame_type, is_scenario)
        assert report.codes() == expected_codes, (name, report)
        if expected_codes & ORACLE_ERRORS:
            expected = Verdict.FAIL
        elif expected_codes:
            expected = Verdict.PASS_WITH_WARNINGS
        else:
            expected = Verdict.PASS
        assert report.verdict is expected, (name, report)


# --- 3: duplicate prevention -------------------------------------------------


def acceptance_lexicon(tmp_path) -> SynsetLexicon:
    four = tmp_path / "four.tsv"
    four.write_text(SYNSET_FIXTURE_FOUR, encoding="utf-8")
    social = tmp_path / "social.tsv"
    social.write_text(SYNSET_FIXTURE_SOCIAL, encoding="utf-8")
    lexicon = SynsetLexicon()
    result = lexicon.ingest(four)
    assert (result.synsets_loaded, result.lemmas_loaded, result.lines_rejected) == (2, 4, 0)
    lexicon.ingest(social)
    return lexicon


def dp_oracle_distance(a: str, b: str) -> float:
    rows, cols = len(a) + 1, len(b) + 1
    dist = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        dist[i][0] = i
    for j in range(cols):
        dist[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            dist[i][j] = min(
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
                dist[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return dist[rows - 1][cols - 1] / max(len(a), len(b))


@criterion(3, "duplicate prevention via synonyms and spelling")
def test_criterion_3_duplicate_prevention(tmp_path):
    lexicon = acceptance_lexicon(tmp_path)
    store = FrameStore()
    commerce = make_frame(
        name="Commerce_goods_transfer",
        frame_id="draft-commerce",
        fes=(make_fe("Buyer"), make_fe("Goods")),
        lus=(make_lu("buy", POS.NOUN, "en", "draft-commerce", "That was a good buy."),),
    )
    store.commit_frame(commerce)
    social = make_frame(
        name="Social_connection",
        frame_id="draft-social",
        fes=(make_fe("Individuals"),),
        lus=(make_lu("social", POS.ADJECTIVE, "en", "draft-social", "A social gathering."),),
    )
    store.commit_frame(social)

    result = lexicon.search(Lemma("purchase", POS.NOUN, Language("en")), store, 0.25)
    assert [h.lemma.text for h in result.synonym_hits] == ["buy"]
    assert [f.name for f in result.synonym_hits[0].frames] == ["Commerce_goods_transfer"]

    result = lexicon.search(Lemma("sozial", POS.ADJECTIVE, Language("de")), store, 0.25)
    assert len(result.cross_lingual_hits) == 1
    hit = result.cross_lingual_hits[0]
    assert hit.lemma.text == "social"
    assert hit.similarity == pytest.approx(0.1667, abs=1e-4)
    assert hit.similarity == pytest.approx(dp_oracle_distance("sozial", "social"), abs=1e-9)
    assert [f.name for f in hit.frames] == ["Social_connection"]


# --- 4: flow-safety fuzz -------------------------------------------------------


class FuzzDriver:
    """Random legal/illegal call sequences against one shared wizard."""

    GOOD_CORENESS = ("core", "peripheral", "extra_thematic", "core_unexpressed")

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.store = FrameStore()
        lexicon = SynsetLexicon()
        self.lexicon = lexicon
        self.wizard = Wizard(self.store, lexicon)
        self.store.commit_frame(make_frame(
            name="Fuzz_scenario",
            frame_id="draft-fuzz-scn",
            lexicality=Lexicality.NON_LEXICAL,
            languages=frozenset({Language("en")}),
            fes=(
                make_fe("Agent", CorenessStatus.CORE),
                make_fe("Extra", CorenessStatus.PERIPHERAL),
            ),
            lus=(),
            is_scenario=True,
        ))
        self.commits = 0
        self.rejections = 0
        self.errors = 0
        self.sequence = 0

    # -- payload generators ------------------------------------------------

    def payload_for(self, step: WizardStep, seq: int, valid: bool) -> dict:
        rng = self.rng
        if step is WizardStep.TYPE_SELECTION:
            if not valid:
                return rng.choice([{}, {"frame_type": "spiral"}, {"frame_type": 7}])
            payload = {"frame_type": rng.choice(
                ["event", "entity", "relation", "attribute", "state", "undefined"]
            )}
            if rng.random() < 0.3:
                payload["is_scenario"] = True
            payload["languages"] = ["en"] if rng.random() < 0.8 else ["pt-BR", "en"]
            return payload
        if step is WizardStep.NAME_AND_DEFINITION:
            if not valid:
                return rng.choice([
                    {"name": "bad name", "definition": "x"},
                    {"name": "Fuzz_scenario", "definition": "duplicate"},
                    {"name": f"Fuzz_frame_{seq}", "definition": "   "},
                    {"definition": "missing name"},
                ])
            return {
                "name": f"Fuzz_frame_{seq}",
                "definition": f"Randomly generated frame number {seq}.",
            }
        if step is WizardStep.FRAME_RELATIONS:
            if not valid:
                return rng.choice([
                    {"relations": [{"kind": "inheritance", "mother": "Nowhere_frame"}]},
                    {"relations": [{"kind": "inheritance", "mother": "Fuzz_scenario",
                                    "fe_mappings": {}}]},
                    {"relations": [{"kind": "inheritance", "mother": "Fuzz_scenario",
                                    "fe_mappings": {"Ghost": "Agent_of_mine"}}]},
                    {"relations": "not-a-list"},
                ])
            if rng.random() < 0.5:
                return {"relations": []}
            return {"relations": [{
                "kind": "inheritance",
                "mother": "Fuzz_scenario",
                "fe_mappings": {"Agent": f"Mapped_agent_{seq}"},
            }]}
        if step is WizardStep.FRAME_ELEMENTS:
            if not valid:
                return rng.choice([
                    {"add": []} if not self._draft_has_fes() else
                    {"add": [{"name": "lower_case", "definition": "x", "coreness": "core"}]},
                    {"add": [{"name": "Dup", "definition": "x", "coreness": "core"},
                             {"name": "dup", "definition": "y", "coreness": "core"}]},
                    {"add": [{"name": "Empty_def", "definition": " ", "coreness": "core"}]},
                    {"add": [{"name": "Bad_coreness", "definition": "x", "coreness": "nuclear"}]},
                ])
            n = rng.randint(1, 3)
            return {"add": [
                {
                    "name": f"Element_{seq}_{i}",
                    "definition": f"Element {i} of frame {seq}.",
                    "coreness": rng.choice(self.GOOD_CORENESS),
                }
                for i in range(n)
            ]}
        if step is WizardStep.FE_RELATIONS:
            if not valid:
                return rng.choice([
                    {"relations": [{"kind": "requires", "members": ["Ghost_a", "Ghost_b"]}]},
                    {"relations": [{"kind": "excludes", "members": ["Same", "Same"]}]},
                    {"relations": [{"kind": "requires", "members": ["Only_one"]}]},
                ])
            names = [fe.name for fe in self._session.draft.fes]
            if len(names) >= 2 and rng.random() < 0.4:
                a, b = rng.sample(names, 2)
                return {"relations": [{"kind": rng.choice(["requires", "excludes"]),
                                       "members": [a, b]}]}
            return {"relations": []}
        return {}

    def _draft_has_fes(self) -> bool:
        return bool(self._session.draft.fes)

    # -- sequence runner -----------------------------------------------------

    def run_sequence(self):
        seq = self.sequence
        self.sequence += 1
        rng = self.rng
        flow = FlowKind.LEXICAL if rng.random() < 0.6 else FlowKind.NON_LEXICAL
        self._session = self.wizard.start_session("fuzzer", flow)
        sid = self._session.id
        order = FLOW_ORDERS[flow]

        for _ in range(rng.randint(1, 10)):
            session = self.wizard.get_session(sid)
            self._session = session
            if session.step is WizardStep.COMMITTED:
                break
            before = session.fingerprint()
            before_index = session.step_index()
            action = rng.random()
            try:
                if action < 0.55:
                    self._valid_forward(sid, session, seq)
                elif action < 0.8:
                    self._invalid_op(sid, session, seq)
                elif action < 0.9:
                    steps_behind = [s for s in order[:before_index]]
                    if steps_behind:
                        self.wizard.go_back(sid, rng.choice(steps_behind))
                    continue
                else:
                    self._maybe_finalize(sid, session, seq)
            except WizardError:
                self.errors += 1
                after = self.wizard.get_session(sid) if self._alive(sid) else None
                if after is not None:
                    assert after.fingerprint() == before, "error mutated session"
                continue
            after = self.wizard.get_session(sid)
            self._check_advance(flow, before_index, after, before)

    def _alive(self, sid) -> bool:
        try:
            self.wizard.get_session(sid)
            return True
        except WizardError:
            return False

    def _valid_forward(self, sid, session, seq):
        step = session.step
        if step is WizardStep.LEMMA_SEARCH:
            self.wizard.submit_lemma(
                sid, Lemma(f"fuzzword{seq}", POS.NOUN, Language("en"))
            )
        elif step is WizardStep.EXISTING_FRAME_REVIEW:
            self.wizard.resolve_review(sid, ReviewDecision.CREATE_NEW_FRAME)
        elif step is WizardStep.SUMMARY and session.flow is FlowKind.NON_LEXICAL:
            self._maybe_finalize(sid, session, seq)
        elif step is WizardStep.EXAMPLE_SENTENCE:
            self._maybe_finalize(sid, session, seq)
        else:
            payload = self.payload_for(step, seq, valid=True)
            result = self.wizard.submit_step(sid, step, payload)
            if isinstance(result, StepRejection):
                self.rejections += 1
                after = self.wizard.get_session(sid)
                assert after.fingerprint() == session.fingerprint(), "rejection mutated session"

    def _invalid_op(self, sid, session, seq):
        rng = self.rng
        step = session.step
        choice = rng.random()
        before = session.fingerprint()
        if choice < 0.3:
            wrong = rng.choice([s for s in WizardStep if s is not step])
            try:
                result = self.wizard.submit_step(sid, wrong, {"anything": True})
            except WizardError:
                raise
            if isinstance(result, StepRejection):
                self.rejections += 1
                assert self.wizard.get_session(sid).fingerprint() == before
        elif choice < 0.5:
            self.wizard.submit_lemma(sid, Lemma("late", POS.NOUN, Language("en")))
        elif step in (
            WizardStep.TYPE_SELECTION,
            WizardStep.NAME_AND_DEFINITION,
            WizardStep.FRAME_RELATIONS,
            WizardStep.FRAME_ELEMENTS,
            WizardStep.FE_RELATIONS,
        ):
            result = self.wizard.submit_step(sid, step, self.payload_for(step, seq, valid=False))
            if isinstance(result, StepRejection):
                self.rejections += 1
                assert self.wizard.get_session(sid).fingerprint() == before
        else:
            self.wizard.finalize(sid)  # premature; must raise

    def _maybe_finalize(self, sid, session, seq):
        if session.flow is FlowKind.LEXICAL:
            outcome = self.wizard.finalize(
                sid, sentence=f"Generated example sentence number {seq}."
            )
        else:
            outcome = self.wizard.finalize(sid)
        self.commits += 1
        committed = self.store.get_frame(outcome.frame_id)
        report = validate_frame_draft(committed)
        assert report.verdict is not Verdict.FAIL, (
            f"committed frame {committed.name} fails validation: {report}"
        )

    def _check_advance(self, flow, before_index, after, before):
        if after.fingerprint() == before:
            return
        after_index = after.step_index()
        if after_index <= before_index:
            return  # same step (data edit) or backward navigation
        jump = after_index - before_index
        order = FLOW_ORDERS[flow]
        if jump == 1:
            return
        # documented skips only
        if (
            flow is FlowKind.LEXICAL
            and order[before_index] is WizardStep.LEMMA_SEARCH
            and after.step is WizardStep.TYPE_SELECTION
        ):
            return
        if (
            order[before_index] is WizardStep.EXISTING_FRAME_REVIEW
            and after.step is WizardStep.EXAMPLE_SENTENCE
        ):
            return
        raise AssertionError(f"illegal step skip: {order[before_index]} -> {after.step}")


@criterion(4, "flow-safety fuzz over 10,000 sequences")
def test_criterion_4_flow_safety_fuzz():
    started = time.perf_counter()
    driver = FuzzDriver(seed=0xF4A11)
    for _ in range(10_000):
        driver.run_sequence()
    elapsed = time.perf_counter() - started

    # every persisted frame must satisfy the full validator
    for frame in driver.store.snapshot().frames.values():
        assert validate_frame_draft(frame).verdict is not Verdict.FAIL

    assert driver.commits > 300, f"fuzz barely commits ({driver.commits})"
    assert driver.rejections > 1000, f"fuzz barely rejects ({driver.rejections})"
    assert driver.errors > 1000, f"fuzz barely errors ({driver.errors})"
    assert elapsed < 60.0, f"fuzz took {elapsed:.1f}s"


# --- 5: store properties --------------------------------------------------------


@criterion(5, "store interchange, race and crash properties")
def test_criterion_5_store_properties(tmp_path):
    # fixed point: export -> import -> export is byte-equal
    store = FrameStore()
    store.commit_frame(make_frame(
        name="Attempting_and_resolving_scenario",
        frame_id="d-scn",
        lexicality=Lexicality.NON_LEXICAL,
        languages=frozenset({Language("en")}),
        fes=(make_fe("Agent", CorenessStatus.CORE),
             make_fe("Goal", CorenessStatus.PERIPHERAL)),
        lus=(),
        is_scenario=True,
    ))
    mother = store.frame_by_name("Attempting_and_resolving_scenario")
    agent = mother.fe_named("Agent")
    draft = make_frame(
        name="Brazilian_way",
        frame_id="d-bw",
        fes=(
            make_fe("Interested_party", CorenessStatus.CORE),
            make_fe("Goal", CorenessStatus.PERIPHERAL),
            make_fe("Authority", CorenessStatus.CORE),
        ),
        relations=(FrameRelation(
            kind=FrameRelationKind.INHERITANCE,
            mother=mother.id,
            daughter="d-bw",
            mother_name=mother.name,
            fe_mappings=((agent.id, "Interested_party"),),
        ),),
        lus=(make_lu("jeitinho", POS.NOUN, "pt-BR", "d-bw",
                     "Alguém deu um jeitinho no problema do visto."),),
    )
    store.commit_frame(draft)
    first = store.export_text()
    second_store = FrameStore()
    second_store.import_text(first)
    second = second_store.export_text()
    assert first.encode("utf-8") == second.encode("utf-8"), "export fixed point broken"

    # concurrent-commit name race: exactly one winner per trial, 100 trials
    race_store = FrameStore()
    for trial in range(100):
        barrier = threading.Barrier(2)
        outcomes = []

        def attempt(tag, trial=trial, barrier=barrier, outcomes=outcomes):
            draft = make_frame(name=f"Race_frame_{trial}", frame_id=f"d-{trial}-{tag}")
            barrier.wait()
            try:
                race_store.commit_frame(draft)
                outcomes.append("ok")
            except StoreError as exc:
                outcomes.append(exc.code)

        threads = [threading.Thread(target=attempt, args=(tag,)) for tag in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(outcomes) == ["DUPLICATE_NAME", "ok"], f"trial {trial}: {outcomes}"

    # fault-injected commit leaves no partial frame at any persist stage
    for stage in ("serialize", "tmp_written", "before_replace"):
        path = tmp_path / f"crash-{stage}.db"
        crash_store = FrameStore(path)
        crash_store.commit_frame(make_frame(name="Survivor_frame", frame_id="d-surv"))

        def boom(label, stage=stage):
            if label == stage:
                raise OSError("injected fault")

        crash_store.fail_hook = boom
        with pytest.raises(StoreError):
            crash_store.commit_frame(make_frame(name="Casualty_frame", frame_id="d-cas"))
        crash_store.fail_hook = None
        reopened = FrameStore(path)
        assert reopened.frame_by_name("Survivor_frame") is not None
        assert reopened.frame_by_name("Casualty_frame") is None
        snap = reopened.snapshot()
        assert set(snap.name_index.values()) == set(snap.frames)


# --- 6: inheritance completeness ------------------------------------------------


@criterion(6, "inheritance completeness over 500 mothers")
def test_criterion_6_inheritance_completeness():
    rng = random.Random(0xC0FE)
    pool = (
        CorenessStatus.CORE,
        CorenessStatus.CORE,
        CorenessStatus.CORE_UNEXPRESSED,
        CorenessStatus.PERIPHERAL,
        CorenessStatus.EXTRA_THEMATIC,
    )
    omitted_checked = 0
    for index in range(500):
        n = rng.randint(0, 7)
        fes = tuple(
            make_fe(f"FE_{index}_{i}", rng.choice(pool), fe_id=f"fe-{index}-{i}")
            for i in range(n)
        )
        mother = make_frame(
            name=f"Mother_{index}", frame_id=f"m-{index}", fes=fes, lus=(),
            lexicality=Lexicality.NON_LEXICAL,
            languages=frozenset({Language("en")}),
        )
        draft = make_frame(name=f"Child_{index}", frame_id=f"c-{index}", fes=(), lus=())
        complete = FrameRelation(
            kind=FrameRelationKind.INHERITANCE,
            mother=mother.id,
            daughter=draft.id,
            mother_name=mother.name,
            fe_mappings=tuple(
                (fe.id, f"Renamed_{fe.name}") for fe in fes if fe.is_core
            ),
        )
        result = apply_relation_mapping(draft, complete, mother)
        assert len(result.core_fes) == len(mother.core_fes), f"mother {index}"

        core = [fe for fe in fes if fe.is_core]
        if core:
            omitted = rng.choice(core)
            partial = FrameRelation(
                kind=FrameRelationKind.INHERITANCE,
                mother=mother.id,
                daughter=draft.id,
                mother_name=mother.name,
                fe_mappings=tuple(
                    (fe.id, f"Renamed_{fe.name}") for fe in core if fe.id != omitted.id
                ),
            )
            with pytest.raises(MappingError) as exc:
                apply_relation_mapping(draft, partial, mother)
            assert exc.value.code == "INCOMPLETE_MAPPING"
            omitted_checked += 1
    assert omitted_checked > 250
