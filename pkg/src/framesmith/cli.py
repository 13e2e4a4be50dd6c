"""Operator command line.

Subcommands cover serving the HTTP API, lexicon ingestion, interchange
import/export, offline validation of interchange documents, scripted
(non-interactive) frame creation, and lemma search. Exit codes: 0 success,
1 operation failure, 2 usage error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from datetime import timedelta
from pathlib import Path

from . import api, interchange
from .config import AppConfig
from .errors import FramesmithError
from .languages import LanguageRegistry, default_registry
from .lexicon import Lemma, SynsetLexicon
from .model import POS, FrameRelation, FrameRelationKind, Verdict
from .rules import validate_frame_draft
from .store import FrameStore, ImportMode
from .wizard import FlowKind, ReviewDecision, StepRejection, Wizard, WizardStep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framesmith",
        description="Frame database engine with a guided creation workflow.",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--store", help="path of the frame database file")
    parser.add_argument("--lexicon", help="path of an ingested synset TSV file")
    parser.add_argument("--languages", help="path of a language-subtag registry file")
    parser.add_argument("--token-file", help="path of the contributor token registry")

    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)

    ingest = sub.add_parser("ingest-lexicon", help="load a tab-separated synset file")
    ingest.add_argument("file")

    imp = sub.add_parser("import", help="import an interchange document")
    imp.add_argument("file")
    imp.add_argument("--strict", action="store_true", help="abort on the first conflict")

    exp = sub.add_parser("export", help="export the store as an interchange document")
    exp.add_argument("file", nargs="?", help="output path (stdout when omitted)")

    val = sub.add_parser("validate", help="validate every frame in an interchange document")
    val.add_argument("file")

    create = sub.add_parser("create", help="replay a scripted wizard session")
    create.add_argument("--script", required=True, help="line-oriented JSON script file")
    create.add_argument("--contributor", default="script", help="contributor id for new frames")

    search = sub.add_parser("search", help="run the duplicate-detection search for a lemma")
    search.add_argument("lemma")
    search.add_argument("--pos", required=True, choices=[p.value for p in POS])
    search.add_argument("--lang", required=True)
    search.add_argument("--threshold", type=float)

    return parser


def _load_config(args: argparse.Namespace) -> AppConfig:
    overrides = {
        "store_path": args.store,
        "lexicon_path": args.lexicon,
        "languages_path": args.languages,
        "token_file": args.token_file,
        "host": getattr(args, "host", None),
        "port": getattr(args, "port", None),
        "similarity_threshold": getattr(args, "threshold", None),
    }
    return AppConfig.load(config_file=args.config, overrides=overrides)


def _registry(config: AppConfig) -> LanguageRegistry:
    if config.languages_path:
        return LanguageRegistry.from_file(config.languages_path)
    return default_registry()


def _open_store(config: AppConfig) -> FrameStore:
    return FrameStore(config.store_path, registry=_registry(config))


def _open_lexicon(config: AppConfig) -> SynsetLexicon:
    lexicon = SynsetLexicon(_registry(config))
    if config.lexicon_path and Path(config.lexicon_path).exists():
        lexicon.ingest(config.lexicon_path)
    return lexicon


def cmd_serve(args) -> int:
    config = _load_config(args)
    api.serve(config)
    return 0


def cmd_ingest(args) -> int:
    """Merge a synset file into the configured lexicon file.

    The lexicon file is a canonical TSV read at service startup; ingesting
    merges the new file into it and rewrites it atomically, so re-running
    the same ingest is a no-op.
    """
    config = _load_config(args)
    lexicon = SynsetLexicon(_registry(config))
    target = Path(config.lexicon_path) if config.lexicon_path else None
    source = Path(args.file)
    if target is not None and target.exists() and target.resolve() != source.resolve():
        lexicon.ingest(target)
    result = lexicon.ingest(source)
    print(
        f"ingested {result.synsets_loaded} synsets, {result.lemmas_loaded} lemmas "
        f"({result.lines_rejected} lines rejected)"
    )
    if target is not None and target.resolve() != source.resolve():
        lexicon.dump_tsv(target)
        print(f"lexicon file updated: {target}")
    return 0


def cmd_import(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    text = Path(args.file).read_text(encoding="utf-8")
    mode = ImportMode.STRICT if args.strict else ImportMode.SKIP_CONFLICTS
    result = store.import_text(text, mode)
    print(f"imported {result.imported} frames, skipped {result.skipped}")
    for issue in result.errors:
        print(f"  {issue.code} {issue.subject}: {issue.message}", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    config = _load_config(args)
    store = _open_store(config)
    text = store.export_text()
    if args.file:
        Path(args.file).write_text(text, encoding="utf-8")
        print(f"exported {len(store)} frames to {args.file}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    config = _load_config(args)
    registry = _registry(config)
    doc = interchange.parse_document(Path(args.file).read_text(encoding="utf-8"))
    lus_by_frame: dict[str, list[dict]] = {}
    for lu in doc["lus"]:
        lus_by_frame.setdefault(str(lu.get("frame", "")).casefold(), []).append(lu)
    rels_by_daughter: dict[str, list[dict]] = {}
    for rel in doc["relations"]:
        rels_by_daughter.setdefault(str(rel.get("daughter", "")).casefold(), []).append(rel)

    failed = False
    for position, entry in enumerate(doc["frames"]):
        name = str(entry.get("name", f"frames[{position}]"))
        key = name.casefold()
        try:
            draft = interchange.decode_frame_entry(
                entry, lus_by_frame.get(key, ()), registry, provisional_id=f"check-{position}"
            )
            # attach relations as named references so mapping checks can run
            relations = tuple(
                FrameRelation(
                    kind=FrameRelationKind(rel["kind"]),
                    mother=str(rel.get("mother", "")),
                    daughter=draft.id,
                    mother_name=str(rel.get("mother", "")),
                    fe_mappings=tuple(
                        (str(m["mother_fe"]), str(m["daughter_fe"]))
                        for m in rel.get("fe_mappings", [])
                    ),
                    resolved=False,
                )
                for rel in rels_by_daughter.get(key, [])
            )
            draft = replace(draft, relations=relations)
            report = validate_frame_draft(draft)
        except FramesmithError as exc:
            print(f"{name}: Fail [{exc.code}: {exc.message}]")
            failed = True
            continue
        verdict = {"pass": "Pass", "pass_with_warnings": "PassWithWarnings", "fail": "Fail"}[
            report.verdict.value
        ]
        details = "".join(
            f"\n  {f.severity.value}: {f.code} {f.subject} {f.message}" for f in report.findings
        )
        print(f"{name}: {verdict}{details}")
        if report.verdict is Verdict.FAIL:
            failed = True
    return 1 if failed else 0


def cmd_create(args) -> int:
    config = _load_config(args)
    registry = _registry(config)
    store = _open_store(config)
    lexicon = _open_lexicon(config)
    wizard = Wizard(
        store,
        lexicon,
        registry=registry,
        similarity_threshold=config.similarity_threshold,
        session_ttl=timedelta(days=config.session_ttl_days),
    )

    session_id: str | None = None
    for line_no, raw in enumerate(
        Path(args.script).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            op = json.loads(line)
        except json.JSONDecodeError as exc:
            print(f"script line {line_no}: invalid JSON: {exc}", file=sys.stderr)
            return 1
        kind = op.get("op")
        try:
            if kind == "start":
                session = wizard.start_session(
                    op.get("contributor", args.contributor), FlowKind(op["flow"])
                )
                session_id = session.id
                print(f"started {op['flow']} session")
            elif kind == "lemma":
                lemma = Lemma(op["lemma"], POS(op["pos"]), registry.parse(op["language"]))
                session = wizard.submit_lemma(session_id, lemma)
                hits = session.search_result
                n_hits = (
                    len(hits.exact_lus) + len(hits.synonym_hits) + len(hits.cross_lingual_hits)
                )
                print(f"lemma {op['lemma']!r}: {n_hits} hits, now at {session.step.value}")
            elif kind == "review":
                session = wizard.resolve_review(
                    session_id, ReviewDecision(op["decision"]), op.get("frame_id")
                )
                print(f"review resolved, now at {session.step.value}")
            elif kind == "step":
                result = wizard.submit_step(
                    session_id, WizardStep(op["step"]), op.get("payload", {})
                )
                if isinstance(result, StepRejection):
                    print(f"script line {line_no}: step {op['step']} rejected:", file=sys.stderr)
                    for f in result.report.findings:
                        print(f"  {f.severity.value}: {f.code} {f.message}", file=sys.stderr)
                    return 1
                print(f"step {op['step']} accepted, now at {result.step.value}")
            elif kind == "back":
                session = wizard.go_back(session_id, WizardStep(op["to_step"]))
                print(f"went back to {session.step.value}")
            elif kind == "finalize":
                outcome = wizard.finalize(
                    session_id, op.get("sentence"), op.get("incorporated_fe")
                )
                lu_note = f" with lu {outcome.lu_id}" if outcome.lu_id else ""
                print(f"committed {outcome.frame_name} as {outcome.frame_id}{lu_note}")
            else:
                print(f"script line {line_no}: unknown op {kind!r}", file=sys.stderr)
                return 1
        except FramesmithError as exc:
            print(f"script line {line_no}: {exc.code}: {exc.message}", file=sys.stderr)
            report = getattr(exc, "report", None)
            if report is not None:
                for f in report.findings:
                    print(f"  {f.severity.value}: {f.code} {f.message}", file=sys.stderr)
            return 1
    return 0


def cmd_search(args) -> int:
    config = _load_config(args)
    registry = _registry(config)
    store = _open_store(config)
    lexicon = _open_lexicon(config)
    lemma = Lemma(args.lemma, POS(args.pos), registry.parse(args.lang))
    result = lexicon.search(lemma, store, config.similarity_threshold)
    for lu, summary in result.exact_lus:
        print(f"exact: {lu.lemma} ({lu.pos.value}, {lu.language}) -> {summary.name}")
    for hit in result.synonym_hits:
        frames = ", ".join(s.name for s in hit.frames)
        print(f"synonym: {hit.lemma.text} ({hit.lemma.pos.value}, {hit.lemma.language}) -> {frames}")
    for hit in result.cross_lingual_hits:
        frames = ", ".join(s.name for s in hit.frames)
        print(
            f"cross-lingual: {hit.lemma.text} ({hit.lemma.pos.value}, {hit.lemma.language}) "
            f"distance {hit.similarity:.4f} -> {frames}"
        )
    if not result.has_hits:
        print("no hits")
    return 0


_COMMANDS = {
    "serve": cmd_serve,
    "ingest-lexicon": cmd_ingest,
    "import": cmd_import,
    "export": cmd_export,
    "validate": cmd_validate,
    "create": cmd_create,
    "search": cmd_search,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FramesmithError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
