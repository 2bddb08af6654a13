"""The ``mc`` command-line tool.

Exit status: 0 on success (warnings allowed), 1 if any error diagnostic
was reported, 2 on usage errors or unreadable/unwritable files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from gramforge.codegen.workflow import load_workflow, run_workflow
from gramforge.composer.artifact import compile_language, load_language, serialize_language
from gramforge.composer.compose import CompositionBinding, analyze_composition, check_bindings, compose
from gramforge.diagnostics import DiagnosticError, has_errors
from gramforge.grammar.parser import parse_grammar
from gramforge.linker import check_cardinalities, resolve_references
from gramforge.runtime.model import model_to_json
from gramforge.runtime.parser import parse_model

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2


class _IOFailure(Exception):
    """An input could not be read or an output could not be written."""


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


def _emit(diags, as_json: bool) -> None:
    for d in diags:
        print(d.format_json() if as_json else d.format(), file=sys.stderr)


def _status(diags) -> int:
    return EXIT_ERRORS if has_errors(diags) else EXIT_OK


def _grammar_resolver(grammar_file: str, search: list[str]):
    """Find super-grammars as ``<Name>.mcg`` next to the grammar, then on the search path."""
    dirs = [os.path.dirname(grammar_file) or "."] + list(search)
    cache: dict = {}

    def resolve(name: str):
        if name in cache:
            return cache[name]
        found = None
        for d in dirs:
            path = os.path.join(d, f"{name}.mcg")
            if os.path.isfile(path):
                found = parse_grammar(_read_bytes(path), path)
                break
        cache[name] = found
        return found

    return resolve


def _compile(args):
    gm = parse_grammar(_read_bytes(args.grammar), args.grammar)
    return compile_language(gm, _grammar_resolver(args.grammar, args.grammar_path))


def cmd_compile(args) -> int:
    cl = _compile(args)
    _write_bytes(args.output, serialize_language(cl))
    return EXIT_OK


def cmd_check(args) -> int:
    _compile(args)
    return EXIT_OK


def _load_lang(path: str):
    return load_language(_read_bytes(path))


def _parse_and_link(lang, path: str, link: bool = True):
    """Parse a model file; return (model or None, diagnostics)."""
    m = parse_model(lang, _read_bytes(path), path)
    if not link:
        return m, []
    diags = resolve_references(m, lang)
    if has_errors(diags):
        return None, diags
    diags += check_cardinalities(m, lang)
    return (None if has_errors(diags) else m), diags


def cmd_parse(args) -> int:
    lang = _load_lang(args.lang)
    m, diags = _parse_and_link(lang, args.model, link=not args.no_link)
    _emit(diags, args.json)
    if m is None:
        return EXIT_ERRORS
    text = model_to_json(m) + "\n"
    if args.ast_json:
        _write_bytes(args.ast_json, text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    return _status(diags)


def _load_composition(path: str):
    base = os.path.dirname(path)
    try:
        cfg = json.loads(_read_bytes(path).decode("utf-8"))
        host_path = os.path.join(base, cfg["host"])
        raw_bindings = [(b["hole"], os.path.join(base, b["fragment"]), b["start"]) for b in cfg.get("bindings", [])]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise _IOFailure(f"malformed composition config {path}: {exc!r}") from None
    host = _load_lang(host_path)
    fragments: dict[str, object] = {}
    bindings = []
    for hole, frag_path, start in raw_bindings:
        if frag_path not in fragments:
            fragments[frag_path] = _load_lang(frag_path)
        bindings.append(CompositionBinding(hole, fragments[frag_path], start))
    return host, bindings


def cmd_compose(args) -> int:
    host, bindings = _load_composition(args.config)
    if not args.analyze_only and not args.output:
        raise _IOFailure("compose needs -o OUT unless --analyze-only is given")
    problems = check_bindings(host, bindings)
    if problems:
        raise DiagnosticError(problems)
    warnings = analyze_composition(host, bindings)
    _emit(warnings, args.json)
    if args.analyze_only:
        return _status(warnings)
    composed = compose(host, bindings)
    _write_bytes(args.output, serialize_language(composed))
    return EXIT_OK


def cmd_generate(args) -> int:
    lang = _load_lang(args.lang)
    try:
        cfg = load_workflow(args.workflow)
    except OSError as exc:
        raise _IOFailure(f"cannot read {args.workflow}: {exc.strerror or exc}") from None
    except (ValueError, UnicodeDecodeError) as exc:
        raise _IOFailure(f"malformed workflow {args.workflow}: {exc}") from None
    if args.strict:
        cfg = type(cfg)(cfg.steps, cfg.template_dir, True)
    models, diags = [], []
    for path in args.model:
        try:
            m, link_diags = _parse_and_link(lang, path)
        except DiagnosticError as exc:
            diags += exc.diagnostics
            continue
        diags += link_diags
        if m is not None:
            models.append(m)
    if has_errors(diags):
        _emit(diags, args.json)
        return EXIT_ERRORS
    report = run_workflow(cfg, models, lang, args.out)
    report.diagnostics[:0] = diags
    _emit(report.diagnostics, args.json)
    if args.json:
        sys.stdout.write(json.dumps(report.to_json(), sort_keys=True, separators=(",", ":")) + "\n")
    return _status(report.diagnostics)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mc", description="Grammar-based language workbench.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def grammar_args(p):
        p.add_argument("grammar", help="grammar file (.mcg)")
        p.add_argument(
            "--grammar-path", action="append", default=[], metavar="DIR",
            help="extra directory searched for super-grammars",
        )

    p = sub.add_parser("compile", help="compile a grammar into a .mclang artifact")
    grammar_args(p)
    p.add_argument("-o", "--output", required=True, help="artifact to write")
    p.add_argument("--json", action="store_true", help="diagnostics as JSON lines")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check", help="check a grammar without writing anything")
    grammar_args(p)
    p.add_argument("--json", action="store_true", help="diagnostics as JSON lines")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("parse", help="parse and link a model file")
    p.add_argument("--lang", required=True, help="compiled language (.mclang)")
    p.add_argument("model", help="model file")
    p.add_argument("--ast-json", metavar="OUT", help="write the AST JSON here instead of stdout")
    p.add_argument("--no-link", action="store_true", help="skip reference resolution")
    p.add_argument("--json", action="store_true", help="diagnostics as JSON lines")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compose", help="fill holes of a compiled language with fragments")
    p.add_argument("--config", required=True, help="composition config (.json)")
    p.add_argument("-o", "--output", help="artifact to write")
    p.add_argument("--analyze-only", action="store_true", help="only report ambiguity warnings")
    p.add_argument("--json", action="store_true", help="diagnostics as JSON lines")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("generate", help="run a generation workflow over models")
    p.add_argument("--lang", required=True, help="compiled language (.mclang)")
    p.add_argument("--model", required=True, action="append", help="model file (repeatable)")
    p.add_argument("--workflow", required=True, help="workflow config (.json)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--strict", action="store_true", help="stop at the first error")
    p.add_argument("--json", action="store_true", help="diagnostics as JSON lines, report to stdout")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    """Run the CLI and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DiagnosticError as exc:
        _emit(exc.diagnostics, getattr(args, "json", False))
        return _status(exc.diagnostics)
    except _IOFailure as exc:
        print(f"mc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
