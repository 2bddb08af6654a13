import hashlib
import json

import pytest

from gramforge import DiagnosticError, model_to_json, parse_model, resolve_references
from gramforge.codegen import (
    Foreach,
    If,
    Include,
    Interp,
    Literal,
    Template,
    WorkflowConfig,
    WorkflowStep,
    parse_template,
    render,
    run_workflow,
)
from helpers import FIXTURES, GOLDEN, automaton_text

TEMPLATES = FIXTURES / "templates"


def tmpl(name):
    return parse_template((TEMPLATES / f"{name}.mct").read_text(), name)


def r(text, m, lang, node=None, library=None):
    return render(parse_template(text), m.root if node is None else node, m, lang, library)


# -- parsing ---------------------------------------------------------------------


def test_parse_interpolation():
    assert parse_template("hello ${name}").body == (Literal("hello "), Interp(("name",)))


def test_parse_foreach():
    t = parse_template("@foreach s in state { ${s.name}\n }")
    assert t.body == (Foreach("s", ("state",), (Interp(("s", "name")), Literal("\n "))),)


def test_parse_if_else_and_include():
    t = parse_template('@if final {F} @else {N}@include "row" with toState')
    assert t.body == (If(("final",), (Literal("F"),), (Literal("N"),)), Include("row", ("toState",)))


def test_escapes_and_plain_symbols():
    t = parse_template("$$x @@y a@b {c} $ @")
    assert t.body == (Literal("$x @y a@b {c} $ @"),)


def test_unclosed_block():
    with pytest.raises(DiagnosticError) as info:
        parse_template("@if x {")
    assert info.value.codes == ["E-GEN-001"]


@pytest.mark.parametrize(
    "text", ["${}", "${a..b}", "@foreach in x { }", "@if { }", '@include row with x', "@else { }"]
)
def test_malformed_directives(text):
    with pytest.raises(DiagnosticError) as info:
        parse_template(text)
    assert info.value.codes == ["E-GEN-002"]


def test_line_break_after_block_close_is_dropped():
    t = parse_template("@if a {\nx\n}\ny")
    assert t.body == (If(("a",), (Literal("x\n"),)), Literal("y"))


# -- rendering ---------------------------------------------------------------------


def test_literal_only(automaton, pingpong):
    assert r("X", pingpong, automaton) == "X"
    assert r("X", pingpong, automaton, node=3) == "X"


def test_dot_example(automaton, pingpong):
    text = "digraph ${name} { @foreach t in transition { ${t.fromState.name} -> ${t.toState.name} [label=\"${t.activate}\"]; } }"
    out = r(text, pingpong, automaton)
    assert out == 'digraph PingPong { Ping -> Pong [label="serve"]; Pong -> Ping [label="return"];  }'


def test_booleans_render(automaton, pingpong):
    assert r("${initial}/${final}", pingpong, automaton, node=1) == "true/false"


def test_if_truthiness(automaton, pingpong):
    assert r("@if state {yes} @else {no}", pingpong, automaton) == "yes"
    empty = parse_model(automaton, "automaton E { }")
    assert r("@if state {yes} @else {no}", empty, automaton) == "no"
    assert r("@if toState {linked}", pingpong, automaton, node=3) == "linked"
    assert r("@if final {F}", pingpong, automaton, node=1) == ""


def test_loop_shadowing(automaton, pingpong):
    out = r("@foreach x in state {@foreach x in x.outgoing {${x.activate};}}", pingpong, automaton)
    assert out == "serve;return;"


def test_include(automaton, pingpong):
    lib = {"row": parse_template("<${name}>")}
    out = r('@foreach t in transition {@include "row" with t.toState}', pingpong, automaton, library=lib)
    assert out == "<Pong><Ping>"


def test_node_interpolation_is_rejected(automaton, pingpong):
    with pytest.raises(DiagnosticError) as info:
        r("${toState}", pingpong, automaton, node=3)
    assert info.value.codes == ["E-GEN-011"]
    with pytest.raises(DiagnosticError) as info:
        r("${state}", pingpong, automaton)
    assert info.value.codes == ["E-GEN-011"]


def test_unknown_segment(automaton, pingpong):
    with pytest.raises(DiagnosticError) as info:
        r("${nickname}", pingpong, automaton)
    assert info.value.codes == ["E-GEN-010"]
    with pytest.raises(DiagnosticError) as info:
        r("${name.length}", pingpong, automaton)
    assert info.value.codes == ["E-GEN-010"]


def test_unknown_include(automaton, pingpong):
    with pytest.raises(DiagnosticError) as info:
        r('@include "nope" with state', pingpong, automaton, library={})
    assert info.value.codes == ["E-GEN-012"]


def test_include_recursion_limit(automaton, pingpong):
    lib = {}
    lib["loop"] = parse_template('@foreach t in outgoing {@include "loop" with t.toState}')
    with pytest.raises(DiagnosticError) as info:
        render(lib["loop"], 1, pingpong, automaton, lib)
    assert info.value.codes == ["E-GEN-013"]


def test_rendering_is_pure(automaton, pingpong):
    before = hashlib.sha256(model_to_json(pingpong).encode()).hexdigest()
    first = render(tmpl("dot"), pingpong.root, pingpong, automaton)
    second = render(tmpl("dot"), pingpong.root, pingpong, automaton)
    assert first == second
    assert hashlib.sha256(model_to_json(pingpong).encode()).hexdigest() == before


# -- workflows -----------------------------------------------------------------------


def cfg(*steps, strict=False):
    return WorkflowConfig(tuple(WorkflowStep(*s) for s in steps), str(TEMPLATES), strict)


def test_dot_workflow_matches_golden(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(("dot", "root", "${name}.dot")), pingpong, automaton, tmp_path)
    assert report.files == ["PingPong.dot"] and report.diagnostics == []
    assert (tmp_path / "PingPong.dot").read_bytes() == (GOLDEN / "PingPong.dot").read_bytes()


def test_empty_workflow(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(), pingpong, automaton, tmp_path)
    assert report.files == [] and report.diagnostics == []
    assert list(tmp_path.iterdir()) == []


def test_selector_per_class_with_directories(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(("state", "State", "states/${name}.txt")), pingpong, automaton, tmp_path)
    assert report.files == ["states/Ping.txt", "states/Pong.txt"]
    assert (tmp_path / "states" / "Ping.txt").read_text() == "state Ping\n  on serve goto Pong\n"


def test_selector_without_instances(automaton, tmp_path):
    m = parse_model(automaton, "automaton E { }")
    report = run_workflow(cfg(("state", "State", "${name}.txt")), m, automaton, tmp_path)
    assert report.files == [] and report.diagnostics == []


def test_escaping_output_path(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(("dot", "root", "../${name}.dot")), pingpong, automaton, tmp_path / "out")
    assert [d.code for d in report.diagnostics] == ["E-GEN-021"]
    assert not (tmp_path / "PingPong.dot").exists()


def test_duplicate_output_paths(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(("state", "State", "same.txt")), pingpong, automaton, tmp_path)
    assert [d.code for d in report.diagnostics] == ["E-GEN-022"]
    assert report.files == []


def test_non_strict_aggregates_and_continues(automaton, tmp_path):
    m = parse_model(automaton, automaton_text(["A", "B"], [("A", "x", "B")]))
    assert resolve_references(m, automaton) == []
    steps = [("state", "Transition", "${activate}.txt"), ("dot", "root", "${name}.dot")]
    report = run_workflow(cfg(*steps), m, automaton, tmp_path)
    assert [d.code for d in report.diagnostics] == ["E-GEN-010"]
    assert report.files == ["M.dot"]


def test_strict_stops_and_writes_nothing(automaton, pingpong, tmp_path):
    steps = [("dot", "root", "${name}.dot"), ("missing", "root", "x.txt"), ("dot", "root", "y.dot")]
    report = run_workflow(cfg(*steps, strict=True), pingpong, automaton, tmp_path)
    assert [d.code for d in report.diagnostics] == ["E-GEN-012"]
    assert report.files == [] and list(tmp_path.iterdir()) == []


def test_multiple_models(automaton, pingpong, tmp_path):
    other = parse_model(automaton, automaton_text(["Q"], [("Q", "loop", "Q")], name="Loop"))
    assert resolve_references(other, automaton) == []
    report = run_workflow(cfg(("dot", "root", "${name}.dot")), [pingpong, other], automaton, tmp_path)
    assert report.files == ["PingPong.dot", "Loop.dot"]


def test_io_failure_is_reported(automaton, pingpong, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    report = run_workflow(cfg(("dot", "root", "file/${name}.dot")), pingpong, automaton, tmp_path)
    assert [d.code for d in report.diagnostics] == ["E-GEN-020"]


def test_workflow_config_from_json(tmp_path):
    data = json.loads((FIXTURES / "dot_workflow.json").read_text())
    c = WorkflowConfig.from_json(data, tmp_path)
    assert c.steps == (WorkflowStep("dot", "root", "${name}.dot"),)
    assert c.template_dir == str(tmp_path / "templates") and c.strict is True
    with pytest.raises(ValueError):
        WorkflowConfig.from_json({"steps": [{"selector": "root"}]})


def test_report_json(automaton, pingpong, tmp_path):
    report = run_workflow(cfg(("dot", "root", "${name}.dot")), pingpong, automaton, tmp_path)
    assert report.to_json() == {"files": ["PingPong.dot"], "diagnostics": []}
