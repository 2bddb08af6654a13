"""Declarative multi-file generation workflows."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from gramforge.codegen.render import Renderer
from gramforge.codegen.template import Interp, Literal, Template, parse_template
from gramforge.diagnostics import Diagnostic, DiagnosticError, error
from gramforge.runtime.model import Model

ROOT_SELECTOR = "root"


@dataclass(frozen=True)
class WorkflowStep:
    template_name: str
    selector: str
    output_pattern: str


@dataclass(frozen=True)
class WorkflowConfig:
    steps: tuple[WorkflowStep, ...] = ()
    template_dir: str = "."
    strict: bool = False

    @classmethod
    def from_json(cls, data: dict, base_dir: str | os.PathLike | None = None) -> "WorkflowConfig":
        """Build a config from its JSON form.

        ``templateDir`` is taken relative to ``base_dir`` when given.

        Raises:
            ValueError: if a required key is missing or has the wrong type.
        """
        if not isinstance(data, dict):
            raise ValueError("workflow must be a JSON object")
        steps = []
        for raw in data.get("steps", []):
            try:
                step = WorkflowStep(raw["templateName"], raw.get("selector", ROOT_SELECTOR), raw["outputPattern"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed workflow step: {exc!r}") from None
            if not all(isinstance(v, str) for v in (step.template_name, step.selector, step.output_pattern)):
                raise ValueError("workflow step fields must be strings")
            steps.append(step)
        template_dir = data.get("templateDir", ".")
        strict = data.get("strict", False)
        if not isinstance(template_dir, str) or not isinstance(strict, bool):
            raise ValueError("templateDir must be a string and strict a boolean")
        if base_dir is not None:
            template_dir = os.path.join(base_dir, template_dir)
        return cls(tuple(steps), template_dir, strict)


@dataclass
class GenerationReport:
    files: list[str] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"files": list(self.files), "diagnostics": [d.to_json() for d in self.diagnostics]}


class _TemplateDir:
    """Lazy ``<dir>/<name>.mct`` loader; parse failures are remembered."""

    def __init__(self, directory: str) -> None:
        self.directory = directory
        self.cache: dict[str, Template | None] = {}
        self.failures: dict[str, list[Diagnostic]] = {}

    def __call__(self, name: str) -> Template | None:
        if name in self.cache:
            if name in self.failures:
                raise DiagnosticError(self.failures[name])
            return self.cache[name]
        path = os.path.join(self.directory, f"{name}.mct")
        template = None
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except FileNotFoundError:
            pass
        except (OSError, UnicodeDecodeError) as exc:
            self.failures[name] = [error("E-GEN-020", f"cannot read template {name}: {exc}")]
        else:
            try:
                template = parse_template(text, f"{name}.mct")
            except DiagnosticError as exc:
                self.failures[name] = exc.diagnostics
        self.cache[name] = template
        if name in self.failures:
            raise DiagnosticError(self.failures[name])
        return template


def _output_template(pattern: str) -> Template:
    t = parse_template(pattern, "<outputPattern>")
    if not all(isinstance(s, (Literal, Interp)) for s in t.body):
        raise DiagnosticError(
            [error("E-GEN-002", f"output pattern '{pattern}' may only contain text and ${{path}}")]
        )
    return t


def _safe_relative(path: str) -> bool:
    if not path or "\\" in path or "\0" in path:
        return False
    p = PurePosixPath(path)
    return not p.is_absolute() and ".." not in p.parts and p.name not in ("", ".")


def run_workflow(cfg: WorkflowConfig, models, lang, out_dir: str | os.PathLike) -> GenerationReport:
    """Render every step of ``cfg`` over ``models`` and write the results.

    ``models`` is one model or a list of models parsed against ``lang``.
    All rendering happens before any file is written. With ``strict`` the
    run stops at the first error and writes nothing; otherwise failing
    nodes are skipped and their diagnostics collected. Duplicate targets
    (E-GEN-022) or escaping paths (E-GEN-021) are never written.
    """
    if isinstance(models, Model):
        models = [models]
    report = GenerationReport()
    loader = _TemplateDir(cfg.template_dir)
    outputs: list[tuple[str, str]] = []

    def fail(diags) -> bool:
        report.diagnostics.extend(diags)
        return cfg.strict

    for step in cfg.steps:
        try:
            template = loader(step.template_name)
            if template is None:
                raise DiagnosticError(
                    [error("E-GEN-012", f"unknown template '{step.template_name}' in {cfg.template_dir}")]
                )
            pattern = _output_template(step.output_pattern)
            if step.selector != ROOT_SELECTOR and step.selector not in lang.schema:
                raise DiagnosticError([error("E-GEN-010", f"unknown selector class '{step.selector}'")])
        except DiagnosticError as exc:
            if fail(exc.diagnostics):
                return report
            continue
        for m in models:
            renderer = Renderer(m, lang, loader)
            if step.selector == ROOT_SELECTOR:
                selected = [m.nodes[m.root]]
            else:
                selected = m.nodes_of(set(lang.schema.subclasses(step.selector)))
            for node in selected:
                try:
                    target = renderer.render(pattern, node)
                    text = renderer.render(template, node)
                except DiagnosticError as exc:
                    if fail(exc.diagnostics):
                        return report
                    continue
                if not _safe_relative(target):
                    if fail([error("E-GEN-021", f"output path '{target}' is empty or escapes the output directory", node.span)]):
                        return report
                    continue
                outputs.append((target, text))

    counts: dict[str, int] = {}
    for target, _ in outputs:
        counts[target] = counts.get(target, 0) + 1
    duplicates = sorted(t for t, c in counts.items() if c > 1)
    for target in duplicates:
        if fail([error("E-GEN-022", f"output path '{target}' is produced {counts[target]} times")]):
            return report

    out_root = Path(out_dir)
    for target, text in outputs:
        if target in duplicates:
            continue
        dest = out_root / target
        try:
            dest.parent.mkdir(parents=True, exist_ok=True)
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            if fail([error("E-GEN-020", f"cannot write {target}: {exc.strerror or exc}")]):
                return report
            continue
        report.files.append(target)
    return report


def load_workflow(path: str | os.PathLike) -> WorkflowConfig:
    """Read a workflow JSON file; ``templateDir`` is relative to its directory."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return WorkflowConfig.from_json(data, os.path.dirname(os.path.abspath(path)))
