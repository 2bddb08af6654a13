"""Template engine and generation workflows."""

from gramforge.codegen.render import MAX_INCLUDE_DEPTH, Renderer, render
from gramforge.codegen.template import (
    Foreach,
    If,
    Include,
    Interp,
    Literal,
    Template,
    parse_template,
)
from gramforge.codegen.workflow import (
    GenerationReport,
    WorkflowConfig,
    WorkflowStep,
    load_workflow,
    run_workflow,
)

__all__ = [
    "Foreach",
    "GenerationReport",
    "If",
    "Include",
    "Interp",
    "Literal",
    "MAX_INCLUDE_DEPTH",
    "Renderer",
    "Template",
    "WorkflowConfig",
    "WorkflowStep",
    "load_workflow",
    "parse_template",
    "render",
    "run_workflow",
]
