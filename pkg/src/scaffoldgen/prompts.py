"""Prompt templates and assembly for the staged pipeline.

Assembly is pure string substitution: the same inputs always produce the
same prompt bytes.  Placeholders use ``<<NAME>>`` markers so task text
containing braces survives untouched; an assembled prompt must contain no
unresolved marker.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .model import (
    DomainConcept,
    SoftwareProfile,
    StructuralError,
    TaskDescription,
    ToolSpec,
    WorkflowStage,
)


class StageKind(enum.Enum):
    """The five pipeline stages, in chain order."""

    WORKFLOW_ANALYSIS = "workflow_analysis"
    TOOL_SELECTION = "tool_selection"
    FUNCTIONALITY_CODEGEN = "functionality_codegen"
    UI_CODEGEN = "ui_codegen"
    TOOL_LABELING = "tool_labeling"

    @classmethod
    def parse(cls, token: str) -> "StageKind":
        return cls(token.strip().lower())


STAGE_CHAIN: tuple[StageKind, ...] = (
    StageKind.WORKFLOW_ANALYSIS,
    StageKind.TOOL_SELECTION,
    StageKind.FUNCTIONALITY_CODEGEN,
    StageKind.UI_CODEGEN,
    StageKind.TOOL_LABELING,
)


@dataclass(frozen=True)
class PromptText:
    """A fully assembled prompt ready for the transport."""

    stage_kind: StageKind
    body: str
    substitutions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        leftover = _MARKER_RE.findall(self.body)
        if leftover:
            raise StructuralError(f"unresolved prompt placeholders: {leftover}")


@dataclass(frozen=True)
class RawResponse:
    """One raw transport response, as received."""

    text: str
    transcript_id: str
    stage_kind: StageKind

    def __post_init__(self) -> None:
        if not self.text:
            raise StructuralError("raw response text must be non-empty")


_PLACEHOLDER_NAMES = (
    "USER TASK DESCRIPTION",
    "SOFTWARE",
    "WORKFLOW STAGES",
    "SOFTWARE MANUALS",
    "SELECTED TOOLS",
    "SOFTWARE APIS",
    "EXAMPLE CODE",
    "DOMAIN CONCEPTS",
    "ISSUES",
)
_MARKER_RE = re.compile(
    "|".join(f"<<{re.escape(name)}>>" for name in _PLACEHOLDER_NAMES)
)


def _fill(template: str, substitutions: dict[str, str]) -> str:
    body = template
    for name, value in substitutions.items():
        body = body.replace(f"<<{name}>>", value)
    return body


WORKFLOW_ANALYSIS_TEMPLATE = """\
You are an expert task workflow analyst specializing in task decomposition for a user task. Your objective is to analyze the user task and break it down into its primary workflow stages.

TASK TO ANALYZE:
<<USER TASK DESCRIPTION>>

METHOD:
Decompose the task into logical stages that represent a typical, efficient workflow a user would follow within <<SOFTWARE>>. Focus on the major distinct phases, moving from initial setup/preparation towards finalization/review. Aim for a reasonable number of stages that capture the core workflow without excessive granularity. Also, extract domain concepts relevant to each workflow stage. For each domain concepts, provide a concise, straightforward explanation for a human to easily understand.

OUTPUT REQUIREMENTS:
Provide the output as a numbered list. Each list item must represent a distinct workflow stage and include:
A concise Stage Name.
A brief, one-sentence Stage Description clarifying the purpose of the stage.
Domain Concepts related to the stage.
A concise, straightforward Concept Explanation explaining the concept.

The output must be structured following the EXAMPLE OUTPUT FORMAT.

EXAMPLE OUTPUT FORMAT:
- Stage Name 1: Stage Description, Domain Concepts, Concept Explanation.
- Stage Name 2: Stage Description, Domain Concepts, Concept Explanation.
- ...
- Stage Name n: Stage Description, Domain Concepts, Concept Explanation.
"""

TOOL_SELECTION_TEMPLATE = """\
You are an expert user of <<SOFTWARE>>. Your task is to identify relevant tools in <<SOFTWARE>> to perform each workflow stage of WORKFLOW STAGES.

WORKFLOW STAGES:
<<WORKFLOW STAGES>>

METHOD:
Identify the keyboard operators, mouse operations, and UI interactions needed to perform each workflow stage. The identified tools must be common and essential for the workflow stage. Prioritize stable and frequently used tools. In addition, you need to assign a difficulty level for each identified tool by referring to SOFTWARE MANUALS. The difficulty level should be basic, intermediate, or advanced for a human user.

SOFTWARE MANUALS:
<<SOFTWARE MANUALS>>

OUTPUT REQUIREMENTS:
For each stage, output a bulleted list of selected tools, one tool per line. Each item in the list must include:
The Stage Name from the WORKFLOW STAGES.
The Selected Tool required to perform the task in the stage.
A Rationale that briefly and clearly explain why the selected tool is essential and necessary.
A Complexity Level of Basic, Intermediate, or Advanced for the selected tool.
The Native Access for the tool: its keyboard shortcut, menu path, or mouse operation.
The Control kind best suited to the tool: button, dropdown, radio, toggle, slider, or text_field.

EXAMPLE OUTPUT FORMAT:
- Stage Name 1: Selected Tool, Rationale, Complexity Level, Native Access, Control.
- Stage Name 2: Selected Tool, Rationale, Complexity Level, Native Access, Control.
- ...
- Stage Name n: Selected Tool, Rationale, Complexity Level, Native Access, Control.
"""

FUNCTIONALITY_CODEGEN_TEMPLATE = """\
You are a coding expert for <<SOFTWARE>>. Your task is to generate the code to implement each tool in SELECTED TOOLS based on <<SOFTWARE>> functionality.

SELECTED TOOLS:
<<SELECTED TOOLS>>

METHOD:
For each selected tool in SELECTED TOOLS, you need to translate the tool operation into the corresponding code execution by referring to SOFTWARE APIS. You must make sure the code can achieve the identical result using the tool. The code you generate should include all the required parameters and properties for the code to be correctly executed.

SOFTWARE APIS:
<<SOFTWARE APIS>>

OUTPUT REQUIREMENTS:
For each tool, output the tool label on its own line, followed by exactly one fenced code block implementing that tool's functionality. Each code block must be executable on its own.
"""

UI_CODEGEN_TEMPLATE = """\
You are a coding expert for <<SOFTWARE>>. Your task is to generate the code to implement SELECTED TOOLS based on <<SOFTWARE>> functionality and generate UI code to display SELECTED TOOLS in a user interface for user interaction.

SELECTED TOOLS:
<<SELECTED TOOLS>>

METHOD:
For each selected tool in SELECTED TOOLS, you need to translate the tool operation into the corresponding code execution by referring to SOFTWARE APIS. You must make sure the code can achieve the identical result using the tool. The code you generate should include all the required parameters and properties for the code to be correctly executed.

Next, you need to convert the code into interactive UI controls that can be used by a human. You can use buttons, dropdown menus, radio buttons, tabs, text field, switch toggles, or other UI controls that are supported by <<SOFTWARE>> and suitable for each tool. You must refer to SOFTWARE APIS to make sure the UI control can be implemented.

To organize the code for UI controls, you should refer to the EXAMPLE CODE to group the code for each UI control under their WORKFLOW STAGE and COMPLEXITY LEVEL. In addition, you should implement a mouse-over tooltip for each UI control with their relevant DOMAIN CONCEPT and CONCEPT DESCRIPTION from DOMAIN CONCEPTS.

DOMAIN CONCEPTS:
<<DOMAIN CONCEPTS>>

SOFTWARE APIS:
<<SOFTWARE APIS>>

EXAMPLE CODE WITH UI LAYOUT STRUCTURE:
<<EXAMPLE CODE>>

OUTPUT REQUIREMENTS:
Your output is a code script. The script should be standalone with all necessary imports, function definitions, and main function for it to be executable. You should refer to EXAMPLE CODE for the code script generation.
"""

TOOL_LABELING_TEMPLATE = """\
You are an expert user of <<SOFTWARE>>. Your task is to label each tool in SELECTED TOOLS with its relevant domain concepts so the concept descriptions can be shown as mouse-over tooltips.

SELECTED TOOLS:
<<SELECTED TOOLS>>

DOMAIN CONCEPTS:
<<DOMAIN CONCEPTS>>

METHOD:
For each tool, choose the domain concepts from DOMAIN CONCEPTS that best explain what the tool does within its workflow stage. Every tool must be labeled with at least one concept. Only use concepts listed under DOMAIN CONCEPTS.

OUTPUT REQUIREMENTS:
Output one line per tool, in the format:
- Tool Label: Concept Term; Concept Term; ...
"""


def render_stage_lines(stages: tuple[WorkflowStage, ...] | list[WorkflowStage]) -> str:
    """Render stages in the analysis output format, one bullet per stage."""
    lines = []
    for stage in stages:
        parts = [f"- {stage.name}: {stage.description}"]
        if stage.concepts:
            rendered = "; ".join(
                f"{c.term} — {c.explanation}" for c in stage.concepts
            )
            parts.append(f" Domain Concepts: {rendered}")
        lines.append("".join(parts))
    return "\n".join(lines)


def render_tool_lines(
    tools: tuple[ToolSpec, ...] | list[ToolSpec],
    stages: tuple[WorkflowStage, ...] | list[WorkflowStage],
) -> str:
    """Render tools in the selection output format, one bullet per tool."""
    names = {stage.stage_id: stage.name for stage in stages}
    lines = []
    for tool in tools:
        line = (
            f"- {names[tool.stage_id]}: {tool.label} — {tool.rationale}"
            f" Complexity Level: {tool.complexity.value.capitalize()}."
        )
        if tool.native is not None:
            line += f" Native: {tool.native.as_label()}."
        line += f" Control: {tool.control_kind}."
        lines.append(line)
    return "\n".join(lines)


def render_concept_lines(stages: tuple[WorkflowStage, ...] | list[WorkflowStage]) -> str:
    """Render the unique concept set, one ``term — explanation`` per line."""
    seen: set[str] = set()
    lines = []
    for stage in stages:
        for concept in stage.concepts:
            key = concept.term.strip().casefold()
            if key in seen:
                continue
            seen.add(key)
            lines.append(f"- {concept.term} — {concept.explanation}")
    return "\n".join(lines)


def _render_doc_refs(refs) -> str:
    if not refs:
        return "(none provided)"
    blocks = [f"{ref.title}:\n{ref.body}" for ref in refs]
    return "\n\n".join(blocks)


def assemble_workflow_prompt(task: TaskDescription, profile: SoftwareProfile) -> PromptText:
    substitutions = {
        "USER TASK DESCRIPTION": task.text,
        "SOFTWARE": profile.name,
    }
    return PromptText(
        stage_kind=StageKind.WORKFLOW_ANALYSIS,
        body=_fill(WORKFLOW_ANALYSIS_TEMPLATE, substitutions),
        substitutions=substitutions,
    )


def assemble_tool_prompt(
    stages: tuple[WorkflowStage, ...] | list[WorkflowStage],
    profile: SoftwareProfile,
) -> PromptText:
    if not stages:
        raise StructuralError("tool selection prompt needs at least one stage")
    substitutions = {
        "SOFTWARE": profile.name,
        "WORKFLOW STAGES": render_stage_lines(stages),
        "SOFTWARE MANUALS": _render_doc_refs(profile.manual_refs),
    }
    return PromptText(
        stage_kind=StageKind.TOOL_SELECTION,
        body=_fill(TOOL_SELECTION_TEMPLATE, substitutions),
        substitutions=substitutions,
    )


def assemble_functionality_prompt(
    tools: tuple[ToolSpec, ...] | list[ToolSpec],
    stages: tuple[WorkflowStage, ...] | list[WorkflowStage],
    profile: SoftwareProfile,
) -> PromptText:
    if not tools:
        raise StructuralError("functionality prompt needs at least one tool")
    substitutions = {
        "SOFTWARE": profile.name,
        "SELECTED TOOLS": render_tool_lines(tools, stages),
        "SOFTWARE APIS": _render_doc_refs(profile.api_refs),
    }
    return PromptText(
        stage_kind=StageKind.FUNCTIONALITY_CODEGEN,
        body=_fill(FUNCTIONALITY_CODEGEN_TEMPLATE, substitutions),
        substitutions=substitutions,
    )


def assemble_codegen_prompt(
    tools: tuple[ToolSpec, ...] | list[ToolSpec],
    stages: tuple[WorkflowStage, ...] | list[WorkflowStage],
    profile: SoftwareProfile,
) -> PromptText:
    """The UI code generation prompt: tools plus the example layout code."""
    if not tools:
        raise StructuralError("UI codegen prompt needs at least one tool")
    if not profile.example_layout_code.strip():
        raise StructuralError(f"profile {profile.name!r} has no example layout code")
    substitutions = {
        "SOFTWARE": profile.name,
        "SELECTED TOOLS": render_tool_lines(tools, stages),
        "DOMAIN CONCEPTS": render_concept_lines(stages),
        "SOFTWARE APIS": _render_doc_refs(profile.api_refs),
        "EXAMPLE CODE": profile.example_layout_code,
    }
    return PromptText(
        stage_kind=StageKind.UI_CODEGEN,
        body=_fill(UI_CODEGEN_TEMPLATE, substitutions),
        substitutions=substitutions,
    )


def assemble_labeling_prompt(
    tools: tuple[ToolSpec, ...] | list[ToolSpec],
    stages: tuple[WorkflowStage, ...] | list[WorkflowStage],
    profile: SoftwareProfile,
) -> PromptText:
    if not tools:
        raise StructuralError("labeling prompt needs at least one tool")
    substitutions = {
        "SOFTWARE": profile.name,
        "SELECTED TOOLS": render_tool_lines(tools, stages),
        "DOMAIN CONCEPTS": render_concept_lines(stages),
    }
    return PromptText(
        stage_kind=StageKind.TOOL_LABELING,
        body=_fill(TOOL_LABELING_TEMPLATE, substitutions),
        substitutions=substitutions,
    )
