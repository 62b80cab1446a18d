"""Stage sequencing and staleness tracking for a pipeline run.

The stage graph is a fixed chain: workflow analysis feeds tool selection,
which feeds functionality codegen, UI codegen, and tool labeling.  Running
or editing a stage marks everything downstream stale; a stage can only run
once its upstream artifacts are present and current.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    ScaffoldSpec,
    SoftwareProfile,
    StructuralError,
    TaskDescription,
    ToolSpec,
    WorkflowStage,
    canonical_bytes,
    canonicalize,
    content_hash,
)
from .parsing import (
    Issue,
    extract_code_blocks,
    parse_labeling_response,
    parse_tool_response,
    parse_workflow_response,
    repair_or_fail,
)
from .prompts import (
    STAGE_CHAIN,
    PromptText,
    RawResponse,
    StageKind,
    assemble_codegen_prompt,
    assemble_functionality_prompt,
    assemble_labeling_prompt,
    assemble_tool_prompt,
    assemble_workflow_prompt,
)
from .transport import LLMTransport


class SequencingError(RuntimeError):
    """A stage was run before its upstream artifacts were ready."""

    def __init__(self, kind: StageKind, blocking: list[StageKind]):
        names = ", ".join(k.value for k in blocking)
        super().__init__(f"cannot run {kind.value}: blocked by [{names}]")
        self.kind = kind
        self.blocking = blocking


class ParseExhaustedError(RuntimeError):
    """The repair loop ran out of attempts for a stage."""

    def __init__(self, kind: StageKind, issues: list[Issue]):
        detail = "; ".join(i.message for i in issues if i.severity.value == "fatal")
        super().__init__(f"{kind.value} response unparseable: {detail}")
        self.kind = kind
        self.issues = issues


def upstream_of(kind: StageKind) -> tuple[StageKind, ...]:
    index = STAGE_CHAIN.index(kind)
    return STAGE_CHAIN[:index]


def downstream_of(kind: StageKind) -> tuple[StageKind, ...]:
    index = STAGE_CHAIN.index(kind)
    return STAGE_CHAIN[index + 1 :]


@dataclass
class StageArtifact:
    kind: StageKind
    payload: object
    content_hash: str


@dataclass
class PipelineState:
    """Per-run record of stage artifacts, transcripts, and staleness."""

    task: TaskDescription
    artifacts: dict[StageKind, StageArtifact] = field(default_factory=dict)
    transcripts: list[tuple[PromptText, RawResponse]] = field(default_factory=list)
    stale: set[StageKind] = field(default_factory=set)
    transcript_offset: int = 0  # prior transcripts in the workspace, for stable ids

    def payload(self, kind: StageKind) -> object:
        return self.artifacts[kind].payload


def artifact_bytes(kind: StageKind, payload: object) -> bytes:
    """Canonical byte form of a stage artifact, used for files and hashes."""
    if kind is StageKind.WORKFLOW_ANALYSIS:
        return canonical_bytes([stage.to_dict() for stage in payload])
    if kind is StageKind.TOOL_SELECTION:
        return canonical_bytes([tool.to_dict() for tool in payload])
    if kind is StageKind.FUNCTIONALITY_CODEGEN:
        return canonical_bytes({tool_id: code for tool_id, code in sorted(payload.items())})
    if kind is StageKind.UI_CODEGEN:
        return str(payload).encode("utf-8")
    if kind is StageKind.TOOL_LABELING:
        return canonical_bytes({tool_id: terms for tool_id, terms in sorted(payload.items())})
    raise StructuralError(f"unknown stage kind {kind}")


def _assign_code_blocks(
    blocks: list[tuple[str | None, str]], tools: list[ToolSpec]
) -> tuple[dict[str, str], list[str]]:
    by_label = {tool.label.casefold(): tool.tool_id for tool in tools}
    assigned: dict[str, str] = {}
    notes: list[str] = []
    for hint, code in blocks:
        if hint is None:
            notes.append("unassigned code block held back")
            continue
        tool_id = by_label.get(hint.casefold())
        if tool_id is None:
            notes.append(f"code block for unknown tool {hint!r} held back")
            continue
        if tool_id in assigned:
            notes.append(f"extra code block for {hint!r} ignored")
            continue
        assigned[tool_id] = code
    return assigned, notes


def run_stage(
    state: PipelineState,
    kind: StageKind,
    transport: LLMTransport,
    profile: SoftwareProfile,
    max_repairs: int = 2,
) -> PipelineState:
    """Run one stage: assemble, complete, parse (with repair), store.

    Upstream artifacts must be present and current; downstream artifacts
    are marked stale.  The upstream artifacts themselves are not touched.
    """
    blocking = [
        up
        for up in upstream_of(kind)
        if up not in state.artifacts or up in state.stale
    ]
    if blocking:
        raise SequencingError(kind, blocking)

    def complete(prompt: PromptText) -> RawResponse:
        text = transport.send(prompt)
        raw = RawResponse(
            text=text,
            transcript_id=f"t{state.transcript_offset + len(state.transcripts) + 1:04d}",
            stage_kind=kind,
        )
        state.transcripts.append((prompt, raw))
        return raw

    if kind is StageKind.WORKFLOW_ANALYSIS:
        prompt = assemble_workflow_prompt(state.task, profile)
        parse = parse_workflow_response
    elif kind is StageKind.TOOL_SELECTION:
        stages = state.payload(StageKind.WORKFLOW_ANALYSIS)
        prompt = assemble_tool_prompt(stages, profile)
        parse = lambda raw: parse_tool_response(raw, stages)
    elif kind is StageKind.FUNCTIONALITY_CODEGEN:
        stages = state.payload(StageKind.WORKFLOW_ANALYSIS)
        tools = state.payload(StageKind.TOOL_SELECTION)
        prompt = assemble_functionality_prompt(tools, stages, profile)
        labels = [tool.label for tool in tools]
        parse = lambda raw: extract_code_blocks(raw, labels)
    elif kind is StageKind.UI_CODEGEN:
        stages = state.payload(StageKind.WORKFLOW_ANALYSIS)
        tools = state.payload(StageKind.TOOL_SELECTION)
        prompt = assemble_codegen_prompt(tools, stages, profile)
        parse = extract_code_blocks
    elif kind is StageKind.TOOL_LABELING:
        stages = state.payload(StageKind.WORKFLOW_ANALYSIS)
        tools = state.payload(StageKind.TOOL_SELECTION)
        prompt = assemble_labeling_prompt(tools, stages, profile)
        parse = lambda raw: parse_labeling_response(raw, tools, stages)
    else:
        raise StructuralError(f"unknown stage kind {kind}")

    outcome = repair_or_fail(prompt, complete(prompt), parse, complete, max_repairs)
    if not outcome.ok:
        raise ParseExhaustedError(kind, outcome.issues)

    if kind is StageKind.FUNCTIONALITY_CODEGEN:
        tools = state.payload(StageKind.TOOL_SELECTION)
        payload, _ = _assign_code_blocks(outcome.payload, tools)
    elif kind is StageKind.UI_CODEGEN:
        payload = "\n".join(code for _, code in outcome.payload)
    else:
        payload = outcome.payload

    state.artifacts[kind] = StageArtifact(
        kind=kind,
        payload=payload,
        content_hash=content_hash(artifact_bytes(kind, payload)),
    )
    state.stale.discard(kind)
    state.stale.update(downstream_of(kind))
    return state


def mark_edited(state: PipelineState, kind: StageKind, payload: object) -> PipelineState:
    """Replace a stage artifact with human-edited content.

    The edited stage itself is authoritative (never stale); everything
    downstream must re-run.
    """
    state.artifacts[kind] = StageArtifact(
        kind=kind,
        payload=payload,
        content_hash=content_hash(artifact_bytes(kind, payload)),
    )
    state.stale.discard(kind)
    state.stale.update(downstream_of(kind))
    return state


def assemble_spec(
    task: TaskDescription,
    stages: list[WorkflowStage] | tuple[WorkflowStage, ...],
    tools: list[ToolSpec] | tuple[ToolSpec, ...],
    functionality: dict[str, str],
    labels: dict[str, list[str]],
    version: int = 1,
) -> ScaffoldSpec:
    """Fold the five stage artifacts into one canonical spec."""
    from dataclasses import replace

    bound = tuple(
        replace(
            tool,
            functionality_code=functionality.get(tool.tool_id, ""),
            concepts=tuple(labels.get(tool.tool_id, ())),
        )
        for tool in tools
    )
    spec = ScaffoldSpec(task=task, stages=tuple(stages), tools=bound, version=version)
    return canonicalize(spec)
