"""Parsers that turn raw model responses into typed artifacts.

Model output drifts, so parsing is lenient on the way in (bullets or
numbering, bold markers, stray prose) and strict on the way out: a parser
never invents content.  Every textual field in a payload is a verbatim
slice of the raw response, trimmed only of whitespace and list punctuation.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Callable, Generic, TypeVar

from .model import (
    CONTROL_KINDS,
    ComplexityLevel,
    DomainConcept,
    NativeMapping,
    StructuralError,
    ToolSpec,
    WorkflowStage,
    tool_id_for,
)
from .prompts import PromptText, RawResponse, StageKind

T = TypeVar("T")


class Severity(enum.Enum):
    FATAL = "fatal"
    WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: Severity
    message: str
    location: str = ""

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "message": self.message,
            "location": self.location,
        }


@dataclass
class ParseOutcome(Generic[T]):
    """Parsed payload plus any issues; payload present iff nothing fatal."""

    payload: T | None
    issues: list[Issue] = field(default_factory=list)

    def __post_init__(self) -> None:
        has_fatal = any(i.severity is Severity.FATAL for i in self.issues)
        if has_fatal and self.payload is not None:
            raise StructuralError("outcome with fatal issues cannot carry a payload")
        if not has_fatal and self.payload is None:
            raise StructuralError("outcome without fatal issues must carry a payload")

    @property
    def ok(self) -> bool:
        return self.payload is not None

    @property
    def fatal_issues(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.FATAL]


def _warn(message: str, location: str = "") -> Issue:
    return Issue(Severity.WARNING, message, location)


def _fatal(message: str, location: str = "") -> Issue:
    return Issue(Severity.FATAL, message, location)


_BULLET_RE = re.compile(r"^\s*(?:[-–—*•]|(\d+)[.)])\s+(.*)$")
_BOLD_RE = re.compile(r"(\*\*|__)")
_TERM_SEP_RE = re.compile(r"\s+[—–]\s+|\s+-\s+|:\s+")


@dataclass(frozen=True)
class _Item:
    number: int | None
    text: str
    line: int


def _strip_bold(text: str) -> str:
    return _BOLD_RE.sub("", text)


def split_items(text: str) -> list[_Item]:
    """Split a response into list items, joining continuation lines."""
    items: list[_Item] = []
    current: list[str] | None = None
    number: int | None = None
    start_line = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _BULLET_RE.match(line)
        if match:
            if current is not None:
                items.append(_Item(number, " ".join(current).strip(), start_line))
            number = int(match.group(1)) if match.group(1) else None
            current = [match.group(2).strip()]
            start_line = lineno
        elif current is not None:
            stripped = line.strip()
            if stripped:
                current.append(stripped)
            else:
                items.append(_Item(number, " ".join(current).strip(), start_line))
                current = None
    if current is not None:
        items.append(_Item(number, " ".join(current).strip(), start_line))
    return items


def _trim_field(text: str) -> str:
    return text.strip().strip(",").strip()


def _split_concepts(blob: str, location: str, issues: list[Issue]) -> list[DomainConcept]:
    concepts: list[DomainConcept] = []
    for segment in blob.split(";"):
        segment = _trim_field(segment.rstrip("."))
        if not segment:
            continue
        match = _TERM_SEP_RE.search(segment)
        if match is None:
            if concepts:
                # Continuation of the previous explanation, split by a stray ';'.
                last = concepts.pop()
                concepts.append(
                    DomainConcept(last.term, f"{last.explanation}; {segment}")
                )
            else:
                issues.append(
                    _warn(f"concept segment {segment!r} has no explanation", location)
                )
            continue
        term = segment[: match.start()].strip()
        explanation = segment[match.end() :].strip()
        if not term or not explanation:
            issues.append(_warn(f"could not split concept {segment!r}", location))
            continue
        concepts.append(DomainConcept(term, explanation))
    return concepts


_CONCEPT_MARKER_RE = re.compile(r"[,.]?\s*Domain Concepts?\s*[:：]\s*", re.IGNORECASE)


def parse_workflow_response(raw: RawResponse) -> ParseOutcome[list[WorkflowStage]]:
    """Parse the workflow analysis response into ordered stages."""
    if raw.stage_kind is not StageKind.WORKFLOW_ANALYSIS:
        raise StructuralError(f"wrong stage kind {raw.stage_kind} for workflow parse")
    issues: list[Issue] = []
    stages: list[WorkflowStage] = []
    seen_names: set[str] = set()
    for item in split_items(raw.text):
        location = f"line {item.line}"
        text = _strip_bold(item.text)
        if ":" not in text:
            issues.append(_warn(f"skipped item without stage delimiter: {text!r}", location))
            continue
        name, _, rest = text.partition(":")
        name = _trim_field(name)
        if not name:
            issues.append(_warn("skipped item with empty stage name", location))
            continue
        key = name.casefold()
        if key in seen_names:
            issues.append(_warn(f"duplicate stage {name!r} dropped", location))
            continue
        seen_names.add(key)
        marker = _CONCEPT_MARKER_RE.search(rest)
        if marker:
            description = _trim_field(rest[: marker.start()])
            concepts = _split_concepts(rest[marker.end() :], location, issues)
        else:
            description = _trim_field(rest)
            concepts = []
        if not description:
            issues.append(_warn(f"stage {name!r} has no description", location))
        position = len(stages) + 1
        if item.number is not None and item.number != position:
            issues.append(
                _warn(f"item numbered {item.number} re-indexed to {position}", location)
            )
        stages.append(
            WorkflowStage(
                stage_id=position,
                name=name,
                description=description,
                concepts=tuple(concepts),
            )
        )
    if not stages:
        issues.append(_fatal("no recognizable workflow stage items", "document"))
        return ParseOutcome(None, issues)
    return ParseOutcome(stages, issues)


_COMPLEXITY_MARKER_RE = re.compile(
    r"[,.]?\s*Complexity(?:\s+Level)?\s*[:：]\s*", re.IGNORECASE
)
_NATIVE_MARKER_RE = re.compile(r"[,.]?\s*Native(?:\s+Access)?\s*[:：]\s*", re.IGNORECASE)
_CONTROL_MARKER_RE = re.compile(r"[,.]?\s*Control(?:\s+kind)?\s*[:：]\s*", re.IGNORECASE)
_LEVEL_WORD_RE = re.compile(r"\b(basic|intermediate|advanced)\b", re.IGNORECASE)
_SHORTCUT_RE = re.compile(r"^[A-Za-z0-9]+(?:[+-][A-Za-z0-9]+)*$")


def classify_native_part(part: str) -> str:
    """Classify one native-access segment as shortcut, menu path, or mouse op."""
    part = part.strip()
    if ">" in part:
        return "menu_path"
    if " " not in part and _SHORTCUT_RE.match(part) and ("+" in part or len(part) <= 5):
        return "shortcut"
    return "mouse_op"


def parse_native(value: str) -> NativeMapping | None:
    fields: dict[str, str] = {}
    for part in value.split("|"):
        part = part.strip().rstrip(".")
        if not part:
            continue
        kind = classify_native_part(part)
        if kind not in fields:
            fields[kind] = part
    if not fields:
        return None
    return NativeMapping(
        shortcut=fields.get("shortcut"),
        menu_path=fields.get("menu_path"),
        mouse_op=fields.get("mouse_op"),
    )


def _markers_in(text: str) -> list[tuple[int, str, re.Match]]:
    found = []
    for name, pattern in (
        ("complexity", _COMPLEXITY_MARKER_RE),
        ("native", _NATIVE_MARKER_RE),
        ("control", _CONTROL_MARKER_RE),
    ):
        match = pattern.search(text)
        if match:
            found.append((match.start(), name, match))
    found.sort(key=lambda entry: entry[0])
    return found


def _match_stage(field_text: str, stages) -> tuple[WorkflowStage | None, bool]:
    """Match a stage by name; returns (stage, ambiguous)."""
    wanted = field_text.strip().casefold()
    for stage in stages:
        if stage.name.strip().casefold() == wanted:
            return stage, False
    hits = []
    for stage in stages:
        pos = wanted.find(stage.name.strip().casefold())
        if pos >= 0:
            hits.append((pos, stage))
    if not hits:
        return None, False
    hits.sort(key=lambda h: h[0])
    return hits[0][1], len(hits) > 1


def parse_tool_response(
    raw: RawResponse, stages: list[WorkflowStage] | tuple[WorkflowStage, ...]
) -> ParseOutcome[list[ToolSpec]]:
    """Parse the tool selection response, binding each tool to its stage."""
    if raw.stage_kind is not StageKind.TOOL_SELECTION:
        raise StructuralError(f"wrong stage kind {raw.stage_kind} for tool parse")
    issues: list[Issue] = []
    tools: list[ToolSpec] = []
    labels_per_stage: dict[int, set[str]] = {}
    for item in split_items(raw.text):
        location = f"line {item.line}"
        text = _strip_bold(item.text)
        if ":" not in text:
            issues.append(_warn(f"skipped item without stage delimiter: {text!r}", location))
            continue
        stage_field, _, rest = text.partition(":")
        stage, ambiguous = _match_stage(stage_field, stages)
        if stage is None:
            issues.append(
                _fatal(f"tool references unknown stage {stage_field.strip()!r}", location)
            )
            return ParseOutcome(None, issues)
        if ambiguous:
            issues.append(
                _warn(f"item names several stages; bound to {stage.name!r}", location)
            )

        markers = _markers_in(rest)
        head_end = markers[0][0] if markers else len(rest)
        head = rest[:head_end]
        sep = _TERM_SEP_RE.search(head)
        if sep:
            label = _trim_field(head[: sep.start()])
            rationale = head[sep.end() :].strip()
        else:
            label, _, tail = head.partition(",")
            label = _trim_field(label)
            rationale = tail.strip()
        if not label:
            issues.append(_warn("skipped item with empty tool label", location))
            continue

        marker_values: dict[str, str] = {}
        for index, (start, name, match) in enumerate(markers):
            end = markers[index + 1][0] if index + 1 < len(markers) else len(rest)
            marker_values[name] = rest[match.end() : end].strip()

        level_source = marker_values.get("complexity", "")
        level_match = _LEVEL_WORD_RE.search(level_source or rest)
        if level_match:
            complexity = ComplexityLevel.parse(level_match.group(1))
        else:
            detail = f"unknown complexity {level_source.rstrip('.')!r}" if level_source else "no complexity level"
            issues.append(
                _warn(f"{detail} for {label!r}; defaulting to advanced", location)
            )
            complexity = ComplexityLevel.ADVANCED

        native = None
        if "native" in marker_values:
            native = parse_native(marker_values["native"])

        control_kind = "button"
        if "control" in marker_values:
            token = marker_values["control"].strip().rstrip(".").lower().replace(" ", "_")
            if token in CONTROL_KINDS:
                control_kind = token
            else:
                issues.append(
                    _warn(f"unknown control kind {token!r} for {label!r}; using button", location)
                )

        stage_labels = labels_per_stage.setdefault(stage.stage_id, set())
        if label.casefold() in stage_labels:
            issues.append(
                _warn(f"duplicate tool {label!r} in stage {stage.name!r} dropped", location)
            )
            continue
        stage_labels.add(label.casefold())

        tools.append(
            ToolSpec(
                tool_id=tool_id_for(stage.name, label),
                label=label,
                stage_id=stage.stage_id,
                complexity=complexity,
                rationale=rationale,
                native=native,
                control_kind=control_kind,
            )
        )
    if not tools:
        issues.append(_fatal("no recognizable tool items", "document"))
        return ParseOutcome(None, issues)
    return ParseOutcome(tools, issues)


_FENCE_RE = re.compile(r"^```([^\n`]*)\n(.*?)^```\s*$", re.MULTILINE | re.DOTALL)


def extract_code_blocks(
    raw: RawResponse, labels: list[str] | tuple[str, ...] | None = None
) -> ParseOutcome[list[tuple[str | None, str]]]:
    """Extract fenced code regions in document order.

    For functionality responses, each block is attributed to the nearest
    preceding mention of a known tool label; blocks with no attributable
    label are kept with a ``None`` hint and a warning.
    """
    if raw.stage_kind not in (StageKind.FUNCTIONALITY_CODEGEN, StageKind.UI_CODEGEN):
        raise StructuralError(f"wrong stage kind {raw.stage_kind} for code extraction")
    issues: list[Issue] = []
    blocks: list[tuple[str | None, str]] = []
    last_end = 0
    for match in _FENCE_RE.finditer(raw.text):
        code = match.group(2)
        hint: str | None = None
        if labels:
            prose = raw.text[last_end : match.start()]
            best = -1
            for label in labels:
                pos = prose.casefold().rfind(label.casefold())
                if pos > best:
                    best = pos
                    hint = label
            if hint is None:
                line = raw.text.count("\n", 0, match.start()) + 1
                issues.append(_warn("code block with no attributable tool", f"line {line}"))
        blocks.append((hint, code))
        last_end = match.end()
    if not blocks:
        issues.append(_fatal("no fenced code blocks in response", "document"))
        return ParseOutcome(None, issues)
    return ParseOutcome(blocks, issues)


def parse_labeling_response(
    raw: RawResponse,
    tools: list[ToolSpec] | tuple[ToolSpec, ...],
    stages: list[WorkflowStage] | tuple[WorkflowStage, ...],
) -> ParseOutcome[dict[str, list[str]]]:
    """Parse tool-to-concept labeling lines into a tool_id -> terms map."""
    if raw.stage_kind is not StageKind.TOOL_LABELING:
        raise StructuralError(f"wrong stage kind {raw.stage_kind} for labeling parse")
    issues: list[Issue] = []
    by_label = {tool.label.strip().casefold(): tool for tool in tools}
    known_terms = {
        concept.term.strip().casefold()
        for stage in stages
        for concept in stage.concepts
    }
    mapping: dict[str, list[str]] = {}
    for item in split_items(raw.text):
        location = f"line {item.line}"
        text = _strip_bold(item.text)
        if ":" not in text:
            issues.append(_warn(f"skipped label line without delimiter: {text!r}", location))
            continue
        label, _, tail = text.partition(":")
        tool = by_label.get(label.strip().casefold())
        if tool is None:
            issues.append(_warn(f"labeling for unknown tool {label.strip()!r}", location))
            continue
        terms: list[str] = []
        for chunk in re.split(r"[;,]", tail):
            term = _trim_field(chunk.rstrip("."))
            if not term:
                continue
            if term.casefold() not in known_terms:
                issues.append(
                    _warn(f"tool {tool.label!r} labeled with unknown concept {term!r}", location)
                )
                continue
            if term.casefold() not in (t.casefold() for t in terms):
                terms.append(term)
        mapping[tool.tool_id] = terms
    if not mapping:
        issues.append(_fatal("no recognizable labeling lines", "document"))
        return ParseOutcome(None, issues)
    for tool in tools:
        if tool.tool_id not in mapping:
            issues.append(_warn(f"tool {tool.label!r} received no concept labels"))
            mapping[tool.tool_id] = []
    return ParseOutcome(mapping, issues)


REPAIR_PREAMBLE = """\
Your previous response could not be parsed. Problems found:
<<ISSUES>>

Respond again, following the OUTPUT REQUIREMENTS exactly. Original request:

"""


def build_repair_prompt(prompt: PromptText, issues: list[Issue]) -> PromptText:
    quoted = "\n".join(f"- {issue.message}" for issue in issues)
    body = REPAIR_PREAMBLE.replace("<<ISSUES>>", quoted) + prompt.body
    return PromptText(
        stage_kind=prompt.stage_kind,
        body=body,
        substitutions={**prompt.substitutions, "ISSUES": quoted},
    )


def repair_or_fail(
    prompt: PromptText,
    raw: RawResponse,
    parse: Callable[[RawResponse], ParseOutcome],
    complete: Callable[[PromptText], RawResponse],
    max_attempts: int = 2,
) -> ParseOutcome:
    """Parse a response, re-prompting on fatal issues up to ``max_attempts``.

    The transport call that produced ``raw`` counts as the first attempt, so
    at most ``max_attempts`` transport calls happen in total for this stage.
    """
    if max_attempts < 1:
        raise StructuralError("max_attempts must be >= 1")
    history: list[Issue] = []
    outcome = parse(raw)
    attempt = 1
    while not outcome.ok and attempt < max_attempts:
        history.extend(outcome.issues)
        repair = build_repair_prompt(prompt, outcome.fatal_issues)
        raw = complete(repair)
        outcome = parse(raw)
        attempt += 1
    if outcome.ok:
        return outcome
    history.extend(outcome.issues)
    return ParseOutcome(None, history)
