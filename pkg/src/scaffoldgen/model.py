"""Core data model for scaffolded-panel specs.

Every pipeline stage reads or writes pieces of a :class:`ScaffoldSpec`:
an ordered task workflow, the tools selected for each stage with their
complexity levels, the domain concepts surfaced as tooltips, and the
native-software mappings shown on tool labels.  All types are immutable
values; edits produce new specs.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass, field, replace


class StructuralError(ValueError):
    """A spec value violates one of its structural invariants."""


def slugify(text: str) -> str:
    """Lowercase, non-alphanumerics to underscores, repeats collapsed."""
    slug = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    return slug


def tool_id_for(stage_name: str, label: str) -> str:
    """Deterministic tool identifier derived from stage name and label."""
    return slugify(f"{stage_name} {label}")


class ComplexityLevel(enum.Enum):
    """The three disclosure levels, totally ordered."""

    BASIC = "basic"
    INTERMEDIATE = "intermediate"
    ADVANCED = "advanced"

    @property
    def rank(self) -> int:
        return _LEVEL_RANKS[self]

    def __lt__(self, other: "ComplexityLevel") -> bool:
        if not isinstance(other, ComplexityLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: "ComplexityLevel") -> bool:
        if not isinstance(other, ComplexityLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: "ComplexityLevel") -> bool:
        if not isinstance(other, ComplexityLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: "ComplexityLevel") -> bool:
        if not isinstance(other, ComplexityLevel):
            return NotImplemented
        return self.rank >= other.rank

    @classmethod
    def parse(cls, token: str) -> "ComplexityLevel":
        """Map a free-form token onto a level; raises KeyError if unknown."""
        return _LEVEL_TOKENS[token.strip().lower()]


_LEVEL_RANKS = {
    ComplexityLevel.BASIC: 0,
    ComplexityLevel.INTERMEDIATE: 1,
    ComplexityLevel.ADVANCED: 2,
}

_LEVEL_TOKENS = {level.value: level for level in ComplexityLevel}

CONTROL_KINDS = ("button", "dropdown", "radio", "toggle", "slider", "text_field")


@dataclass(frozen=True)
class TaskDescription:
    """The user's natural-language task plus the software profile to use."""

    text: str
    software_id: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise StructuralError("task text must be non-empty")

    def to_dict(self) -> dict:
        return {"text": self.text, "software_id": self.software_id}

    @classmethod
    def from_dict(cls, data: dict) -> "TaskDescription":
        return cls(text=data["text"], software_id=data["software_id"])


@dataclass(frozen=True)
class DocRef:
    """One titled excerpt from a manual or scripting-API reference."""

    title: str
    body: str

    def to_dict(self) -> dict:
        return {"title": self.title, "body": self.body}

    @classmethod
    def from_dict(cls, data: dict) -> "DocRef":
        return cls(title=data["title"], body=data["body"])


@dataclass(frozen=True)
class SoftwareProfile:
    """Everything we know about the target application.

    The manual excerpts feed tool selection, the API excerpts feed code
    generation, and the example layout code anchors the UI codegen prompt.
    """

    name: str
    manual_refs: tuple[DocRef, ...] = ()
    api_refs: tuple[DocRef, ...] = ()
    example_layout_code: str = ""

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise StructuralError("software profile name must be non-empty")
        if not self.example_layout_code.strip():
            raise StructuralError(
                f"software profile {self.name!r} has no example layout code"
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "manual_refs": [ref.to_dict() for ref in self.manual_refs],
            "api_refs": [ref.to_dict() for ref in self.api_refs],
            "example_layout_code": self.example_layout_code,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SoftwareProfile":
        return cls(
            name=data["name"],
            manual_refs=tuple(DocRef.from_dict(d) for d in data.get("manual_refs", [])),
            api_refs=tuple(DocRef.from_dict(d) for d in data.get("api_refs", [])),
            example_layout_code=data.get("example_layout_code", ""),
        )


@dataclass(frozen=True)
class DomainConcept:
    """A term plus a plain-language explanation, surfaced in tooltips."""

    term: str
    explanation: str

    def __post_init__(self) -> None:
        if not self.term.strip():
            raise StructuralError("concept term must be non-empty")
        if not self.explanation.strip():
            raise StructuralError(f"concept {self.term!r} has empty explanation")

    def to_dict(self) -> dict:
        return {"term": self.term, "explanation": self.explanation}

    @classmethod
    def from_dict(cls, data: dict) -> "DomainConcept":
        return cls(term=data["term"], explanation=data["explanation"])


@dataclass(frozen=True)
class WorkflowStage:
    """One phase of the decomposed task."""

    stage_id: int
    name: str
    description: str
    concepts: tuple[DomainConcept, ...] = ()

    def __post_init__(self) -> None:
        if self.stage_id < 1:
            raise StructuralError(f"stage_id must be >= 1, got {self.stage_id}")
        if not self.name.strip():
            raise StructuralError("stage name must be non-empty")

    def to_dict(self) -> dict:
        return {
            "stage_id": self.stage_id,
            "name": self.name,
            "description": self.description,
            "concepts": [c.to_dict() for c in self.concepts],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorkflowStage":
        return cls(
            stage_id=data["stage_id"],
            name=data["name"],
            description=data.get("description", ""),
            concepts=tuple(DomainConcept.from_dict(d) for d in data.get("concepts", [])),
        )


@dataclass(frozen=True)
class NativeMapping:
    """Where the tool lives in the default interface.

    At least one of shortcut, menu path, or mouse operation is required.
    """

    shortcut: str | None = None
    menu_path: str | None = None
    mouse_op: str | None = None

    def __post_init__(self) -> None:
        if not (self.shortcut or self.menu_path or self.mouse_op):
            raise StructuralError("native mapping needs a shortcut, menu path, or mouse op")

    def as_label(self) -> str:
        """Joined display form: shortcut, then menu path, then mouse op."""
        parts = [p for p in (self.shortcut, self.menu_path, self.mouse_op) if p]
        return " | ".join(parts)

    def to_dict(self) -> dict:
        return {
            "shortcut": self.shortcut,
            "menu_path": self.menu_path,
            "mouse_op": self.mouse_op,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NativeMapping":
        return cls(
            shortcut=data.get("shortcut"),
            menu_path=data.get("menu_path"),
            mouse_op=data.get("mouse_op"),
        )


@dataclass(frozen=True)
class ToolSpec:
    """A single actionable capability rendered as one generated control."""

    tool_id: str
    label: str
    stage_id: int
    complexity: ComplexityLevel
    rationale: str = ""
    concepts: tuple[str, ...] = ()
    native: NativeMapping | None = None
    control_kind: str = "button"
    functionality_code: str = ""

    def __post_init__(self) -> None:
        if not self.label.strip():
            raise StructuralError("tool label must be non-empty")
        if self.control_kind not in CONTROL_KINDS:
            raise StructuralError(
                f"tool {self.tool_id!r}: unknown control kind {self.control_kind!r}"
            )

    def to_dict(self) -> dict:
        return {
            "tool_id": self.tool_id,
            "label": self.label,
            "stage_id": self.stage_id,
            "complexity": self.complexity.value,
            "rationale": self.rationale,
            "concepts": list(self.concepts),
            "native": self.native.to_dict() if self.native else None,
            "control_kind": self.control_kind,
            "functionality_code": self.functionality_code,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ToolSpec":
        native = data.get("native")
        return cls(
            tool_id=data["tool_id"],
            label=data["label"],
            stage_id=data["stage_id"],
            complexity=ComplexityLevel.parse(data["complexity"]),
            rationale=data.get("rationale", ""),
            concepts=tuple(data.get("concepts", [])),
            native=NativeMapping.from_dict(native) if native else None,
            control_kind=data.get("control_kind", "button"),
            functionality_code=data.get("functionality_code", ""),
        )


@dataclass(frozen=True)
class ScaffoldSpec:
    """The central artifact the pipeline produces and humans refine."""

    task: TaskDescription
    stages: tuple[WorkflowStage, ...]
    tools: tuple[ToolSpec, ...]
    version: int = 1

    def stage_by_id(self, stage_id: int) -> WorkflowStage:
        for stage in self.stages:
            if stage.stage_id == stage_id:
                return stage
        raise KeyError(stage_id)

    def tool_by_id(self, tool_id: str) -> ToolSpec:
        for tool in self.tools:
            if tool.tool_id == tool_id:
                return tool
        raise KeyError(tool_id)

    def concept_by_term(self, term: str) -> DomainConcept | None:
        wanted = term.strip().casefold()
        for stage in self.stages:
            for concept in stage.concepts:
                if concept.term.strip().casefold() == wanted:
                    return concept
        return None

    def to_dict(self) -> dict:
        return {
            "task": self.task.to_dict(),
            "stages": [s.to_dict() for s in self.stages],
            "tools": [t.to_dict() for t in self.tools],
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScaffoldSpec":
        return cls(
            task=TaskDescription.from_dict(data["task"]),
            stages=tuple(WorkflowStage.from_dict(d) for d in data["stages"]),
            tools=tuple(ToolSpec.from_dict(d) for d in data["tools"]),
            version=data.get("version", 1),
        )

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ScaffoldSpec":
        return cls.from_dict(json.loads(text))


def canonical_json(payload: object) -> str:
    """Canonical UTF-8 JSON form: field order preserved, 2-space indent."""
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def canonical_bytes(payload: object) -> bytes:
    return canonical_json(payload).encode("utf-8")


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def spec_hash(spec: ScaffoldSpec) -> str:
    """SHA-256 of the canonical serialization of the canonical spec."""
    return content_hash(canonical_bytes(canonicalize(spec).to_dict()))


def _check_references(spec: ScaffoldSpec) -> None:
    stage_ids = {stage.stage_id for stage in spec.stages}
    known_terms = {
        concept.term.strip().casefold()
        for stage in spec.stages
        for concept in stage.concepts
    }
    for tool in spec.tools:
        if tool.stage_id not in stage_ids:
            raise StructuralError(
                f"tool {tool.tool_id!r} references missing stage {tool.stage_id}"
            )
        for term in tool.concepts:
            if term.strip().casefold() not in known_terms:
                raise StructuralError(
                    f"tool {tool.tool_id!r} references unknown concept {term!r}"
                )


def canonicalize(spec: ScaffoldSpec) -> ScaffoldSpec:
    """Normalize a structurally valid spec into its canonical form.

    Stages are re-indexed contiguously in list order, tools are sorted by
    (stage, complexity, label), concept lists are de-duplicated keeping the
    first occurrence, and tool identifiers are recomputed from the owning
    stage name and label.  Idempotent: canonicalizing twice is a no-op.
    """
    _check_references(spec)

    id_remap: dict[int, int] = {}
    stages: list[WorkflowStage] = []
    for index, stage in enumerate(spec.stages, start=1):
        id_remap[stage.stage_id] = index
        seen: set[str] = set()
        concepts: list[DomainConcept] = []
        for concept in stage.concepts:
            key = concept.term.strip().casefold()
            if key in seen:
                continue
            seen.add(key)
            concepts.append(concept)
        stages.append(replace(stage, stage_id=index, concepts=tuple(concepts)))

    stage_names = {stage.stage_id: stage.name for stage in stages}
    tools: list[ToolSpec] = []
    for tool in spec.tools:
        new_stage_id = id_remap[tool.stage_id]
        seen_terms: set[str] = set()
        terms: list[str] = []
        for term in tool.concepts:
            key = term.strip().casefold()
            if key in seen_terms:
                continue
            seen_terms.add(key)
            terms.append(term)
        tools.append(
            replace(
                tool,
                tool_id=tool_id_for(stage_names[new_stage_id], tool.label),
                stage_id=new_stage_id,
                concepts=tuple(terms),
            )
        )
    tools.sort(key=lambda t: (t.stage_id, t.complexity.rank, t.label))

    seen_ids: set[str] = set()
    for tool in tools:
        if tool.tool_id in seen_ids:
            raise StructuralError(f"duplicate tool id {tool.tool_id!r} after slugging")
        seen_ids.add(tool.tool_id)

    return replace(spec, stages=tuple(stages), tools=tuple(tools))


def is_canonical(spec: ScaffoldSpec) -> bool:
    try:
        return canonicalize(spec) == spec
    except StructuralError:
        return False


# Re-exported for callers that only need the field container.
__all__ = [
    "CONTROL_KINDS",
    "ComplexityLevel",
    "DocRef",
    "DomainConcept",
    "NativeMapping",
    "ScaffoldSpec",
    "SoftwareProfile",
    "StructuralError",
    "TaskDescription",
    "ToolSpec",
    "WorkflowStage",
    "canonical_bytes",
    "canonical_json",
    "canonicalize",
    "content_hash",
    "is_canonical",
    "slugify",
    "spec_hash",
    "tool_id_for",
]
