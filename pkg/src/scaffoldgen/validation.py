"""Machine-checkable rules over a canonical spec, plus spec diffing.

Referential breaks fail; stylistic problems warn.  R2 (concept labels) and
R4 (a basic tool per stage) can be downgraded to warnings for
expert-oriented specs via the lenient flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    ComplexityLevel,
    ScaffoldSpec,
    StructuralError,
    canonical_json,
    is_canonical,
)

DOWNGRADABLE_RULES = frozenset({"R2", "R4"})

MAX_LABEL_LENGTH = 60


@dataclass(frozen=True)
class RuleResult:
    rule_id: str
    status: str  # pass | fail | warn
    detail: str = ""

    def to_dict(self) -> dict:
        return {"rule_id": self.rule_id, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    rules: tuple[RuleResult, ...]
    overall: str  # pass | fail

    def __post_init__(self) -> None:
        ids = [r.rule_id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise StructuralError("duplicate rule ids in report")
        expected = "fail" if any(r.status == "fail" for r in self.rules) else "pass"
        if self.overall != expected:
            raise StructuralError("overall status inconsistent with rule statuses")

    @property
    def passed(self) -> bool:
        return self.overall == "pass"

    def failures(self) -> list[RuleResult]:
        return [r for r in self.rules if r.status == "fail"]

    def to_dict(self) -> dict:
        return {"rules": [r.to_dict() for r in self.rules], "overall": self.overall}

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def visible_tools(spec: ScaffoldSpec, level: ComplexityLevel) -> list[str]:
    """Tool ids visible at a level: complexity at or below, in spec order."""
    return [tool.tool_id for tool in spec.tools if tool.complexity <= level]


def validate_spec(spec: ScaffoldSpec, lenient: bool = False) -> ValidationReport:
    """Evaluate the rule set over a canonical spec."""
    if not is_canonical(spec):
        raise StructuralError("spec is not canonical; canonicalize it first")

    results: list[RuleResult] = []

    def add(rule_id: str, problems: list[str], description: str) -> None:
        if not problems:
            results.append(RuleResult(rule_id, "pass", description))
            return
        status = "warn" if lenient and rule_id in DOWNGRADABLE_RULES else "fail"
        results.append(RuleResult(rule_id, status, "; ".join(problems)))

    stage_ids = {stage.stage_id for stage in spec.stages}
    known_terms = {
        concept.term.strip().casefold()
        for stage in spec.stages
        for concept in stage.concepts
    }

    # R1: referential integrity
    problems = []
    seen_tool_ids: set[str] = set()
    for tool in spec.tools:
        if tool.tool_id in seen_tool_ids:
            problems.append(f"duplicate tool id {tool.tool_id}")
        seen_tool_ids.add(tool.tool_id)
        if tool.stage_id not in stage_ids:
            problems.append(f"tool {tool.tool_id} references missing stage {tool.stage_id}")
        for term in tool.concepts:
            if term.strip().casefold() not in known_terms:
                problems.append(f"tool {tool.tool_id} references unknown concept {term!r}")
    add("R1", problems, "referential integrity")

    # R2: concept labeling — every tool carries at least one concept
    problems = [
        f"tool {tool.tool_id} has no concept labels"
        for tool in spec.tools
        if not tool.concepts
    ]
    add("R2", problems, "every tool references at least one concept")

    # R3: native-UI mapping present on every tool
    problems = [
        f"tool {tool.tool_id} has no native mapping"
        for tool in spec.tools
        if tool.native is None
    ]
    add("R3", problems, "every tool has a native mapping")

    # R4: every stage offers at least one basic tool
    basic_stages = {
        tool.stage_id for tool in spec.tools if tool.complexity is ComplexityLevel.BASIC
    }
    problems = [
        f"stage {stage.stage_id} ({stage.name}) has no basic tool"
        for stage in spec.stages
        if stage.stage_id not in basic_stages
    ]
    add("R4", problems, "every stage has a basic-level tool")

    # R5: disclosure monotonicity over the level chain
    problems = []
    previous: set[str] = set()
    for level in ComplexityLevel:
        current = set(visible_tools(spec, level))
        if not previous <= current:
            problems.append(f"visibility shrinks at {level.value}")
        previous = current
    add("R5", problems, "visible tool sets grow monotonically with level")

    # R6: stage names unique
    names = [stage.name.strip().casefold() for stage in spec.stages]
    problems = [
        f"stage name {name!r} duplicated"
        for name in sorted({n for n in names if names.count(n) > 1})
    ]
    add("R6", problems, "stage names unique")

    # R7: functionality code present on every tool
    problems = [
        f"tool {tool.tool_id} has no functionality code"
        for tool in spec.tools
        if not tool.functionality_code.strip()
    ]
    add("R7", problems, "every tool carries functionality code")

    # W1: stylistic — long labels read poorly on a panel
    long_labels = [
        f"label {tool.label!r} longer than {MAX_LABEL_LENGTH} chars"
        for tool in spec.tools
        if len(tool.label) > MAX_LABEL_LENGTH
    ]
    results.append(
        RuleResult("W1", "warn" if long_labels else "pass", "; ".join(long_labels) or "label length")
    )

    overall = "fail" if any(r.status == "fail" for r in results) else "pass"
    return ValidationReport(rules=tuple(results), overall=overall)


@dataclass(frozen=True)
class StageRename:
    stage_id: int
    old_name: str
    new_name: str

    def to_dict(self) -> dict:
        return {"stage_id": self.stage_id, "old_name": self.old_name, "new_name": self.new_name}


@dataclass(frozen=True)
class SpecDiff:
    added: tuple[str, ...]
    removed: tuple[str, ...]
    modified: tuple[str, ...]
    stage_renames: tuple[StageRename, ...]
    concept_changes: tuple[str, ...]
    version_delta: int

    def __post_init__(self) -> None:
        sets = [set(self.added), set(self.removed), set(self.modified)]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise StructuralError("added/removed/modified sets overlap")

    @property
    def empty(self) -> bool:
        return not (
            self.added
            or self.removed
            or self.modified
            or self.stage_renames
            or self.concept_changes
            or self.version_delta
        )

    def to_dict(self) -> dict:
        return {
            "added": list(self.added),
            "removed": list(self.removed),
            "modified": list(self.modified),
            "stage_renames": [r.to_dict() for r in self.stage_renames],
            "concept_changes": list(self.concept_changes),
            "version_delta": self.version_delta,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def diff_specs(old: ScaffoldSpec, new: ScaffoldSpec) -> SpecDiff:
    """Diff two canonical specs by tool identity.

    When a stage rename changes tool ids without touching the tools
    themselves, the renamed tools are reported as modified rather than as
    an add/remove pair.
    """
    for side, spec in (("old", old), ("new", new)):
        if not is_canonical(spec):
            raise StructuralError(f"{side} spec is not canonical")

    old_tools = {tool.tool_id: tool for tool in old.tools}
    new_tools = {tool.tool_id: tool for tool in new.tools}
    added = set(new_tools) - set(old_tools)
    removed = set(old_tools) - set(new_tools)
    modified = {
        tool_id
        for tool_id in set(old_tools) & set(new_tools)
        if old_tools[tool_id] != new_tools[tool_id]
    }

    # Reconcile add/remove pairs created purely by a stage rename: same
    # stage position and label means the same tool with a recomputed id.
    removed_by_key = {
        (old_tools[tid].stage_id, old_tools[tid].label.casefold()): tid for tid in removed
    }
    for tool_id in sorted(added):
        key = (new_tools[tool_id].stage_id, new_tools[tool_id].label.casefold())
        match = removed_by_key.pop(key, None)
        if match is not None:
            added.discard(tool_id)
            removed.discard(match)
            modified.add(tool_id)

    renames = []
    old_stages = {stage.stage_id: stage for stage in old.stages}
    for stage in new.stages:
        before = old_stages.get(stage.stage_id)
        if before is not None and before.name != stage.name:
            renames.append(StageRename(stage.stage_id, before.name, stage.name))

    def concept_map(spec: ScaffoldSpec) -> dict[str, str]:
        return {
            concept.term.strip().casefold(): concept.explanation
            for stage in spec.stages
            for concept in stage.concepts
        }

    old_concepts = concept_map(old)
    new_concepts = concept_map(new)
    concept_changes = []
    for term in sorted(set(old_concepts) | set(new_concepts)):
        if term not in old_concepts:
            concept_changes.append(f"added {term}")
        elif term not in new_concepts:
            concept_changes.append(f"removed {term}")
        elif old_concepts[term] != new_concepts[term]:
            concept_changes.append(f"modified {term}")

    return SpecDiff(
        added=tuple(sorted(added)),
        removed=tuple(sorted(removed)),
        modified=tuple(sorted(modified)),
        stage_renames=tuple(renames),
        concept_changes=tuple(concept_changes),
        version_delta=new.version - old.version,
    )
