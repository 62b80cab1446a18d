import random
from dataclasses import replace

import pytest

from scaffoldgen.model import (
    ComplexityLevel,
    DomainConcept,
    NativeMapping,
    ScaffoldSpec,
    StructuralError,
    TaskDescription,
    ToolSpec,
    WorkflowStage,
    canonicalize,
    tool_id_for,
)
from scaffoldgen.validation import diff_specs, validate_spec, visible_tools

from conftest import make_random_spec


def _single_tool_spec(**tool_overrides):
    stage = WorkflowStage(1, "Stage", "work", (DomainConcept("Seam", "cutting line"),))
    fields = dict(
        tool_id=tool_id_for("Stage", "Cut"),
        label="Cut",
        stage_id=1,
        complexity=ComplexityLevel.BASIC,
        concepts=("Seam",),
        native=NativeMapping(shortcut="K"),
        functionality_code="pass\n",
    )
    fields.update(tool_overrides)
    spec = ScaffoldSpec(
        task=TaskDescription(text="demo", software_id="Blender"),
        stages=(stage,),
        tools=(ToolSpec(**fields),),
    )
    return canonicalize(spec)


class TestValidateSpec:
    def test_uv_fixture_passes(self, uv_spec):
        report = validate_spec(uv_spec)
        assert report.passed
        assert {r.rule_id for r in report.rules} >= {"R1", "R2", "R3", "R4", "R5", "R6", "R7"}

    def test_non_canonical_input_rejected(self, uv_spec):
        shuffled = replace(uv_spec, tools=tuple(reversed(uv_spec.tools)))
        with pytest.raises(StructuralError, match="canonical"):
            validate_spec(shuffled)

    def test_missing_native_fails_r3_naming_tool(self):
        spec = _single_tool_spec(native=None)
        report = validate_spec(spec)
        rule = next(r for r in report.rules if r.rule_id == "R3")
        assert rule.status == "fail"
        assert "stage_cut" in rule.detail
        assert not report.passed

    def test_stage_without_basic_tool_fails_r4(self):
        spec = _single_tool_spec(complexity=ComplexityLevel.ADVANCED)
        report = validate_spec(spec)
        rule = next(r for r in report.rules if r.rule_id == "R4")
        assert rule.status == "fail"

    def test_lenient_downgrades_r2_and_r4(self):
        spec = _single_tool_spec(complexity=ComplexityLevel.ADVANCED, concepts=())
        report = validate_spec(spec, lenient=True)
        statuses = {r.rule_id: r.status for r in report.rules}
        assert statuses["R2"] == "warn"
        assert statuses["R4"] == "warn"
        assert report.passed

    def test_missing_functionality_fails_r7(self):
        spec = _single_tool_spec(functionality_code="")
        report = validate_spec(spec)
        assert next(r for r in report.rules if r.rule_id == "R7").status == "fail"

    def test_report_json_shape(self, uv_spec):
        report = validate_spec(uv_spec)
        data = report.to_dict()
        assert data["overall"] == "pass"
        assert all(set(r) == {"rule_id", "status", "detail"} for r in data["rules"])

    def test_deterministic(self, uv_spec):
        assert validate_spec(uv_spec) == validate_spec(uv_spec)


class TestVisibility:
    def test_subset_chain_on_random_specs(self):
        rng = random.Random(21)
        for _ in range(100):
            spec = make_random_spec(rng)
            basic = set(visible_tools(spec, ComplexityLevel.BASIC))
            mid = set(visible_tools(spec, ComplexityLevel.INTERMEDIATE))
            full = set(visible_tools(spec, ComplexityLevel.ADVANCED))
            assert basic <= mid <= full
            assert full == {t.tool_id for t in spec.tools}

    def test_order_matches_spec_order(self, uv_spec):
        ordered = visible_tools(uv_spec, ComplexityLevel.ADVANCED)
        assert ordered == [t.tool_id for t in uv_spec.tools]


class TestDiff:
    def test_identical_specs_empty_diff(self, uv_spec):
        diff = diff_specs(uv_spec, uv_spec)
        assert diff.empty

    def test_complexity_change_is_modified(self, uv_spec):
        tools = tuple(
            replace(t, complexity=ComplexityLevel.INTERMEDIATE)
            if t.tool_id == "marking_seams_mark_seam"
            else t
            for t in uv_spec.tools
        )
        new = canonicalize(replace(uv_spec, tools=tools))
        diff = diff_specs(uv_spec, new)
        assert diff.modified == ("marking_seams_mark_seam",)
        assert not diff.added and not diff.removed

    def test_stage_rename_recorded_tools_modified(self, uv_spec):
        # Slug-stability oracle: renaming a stage recomputes the slugs of its
        # tools, so they must surface as modified ids, not add/remove pairs.
        stages = tuple(
            replace(s, name="Seam Marking") if s.stage_id == 1 else s for s in uv_spec.stages
        )
        new = canonicalize(replace(uv_spec, stages=stages))
        diff = diff_specs(uv_spec, new)
        assert [(r.old_name, r.new_name) for r in diff.stage_renames] == [
            ("Marking Seams", "Seam Marking")
        ]
        expected_modified = tuple(
            sorted(
                tool_id_for("Seam Marking", t.label)
                for t in uv_spec.tools
                if t.stage_id == 1
            )
        )
        assert diff.modified == expected_modified
        assert not diff.added and not diff.removed

    def test_added_removed_mirror(self, uv_spec):
        smaller = canonicalize(replace(uv_spec, tools=uv_spec.tools[:-2]))
        forward = diff_specs(smaller, uv_spec)
        backward = diff_specs(uv_spec, smaller)
        assert set(forward.added) == set(backward.removed)
        assert set(forward.removed) == set(backward.added)

    def test_version_delta(self, uv_spec):
        bumped = replace(uv_spec, version=uv_spec.version + 2)
        assert diff_specs(uv_spec, bumped).version_delta == 2

    def test_concept_changes(self, uv_spec):
        stages = list(uv_spec.stages)
        stage = stages[0]
        stages[0] = replace(
            stage,
            concepts=stage.concepts + (DomainConcept("Margin", "gap between islands"),),
        )
        new = canonicalize(replace(uv_spec, stages=tuple(stages)))
        diff = diff_specs(uv_spec, new)
        assert "added margin" in diff.concept_changes
