import random

import pytest

from scaffoldgen.codegen import render_tooltip
from scaffoldgen.model import (
    ComplexityLevel,
    ScaffoldSpec,
    TaskDescription,
    WorkflowStage,
    canonicalize,
    spec_hash,
)
from scaffoldgen.session import (
    Session,
    VisibilityError,
    export_event_log,
    hover,
    invoke,
    replay_script,
    set_level,
    visible_tools,
)

from conftest import make_random_spec


@pytest.fixture()
def session(uv_spec):
    return Session(spec=uv_spec)


class TestVisibility:
    def test_basic_level_shows_only_basic_tools(self, session, uv_spec):
        expected = [t.tool_id for t in uv_spec.tools if t.complexity is ComplexityLevel.BASIC]
        assert visible_tools(session) == expected

    def test_advanced_shows_all(self, session, uv_spec):
        set_level(session, ComplexityLevel.ADVANCED)
        assert visible_tools(session) == [t.tool_id for t in uv_spec.tools]

    def test_empty_spec_empty_at_every_level(self):
        spec = canonicalize(
            ScaffoldSpec(
                task=TaskDescription(text="t", software_id="B"),
                stages=(WorkflowStage(1, "Stage", ""),),
                tools=(),
            )
        )
        session = Session(spec=spec)
        for level in ComplexityLevel:
            set_level(session, level)
            assert visible_tools(session) == []

    def test_monotone_disclosure_random_specs(self):
        rng = random.Random(31)
        for _ in range(60):
            session = Session(spec=make_random_spec(rng))
            seen = set()
            for level in ComplexityLevel:
                set_level(session, level)
                now = set(visible_tools(session))
                assert seen <= now
                seen = now


class TestEvents:
    def test_level_change_appends_event(self, session):
        set_level(session, ComplexityLevel.INTERMEDIATE)
        log = export_event_log(session)
        assert log["events"][-1]["kind"] == "level_change"
        assert log["events"][-1]["target"] == "intermediate"

    def test_three_invokes_get_sequential_ordinals(self, session):
        set_level(session, ComplexityLevel.ADVANCED)
        session.events.clear()
        for tool_id in list(visible_tools(session))[:3]:
            invoke(session, tool_id)
        assert [e.ordinal for e in session.events] == [1, 2, 3]

    def test_invoke_records_operator_identifier(self, session, golden_manifest):
        invoke(session, "marking_seams_mark_seam")
        entry = export_event_log(session)["events"][-1]
        assert entry["operator"] == golden_manifest["tool_index"]["marking_seams_mark_seam"]

    def test_spec_hash_constant_across_events(self, session, uv_spec):
        before = spec_hash(session.spec)
        set_level(session, ComplexityLevel.ADVANCED)
        invoke(session, "unwrapping_editing_smart_uv_project")
        hover(session, "marking_seams_mark_seam")
        set_level(session, ComplexityLevel.BASIC)
        assert spec_hash(session.spec) == before

    def test_clone_is_independent(self, session):
        twin = session.clone()
        set_level(twin, ComplexityLevel.ADVANCED)
        assert session.level is ComplexityLevel.BASIC


class TestHoverInvoke:
    def test_hover_returns_rendered_tooltip(self, session, uv_spec):
        tooltip = hover(session, "marking_seams_mark_seam")
        assert tooltip == render_tooltip(uv_spec.tool_by_id("marking_seams_mark_seam"), uv_spec)

    def test_hidden_tool_hover_raises(self, session):
        with pytest.raises(VisibilityError):
            hover(session, "unwrapping_editing_smart_uv_project")

    def test_hidden_tool_invoke_raises(self, session):
        with pytest.raises(VisibilityError):
            invoke(session, "unwrapping_editing_smart_uv_project")

    def test_unknown_tool_raises(self, session):
        with pytest.raises(VisibilityError):
            invoke(session, "no_such_tool")

    def test_hover_succeeds_iff_visible(self, uv_spec):
        # Exact biconditional over every tool at every level.
        for level in ComplexityLevel:
            session = Session(spec=uv_spec)
            set_level(session, level)
            visible = set(visible_tools(session))
            for tool in uv_spec.tools:
                if tool.tool_id in visible:
                    assert hover(session, tool.tool_id)
                else:
                    with pytest.raises(VisibilityError):
                        hover(session, tool.tool_id)


class TestReplay:
    def test_script_with_hidden_tool_error(self, session):
        script = {
            "events": [
                {"kind": "set_level", "level": "intermediate"},
                {"kind": "invoke", "tool_id": "unwrapping_editing_smart_uv_project"},
                {"kind": "invoke", "tool_id": "marking_seams_mark_seam"},
            ]
        }
        log = replay_script(session, script)
        statuses = [e["status"] for e in log["events"]]
        assert statuses == ["ok", "visibility_error", "ok"]
        assert [e["ordinal"] for e in log["events"]] == [1, 2, 3]
