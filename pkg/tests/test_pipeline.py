import random

import pytest

from scaffoldgen.model import TaskDescription
from scaffoldgen.pipeline import (
    ParseExhaustedError,
    PipelineState,
    SequencingError,
    assemble_spec,
    downstream_of,
    mark_edited,
    run_stage,
    upstream_of,
)
from scaffoldgen.prompts import STAGE_CHAIN, StageKind

from conftest import LLM_FIXTURES, PROFILE_PATH

import json

from scaffoldgen.model import SoftwareProfile
from scaffoldgen.transport import FixtureTransport

# Independent oracle: the stage chain as plain data, used to re-derive
# upstream/downstream sets without touching the implementation's helpers.
CHAIN = [
    "workflow_analysis",
    "tool_selection",
    "functionality_codegen",
    "ui_codegen",
    "tool_labeling",
]


def oracle_downstream(kind: str) -> list[str]:
    return CHAIN[CHAIN.index(kind) + 1 :]


@pytest.fixture()
def transport():
    return FixtureTransport(LLM_FIXTURES)


@pytest.fixture()
def fixture_profile():
    return SoftwareProfile.from_dict(json.loads(PROFILE_PATH.read_text("utf-8")))


def _fresh_state():
    return PipelineState(
        task=TaskDescription(
            text="Perform UV unwrapping on the default cube model", software_id="Blender"
        )
    )


class TestChainHelpers:
    def test_upstream_downstream_match_oracle(self):
        for kind in STAGE_CHAIN:
            assert [k.value for k in downstream_of(kind)] == oracle_downstream(kind.value)
            assert [k.value for k in upstream_of(kind)] == CHAIN[: CHAIN.index(kind.value)]


class TestRunStage:
    def test_fresh_run_stores_artifact_and_marks_downstream(self, transport, fixture_profile):
        state = run_stage(_fresh_state(), StageKind.WORKFLOW_ANALYSIS, transport, fixture_profile)
        assert StageKind.WORKFLOW_ANALYSIS in state.artifacts
        assert StageKind.TOOL_SELECTION in state.stale
        assert len(state.payload(StageKind.WORKFLOW_ANALYSIS)) == 3

    def test_premature_stage_is_sequencing_error(self, transport, fixture_profile):
        with pytest.raises(SequencingError) as excinfo:
            run_stage(_fresh_state(), StageKind.TOOL_SELECTION, transport, fixture_profile)
        assert "workflow_analysis" in str(excinfo.value)

    def test_edit_then_downstream_run(self, transport, fixture_profile):
        state = _fresh_state()
        run_stage(state, StageKind.WORKFLOW_ANALYSIS, transport, fixture_profile)
        run_stage(state, StageKind.TOOL_SELECTION, transport, fixture_profile)
        # human edit of the workflow artifact: downstream goes stale
        mark_edited(state, StageKind.WORKFLOW_ANALYSIS, state.payload(StageKind.WORKFLOW_ANALYSIS))
        assert StageKind.TOOL_SELECTION in state.stale
        run_stage(state, StageKind.TOOL_SELECTION, transport, fixture_profile)
        # Oracle: everything downstream of tool_selection must be stale.
        for kind in oracle_downstream("tool_selection"):
            assert StageKind(kind) in state.stale
        assert StageKind.UI_CODEGEN in state.stale

    def test_full_chain_produces_assemblable_spec(self, transport, fixture_profile):
        state = _fresh_state()
        for kind in STAGE_CHAIN:
            run_stage(state, kind, transport, fixture_profile)
        assert state.stale == set()
        spec = assemble_spec(
            state.task,
            state.payload(StageKind.WORKFLOW_ANALYSIS),
            state.payload(StageKind.TOOL_SELECTION),
            state.payload(StageKind.FUNCTIONALITY_CODEGEN),
            state.payload(StageKind.TOOL_LABELING),
        )
        assert len(spec.tools) == 12
        assert all(t.functionality_code for t in spec.tools)
        assert all(t.concepts for t in spec.tools)

    def test_transcripts_record_every_exchange(self, transport, fixture_profile):
        state = _fresh_state()
        for kind in STAGE_CHAIN:
            run_stage(state, kind, transport, fixture_profile)
        assert len(state.transcripts) == 5
        assert [raw.stage_kind for _, raw in state.transcripts] == list(STAGE_CHAIN)
        assert [raw.transcript_id for _, raw in state.transcripts] == [
            f"t{i:04d}" for i in range(1, 6)
        ]

    def test_parse_exhaustion_raises(self, fixture_profile):
        class Garbage:
            def send(self, prompt):
                return "no list items here at all"

        with pytest.raises(ParseExhaustedError):
            run_stage(_fresh_state(), StageKind.WORKFLOW_ANALYSIS, Garbage(), fixture_profile, 2)


class TestStalenessProperty:
    def test_random_event_sequences_keep_invariant(self, transport, fixture_profile):
        # Property: a present, non-stale artifact never sits downstream of a
        # stale or missing-but-required artifact after any event sequence.
        rng = random.Random(99)
        for _ in range(40):
            state = _fresh_state()
            for _ in range(rng.randint(1, 12)):
                kind = rng.choice(list(STAGE_CHAIN))
                if rng.random() < 0.6:
                    blocked = [
                        up
                        for up in upstream_of(kind)
                        if up not in state.artifacts or up in state.stale
                    ]
                    if blocked:
                        with pytest.raises(SequencingError):
                            run_stage(state, kind, transport, fixture_profile)
                    else:
                        run_stage(state, kind, transport, fixture_profile)
                elif kind in state.artifacts:
                    mark_edited(state, kind, state.payload(kind))
                for present in state.artifacts:
                    if present in state.stale:
                        continue
                    for up in upstream_of(present):
                        assert up in state.artifacts
                        assert up not in state.stale, (
                            f"{present.value} current but upstream {up.value} stale"
                        )
