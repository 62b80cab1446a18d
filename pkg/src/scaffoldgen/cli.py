"""Command-line entry point for the scaffolded-panel pipeline.

Offline-first: `run-all` and `stage` default to fixture mode, replaying
recorded responses so runs are reproducible; live mode is opt-in.  Exit
codes: 0 success, 2 validation failure, 3 parse exhaustion, 4 transport
failure, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .codegen import ValidationFailedError, render_addon
from .model import ScaffoldSpec, SoftwareProfile, TaskDescription, canonical_json
from .pipeline import (
    ParseExhaustedError,
    PipelineState,
    SequencingError,
    StageArtifact,
    assemble_spec,
    run_stage,
)
from .prompts import STAGE_CHAIN, StageKind
from .session import Session, event_log_json, replay_script
from .store import Workspace, WorkspaceLockedError, rerun_plan
from .transport import FixtureTransport, LiveTransport, TransportError
from .validation import diff_specs, validate_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_TRANSPORT = 4


@dataclass
class RunConfig:
    workspace: Path
    profile_path: Path
    mode: str = "fixtures"  # fixtures | live
    fixtures_dir: Path | None = None
    endpoint: str | None = None
    model: str | None = None
    max_repairs: int = 2
    lenient: bool = False


def load_profile(path: Path) -> SoftwareProfile:
    return SoftwareProfile.from_dict(json.loads(Path(path).read_text("utf-8")))


def build_transport(config: RunConfig):
    if config.mode == "fixtures":
        if config.fixtures_dir is None or not Path(config.fixtures_dir).is_dir():
            raise FileNotFoundError(
                f"fixtures mode requires an existing fixture directory, got {config.fixtures_dir}"
            )
        return FixtureTransport(config.fixtures_dir)
    kwargs = {}
    if config.endpoint:
        kwargs["endpoint"] = config.endpoint
    if config.model:
        kwargs["model"] = config.model
    return LiveTransport(**kwargs)


def _load_state(ws: Workspace) -> PipelineState:
    """Rebuild an in-memory pipeline state from what is on disk."""
    state = PipelineState(task=ws.load_task())
    records, stale = ws.load_records()
    for kind in STAGE_CHAIN:
        digest = ws.disk_hash(kind)
        if digest is not None:
            state.artifacts[kind] = StageArtifact(
                kind=kind, payload=ws.load_artifact(kind), content_hash=digest
            )
    state.stale = stale
    return state


def _persist_stage(ws: Workspace, state: PipelineState, kind: StageKind, transcript_base: int) -> None:
    records, _ = ws.load_records()
    record = ws.save_artifact(kind, state.payload(kind))
    records[kind] = record
    for upstream_kind in STAGE_CHAIN[: STAGE_CHAIN.index(kind)]:
        if upstream_kind in records:
            records[upstream_kind].last_run_hash = records[upstream_kind].content_hash
    ws.save_records(records, state.stale)
    for prompt, raw in state.transcripts[transcript_base:]:
        ws.save_transcript(prompt, raw)


def _run_stages(
    ws: Workspace,
    state: PipelineState,
    kinds: list[StageKind],
    transport,
    profile: SoftwareProfile,
    config: RunConfig,
) -> None:
    for kind in kinds:
        transcript_base = len(state.transcripts)
        run_stage(state, kind, transport, profile, max_repairs=config.max_repairs)
        _persist_stage(ws, state, kind, transcript_base)
        print(f"stage {kind.value}: ok")


def _finalize(ws: Workspace, config: RunConfig) -> int:
    """Assemble the spec from stage artifacts, validate, and render."""
    task = ws.load_task()
    stages = ws.load_artifact(StageKind.WORKFLOW_ANALYSIS)
    tools = ws.load_artifact(StageKind.TOOL_SELECTION)
    functionality = ws.load_artifact(StageKind.FUNCTIONALITY_CODEGEN)
    labels = ws.load_artifact(StageKind.TOOL_LABELING)

    version = 1
    previous: ScaffoldSpec | None = None
    if ws.spec_path.exists():
        previous = ws.load_spec()
        version = previous.version
    spec = assemble_spec(task, stages, tools, functionality, labels, version=version)
    if previous is not None and spec != previous:
        spec = assemble_spec(task, stages, tools, functionality, labels, version=version + 1)
    ws.save_spec(spec)

    report = validate_spec(spec, lenient=config.lenient)
    ws.save_validation(report)
    if not report.passed:
        failures = "; ".join(f"{r.rule_id}: {r.detail}" for r in report.failures())
        print(f"validate: fail ({failures})")
        print(f"report written to {ws.validation_path}")
        return EXIT_VALIDATION
    print(f"validate: pass ({len(report.rules)} rules)")

    addon = render_addon(spec, lenient=config.lenient)
    ws.save_addon(addon)
    print(f"render: {ws.addon_dir / 'addon.py'} ({len(addon.tool_index)} operators)")
    return EXIT_OK


def cmd_run_all(config: RunConfig, task_text: str) -> int:
    profile = load_profile(config.profile_path)
    transport = build_transport(config)
    ws = Workspace(config.workspace)
    with ws.lock():
        # A full run replaces any previous run record wholesale.
        if ws.transcripts_dir.is_dir():
            for stale_file in ws.transcripts_dir.glob("t*.json"):
                stale_file.unlink()
        task = TaskDescription(text=task_text, software_id=profile.name)
        ws.save_task(task)
        state = PipelineState(task=task)
        _run_stages(ws, state, list(STAGE_CHAIN), transport, profile, config)
        return _finalize(ws, config)


def cmd_stage(config: RunConfig, kind_token: str | None, run_all: bool, force: bool) -> int:
    profile = load_profile(config.profile_path)
    transport = build_transport(config)
    ws = Workspace(config.workspace)
    with ws.lock():
        records, stale = ws.load_records()
        edited = ws.detect_edits(records)
        if edited:
            print("edited: " + ", ".join(k.value for k in sorted(edited, key=STAGE_CHAIN.index)))
        # Human-edited artifacts are authoritative: freeze their new content.
        for kind in edited:
            digest = ws.disk_hash(kind)
            if digest is not None:
                records[kind].content_hash = digest
        pending = set(stale) | set(rerun_plan(edited))
        plan = [kind for kind in STAGE_CHAIN if kind in pending]
        ws.save_records(records, pending)
        print("plan: " + (", ".join(k.value for k in plan) if plan else "(nothing to re-run)"))

        if run_all:
            kinds = plan
        elif kind_token is None:
            return EXIT_OK
        else:
            kind = StageKind.parse(kind_token)
            if kind not in plan and not force:
                print(f"refusing to run {kind.value}: not in the re-run plan (use --force)")
                return EXIT_ERROR
            kinds = [kind]

        state = _load_state(ws)
        state.stale = pending
        state.transcript_offset = sum(ws.transcript_counts().values())
        _run_stages(ws, state, kinds, transport, profile, config)

        _, remaining = ws.load_records()
        if not remaining and all(ws.disk_hash(k) is not None for k in STAGE_CHAIN):
            return _finalize(ws, config)
        return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    ws = Workspace(config.workspace)
    spec = ws.load_spec()
    report = validate_spec(spec, lenient=config.lenient)
    ws.save_validation(report)
    print(report.to_json(), end="")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_diff(config: RunConfig, old_path: Path, new_path: Path) -> int:
    old = ScaffoldSpec.from_json(Path(old_path).read_text("utf-8"))
    new = ScaffoldSpec.from_json(Path(new_path).read_text("utf-8"))
    diff = diff_specs(old, new)
    print(diff.to_json(), end="")
    return EXIT_OK


def cmd_simulate(config: RunConfig, script_path: Path) -> int:
    ws = Workspace(config.workspace)
    spec = ws.load_spec()
    manifest_path = ws.addon_dir / "manifest.json"
    tool_index: dict[str, str] = {}
    if manifest_path.exists():
        tool_index = json.loads(manifest_path.read_text("utf-8")).get("tool_index", {})
    session = Session(spec=spec, tool_index=tool_index)
    script = json.loads(Path(script_path).read_text("utf-8"))
    log = replay_script(session, script)
    print(event_log_json(log), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaffoldgen",
        description="Generate a scaffolded, task-specific Blender panel from a task description.",
    )
    parser.add_argument("--workspace", required=True, help="workspace directory for this task run")
    parser.add_argument("--profile", required=True, help="software profile JSON file")
    parser.add_argument("--fixtures", help="directory of recorded responses (offline mode)")
    parser.add_argument("--live", action="store_true", help="call the live endpoint instead of fixtures")
    parser.add_argument("--endpoint", help="live endpoint URL")
    parser.add_argument("--model", help="live model name")
    parser.add_argument("--max-repairs", type=int, default=2, help="max transport attempts per stage")
    strictness = parser.add_mutually_exclusive_group()
    strictness.add_argument("--strict", action="store_true", help="all rules fail hard (default)")
    strictness.add_argument("--lenient", action="store_true", help="downgrade R2/R4 to warnings")

    sub = parser.add_subparsers(dest="command", required=True)

    run_all = sub.add_parser("run-all", help="run the whole pipeline and render the add-on")
    run_all.add_argument("task", help="natural-language task description")

    stage = sub.add_parser("stage", help="re-run stages after human edits")
    stage.add_argument("kind", nargs="?", help="stage to run (omit with --all)")
    stage.add_argument("--all", action="store_true", dest="run_all", help="run the whole re-run plan")
    stage.add_argument("--force", action="store_true", help="run even if not in the plan")

    sub.add_parser("validate", help="validate the workspace spec")

    diff = sub.add_parser("diff", help="diff two spec files")
    diff.add_argument("old")
    diff.add_argument("new")

    simulate = sub.add_parser("simulate", help="replay an event script against the spec")
    simulate.add_argument("script", help="event script JSON file")

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            workspace=Path(args.workspace),
            profile_path=Path(args.profile),
            mode="live" if args.live else "fixtures",
            fixtures_dir=Path(args.fixtures) if args.fixtures else None,
            endpoint=args.endpoint,
            model=args.model,
            max_repairs=args.max_repairs,
            lenient=args.lenient,
        )
        if args.command == "run-all":
            return cmd_run_all(config, args.task)
        if args.command == "stage":
            return cmd_stage(config, args.kind, args.run_all, args.force)
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "diff":
            return cmd_diff(config, args.old, args.new)
        if args.command == "simulate":
            return cmd_simulate(config, args.script)
        raise AssertionError(args.command)
    except ValidationFailedError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseExhaustedError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_PARSE
    except TransportError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_TRANSPORT
    except SequencingError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError, WorkspaceLockedError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
