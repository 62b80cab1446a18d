"""Workspace persistence for pipeline artifacts and transcripts.

One directory per task run.  Every artifact is written atomically and
content-hashed so human edits can be detected and the affected downstream
stages re-planned.  An edited artifact is authoritative: it is never
regenerated unless explicitly forced.
"""

from __future__ import annotations

import json
import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .codegen import AddonSource
from .model import (
    ScaffoldSpec,
    TaskDescription,
    ToolSpec,
    WorkflowStage,
    canonical_bytes,
    content_hash,
)
from .pipeline import artifact_bytes, downstream_of
from .prompts import STAGE_CHAIN, PromptText, RawResponse, StageKind
from .validation import ValidationReport

logger = logging.getLogger(__name__)

ARTIFACT_PATHS: dict[StageKind, str] = {
    StageKind.WORKFLOW_ANALYSIS: "workflow.json",
    StageKind.TOOL_SELECTION: "tools.json",
    StageKind.FUNCTIONALITY_CODEGEN: "functionality",
    StageKind.UI_CODEGEN: "ui_code.txt",
    StageKind.TOOL_LABELING: "labels.json",
}


class WorkspaceLockedError(RuntimeError):
    pass


@dataclass
class ArtifactRecord:
    stage_kind: StageKind
    path: str
    content_hash: str
    last_run_hash: str = ""

    def to_dict(self) -> dict:
        return {
            "stage_kind": self.stage_kind.value,
            "path": self.path,
            "content_hash": self.content_hash,
            "last_run_hash": self.last_run_hash,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArtifactRecord":
        return cls(
            stage_kind=StageKind.parse(data["stage_kind"]),
            path=data["path"],
            content_hash=data["content_hash"],
            last_run_hash=data.get("last_run_hash", ""),
        )


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f"{path.name}.tmp"
    try:
        with open(tmp, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except OSError as error:
        raise OSError(f"failed writing {path}: {error}") from error
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)


def rerun_plan(edited: set[StageKind]) -> list[StageKind]:
    """Stages strictly downstream of any edited stage, in chain order.

    Edited stages themselves are not re-run: human output is authoritative.
    """
    pending: set[StageKind] = set()
    for kind in edited:
        pending.update(downstream_of(kind))
    return [kind for kind in STAGE_CHAIN if kind in pending]


class Workspace:
    """Filesystem layout and record-keeping for one task run."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- paths ---------------------------------------------------------

    @property
    def task_path(self) -> Path:
        return self.root / "task.json"

    @property
    def spec_path(self) -> Path:
        return self.root / "spec.json"

    @property
    def validation_path(self) -> Path:
        return self.root / "validation.json"

    @property
    def records_path(self) -> Path:
        return self.root / "records.json"

    @property
    def addon_dir(self) -> Path:
        return self.root / "addon"

    @property
    def transcripts_dir(self) -> Path:
        return self.root / "transcripts"

    def artifact_path(self, kind: StageKind) -> Path:
        return self.root / ARTIFACT_PATHS[kind]

    # -- locking -------------------------------------------------------

    @contextmanager
    def lock(self):
        """Advisory single-writer lock for the workspace."""
        self.root.mkdir(parents=True, exist_ok=True)
        lock_path = self.root / ".lock"
        if lock_path.exists():
            try:
                pid = int(lock_path.read_text(encoding="utf-8").strip() or "0")
                os.kill(pid, 0)
            except (ValueError, ProcessLookupError, PermissionError):
                logger.warning("removing stale lock %s", lock_path)
                lock_path.unlink(missing_ok=True)
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise WorkspaceLockedError(f"workspace {self.root} is locked") from None
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield self
        finally:
            lock_path.unlink(missing_ok=True)

    # -- task / spec ---------------------------------------------------

    def save_task(self, task: TaskDescription) -> None:
        _atomic_write(self.task_path, canonical_bytes(task.to_dict()))

    def load_task(self) -> TaskDescription:
        return TaskDescription.from_dict(json.loads(self.task_path.read_text("utf-8")))

    def save_spec(self, spec: ScaffoldSpec) -> None:
        _atomic_write(self.spec_path, spec.to_json().encode("utf-8"))

    def load_spec(self) -> ScaffoldSpec:
        return ScaffoldSpec.from_json(self.spec_path.read_text("utf-8"))

    def save_validation(self, report: ValidationReport) -> None:
        _atomic_write(self.validation_path, report.to_json().encode("utf-8"))

    def save_addon(self, addon: AddonSource) -> None:
        _atomic_write(self.addon_dir / "addon.py", addon.main_source.encode("utf-8"))
        _atomic_write(self.addon_dir / "manifest.json", canonical_bytes(addon.manifest))

    # -- stage artifacts ------------------------------------------------

    def save_artifact(self, kind: StageKind, payload: object) -> ArtifactRecord:
        """Write a stage artifact atomically and return its record."""
        path = self.artifact_path(kind)
        if kind is StageKind.FUNCTIONALITY_CODEGEN:
            path.mkdir(parents=True, exist_ok=True)
            for tool_id, code in sorted(payload.items()):
                _atomic_write(path / f"{tool_id}.txt", code.encode("utf-8"))
            wanted = {f"{tool_id}.txt" for tool_id in payload}
            for stray in path.glob("*.txt"):
                if stray.name not in wanted:
                    stray.unlink()
        else:
            _atomic_write(path, artifact_bytes(kind, payload))
        digest = content_hash(artifact_bytes(kind, payload))
        return ArtifactRecord(
            stage_kind=kind, path=ARTIFACT_PATHS[kind], content_hash=digest
        )

    def load_artifact(self, kind: StageKind) -> object:
        path = self.artifact_path(kind)
        if kind is StageKind.WORKFLOW_ANALYSIS:
            return [
                WorkflowStage.from_dict(d)
                for d in json.loads(path.read_text("utf-8"))
            ]
        if kind is StageKind.TOOL_SELECTION:
            return [ToolSpec.from_dict(d) for d in json.loads(path.read_text("utf-8"))]
        if kind is StageKind.FUNCTIONALITY_CODEGEN:
            return {
                file.stem: file.read_text("utf-8")
                for file in sorted(path.glob("*.txt"))
            }
        if kind is StageKind.UI_CODEGEN:
            return path.read_text("utf-8")
        if kind is StageKind.TOOL_LABELING:
            return json.loads(path.read_text("utf-8"))
        raise KeyError(kind)

    def disk_hash(self, kind: StageKind) -> str | None:
        """Recompute the content hash from what is on disk, if present."""
        path = self.artifact_path(kind)
        if not path.exists():
            return None
        payload = self.load_artifact(kind)
        return content_hash(artifact_bytes(kind, payload))

    # -- records ---------------------------------------------------------

    def load_records(self) -> tuple[dict[StageKind, ArtifactRecord], set[StageKind]]:
        if not self.records_path.exists():
            return {}, set()
        data = json.loads(self.records_path.read_text("utf-8"))
        records = {
            record.stage_kind: record
            for record in (ArtifactRecord.from_dict(d) for d in data.get("records", []))
        }
        stale = {StageKind.parse(token) for token in data.get("stale", [])}
        return records, stale

    def save_records(
        self, records: dict[StageKind, ArtifactRecord], stale: set[StageKind]
    ) -> None:
        payload = {
            "records": [
                records[kind].to_dict() for kind in STAGE_CHAIN if kind in records
            ],
            "stale": [kind.value for kind in STAGE_CHAIN if kind in stale],
        }
        _atomic_write(self.records_path, canonical_bytes(payload))

    def detect_edits(self, records: dict[StageKind, ArtifactRecord]) -> set[StageKind]:
        """Stage kinds whose on-disk content no longer matches its record.

        A missing artifact counts as edited, with a warning.
        """
        edited: set[StageKind] = set()
        for kind, record in records.items():
            try:
                on_disk = self.disk_hash(kind)
            except (ValueError, KeyError) as error:
                logger.warning("artifact %s unreadable (%s); treating as edited", record.path, error)
                edited.add(kind)
                continue
            if on_disk is None:
                logger.warning("artifact %s missing; treating as edited", record.path)
                edited.add(kind)
            elif on_disk != record.content_hash:
                edited.add(kind)
        return edited

    # -- transcripts -----------------------------------------------------

    def save_transcript(self, prompt: PromptText, raw: RawResponse) -> None:
        payload = {
            "transcript_id": raw.transcript_id,
            "stage_kind": raw.stage_kind.value,
            "prompt_body": prompt.body,
            "substitutions": dict(prompt.substitutions),
            "response_text": raw.text,
        }
        path = self.transcripts_dir / f"{raw.transcript_id}_{raw.stage_kind.value}.json"
        _atomic_write(path, canonical_bytes(payload))

    def transcript_counts(self) -> dict[StageKind, int]:
        counts: dict[StageKind, int] = {kind: 0 for kind in STAGE_CHAIN}
        if not self.transcripts_dir.is_dir():
            return counts
        for file in self.transcripts_dir.glob("t*.json"):
            data = json.loads(file.read_text("utf-8"))
            kind = StageKind.parse(data["stage_kind"])
            counts[kind] += 1
        return counts
