"""In-memory simulation of the generated panel.

A session tracks the selected complexity level, answers visibility and
tooltip queries exactly as the generated panel would, and keeps an
append-only event log.  Replaying a scripted event sequence produces the
same JSON log format the headless harness emits, so the two can be
compared field for field.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .codegen import build_operator_ids, render_tooltip
from .model import ComplexityLevel, ScaffoldSpec, canonical_json, canonicalize
from .validation import visible_tools as _visible_ids


class VisibilityError(LookupError):
    """The targeted control does not exist at the current level."""


@dataclass(frozen=True)
class SessionEvent:
    ordinal: int
    kind: str  # level_change | invoke | hover
    target: str  # level value or tool id
    detail: str = ""  # operator id for invokes, tooltip text for hovers

    def to_dict(self) -> dict:
        entry = {
            "ordinal": self.ordinal,
            "kind": self.kind,
            "target": self.target,
            "status": "ok",
        }
        if self.kind == "invoke":
            entry["operator"] = self.detail
        elif self.kind == "hover":
            entry["tooltip"] = self.detail
        return entry


@dataclass
class Session:
    spec: ScaffoldSpec
    level: ComplexityLevel = ComplexityLevel.BASIC
    events: list[SessionEvent] = field(default_factory=list)
    tool_index: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.spec = canonicalize(self.spec)
        if not self.tool_index:
            self.tool_index = build_operator_ids(self.spec)

    def clone(self) -> "Session":
        return copy.deepcopy(self)

    def _append(self, kind: str, target: str, detail: str = "") -> None:
        self.events.append(
            SessionEvent(ordinal=len(self.events) + 1, kind=kind, target=target, detail=detail)
        )


def visible_tools(session: Session) -> list[str]:
    """Tool ids visible at the current level, in panel order."""
    return _visible_ids(session.spec, session.level)


def set_level(session: Session, level: ComplexityLevel) -> Session:
    session.level = level
    session._append("level_change", level.value)
    return session


def _require_visible(session: Session, tool_id: str) -> None:
    if tool_id not in visible_tools(session):
        raise VisibilityError(
            f"tool {tool_id!r} is not visible at level {session.level.value}"
        )


def hover(session: Session, tool_id: str) -> str:
    """Tooltip for a visible tool; hovering a hidden tool is an error."""
    _require_visible(session, tool_id)
    tooltip = render_tooltip(session.spec.tool_by_id(tool_id), session.spec)
    session._append("hover", tool_id, tooltip)
    return tooltip


def invoke(session: Session, tool_id: str) -> Session:
    """Record an invocation of a visible tool via its operator identifier."""
    _require_visible(session, tool_id)
    session._append("invoke", tool_id, session.tool_index[tool_id])
    return session


def export_event_log(session: Session) -> dict:
    return {"events": [event.to_dict() for event in session.events]}


def replay_script(session: Session, script: dict) -> dict:
    """Replay a scripted event list, recording errors instead of raising.

    The returned log covers every scripted event in order; an event that
    targets a hidden control is recorded with status ``visibility_error``,
    mirroring the control simply not existing at that level.
    """
    log: list[dict] = []
    for ordinal, event in enumerate(script.get("events", []), start=1):
        kind = event.get("kind", "")
        if kind == "set_level":
            level = ComplexityLevel.parse(event["level"])
            set_level(session, level)
            log.append(
                {"ordinal": ordinal, "kind": "level_change", "target": level.value, "status": "ok"}
            )
        elif kind == "invoke":
            tool_id = event["tool_id"]
            try:
                invoke(session, tool_id)
            except VisibilityError:
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "invoke",
                        "target": tool_id,
                        "status": "visibility_error",
                    }
                )
            else:
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "invoke",
                        "target": tool_id,
                        "status": "ok",
                        "operator": session.tool_index[tool_id],
                    }
                )
        elif kind == "hover":
            tool_id = event["tool_id"]
            try:
                tooltip = hover(session, tool_id)
            except VisibilityError:
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "hover",
                        "target": tool_id,
                        "status": "visibility_error",
                    }
                )
            else:
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "hover",
                        "target": tool_id,
                        "status": "ok",
                        "tooltip": tooltip,
                    }
                )
        else:
            log.append({"ordinal": ordinal, "kind": kind, "target": "", "status": "unknown_event"})
    return {"events": log}


def event_log_json(log: dict) -> str:
    return canonical_json(log)
