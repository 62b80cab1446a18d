"""Runtime support library imported by generated scaffolded panels.

Generated add-ons keep their data in literal tables and delegate the three
behaviors every panel shares to this module: the complexity level selector
items, the progressive-disclosure visibility filter, and tooltip
composition from concept/native data.  The module is deliberately free of
``bpy`` imports so it can be exercised outside Blender.
"""

from __future__ import annotations

RUNTIME_VERSION = "1.0.0"

LEVEL_ITEMS = (
    ("basic", "Basic", "Fundamental tools for the task"),
    ("intermediate", "Intermediate", "Adds workflow accelerators"),
    ("advanced", "Advanced", "The complete toolset"),
)

_LEVEL_RANK = {"basic": 0, "intermediate": 1, "advanced": 2}

# Outcome of the last execution per operator idname: "" on success,
# otherwise the error text.  Lets a headless driver distinguish poll
# failures from real exceptions without relying on UI report popups.
LAST_RESULTS: dict[str, str] = {}


def level_rank(level: str) -> int:
    return _LEVEL_RANK[level]


def is_visible(tool_level: str, selected_level: str) -> bool:
    """A tool shows when its complexity is at or below the selected level."""
    return _LEVEL_RANK[tool_level] <= _LEVEL_RANK[selected_level]


def visible_tool_entries(tools, stage_id: int, selected_level: str) -> list:
    """Filter a generated TOOLS table down to one stage at one level."""
    return [
        entry
        for entry in tools
        if entry["stage_id"] == stage_id and is_visible(entry["complexity"], selected_level)
    ]


def compose_tooltip(concepts, native: str) -> str:
    """Tooltip text: concept explanations joined by ``; ``, then the native mapping."""
    body = "; ".join(f"{term}: {explanation}" for term, explanation in concepts)
    if body and native:
        return f"{body} — {native}"
    return body or native


def run_tool_code(operator, code: str):
    """Execute a tool's functionality code block on behalf of an operator.

    Errors are reported through the operator and recorded in LAST_RESULTS
    instead of propagating, so a misbehaving tool cancels cleanly.
    """
    idname = getattr(operator, "bl_idname", type(operator).__name__)
    try:
        exec(compile(code, f"<{idname}>", "exec"), {"__name__": "scaffold_tool"})
    except Exception as error:  # noqa: BLE001 - tool code is arbitrary
        message = str(error)
        LAST_RESULTS[idname] = message
        report = getattr(operator, "report", None)
        if callable(report):
            report({"ERROR"}, message)
        return {"CANCELLED"}
    LAST_RESULTS[idname] = ""
    return {"FINISHED"}
