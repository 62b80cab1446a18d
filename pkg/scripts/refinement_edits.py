"""The scripted human-edit scenarios for the refinement loop.

Shared by the fixture regeneration script (which records the responses the
re-run stages will need) and the acceptance suite (which replays the same
edits and checks the re-run plan).  Each scenario edits exactly one stage
artifact in a workspace, the way a user refining the pipeline would.
"""

from __future__ import annotations

import json
from pathlib import Path

# scenario name -> (edited stage kind, expected re-run plan)
SCENARIOS = {
    "tool_complexity_bump": (
        "tool_selection",
        ["functionality_codegen", "ui_codegen", "tool_labeling"],
    ),
    "stage_description_reword": (
        "workflow_analysis",
        ["tool_selection", "functionality_codegen", "ui_codegen", "tool_labeling"],
    ),
    "functionality_tweak": ("functionality_codegen", ["ui_codegen", "tool_labeling"]),
    "ui_draft_note": ("ui_codegen", ["tool_labeling"]),
    "label_swap": ("tool_labeling", []),
}


def _rewrite_json(path: Path, mutate) -> None:
    data = json.loads(path.read_text("utf-8"))
    mutate(data)
    path.write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def apply_edit(workspace: Path, scenario: str) -> Path:
    """Apply one scenario's edit to a populated workspace; returns the file."""
    workspace = Path(workspace)
    if scenario == "tool_complexity_bump":
        path = workspace / "tools.json"

        def bump(data):
            for tool in data:
                if tool["label"] == "Pin Selected":
                    tool["complexity"] = "advanced"
                    return
            raise KeyError("Pin Selected not in tools.json")

        _rewrite_json(path, bump)
        return path
    if scenario == "stage_description_reword":
        path = workspace / "workflow.json"

        def reword(data):
            data[2]["description"] = "Look over the finished layout before texturing"

        _rewrite_json(path, reword)
        return path
    if scenario == "functionality_tweak":
        path = workspace / "functionality" / "unwrapping_editing_unwrap.txt"
        code = path.read_text("utf-8")
        path.write_text(code + "# reviewed by hand\n", encoding="utf-8")
        return path
    if scenario == "ui_draft_note":
        path = workspace / "ui_code.txt"
        text = path.read_text("utf-8")
        path.write_text("# draft kept for reference\n" + text, encoding="utf-8")
        return path
    if scenario == "label_swap":
        path = workspace / "labels.json"

        def swap(data):
            data["checking_visualization_checker_texture"] = [
                "Checker Pattern",
                "UV Stretching",
            ]

        _rewrite_json(path, swap)
        return path
    raise KeyError(scenario)
