"""Checks that run against a live ``bpy`` module, real or fake.

Installs a generated add-on, verifies registration and panel presence,
smoke-executes every operator in the manifest's tool index, and replays
event scripts against the real panel state.  ``import bpy`` happens inside
functions so this module can be imported outside Blender.
"""

from __future__ import annotations

import importlib.util
import json
import sys
import traceback
from pathlib import Path

ADDON_MODULE_NAME = "scaffold_generated_addon"


def load_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _blender_version() -> str:
    import bpy

    return bpy.app.version_string


def install_and_register(addon_path: str | Path) -> dict:
    """Import the add-on module and run its register(); idempotent.

    A second call with the module already loaded and registered reports
    success without registering a duplicate panel.
    """
    import bpy

    addon_path = Path(addon_path)
    result = {
        "registered": False,
        "panel_found": False,
        "error": "",
        "blender_version": _blender_version(),
    }
    if not addon_path.is_file():
        result["error"] = f"add-on file not found: {addon_path}"
        return result

    module = sys.modules.get(ADDON_MODULE_NAME)
    if module is None:
        try:
            spec = importlib.util.spec_from_file_location(ADDON_MODULE_NAME, addon_path)
            module = importlib.util.module_from_spec(spec)
            sys.modules[ADDON_MODULE_NAME] = module
            spec.loader.exec_module(module)
            module.register()
            module._scaffold_registered = True
        except Exception:
            sys.modules.pop(ADDON_MODULE_NAME, None)
            result["error"] = traceback.format_exc()
            return result
    elif not getattr(module, "_scaffold_registered", False):
        try:
            module.register()
            module._scaffold_registered = True
        except Exception:
            result["error"] = traceback.format_exc()
            return result

    result["registered"] = True
    panel_idname = getattr(module, "PANEL_IDNAME", "SCAFFOLD_PT_task_panel")
    result["panel_found"] = getattr(bpy.types, panel_idname, None) is not None
    return result


def uninstall(manifest: dict | None = None) -> None:
    module = sys.modules.pop(ADDON_MODULE_NAME, None)
    if module is not None and getattr(module, "_scaffold_registered", False):
        module.unregister()


def panel_count(panel_idname: str) -> int:
    """How many panels carry this idname (fake registry when available)."""
    import bpy

    registry = getattr(bpy, "_registered_panels", None)
    if registry is not None:
        return sum(1 for idname in registry if idname == panel_idname)
    return 1 if getattr(bpy.types, panel_idname, None) is not None else 0


def _classify_call(operator_id: str) -> tuple[str, str]:
    """Invoke one operator and classify the outcome."""
    import bpy

    import scaffold_panel_runtime as runtime

    namespace, name = operator_id.split(".", 1)
    op = getattr(getattr(bpy.ops, namespace), name)
    try:
        result = op()
    except RuntimeError as error:
        message = str(error)
        if ".poll() failed" in message:
            return "poll_failed", message
        return "exception", message
    except AttributeError as error:
        return "exception", str(error)
    if "CANCELLED" in result:
        message = runtime.LAST_RESULTS.get(operator_id, "")
        if ".poll() failed" in message or "poll() failed" in message:
            return "poll_failed", message
        return "exception", message or "operator cancelled"
    return "ok", ""


def smoke_operators(manifest: dict) -> list[dict]:
    """Execute every operator in the tool index once, in index order."""
    results = []
    for tool_id, operator_id in manifest.get("tool_index", {}).items():
        status, message = _classify_call(operator_id)
        results.append(
            {
                "tool_id": tool_id,
                "operator": operator_id,
                "status": status,
                "message": message,
            }
        )
    return results


def _visible_operator_ids(module) -> set[str]:
    """Operators the panel currently shows, via the runtime filter."""
    import bpy

    import scaffold_panel_runtime as runtime

    level = bpy.context.scene.scaffold_complexity
    visible: set[str] = set()
    for stage in module.STAGES:
        for entry in runtime.visible_tool_entries(module.TOOLS, stage["stage_id"], level):
            visible.add(entry["operator"])
    return visible


def draw_panel_operators(module) -> list[str] | None:
    """Draw the panel into a recording layout; fake-bpy only."""
    import bpy

    layout_cls = getattr(bpy, "_recording_layout", None)
    if layout_cls is None:
        return None
    panel_cls = getattr(bpy.types, module.PANEL_IDNAME)
    panel = panel_cls.__new__(panel_cls)
    panel.layout = layout_cls()
    panel.draw(bpy.context)
    return panel.layout.drawn_operators()


def capture_events(manifest: dict, script: dict) -> dict:
    """Replay an event script against the live panel state.

    Entries mirror the simulator's log format field for field: an event
    aimed at a control hidden at the current level records a
    ``visibility_error`` instead of executing.  Execution outcomes are the
    smoke run's concern, not the event log's.
    """
    import bpy

    module = sys.modules[ADDON_MODULE_NAME]
    tool_index = manifest.get("tool_index", {})
    log: list[dict] = []
    for ordinal, event in enumerate(script.get("events", []), start=1):
        kind = event.get("kind", "")
        if kind == "set_level":
            level = event["level"]
            bpy.context.scene.scaffold_complexity = level
            log.append(
                {"ordinal": ordinal, "kind": "level_change", "target": level, "status": "ok"}
            )
        elif kind == "invoke":
            tool_id = event["tool_id"]
            operator_id = tool_index.get(tool_id, "")
            if operator_id not in _visible_operator_ids(module):
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "invoke",
                        "target": tool_id,
                        "status": "visibility_error",
                    }
                )
                continue
            _classify_call(operator_id)
            log.append(
                {
                    "ordinal": ordinal,
                    "kind": "invoke",
                    "target": tool_id,
                    "status": "ok",
                    "operator": operator_id,
                }
            )
        elif kind == "hover":
            tool_id = event["tool_id"]
            operator_id = tool_index.get(tool_id, "")
            if operator_id not in _visible_operator_ids(module):
                log.append(
                    {
                        "ordinal": ordinal,
                        "kind": "hover",
                        "target": tool_id,
                        "status": "visibility_error",
                    }
                )
                continue
            namespace, name = operator_id.split(".", 1)
            rna = getattr(getattr(bpy.ops, namespace), name).get_rna_type()
            log.append(
                {
                    "ordinal": ordinal,
                    "kind": "hover",
                    "target": tool_id,
                    "status": "ok",
                    "tooltip": rna.description,
                }
            )
        else:
            log.append({"ordinal": ordinal, "kind": kind, "target": "", "status": "unknown_event"})
    return {"events": log}


def report_exit_code(report: dict) -> int:
    """0 iff registered, panel found, and no operator raised an exception."""
    if not report.get("registered") or not report.get("panel_found"):
        return 1
    if report.get("crashed"):
        return 1
    for entry in report.get("operators", []):
        if entry["status"] == "exception":
            return 1
    return 0


def run_harness(
    addon_path: str | Path,
    manifest_path: str | Path,
    script_path: str | Path | None = None,
) -> dict:
    """Full check sequence; returns the report dict."""
    manifest = load_manifest(manifest_path)
    partial = install_and_register(addon_path)
    report = {
        "addon_id": manifest.get("addon_id", ""),
        "blender_version": partial["blender_version"],
        "registered": partial["registered"],
        "panel_found": partial["panel_found"],
        "error": partial["error"],
        "crashed": False,
        "operators": [],
        "events": None,
    }
    if not partial["registered"]:
        return report
    report["operators"] = smoke_operators(manifest)
    if script_path is not None:
        script = json.loads(Path(script_path).read_text(encoding="utf-8"))
        report["events"] = capture_events(manifest, script)
    return report
