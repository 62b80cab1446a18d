"""Drives the host checks, in a real Blender subprocess or in-process.

Real mode spawns ``blender --background --factory-startup`` running the
entry script; stub mode injects the fake ``bpy`` into ``sys.modules`` and
runs the same host-check code in this process.  Both write the same
report format.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

from . import fakebpy, hostcheck

ENTRY_SCRIPT = Path(__file__).resolve().parent / "inblender_entry.py"
BLENDER_ENV_VAR = "SCAFFOLD_BLENDER"


def find_blender() -> str | None:
    configured = os.environ.get(BLENDER_ENV_VAR)
    if configured and Path(configured).exists():
        return configured
    return shutil.which("blender")


def write_report(report: dict, report_path: str | Path) -> None:
    path = Path(report_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def run_in_stub(
    addon_path: str | Path,
    manifest_path: str | Path,
    script_path: str | Path | None = None,
) -> dict:
    """Run the host checks against the fake ``bpy`` in this process."""
    import scaffold_panel_runtime as runtime

    saved_bpy = sys.modules.get("bpy")
    saved_addon = sys.modules.get(hostcheck.ADDON_MODULE_NAME)
    sys.modules["bpy"] = fakebpy.create_bpy()
    sys.modules.pop(hostcheck.ADDON_MODULE_NAME, None)
    runtime.LAST_RESULTS.clear()
    try:
        return hostcheck.run_harness(addon_path, manifest_path, script_path)
    finally:
        if saved_bpy is not None:
            sys.modules["bpy"] = saved_bpy
        else:
            sys.modules.pop("bpy", None)
        if saved_addon is not None:
            sys.modules[hostcheck.ADDON_MODULE_NAME] = saved_addon
        else:
            sys.modules.pop(hostcheck.ADDON_MODULE_NAME, None)


def run_in_blender(
    blender: str,
    addon_path: str | Path,
    manifest_path: str | Path,
    report_path: str | Path,
    script_path: str | Path | None = None,
    timeout: float = 300.0,
) -> dict:
    """Run the host checks in a Blender subprocess; returns the report."""
    report_path = Path(report_path)
    report_path.unlink(missing_ok=True)
    argv = [
        blender,
        "--background",
        "--factory-startup",
        "--python",
        str(ENTRY_SCRIPT),
        "--",
        "--addon",
        str(addon_path),
        "--manifest",
        str(manifest_path),
        "--report",
        str(report_path),
    ]
    if script_path is not None:
        argv += ["--script", str(script_path)]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=timeout, check=False
        )
        crashed = proc.returncode != 0 and not report_path.exists()
        stderr_tail = proc.stderr[-2000:] if proc.stderr else ""
    except subprocess.TimeoutExpired:
        crashed = True
        stderr_tail = "blender timed out"

    if report_path.exists():
        report = json.loads(report_path.read_text(encoding="utf-8"))
        if crashed:
            report["crashed"] = True
        return report
    manifest = hostcheck.load_manifest(manifest_path)
    return {
        "addon_id": manifest.get("addon_id", ""),
        "blender_version": "unknown",
        "registered": False,
        "panel_found": False,
        "error": stderr_tail,
        "crashed": crashed,
        "operators": [],
        "events": None,
    }


def run(
    addon_path: str | Path,
    manifest_path: str | Path,
    report_path: str | Path,
    script_path: str | Path | None = None,
    mode: str = "auto",
    blender: str | None = None,
) -> dict:
    """Dispatch to the requested backend and persist the report."""
    if mode == "auto":
        blender = blender or find_blender()
        mode = "blender" if blender else "stub"
    if mode == "blender":
        blender = blender or find_blender()
        if not blender:
            raise FileNotFoundError(
                f"no Blender executable found; set {BLENDER_ENV_VAR} or use --mode stub"
            )
        report = run_in_blender(blender, addon_path, manifest_path, report_path, script_path)
    elif mode == "stub":
        report = run_in_stub(addon_path, manifest_path, script_path)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report["backend"] = mode
    write_report(report, report_path)
    return report
