#!/usr/bin/env python3
"""Regenerate the checked-in fixture corpus.

Runs the real pipeline over authored responses for the UV-unwrapping task,
recording each response under its prompt hash, then freezes the resulting
spec, golden add-on, and event script.  Run from the repository root:

    python3 scripts/regen_fixtures.py

Golden files change only when this script is run deliberately.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

sys.path.insert(0, str(ROOT / "scripts"))

from scaffoldgen import cli as scaffold_cli  # noqa: E402
from scaffoldgen.cli import _finalize, RunConfig  # noqa: E402
from scaffoldgen.model import SoftwareProfile, TaskDescription, canonical_json  # noqa: E402
from scaffoldgen.pipeline import PipelineState, run_stage  # noqa: E402
from scaffoldgen.prompts import STAGE_CHAIN, PromptText  # noqa: E402
from scaffoldgen.store import Workspace  # noqa: E402
from scaffoldgen.transport import RecordingTransport  # noqa: E402

from refinement_edits import SCENARIOS, apply_edit  # noqa: E402

FIXTURES = ROOT / "fixtures"

TASK_TEXT = "Perform UV unwrapping on the default cube model"

EXAMPLE_LAYOUT_CODE = """\
import bpy


class EXAMPLE_PT_stage_panel(bpy.types.Panel):
    bl_label = "Example Task Panel"
    bl_idname = "EXAMPLE_PT_stage_panel"
    bl_space_type = 'VIEW_3D'
    bl_region_type = 'UI'
    bl_category = "Example"

    def draw(self, context):
        layout = self.layout
        layout.prop(context.scene, "example_complexity", text="Complexity")
        box = layout.box()
        box.label(text="1. First Workflow Stage")
        box.operator("example.basic_tool", text="Basic Tool (Shortcut)")
        box.operator("example.advanced_tool", text="Advanced Tool (Menu > Path)")
        box = layout.box()
        box.label(text="2. Second Workflow Stage")
        box.operator("example.second_tool", text="Second Tool (Menu > Path)")


def register():
    bpy.utils.register_class(EXAMPLE_PT_stage_panel)


def unregister():
    bpy.utils.unregister_class(EXAMPLE_PT_stage_panel)
"""

PROFILE_DATA = {
    "name": "Blender",
    "manual_refs": [
        {
            "title": "UV Unwrapping Basics",
            "body": (
                "UV unwrapping flattens a 3D mesh into a 2D layout so textures can be "
                "painted or projected onto the surface. The usual flow is to mark seams "
                "along edges, run the Unwrap operator, then inspect and adjust the "
                "resulting layout. Marking seams and unwrapping are entry-level skills; "
                "island management, pinning, and stretch analysis are used by more "
                "experienced artists."
            ),
        },
        {
            "title": "Selection and Editing Tools",
            "body": (
                "Edit Mode offers vertex, edge, and face selection; edge selection is "
                "toggled with the 2 key. Alt+Click selects a whole edge loop. Edges can "
                "be marked or cleared as seams from the Edge menu (Ctrl+E). Select All "
                "by Trait offers sharpness-based selection for hard-surface work."
            ),
        },
        {
            "title": "Complexity Conventions",
            "body": (
                "Treat everyday single-step operations as basic, workflow accelerators "
                "and refinement tools as intermediate, and analysis or batch operators "
                "as advanced."
            ),
        },
    ],
    "api_refs": [
        {
            "title": "Mesh Operators (bpy.ops.mesh)",
            "body": (
                "mode_set switches object/edit mode. select_mode(type='EDGE') switches "
                "the selection mode. mark_seam(clear=False) marks selected edges as "
                "seams. loop_multi_select(ring=False) extends selection to edge loops. "
                "edges_select_sharp(sharpness=...) selects edges by angle."
            ),
        },
        {
            "title": "UV Operators (bpy.ops.uv)",
            "body": (
                "unwrap(method='ANGLE_BASED', margin=...) unwraps selected faces along "
                "seams. smart_project(angle_limit=..., island_margin=...) projects "
                "automatically. pack_islands(margin=...) packs islands into the UV "
                "space. pin(clear=False) pins selected UVs. average_islands_scale() "
                "equalizes island texel density."
            ),
        },
        {
            "title": "Panels and Operators (bpy.types)",
            "body": (
                "Subclass bpy.types.Operator with bl_idname and an execute method for "
                "actions; subclass bpy.types.Panel with bl_space_type 'VIEW_3D' and "
                "bl_region_type 'UI' for sidebar panels; register classes with "
                "bpy.utils.register_class."
            ),
        },
    ],
    "example_layout_code": EXAMPLE_LAYOUT_CODE,
}


WORKFLOW_RESPONSE = """\
Here is the workflow breakdown for UV unwrapping in Blender:

1. **Marking Seams**: Select the edges where the mesh will be cut and mark them as seams. Domain Concepts: Seam — Where to 'cut' the 3D model's surface so it can be unfolded into a flat 2D layout; Edge — A straight line connecting two corner points of the mesh; Edge Loop — A connected ring of edges running around the mesh, handy for placing seams quickly.
2. **Unwrapping & Editing**: Unwrap the mesh along the marked seams and refine the resulting layout. Domain Concepts: Unwrap — Flattens the 3D model's surface into 2D space based on the marked seams; UV Map — The flat 2D layout that tells a texture where to land on the 3D surface; UV Islands — Makes UV islands (separate unwrapped parts) have the same relative size so textures don't look distorted.
3. **Checking & Visualization**: Inspect the unwrapped layout for stretching and distortion before texturing. Domain Concepts: UV Stretching — How much the flattened layout distorts the 3D surface, shown by color overlays on stretched areas; Checker Pattern — A grid test texture that makes stretching and distortion easy to spot on the model.
"""

TOOL_RESPONSE = """\
Below are the selected tools for each workflow stage.

- **Marking Seams**: Edge Select — Switches selection to edges so seams can be chosen precisely. Complexity Level: Basic. Native: 2 | Click an edge in Edit Mode. Control: button.
- **Marking Seams**: Mark Seam — Marks the selected edges as seams, defining where the surface will be cut apart. Complexity Level: Basic. Native: Ctrl+E | Edge > Mark Seam. Control: button.
- **Marking Seams**: Clear Seam — Removes seam marks from selected edges when a cut is misplaced. Complexity Level: Intermediate. Native: Ctrl+E | Edge > Clear Seam. Control: button.
- **Marking Seams**: Select Edge Loops — Selects a whole ring of connected edges in one action to speed up seam placement. Complexity Level: Intermediate. Native: Alt+Click | Select > Select Loops > Edge Loops. Control: button.
- **Marking Seams**: Select Sharp Edges — Selects edges sharper than a threshold, a fast start for seams on hard-surface models. Complexity Level: Advanced. Native: Select > Select All by Trait > Sharp Edges. Control: button.
- **Unwrapping & Editing**: Unwrap — Unfolds the mesh into a flat layout along the marked seams. Complexity Level: Basic. Native: U | UV > Unwrap. Control: button.
- **Unwrapping & Editing**: Pack Islands — Rearranges the unwrapped pieces to use the texture space efficiently. Complexity Level: Intermediate. Native: UV > Pack Islands. Control: button.
- **Unwrapping & Editing**: Pin Selected — Pins chosen points so later unwraps keep them in place. Complexity Level: Intermediate. Native: P | UV > Pin. Control: button.
- **Unwrapping & Editing**: Average Islands Scale — Rescales the unwrapped pieces so they share a consistent texture density. Complexity Level: Advanced. Native: UV > Average Islands Scale. Control: button.
- **Unwrapping & Editing**: Smart UV Project — Automatically unwraps the mesh using angle-based projections when manual seams are impractical. Complexity Level: Advanced. Native: UV > Smart UV Project. Control: button.
- **Checking & Visualization**: Checker Texture — Applies a grid test texture that reveals stretching directly on the model. Complexity Level: Basic. Native: Material Properties > Base Color > Image Texture. Control: button.
- **Checking & Visualization**: Display Stretching — Toggles a color overlay showing how much each area is distorted. Complexity Level: Advanced. Native: UV Editor > Overlays > Display Stretch. Control: toggle.
"""

FUNCTIONALITY_BLOCKS = {
    "Edge Select": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_mode(type='EDGE')
""",
    "Mark Seam": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.mark_seam(clear=False)
""",
    "Clear Seam": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.mark_seam(clear=True)
""",
    "Select Edge Loops": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.loop_multi_select(ring=False)
""",
    "Select Sharp Edges": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.edges_select_sharp(sharpness=0.523599)
""",
    "Unwrap": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_all(action='SELECT')
bpy.ops.uv.unwrap(method='ANGLE_BASED', margin=0.001)
""",
    "Pack Islands": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.pack_islands(margin=0.001)
""",
    "Pin Selected": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.pin(clear=False)
""",
    "Smart UV Project": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_all(action='SELECT')
bpy.ops.uv.smart_project(angle_limit=1.15192, island_margin=0.001)
""",
    "Average Islands Scale": """\
import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.average_islands_scale()
""",
    "Checker Texture": """\
import bpy

obj = bpy.context.object
if obj and obj.mode != 'OBJECT':
    bpy.ops.object.mode_set(mode='OBJECT')
image = bpy.data.images.get("UV Checker Grid")
if image is None:
    image = bpy.data.images.new("UV Checker Grid", 1024, 1024)
    image.generated_type = 'COLOR_GRID'
material = bpy.data.materials.get("UV Checker Material")
if material is None:
    material = bpy.data.materials.new("UV Checker Material")
    material.use_nodes = True
    nodes = material.node_tree.nodes
    texture = nodes.new('ShaderNodeTexImage')
    texture.image = image
    principled = nodes.get('Principled BSDF')
    if principled is not None:
        material.node_tree.links.new(texture.outputs['Color'], principled.inputs['Base Color'])
if obj is not None and obj.type == 'MESH':
    if obj.data.materials:
        obj.data.materials[0] = material
    else:
        obj.data.materials.append(material)
""",
    "Display Stretching": """\
import bpy

screen = getattr(bpy.context, 'screen', None)
if screen is not None:
    for area in screen.areas:
        if area.type == 'IMAGE_EDITOR':
            for space in area.spaces:
                if space.type == 'IMAGE_EDITOR':
                    space.uv_editor.show_stretch = not space.uv_editor.show_stretch
""",
}


def _functionality_response() -> str:
    parts = ["Here is the functionality code for each selected tool.", ""]
    for label, code in FUNCTIONALITY_BLOCKS.items():
        parts.append(f"### {label}")
        parts.append("```python")
        parts.append(code.rstrip("\n"))
        parts.append("```")
        parts.append("")
    return "\n".join(parts)


UI_RESPONSE = """\
Below is a standalone panel script that groups each control under its workflow stage and complexity level, with mouse-over tooltips drawn from the domain concepts.

```python
import bpy

LEVELS = [
    ('basic', 'Basic', 'Fundamental tools'),
    ('intermediate', 'Intermediate', 'Adds workflow accelerators'),
    ('advanced', 'Advanced', 'Full toolset'),
]


class UV_PT_scaffold_draft(bpy.types.Panel):
    bl_label = "UV Unwrapping Workflow"
    bl_idname = "UV_PT_scaffold_draft"
    bl_space_type = 'VIEW_3D'
    bl_region_type = 'UI'
    bl_category = "Workflow"

    def draw(self, context):
        layout = self.layout
        layout.prop(context.scene, "uv_scaffold_level", text="Complexity")
        level = context.scene.uv_scaffold_level
        box = layout.box()
        box.label(text="1. Marking Seams")
        box.operator("mesh.select_mode", text="Edge Select (2)").type = 'EDGE'
        box.operator("mesh.mark_seam", text="Mark Seam (Ctrl+E)")
        if level != 'basic':
            box.operator("mesh.loop_multi_select", text="Select Edge Loops (Alt+Click)")
        box = layout.box()
        box.label(text="2. Unwrapping & Editing")
        box.operator("uv.unwrap", text="Unwrap (U)")
        if level == 'advanced':
            box.operator("uv.smart_project", text="Smart UV Project")
        box = layout.box()
        box.label(text="3. Checking & Visualization")
        box.label(text="Checker Texture via Material Properties")


def register():
    bpy.types.Scene.uv_scaffold_level = bpy.props.EnumProperty(items=LEVELS, default='basic')
    bpy.utils.register_class(UV_PT_scaffold_draft)


def unregister():
    bpy.utils.unregister_class(UV_PT_scaffold_draft)
    del bpy.types.Scene.uv_scaffold_level


if __name__ == "__main__":
    register()
```
"""

LABELING_RESPONSE = """\
Each tool labeled with its relevant domain concepts:

- Edge Select: Edge
- Mark Seam: Seam
- Clear Seam: Seam
- Select Edge Loops: Edge Loop
- Select Sharp Edges: Edge
- Unwrap: Unwrap; UV Map
- Pack Islands: UV Islands
- Pin Selected: UV Map
- Smart UV Project: Unwrap
- Average Islands Scale: UV Islands
- Checker Texture: Checker Pattern
- Display Stretching: UV Stretching
"""

EVENT_SCRIPT = {
    "events": [
        {"kind": "set_level", "level": "intermediate"},
        {"kind": "hover", "tool_id": "marking_seams_mark_seam"},
        {"kind": "invoke", "tool_id": "marking_seams_mark_seam"},
        {"kind": "invoke", "tool_id": "unwrapping_editing_unwrap"},
        {"kind": "invoke", "tool_id": "unwrapping_editing_smart_uv_project"},
        {"kind": "set_level", "level": "advanced"},
        {"kind": "invoke", "tool_id": "unwrapping_editing_smart_uv_project"},
        {"kind": "hover", "tool_id": "unwrapping_editing_average_islands_scale"},
        {"kind": "invoke", "tool_id": "checking_visualization_checker_texture"},
        {"kind": "set_level", "level": "basic"},
    ]
}


class AuthoredTransport:
    """Serves the authored response for whichever stage is being prompted."""

    def __init__(self):
        self.responses = {
            "workflow_analysis": WORKFLOW_RESPONSE,
            "tool_selection": TOOL_RESPONSE,
            "functionality_codegen": _functionality_response(),
            "ui_codegen": UI_RESPONSE,
            "tool_labeling": LABELING_RESPONSE,
        }

    def send(self, prompt: PromptText) -> str:
        return self.responses[prompt.stage_kind.value]


def main() -> None:
    profile_dir = FIXTURES / "profiles"
    profile_dir.mkdir(parents=True, exist_ok=True)
    (profile_dir / "blender.json").write_text(
        canonical_json(PROFILE_DATA), encoding="utf-8"
    )
    profile = SoftwareProfile.from_dict(
        json.loads((profile_dir / "blender.json").read_text("utf-8"))
    )

    llm_dir = FIXTURES / "llm" / "uv_unwrap"
    if llm_dir.is_dir():
        for old in llm_dir.glob("*.txt"):
            old.unlink()
    transport = RecordingTransport(AuthoredTransport(), llm_dir)

    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        ws = Workspace(Path(tmp) / "ws")
        task = TaskDescription(text=TASK_TEXT, software_id=profile.name)
        ws.root.mkdir(parents=True)
        ws.save_task(task)
        state = PipelineState(task=task)
        for kind in STAGE_CHAIN:
            run_stage(state, kind, transport, profile)
            record = ws.save_artifact(kind, state.payload(kind))
            records, _ = ws.load_records()
            records[kind] = record
            ws.save_records(records, state.stale)
        config = RunConfig(
            workspace=ws.root, profile_path=profile_dir / "blender.json", mode="live"
        )
        status = _finalize(ws, config)
        if status != 0:
            raise SystemExit(f"fixture pipeline failed finalize: {status}")

        golden_dir = FIXTURES / "golden" / "uv_unwrap"
        golden_dir.mkdir(parents=True, exist_ok=True)
        (golden_dir / "addon.py").write_bytes((ws.addon_dir / "addon.py").read_bytes())
        (golden_dir / "manifest.json").write_bytes(
            (ws.addon_dir / "manifest.json").read_bytes()
        )
        (golden_dir / "spec.json").write_bytes(ws.spec_path.read_bytes())

    scripts_dir = FIXTURES / "scripts"
    scripts_dir.mkdir(parents=True, exist_ok=True)
    (scripts_dir / "uv_events.json").write_text(
        canonical_json(EVENT_SCRIPT), encoding="utf-8"
    )

    _record_refinement_fixtures(profile_dir / "blender.json", llm_dir, transport)

    count = len(list(llm_dir.glob("*.txt")))
    print(f"wrote {count} response fixtures, golden add-on, and event script")


def _record_refinement_fixtures(profile_path: Path, llm_dir: Path, transport) -> None:
    """Record the responses each scripted edit scenario's re-run will need."""
    import shutil
    import tempfile

    original_build = scaffold_cli.build_transport
    scaffold_cli.build_transport = lambda config: transport
    try:
        with tempfile.TemporaryDirectory() as tmp:
            base = Path(tmp) / "base"
            config = RunConfig(
                workspace=base,
                profile_path=profile_path,
                mode="fixtures",
                fixtures_dir=llm_dir,
            )
            status = scaffold_cli.cmd_run_all(config, TASK_TEXT)
            if status != 0:
                raise SystemExit(f"base run for refinement fixtures failed: {status}")
            for scenario in SCENARIOS:
                workspace = Path(tmp) / scenario
                shutil.copytree(base, workspace)
                apply_edit(workspace, scenario)
                config = RunConfig(
                    workspace=workspace,
                    profile_path=profile_path,
                    mode="fixtures",
                    fixtures_dir=llm_dir,
                )
                status = scaffold_cli.cmd_stage(config, None, run_all=True, force=False)
                if status != 0:
                    raise SystemExit(f"scenario {scenario} failed: {status}")
    finally:
        scaffold_cli.build_transport = original_build


if __name__ == "__main__":
    main()
