bl_info = {
    "name": 'Scaffolded Panel: Perform UV unwrapping on the default cube model',
    "author": "scaffoldgen",
    "version": (1, 0, 0),
    "blender": (3, 6, 0),
    "location": "View3D > Sidebar > Scaffold",
    "description": "Task-specific scaffolded panel with progressive tool disclosure.",
    "category": "Interface",
}

import bpy

from scaffold_panel_runtime import (
    LEVEL_ITEMS,
    compose_tooltip,
    run_tool_code,
    visible_tool_entries,
)

PANEL_IDNAME = "SCAFFOLD_PT_task_panel"
PANEL_CATEGORY = "Scaffold"
SPEC_HASH = "e4175641b599f9914a2e9e5170f41aa4d04f82be0bedf3108d08f88ace884f42"

STAGES = (
    {
        "stage_id": 1,
        "name": 'Marking Seams',
        "description": 'Select the edges where the mesh will be cut and mark them as seams',
        "show_prop": "scaffold_show_stage_1",
    },
    {
        "stage_id": 2,
        "name": 'Unwrapping & Editing',
        "description": 'Unwrap the mesh along the marked seams and refine the resulting layout',
        "show_prop": "scaffold_show_stage_2",
    },
    {
        "stage_id": 3,
        "name": 'Checking & Visualization',
        "description": 'Inspect the unwrapped layout for stretching and distortion before texturing',
        "show_prop": "scaffold_show_stage_3",
    },
)

TOOLS = (
    {
        "tool_id": 'marking_seams_edge_select',
        "label": 'Edge Select',
        "stage_id": 1,
        "complexity": 'basic',
        "control": 'button',
        "operator": 'scaffold.edge_select',
        "display": 'Edge Select (2 | Click an edge in Edit Mode)',
        "concepts": (('Edge', 'A straight line connecting two corner points of the mesh'),),
        "native": '2 | Click an edge in Edit Mode',
    },
    {
        "tool_id": 'marking_seams_mark_seam',
        "label": 'Mark Seam',
        "stage_id": 1,
        "complexity": 'basic',
        "control": 'button',
        "operator": 'scaffold.mark_seam',
        "display": 'Mark Seam (Ctrl+E | Edge > Mark Seam)',
        "concepts": (('Seam', "Where to 'cut' the 3D model's surface so it can be unfolded into a flat 2D layout"),),
        "native": 'Ctrl+E | Edge > Mark Seam',
    },
    {
        "tool_id": 'marking_seams_clear_seam',
        "label": 'Clear Seam',
        "stage_id": 1,
        "complexity": 'intermediate',
        "control": 'button',
        "operator": 'scaffold.clear_seam',
        "display": 'Clear Seam (Ctrl+E | Edge > Clear Seam)',
        "concepts": (('Seam', "Where to 'cut' the 3D model's surface so it can be unfolded into a flat 2D layout"),),
        "native": 'Ctrl+E | Edge > Clear Seam',
    },
    {
        "tool_id": 'marking_seams_select_edge_loops',
        "label": 'Select Edge Loops',
        "stage_id": 1,
        "complexity": 'intermediate',
        "control": 'button',
        "operator": 'scaffold.select_edge_loops',
        "display": 'Select Edge Loops (Alt+Click | Select > Select Loops > Edge Loops)',
        "concepts": (('Edge Loop', 'A connected ring of edges running around the mesh, handy for placing seams quickly'),),
        "native": 'Alt+Click | Select > Select Loops > Edge Loops',
    },
    {
        "tool_id": 'marking_seams_select_sharp_edges',
        "label": 'Select Sharp Edges',
        "stage_id": 1,
        "complexity": 'advanced',
        "control": 'button',
        "operator": 'scaffold.select_sharp_edges',
        "display": 'Select Sharp Edges (Select > Select All by Trait > Sharp Edges)',
        "concepts": (('Edge', 'A straight line connecting two corner points of the mesh'),),
        "native": 'Select > Select All by Trait > Sharp Edges',
    },
    {
        "tool_id": 'unwrapping_editing_unwrap',
        "label": 'Unwrap',
        "stage_id": 2,
        "complexity": 'basic',
        "control": 'button',
        "operator": 'scaffold.unwrap',
        "display": 'Unwrap (U | UV > Unwrap)',
        "concepts": (('Unwrap', "Flattens the 3D model's surface into 2D space based on the marked seams"), ('UV Map', 'The flat 2D layout that tells a texture where to land on the 3D surface')),
        "native": 'U | UV > Unwrap',
    },
    {
        "tool_id": 'unwrapping_editing_pack_islands',
        "label": 'Pack Islands',
        "stage_id": 2,
        "complexity": 'intermediate',
        "control": 'button',
        "operator": 'scaffold.pack_islands',
        "display": 'Pack Islands (UV > Pack Islands)',
        "concepts": (('UV Islands', "Makes UV islands (separate unwrapped parts) have the same relative size so textures don't look distorted"),),
        "native": 'UV > Pack Islands',
    },
    {
        "tool_id": 'unwrapping_editing_pin_selected',
        "label": 'Pin Selected',
        "stage_id": 2,
        "complexity": 'intermediate',
        "control": 'button',
        "operator": 'scaffold.pin_selected',
        "display": 'Pin Selected (P | UV > Pin)',
        "concepts": (('UV Map', 'The flat 2D layout that tells a texture where to land on the 3D surface'),),
        "native": 'P | UV > Pin',
    },
    {
        "tool_id": 'unwrapping_editing_average_islands_scale',
        "label": 'Average Islands Scale',
        "stage_id": 2,
        "complexity": 'advanced',
        "control": 'button',
        "operator": 'scaffold.average_islands_scale',
        "display": 'Average Islands Scale (UV > Average Islands Scale)',
        "concepts": (('UV Islands', "Makes UV islands (separate unwrapped parts) have the same relative size so textures don't look distorted"),),
        "native": 'UV > Average Islands Scale',
    },
    {
        "tool_id": 'unwrapping_editing_smart_uv_project',
        "label": 'Smart UV Project',
        "stage_id": 2,
        "complexity": 'advanced',
        "control": 'button',
        "operator": 'scaffold.smart_uv_project',
        "display": 'Smart UV Project (UV > Smart UV Project)',
        "concepts": (('Unwrap', "Flattens the 3D model's surface into 2D space based on the marked seams"),),
        "native": 'UV > Smart UV Project',
    },
    {
        "tool_id": 'checking_visualization_checker_texture',
        "label": 'Checker Texture',
        "stage_id": 3,
        "complexity": 'basic',
        "control": 'button',
        "operator": 'scaffold.checker_texture',
        "display": 'Checker Texture (Material Properties > Base Color > Image Texture)',
        "concepts": (('Checker Pattern', 'A grid test texture that makes stretching and distortion easy to spot on the model'),),
        "native": 'Material Properties > Base Color > Image Texture',
    },
    {
        "tool_id": 'checking_visualization_display_stretching',
        "label": 'Display Stretching',
        "stage_id": 3,
        "complexity": 'advanced',
        "control": 'toggle',
        "operator": 'scaffold.display_stretching',
        "display": 'Display Stretching (UV Editor > Overlays > Display Stretch)',
        "concepts": (('UV Stretching', 'How much the flattened layout distorts the 3D surface, shown by color overlays on stretched areas'),),
        "native": 'UV Editor > Overlays > Display Stretch',
    },
)

TOOL_BY_ID = {entry["tool_id"]: entry for entry in TOOLS}

FUNCTIONALITY = {
    'marking_seams_edge_select': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_mode(type='EDGE')
""",
    'marking_seams_mark_seam': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.mark_seam(clear=False)
""",
    'marking_seams_clear_seam': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.mark_seam(clear=True)
""",
    'marking_seams_select_edge_loops': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.loop_multi_select(ring=False)
""",
    'marking_seams_select_sharp_edges': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.edges_select_sharp(sharpness=0.523599)
""",
    'unwrapping_editing_unwrap': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_all(action='SELECT')
bpy.ops.uv.unwrap(method='ANGLE_BASED', margin=0.001)
""",
    'unwrapping_editing_pack_islands': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.pack_islands(margin=0.001)
""",
    'unwrapping_editing_pin_selected': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.pin(clear=False)
""",
    'unwrapping_editing_average_islands_scale': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.uv.average_islands_scale()
""",
    'unwrapping_editing_smart_uv_project': r"""import bpy

if bpy.context.object and bpy.context.object.mode != 'EDIT':
    bpy.ops.object.mode_set(mode='EDIT')
bpy.ops.mesh.select_all(action='SELECT')
bpy.ops.uv.smart_project(angle_limit=1.15192, island_margin=0.001)
""",
    'checking_visualization_checker_texture': r"""import bpy

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
    'checking_visualization_display_stretching': r"""import bpy

screen = getattr(bpy.context, 'screen', None)
if screen is not None:
    for area in screen.areas:
        if area.type == 'IMAGE_EDITOR':
            for space in area.spaces:
                if space.type == 'IMAGE_EDITOR':
                    space.uv_editor.show_stretch = not space.uv_editor.show_stretch
""",
}


def _tooltip(tool_id):
    entry = TOOL_BY_ID[tool_id]
    return compose_tooltip(entry["concepts"], entry["native"])


# Stage 1: Marking Seams

class SCAFFOLD_OT_edge_select(bpy.types.Operator):
    bl_idname = 'scaffold.edge_select'
    bl_label = 'Edge Select'
    bl_description = _tooltip('marking_seams_edge_select')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'marking_seams_edge_select'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['marking_seams_edge_select'])


class SCAFFOLD_OT_mark_seam(bpy.types.Operator):
    bl_idname = 'scaffold.mark_seam'
    bl_label = 'Mark Seam'
    bl_description = _tooltip('marking_seams_mark_seam')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'marking_seams_mark_seam'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['marking_seams_mark_seam'])


class SCAFFOLD_OT_clear_seam(bpy.types.Operator):
    bl_idname = 'scaffold.clear_seam'
    bl_label = 'Clear Seam'
    bl_description = _tooltip('marking_seams_clear_seam')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'marking_seams_clear_seam'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['marking_seams_clear_seam'])


class SCAFFOLD_OT_select_edge_loops(bpy.types.Operator):
    bl_idname = 'scaffold.select_edge_loops'
    bl_label = 'Select Edge Loops'
    bl_description = _tooltip('marking_seams_select_edge_loops')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'marking_seams_select_edge_loops'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['marking_seams_select_edge_loops'])


class SCAFFOLD_OT_select_sharp_edges(bpy.types.Operator):
    bl_idname = 'scaffold.select_sharp_edges'
    bl_label = 'Select Sharp Edges'
    bl_description = _tooltip('marking_seams_select_sharp_edges')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'marking_seams_select_sharp_edges'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['marking_seams_select_sharp_edges'])


# Stage 2: Unwrapping & Editing

class SCAFFOLD_OT_unwrap(bpy.types.Operator):
    bl_idname = 'scaffold.unwrap'
    bl_label = 'Unwrap'
    bl_description = _tooltip('unwrapping_editing_unwrap')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'unwrapping_editing_unwrap'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['unwrapping_editing_unwrap'])


class SCAFFOLD_OT_pack_islands(bpy.types.Operator):
    bl_idname = 'scaffold.pack_islands'
    bl_label = 'Pack Islands'
    bl_description = _tooltip('unwrapping_editing_pack_islands')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'unwrapping_editing_pack_islands'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['unwrapping_editing_pack_islands'])


class SCAFFOLD_OT_pin_selected(bpy.types.Operator):
    bl_idname = 'scaffold.pin_selected'
    bl_label = 'Pin Selected'
    bl_description = _tooltip('unwrapping_editing_pin_selected')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'unwrapping_editing_pin_selected'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['unwrapping_editing_pin_selected'])


class SCAFFOLD_OT_average_islands_scale(bpy.types.Operator):
    bl_idname = 'scaffold.average_islands_scale'
    bl_label = 'Average Islands Scale'
    bl_description = _tooltip('unwrapping_editing_average_islands_scale')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'unwrapping_editing_average_islands_scale'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['unwrapping_editing_average_islands_scale'])


class SCAFFOLD_OT_smart_uv_project(bpy.types.Operator):
    bl_idname = 'scaffold.smart_uv_project'
    bl_label = 'Smart UV Project'
    bl_description = _tooltip('unwrapping_editing_smart_uv_project')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'unwrapping_editing_smart_uv_project'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['unwrapping_editing_smart_uv_project'])


# Stage 3: Checking & Visualization

class SCAFFOLD_OT_checker_texture(bpy.types.Operator):
    bl_idname = 'scaffold.checker_texture'
    bl_label = 'Checker Texture'
    bl_description = _tooltip('checking_visualization_checker_texture')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'checking_visualization_checker_texture'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['checking_visualization_checker_texture'])


class SCAFFOLD_OT_display_stretching(bpy.types.Operator):
    bl_idname = 'scaffold.display_stretching'
    bl_label = 'Display Stretching'
    bl_description = _tooltip('checking_visualization_display_stretching')
    bl_options = {"REGISTER", "UNDO"}
    scaffold_tool_id = 'checking_visualization_display_stretching'

    def execute(self, context):
        return run_tool_code(self, FUNCTIONALITY['checking_visualization_display_stretching'])


class SCAFFOLD_PT_task_panel(bpy.types.Panel):
    bl_label = 'Scaffolded Panel: Perform UV unwrapping on the default cube model'
    bl_idname = PANEL_IDNAME
    bl_space_type = "VIEW_3D"
    bl_region_type = "UI"
    bl_category = PANEL_CATEGORY

    def draw(self, context):
        layout = self.layout
        scene = context.scene
        layout.prop(scene, "scaffold_complexity", text="Complexity")
        level = scene.scaffold_complexity
        for stage in STAGES:
            box = layout.box()
            header = box.row()
            expanded = getattr(scene, stage["show_prop"], True)
            header.prop(
                scene,
                stage["show_prop"],
                text="{}. {}".format(stage["stage_id"], stage["name"]),
                icon="TRIA_DOWN" if expanded else "TRIA_RIGHT",
                emboss=False,
            )
            if not expanded:
                continue
            if stage["description"]:
                box.label(text=stage["description"])
            for entry in visible_tool_entries(TOOLS, stage["stage_id"], level):
                box.operator(entry["operator"], text=entry["display"])


CLASSES = (
    SCAFFOLD_OT_edge_select,
    SCAFFOLD_OT_mark_seam,
    SCAFFOLD_OT_clear_seam,
    SCAFFOLD_OT_select_edge_loops,
    SCAFFOLD_OT_select_sharp_edges,
    SCAFFOLD_OT_unwrap,
    SCAFFOLD_OT_pack_islands,
    SCAFFOLD_OT_pin_selected,
    SCAFFOLD_OT_average_islands_scale,
    SCAFFOLD_OT_smart_uv_project,
    SCAFFOLD_OT_checker_texture,
    SCAFFOLD_OT_display_stretching,
    SCAFFOLD_PT_task_panel,
)


def register():
    for cls in CLASSES:
        bpy.utils.register_class(cls)
    bpy.types.Scene.scaffold_complexity = bpy.props.EnumProperty(
        name="Complexity",
        description="Progressively disclose tools from basic to advanced",
        items=LEVEL_ITEMS,
        default="basic",
    )
    for stage in STAGES:
        setattr(
            bpy.types.Scene,
            stage["show_prop"],
            bpy.props.BoolProperty(name=stage["name"], default=True),
        )


def unregister():
    for stage in reversed(STAGES):
        if hasattr(bpy.types.Scene, stage["show_prop"]):
            delattr(bpy.types.Scene, stage["show_prop"])
    if hasattr(bpy.types.Scene, "scaffold_complexity"):
        del bpy.types.Scene.scaffold_complexity
    for cls in reversed(CLASSES):
        bpy.utils.unregister_class(cls)


if __name__ == "__main__":
    register()
