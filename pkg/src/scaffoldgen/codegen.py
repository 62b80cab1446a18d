"""Deterministic add-on rendering from a validated spec.

The panel structure is template-owned: stage sections in order, a
complexity selector, tooltips composed from concept explanations plus the
native mapping, and one operator per tool whose execution body is the
tool's functionality code, verbatim.  Identical canonical specs render to
identical bytes; timestamps live only in the manifest.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from datetime import datetime, timezone

from .model import (
    ComplexityLevel,
    ScaffoldSpec,
    StructuralError,
    ToolSpec,
    canonicalize,
    slugify,
    spec_hash,
)
from .validation import ValidationReport, validate_spec

TEMPLATE_VERSION = "1.0.0"
RUNTIME_MODULE = "scaffold_panel_runtime"
RUNTIME_VERSION = "1.0.0"
PANEL_IDNAME = "SCAFFOLD_PT_task_panel"
PANEL_CATEGORY = "Scaffold"
OPERATOR_NAMESPACE = "scaffold"


class ValidationFailedError(RuntimeError):
    """Rendering refused because the spec failed validation."""

    def __init__(self, report: ValidationReport):
        failed = ", ".join(r.rule_id for r in report.failures())
        super().__init__(f"spec failed validation rules: {failed}")
        self.report = report


@dataclass(frozen=True)
class AddonSource:
    main_source: str
    manifest: dict
    tool_index: dict[str, str]


def mangle_identifier(label: str, namespace: str, used: set[str] | None = None) -> str:
    """Slug a label into an identifier, optionally unique against ``used``.

    Collisions are resolved with a numeric suffix in first-seen order.
    """
    if not label.strip():
        raise StructuralError("cannot mangle an empty label")
    base = slugify(label)
    name = f"{namespace}_{base}" if namespace else base
    if used is None:
        return name
    candidate = name
    counter = 2
    while candidate in used:
        candidate = f"{name}_{counter}"
        counter += 1
    used.add(candidate)
    return candidate


def build_operator_ids(spec: ScaffoldSpec) -> dict[str, str]:
    """Map each tool id to its operator idname, in canonical tool order."""
    used: set[str] = set()
    index: dict[str, str] = {}
    for tool in spec.tools:
        suffix = mangle_identifier(tool.label, "", used)
        index[tool.tool_id] = f"{OPERATOR_NAMESPACE}.{suffix}"
    return index


def render_tooltip(tool: ToolSpec, spec: ScaffoldSpec) -> str:
    """Concept explanations joined by ``; ``, then the native mapping."""
    pairs = []
    for term in tool.concepts:
        concept = spec.concept_by_term(term)
        if concept is None:
            raise StructuralError(f"tool {tool.tool_id!r}: unresolved concept {term!r}")
        pairs.append(f"{concept.term}: {concept.explanation}")
    body = "; ".join(pairs)
    suffix = tool.native.as_label() if tool.native else ""
    if body and suffix:
        return f"{body} — {suffix}"
    return body or suffix


def display_text(tool: ToolSpec) -> str:
    """Button caption: the label plus the native-mapping string."""
    if tool.native is None:
        return tool.label
    return f"{tool.label} ({tool.native.as_label()})"


def _string_literal(code: str) -> str:
    """A source literal whose value is ``code``, byte-exact when possible.

    Raw triple-quoted strings keep embedded backslashes intact; when the
    code itself rules both quote styles out, fall back to ``repr``.
    """
    for quote in ('"""', "'''"):
        if quote in code:
            continue
        if code.endswith("\\"):
            continue
        if not code.endswith("\n") and code.endswith(quote[0]):
            continue
        return f"r{quote}{code}{quote}"
    return repr(code)


def _tuple_literal(value: tuple) -> str:
    if not value:
        return "()"
    if len(value) == 1:
        return f"({value[0]!r},)"
    return "(" + ", ".join(repr(v) for v in value) + ")"


def render_addon(spec: ScaffoldSpec, lenient: bool = False) -> AddonSource:
    """Render a loadable add-on plus its manifest from a valid spec."""
    spec = canonicalize(spec)
    report = validate_spec(spec, lenient=lenient)
    if not report.passed:
        raise ValidationFailedError(report)

    digest = spec_hash(spec)
    operator_ids = build_operator_ids(spec)
    title = spec.task.text.strip().splitlines()[0][:60]
    addon_name = f"Scaffolded Panel: {title}"

    lines: list[str] = []
    out = lines.append
    out("bl_info = {")
    out(f'    "name": {addon_name!r},')
    out('    "author": "scaffoldgen",')
    out('    "version": (1, 0, 0),')
    out('    "blender": (3, 6, 0),')
    out('    "location": "View3D > Sidebar > Scaffold",')
    out('    "description": "Task-specific scaffolded panel with progressive tool disclosure.",')
    out('    "category": "Interface",')
    out("}")
    out("")
    out("import bpy")
    out("")
    out(f"from {RUNTIME_MODULE} import (")
    out("    LEVEL_ITEMS,")
    out("    compose_tooltip,")
    out("    run_tool_code,")
    out("    visible_tool_entries,")
    out(")")
    out("")
    out(f'PANEL_IDNAME = "{PANEL_IDNAME}"')
    out(f'PANEL_CATEGORY = "{PANEL_CATEGORY}"')
    out(f'SPEC_HASH = "{digest}"')
    out("")

    out("STAGES = (")
    for stage in spec.stages:
        out("    {")
        out(f'        "stage_id": {stage.stage_id},')
        out(f'        "name": {stage.name!r},')
        out(f'        "description": {stage.description!r},')
        out(f'        "show_prop": "scaffold_show_stage_{stage.stage_id}",')
        out("    },")
    out(")")
    out("")

    out("TOOLS = (")
    for tool in spec.tools:
        concept_pairs = []
        for term in tool.concepts:
            concept = spec.concept_by_term(term)
            if concept is None:
                raise StructuralError(
                    f"tool {tool.tool_id!r}: unresolved concept {term!r}"
                )
            concept_pairs.append((concept.term, concept.explanation))
        out("    {")
        out(f'        "tool_id": {tool.tool_id!r},')
        out(f'        "label": {tool.label!r},')
        out(f'        "stage_id": {tool.stage_id},')
        out(f'        "complexity": {tool.complexity.value!r},')
        out(f'        "control": {tool.control_kind!r},')
        out(f'        "operator": {operator_ids[tool.tool_id]!r},')
        out(f'        "display": {display_text(tool)!r},')
        out(f'        "concepts": {_tuple_literal(tuple(concept_pairs))},')
        out(f'        "native": {(tool.native.as_label() if tool.native else "")!r},')
        out("    },")
    out(")")
    out("")
    out('TOOL_BY_ID = {entry["tool_id"]: entry for entry in TOOLS}')
    out("")

    out("FUNCTIONALITY = {")
    for tool in spec.tools:
        out(f"    {tool.tool_id!r}: {_string_literal(tool.functionality_code)},")
    out("}")
    out("")
    out("")
    out("def _tooltip(tool_id):")
    out("    entry = TOOL_BY_ID[tool_id]")
    out('    return compose_tooltip(entry["concepts"], entry["native"])')
    out("")

    class_names: list[str] = []
    for stage in spec.stages:
        out("")
        out(f"# Stage {stage.stage_id}: {stage.name}")
        for tool in spec.tools:
            if tool.stage_id != stage.stage_id:
                continue
            suffix = operator_ids[tool.tool_id].split(".", 1)[1]
            class_name = f"SCAFFOLD_OT_{suffix}"
            class_names.append(class_name)
            out("")
            out(f"class {class_name}(bpy.types.Operator):")
            out(f"    bl_idname = {operator_ids[tool.tool_id]!r}")
            out(f"    bl_label = {tool.label!r}")
            out(f"    bl_description = _tooltip({tool.tool_id!r})")
            out('    bl_options = {"REGISTER", "UNDO"}')
            out(f"    scaffold_tool_id = {tool.tool_id!r}")
            out("")
            out("    def execute(self, context):")
            out(f"        return run_tool_code(self, FUNCTIONALITY[{tool.tool_id!r}])")
            out("")

    out("")
    out("class SCAFFOLD_PT_task_panel(bpy.types.Panel):")
    out(f"    bl_label = {addon_name!r}")
    out("    bl_idname = PANEL_IDNAME")
    out('    bl_space_type = "VIEW_3D"')
    out('    bl_region_type = "UI"')
    out("    bl_category = PANEL_CATEGORY")
    out("")
    out("    def draw(self, context):")
    out("        layout = self.layout")
    out("        scene = context.scene")
    out('        layout.prop(scene, "scaffold_complexity", text="Complexity")')
    out('        level = scene.scaffold_complexity')
    out("        for stage in STAGES:")
    out("            box = layout.box()")
    out("            header = box.row()")
    out('            expanded = getattr(scene, stage["show_prop"], True)')
    out("            header.prop(")
    out("                scene,")
    out('                stage["show_prop"],')
    out('                text="{}. {}".format(stage["stage_id"], stage["name"]),')
    out('                icon="TRIA_DOWN" if expanded else "TRIA_RIGHT",')
    out("                emboss=False,")
    out("            )")
    out("            if not expanded:")
    out("                continue")
    out('            if stage["description"]:')
    out('                box.label(text=stage["description"])')
    out('            for entry in visible_tool_entries(TOOLS, stage["stage_id"], level):')
    out('                box.operator(entry["operator"], text=entry["display"])')
    out("")
    out("")
    out("CLASSES = (")
    for class_name in class_names:
        out(f"    {class_name},")
    out("    SCAFFOLD_PT_task_panel,")
    out(")")
    out("")
    out("")
    out("def register():")
    out("    for cls in CLASSES:")
    out("        bpy.utils.register_class(cls)")
    out("    bpy.types.Scene.scaffold_complexity = bpy.props.EnumProperty(")
    out('        name="Complexity",')
    out('        description="Progressively disclose tools from basic to advanced",')
    out("        items=LEVEL_ITEMS,")
    out('        default="basic",')
    out("    )")
    out("    for stage in STAGES:")
    out("        setattr(")
    out("            bpy.types.Scene,")
    out('            stage["show_prop"],')
    out('            bpy.props.BoolProperty(name=stage["name"], default=True),')
    out("        )")
    out("")
    out("")
    out("def unregister():")
    out("    for stage in reversed(STAGES):")
    out('        if hasattr(bpy.types.Scene, stage["show_prop"]):')
    out('            delattr(bpy.types.Scene, stage["show_prop"])')
    out('    if hasattr(bpy.types.Scene, "scaffold_complexity"):')
    out("        del bpy.types.Scene.scaffold_complexity")
    out("    for cls in reversed(CLASSES):")
    out("        bpy.utils.unregister_class(cls)")
    out("")
    out("")
    out('if __name__ == "__main__":')
    out("    register()")

    main_source = "\n".join(lines) + "\n"

    manifest = {
        "addon_id": f"scaffold_{digest[:12]}",
        "addon_name": addon_name,
        "panel_idname": PANEL_IDNAME,
        "panel_category": PANEL_CATEGORY,
        "runtime_module": RUNTIME_MODULE,
        "runtime_version": RUNTIME_VERSION,
        "template_version": TEMPLATE_VERSION,
        "spec_hash": digest,
        "spec_version": spec.version,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_index": dict(operator_ids),
    }
    return AddonSource(main_source=main_source, manifest=manifest, tool_index=dict(operator_ids))


def read_table(main_source: str, name: str) -> tuple:
    """Statically read a literal table (STAGES or TOOLS) out of an add-on."""
    tree = ast.parse(main_source)
    for node in tree.body:
        if (
            isinstance(node, ast.Assign)
            and len(node.targets) == 1
            and isinstance(node.targets[0], ast.Name)
            and node.targets[0].id == name
        ):
            return ast.literal_eval(node.value)
    raise KeyError(name)


_SECTION_HEADER_RE = re.compile(r"^# Stage (\d+): (.+)$", re.MULTILINE)


def section_headers(main_source: str) -> list[tuple[int, str]]:
    return [(int(m.group(1)), m.group(2)) for m in _SECTION_HEADER_RE.finditer(main_source)]
