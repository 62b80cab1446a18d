"""A minimal in-process stand-in for the ``bpy`` module.

Covers exactly the API surface generated panels and their functionality
code touch: class registration, scene properties, the operator namespace
with poll semantics, a sliver of ``bpy.data``, and a recording UI layout
so panel draws can be captured.  Poll failures raise the same
``.poll() failed, context is incorrect`` RuntimeError text Blender uses,
so error classification matches a real background run.

``create_bpy()`` builds a fresh module object per run; callers place it in
``sys.modules["bpy"]`` before importing an add-on.
"""

from __future__ import annotations

import types
from dataclasses import dataclass, field

VERSION_STRING = "fake-bpy 1.0"


@dataclass
class _Prop:
    kind: str
    default: object = None
    items: tuple = ()
    name: str = ""


class _Socket:
    def __init__(self, name):
        self.name = name
        self.default_value = None


class _Node:
    def __init__(self, type_name, name=None):
        self.type = type_name
        self.name = name or type_name
        self.image = None
        self.inputs = _SocketMap()
        self.outputs = _SocketMap()


class _SocketMap(dict):
    def __getitem__(self, key):
        if key not in self:
            super().__setitem__(key, _Socket(key))
        return super().__getitem__(key)

    def get(self, key, default=None):
        return self[key]


class _Links:
    def __init__(self):
        self.pairs = []

    def new(self, output, input_socket):
        self.pairs.append((output, input_socket))


class _NodeTree:
    def __init__(self):
        self.nodes = _Nodes()
        self.links = _Links()


class _Nodes:
    def __init__(self):
        self._nodes = {
            "Principled BSDF": _Node("ShaderNodeBsdfPrincipled", "Principled BSDF"),
            "Material Output": _Node("ShaderNodeOutputMaterial", "Material Output"),
        }

    def get(self, name):
        return self._nodes.get(name)

    def new(self, type_name):
        node = _Node(type_name)
        self._nodes[f"{type_name}.{len(self._nodes)}"] = node
        return node


class _Material:
    def __init__(self, name):
        self.name = name
        self._use_nodes = False
        self.node_tree = None

    @property
    def use_nodes(self):
        return self._use_nodes

    @use_nodes.setter
    def use_nodes(self, value):
        self._use_nodes = value
        if value and self.node_tree is None:
            self.node_tree = _NodeTree()


class _Image:
    def __init__(self, name, width=0, height=0):
        self.name = name
        self.size = (width, height)
        self.generated_type = "BLANK"


class _Collection:
    def __init__(self, factory):
        self._factory = factory
        self._items: dict[str, object] = {}

    def get(self, name):
        return self._items.get(name)

    def new(self, name, *args, **kwargs):
        item = self._factory(name, *args, **kwargs)
        self._items[name] = item
        return item

    def __iter__(self):
        return iter(self._items.values())


class _MaterialSlots(list):
    def append(self, material):  # mirrors mesh.materials.append
        super().append(material)


class _Mesh:
    def __init__(self):
        self.materials = _MaterialSlots()


class _Object:
    def __init__(self, name="Cube", type_name="MESH"):
        self.name = name
        self.type = type_name
        self.mode = "OBJECT"
        self.data = _Mesh()


class _ViewLayer:
    def update(self):
        pass


class _RecordedCall:
    """One layout call; operator() returns this so `.prop = x` works."""

    def __init__(self, kind, **detail):
        self.kind = kind
        self.detail = detail

    def __setattr__(self, name, value):
        object.__setattr__(self, name, value)


class RecordingLayout:
    """Stand-in for UILayout that records what a draw() emits."""

    def __init__(self):
        self.calls: list[_RecordedCall] = []
        self.children: list[RecordingLayout] = []

    def _record(self, kind, **detail) -> _RecordedCall:
        call = _RecordedCall(kind, **detail)
        self.calls.append(call)
        return call

    def prop(self, data, prop_name, **kwargs):
        return self._record("prop", data=data, prop=prop_name, **kwargs)

    def label(self, text="", **kwargs):
        return self._record("label", text=text)

    def operator(self, idname, text=None, **kwargs):
        return self._record("operator", idname=idname, text=text)

    def box(self):
        child = RecordingLayout()
        self.children.append(child)
        return child

    def row(self, align=False):
        child = RecordingLayout()
        self.children.append(child)
        return child

    def column(self, align=False):
        child = RecordingLayout()
        self.children.append(child)
        return child

    def drawn_operators(self) -> list[str]:
        found = [c.detail["idname"] for c in self.calls if c.kind == "operator"]
        for child in self.children:
            found.extend(child.drawn_operators())
        return found


def _poll_error(ns, name):
    return RuntimeError(
        f"Operator bpy.ops.{ns}.{name}.poll() failed, context is incorrect"
    )


def create_bpy() -> types.ModuleType:
    """Build a fresh fake ``bpy`` module with its own registries and scene."""
    bpy = types.ModuleType("bpy")

    # -- types ----------------------------------------------------------
    types_mod = types.ModuleType("bpy.types")

    class Operator:
        bl_idname = ""
        bl_label = ""
        bl_description = ""

        def __init__(self):
            self.reports: list[tuple[set, str]] = []

        def report(self, levels, message):
            self.reports.append((levels, message))
            report_log.append((self.bl_idname, message))

    class Panel:
        bl_idname = ""
        bl_label = ""

    class PropertyGroup:
        pass

    class Scene:
        pass

    types_mod.Operator = Operator
    types_mod.Panel = Panel
    types_mod.PropertyGroup = PropertyGroup
    types_mod.Scene = Scene

    report_log: list[tuple[str, str]] = []
    registered_classes: list[type] = []
    registered_ops: dict[tuple[str, str], type] = {}
    registered_panels: dict[str, type] = {}

    # -- props ------------------------------------------------------------
    props_mod = types.ModuleType("bpy.props")

    def EnumProperty(items=(), default="", name="", description=""):
        return _Prop("enum", default, tuple(items), name)

    def BoolProperty(default=False, name="", description=""):
        return _Prop("bool", default, (), name)

    def StringProperty(default="", name="", description="", **kwargs):
        return _Prop("string", default, (), name)

    def PointerProperty(type=None, **kwargs):
        return _Prop("pointer", None, (), "")

    props_mod.EnumProperty = EnumProperty
    props_mod.BoolProperty = BoolProperty
    props_mod.StringProperty = StringProperty
    props_mod.PointerProperty = PointerProperty

    # -- scene ------------------------------------------------------------
    class FakeScene:
        def __init__(self):
            object.__setattr__(self, "_values", {})

        def __getattr__(self, name):
            prop = getattr(Scene, name, None)
            if isinstance(prop, _Prop):
                return self._values.get(name, prop.default)
            raise AttributeError(name)

        def __setattr__(self, name, value):
            prop = getattr(Scene, name, None)
            if isinstance(prop, _Prop):
                if prop.kind == "enum":
                    allowed = {item[0] for item in prop.items}
                    if value not in allowed:
                        raise TypeError(f"enum {name!r} may not be set to {value!r}")
                self._values[name] = value
            else:
                object.__setattr__(self, name, value)

    scene = FakeScene()
    cube = _Object()

    # -- context ----------------------------------------------------------
    context = types.SimpleNamespace(
        scene=scene, object=cube, active_object=cube, screen=None, view_layer=_ViewLayer()
    )

    # -- data ---------------------------------------------------------------
    data_mod = types.SimpleNamespace(
        images=_Collection(lambda name, w=0, h=0: _Image(name, w, h)),
        materials=_Collection(lambda name: _Material(name)),
        objects=_Collection(lambda name: _Object(name)),
    )

    # -- ops ---------------------------------------------------------------
    def _require_edit(ns, name):
        if context.object is None or context.object.mode != "EDIT":
            raise _poll_error(ns, name)

    def _sim_mode_set(mode="OBJECT", **kwargs):
        if context.object is None:
            raise _poll_error("object", "mode_set")
        context.object.mode = mode
        return {"FINISHED"}

    def _edit_only(ns, name):
        def sim(**kwargs):
            _require_edit(ns, name)
            return {"FINISHED"}

        return sim

    def _sim_uv_pin(**kwargs):
        # No UV editor space exists headlessly, matching background Blender.
        raise _poll_error("uv", "pin")

    builtin_ops = {
        ("object", "mode_set"): _sim_mode_set,
        ("mesh", "select_mode"): _edit_only("mesh", "select_mode"),
        ("mesh", "select_all"): _edit_only("mesh", "select_all"),
        ("mesh", "mark_seam"): _edit_only("mesh", "mark_seam"),
        ("mesh", "loop_multi_select"): _edit_only("mesh", "loop_multi_select"),
        ("mesh", "edges_select_sharp"): _edit_only("mesh", "edges_select_sharp"),
        ("uv", "unwrap"): _edit_only("uv", "unwrap"),
        ("uv", "smart_project"): _edit_only("uv", "smart_project"),
        ("uv", "pack_islands"): _edit_only("uv", "pack_islands"),
        ("uv", "average_islands_scale"): _edit_only("uv", "average_islands_scale"),
        ("uv", "pin"): _sim_uv_pin,
    }

    class _OpRna:
        def __init__(self, description):
            self.description = description

    class _OpCallable:
        def __init__(self, ns, name):
            self._ns = ns
            self._name = name

        def __call__(self, **kwargs):
            cls = registered_ops.get((self._ns, self._name))
            if cls is not None:
                poll = getattr(cls, "poll", None)
                if callable(poll) and not poll(context):
                    raise _poll_error(self._ns, self._name)
                instance = cls()
                return instance.execute(context)
            sim = builtin_ops.get((self._ns, self._name))
            if sim is not None:
                return sim(**kwargs)
            raise AttributeError(
                f"Calling operator \"bpy.ops.{self._ns}.{self._name}\" error, could not be found"
            )

        def get_rna_type(self):
            cls = registered_ops.get((self._ns, self._name))
            if cls is None:
                raise KeyError(f"{self._ns}.{self._name}")
            return _OpRna(getattr(cls, "bl_description", ""))

    class _OpsNamespace:
        def __init__(self, ns):
            self._ns = ns

        def __getattr__(self, name):
            return _OpCallable(self._ns, name)

    class _Ops:
        def __getattr__(self, ns):
            return _OpsNamespace(ns)

    # -- utils ---------------------------------------------------------------
    utils_mod = types.ModuleType("bpy.utils")

    def register_class(cls):
        if cls in registered_classes:
            raise ValueError(f"register_class(...): already registered: {cls.__name__}")
        if issubclass(cls, Operator):
            idname = getattr(cls, "bl_idname", "")
            if "." not in idname:
                raise ValueError(f"operator {cls.__name__} has invalid bl_idname {idname!r}")
            ns, name = idname.split(".", 1)
            registered_ops[(ns, name)] = cls
        elif issubclass(cls, Panel):
            idname = getattr(cls, "bl_idname", cls.__name__)
            registered_panels[idname] = cls
            setattr(types_mod, idname, cls)
        registered_classes.append(cls)

    def unregister_class(cls):
        if cls not in registered_classes:
            raise RuntimeError(f"unregister_class(...): not registered: {cls.__name__}")
        registered_classes.remove(cls)
        if issubclass(cls, Operator):
            ns, name = cls.bl_idname.split(".", 1)
            registered_ops.pop((ns, name), None)
        elif issubclass(cls, Panel):
            idname = getattr(cls, "bl_idname", cls.__name__)
            registered_panels.pop(idname, None)
            if hasattr(types_mod, idname):
                delattr(types_mod, idname)

    utils_mod.register_class = register_class
    utils_mod.unregister_class = unregister_class

    # -- assemble -------------------------------------------------------------
    bpy.types = types_mod
    bpy.props = props_mod
    bpy.utils = utils_mod
    bpy.ops = _Ops()
    bpy.context = context
    bpy.data = data_mod
    bpy.app = types.SimpleNamespace(version=(3, 6, 0), version_string=VERSION_STRING)

    # Introspection hooks for the harness (not part of the real API).
    bpy._registered_panels = registered_panels
    bpy._registered_ops = registered_ops
    bpy._report_log = report_log
    bpy._recording_layout = RecordingLayout
    return bpy
