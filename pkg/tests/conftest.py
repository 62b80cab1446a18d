import json
import random
from pathlib import Path

import pytest

from scaffoldgen.model import (
    ComplexityLevel,
    DomainConcept,
    NativeMapping,
    ScaffoldSpec,
    SoftwareProfile,
    TaskDescription,
    ToolSpec,
    WorkflowStage,
    canonicalize,
    tool_id_for,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
LLM_FIXTURES = FIXTURES / "llm" / "uv_unwrap"
GOLDEN = FIXTURES / "golden" / "uv_unwrap"
PROFILE_PATH = FIXTURES / "profiles" / "blender.json"
EVENTS_SCRIPT = FIXTURES / "scripts" / "uv_events.json"


@pytest.fixture(scope="session")
def profile() -> SoftwareProfile:
    return SoftwareProfile.from_dict(json.loads(PROFILE_PATH.read_text("utf-8")))


@pytest.fixture(scope="session")
def uv_spec() -> ScaffoldSpec:
    return ScaffoldSpec.from_json((GOLDEN / "spec.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def golden_addon() -> str:
    return (GOLDEN / "addon.py").read_text("utf-8")


@pytest.fixture(scope="session")
def golden_manifest() -> dict:
    return json.loads((GOLDEN / "manifest.json").read_text("utf-8"))


_STAGE_WORDS = ["Prepare", "Shape", "Refine", "Review", "Assemble", "Polish"]
_TOOL_WORDS = ["Cut", "Join", "Mirror", "Offset", "Project", "Snap", "Weld", "Align"]
_CONCEPT_WORDS = ["Axis", "Pivot", "Normal", "Island", "Loop", "Crease", "Falloff", "Origin"]


def make_random_spec(rng: random.Random) -> ScaffoldSpec:
    """A structurally valid spec that passes all validation rules."""
    stage_count = rng.randint(1, 3)
    stage_names = rng.sample(_STAGE_WORDS, stage_count)
    concept_pool = rng.sample(_CONCEPT_WORDS, rng.randint(2, 6))
    concepts_per_stage = []
    taken = 0
    stages = []
    for index, name in enumerate(stage_names, start=1):
        count = rng.randint(1, 2) if taken < len(concept_pool) else 0
        terms = concept_pool[taken : taken + count]
        taken += count
        if index == 1 and not terms:
            terms = concept_pool[:1]
            taken = max(taken, 1)
        concepts = tuple(
            DomainConcept(term, f"Explains {term.lower()} in plain words") for term in terms
        )
        concepts_per_stage.append(terms)
        stages.append(
            WorkflowStage(
                stage_id=index,
                name=f"{name} Phase",
                description=f"{name} the model",
                concepts=concepts,
            )
        )
    all_terms = [t for terms in concepts_per_stage for t in terms]

    tools = []
    for stage in stages:
        labels = rng.sample(_TOOL_WORDS, rng.randint(1, 4))
        for position, word in enumerate(labels):
            label = f"{word} {stage.stage_id}{position}"
            level = (
                ComplexityLevel.BASIC
                if position == 0
                else rng.choice(list(ComplexityLevel))
            )
            native_kind = rng.randrange(3)
            native = NativeMapping(
                shortcut="Ctrl+K" if native_kind == 0 else None,
                menu_path="Menu > Item" if native_kind == 1 else None,
                mouse_op="Drag the handle" if native_kind == 2 else None,
            )
            tools.append(
                ToolSpec(
                    tool_id=tool_id_for(stage.name, label),
                    label=label,
                    stage_id=stage.stage_id,
                    complexity=level,
                    rationale=f"Needed while doing {stage.name.lower()}",
                    concepts=(rng.choice(all_terms),),
                    native=native,
                    control_kind=rng.choice(
                        ["button", "button", "toggle", "dropdown", "slider"]
                    ),
                    functionality_code=f"print('{label}')\n",
                )
            )
    spec = ScaffoldSpec(
        task=TaskDescription(text="Generated task", software_id="Blender"),
        stages=tuple(stages),
        tools=tuple(tools),
        version=1,
    )
    return canonicalize(spec)
