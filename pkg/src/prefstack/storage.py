"""File formats: tasks, raw demonstration logs, and trained models.

Everything is JSON with a schema_version field. Saves are canonical
(sorted keys, fixed indentation, trailing newline) so that identical
values produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ParseError, SchemaMismatch
from .model import (
    Action,
    ActionKind,
    Demonstration,
    Part,
    PrimaryActionDef,
    SecondaryActionDef,
    SecondaryActionSet,
    TaskDefinition,
    TimeStep,
    canonicalize,
    to_timesteps,
)
from .training import HighLevelCluster, LowLevelCluster, PreferenceModel, TrainingConfig

SCHEMA_VERSION = 1


def _dump(payload: dict[str, Any], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _load(path: Path, kind: str) -> dict[str, Any]:
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read {kind} file: {exc}") from exc
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: {kind} file must hold a JSON object")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: schema_version {version!r} unsupported (want {SCHEMA_VERSION})")
    return payload


def _field(payload: dict[str, Any], name: str, where: str) -> Any:
    if name not in payload:
        raise ParseError(f"{where}: missing field {name!r}")
    return payload[name]


# -- tasks ------------------------------------------------------------------


def task_to_dict(task: TaskDefinition) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "task_id": task.task_id,
        "parts": [
            {"part_id": p.part_id, "part_type": p.part_type, "fungible": p.fungible}
            for p in task.parts
        ],
        "primary_actions": [
            {"action_id": a.action_id, "required_part_types": list(a.required_part_types)}
            for a in task.primary_actions
        ],
        "secondary_actions": [
            {"action_id": a.action_id, "supplied_part_type": a.supplied_part_type}
            for a in task.secondary_actions
        ],
    }


def task_from_dict(payload: dict[str, Any], where: str = "task") -> TaskDefinition:
    try:
        return TaskDefinition(
            task_id=_field(payload, "task_id", where),
            parts=tuple(
                Part(p["part_id"], p["part_type"], bool(p["fungible"]))
                for p in _field(payload, "parts", where)
            ),
            primary_actions=tuple(
                PrimaryActionDef(a["action_id"], tuple(a["required_part_types"]))
                for a in _field(payload, "primary_actions", where)
            ),
            secondary_actions=tuple(
                SecondaryActionDef(a["action_id"], a["supplied_part_type"])
                for a in _field(payload, "secondary_actions", where)
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed task: {exc}") from exc


def save_task(task: TaskDefinition, path: Path) -> None:
    _dump(task_to_dict(task), path)


def load_task(path: Path) -> TaskDefinition:
    return task_from_dict(_load(path, "task"), where=str(path))


# -- demonstrations -----------------------------------------------------------


def demo_to_raw_dict(demo: Demonstration) -> dict[str, Any]:
    """Raw (unsegmented) action order, as recorded."""
    return {
        "schema_version": SCHEMA_VERSION,
        "user_id": demo.user_id,
        "actions": [{"id": a.id, "kind": a.kind.value} for a in demo.flatten()],
    }


def demo_from_raw_dict(
    payload: dict[str, Any], task: TaskDefinition, where: str = "demo"
) -> Demonstration:
    user_id = _field(payload, "user_id", where)
    entries = _field(payload, "actions", where)
    actions: list[Action] = []
    for i, entry in enumerate(entries):
        try:
            kind = ActionKind(entry["kind"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"{where}: actions[{i}]: malformed entry: {exc}") from exc
        if kind is ActionKind.NOOP:
            continue
        raw_id = entry.get("id")
        if not raw_id:
            raise ParseError(f"{where}: actions[{i}]: missing id")
        actions.append(canonicalize(raw_id, task))
    return to_timesteps(actions, user_id=user_id, task=task)


def save_demo(demo: Demonstration, path: Path) -> None:
    _dump(demo_to_raw_dict(demo), path)


def load_demo(path: Path, task: TaskDefinition) -> Demonstration:
    return demo_from_raw_dict(_load(path, "demonstration"), task, where=str(path))


def save_demos(demos: list[Demonstration], directory: Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for demo in demos:
        save_demo(demo, directory / f"{demo.user_id}.json")


def load_demos(directory: Path, task: TaskDefinition) -> list[Demonstration]:
    """One file per user; lexicographic file order defines index order."""
    directory = Path(directory)
    paths = sorted(p for p in directory.glob("*.json") if not p.name.endswith(".task.json"))
    if not paths:
        raise ParseError(f"{directory}: no demonstration files found")
    return [load_demo(p, task) for p in paths]


# -- models -------------------------------------------------------------------


def _sorted_identity(identity: frozenset[str]) -> list[str]:
    return sorted(identity)


def _steps_to_list(steps: tuple[TimeStep, ...]) -> list[dict[str, Any]]:
    return [
        {"secondary": s.secondary.sorted_tokens(), "primary": s.primary.id}
        for s in steps
    ]


def _steps_from_list(entries: list[dict[str, Any]], where: str) -> tuple[TimeStep, ...]:
    steps = []
    for i, entry in enumerate(entries):
        try:
            steps.append(
                TimeStep(
                    SecondaryActionSet(frozenset(entry["secondary"])),
                    Action(id=entry["primary"], kind=ActionKind.PRIMARY),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{where}: steps[{i}]: malformed step: {exc}") from exc
    return tuple(steps)


def model_to_dict(model: PreferenceModel) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "task_id": model.task_id,
        "config": {
            "linkage": model.config.linkage,
            "metric": model.config.metric,
            "seed": model.config.seed,
        },
        "high_clusters": [
            {
                "cluster_id": c.cluster_id,
                "member_user_ids": list(c.member_user_ids),
                "representative": [_sorted_identity(i) for i in c.representative],
                "prior": [c.prior.numerator, c.prior.denominator],
            }
            for c in model.high_clusters
        ],
        "low_clusters": [
            {
                "identity": _sorted_identity(identity),
                "clusters": [
                    {
                        "cluster_id": c.cluster_id,
                        "members": [[uid, occ] for uid, occ in c.members],
                        "sequences": [
                            [s.sorted_tokens() for s in seq] for seq in c.sequences
                        ],
                        "prior": [c.prior.numerator, c.prior.denominator],
                    }
                    for c in clusters
                ],
            }
            for identity, clusters in sorted(
                model.low_clusters.items(), key=lambda kv: sorted(kv[0])
            )
        ],
        "demonstrations": [
            {"user_id": d.user_id, "steps": _steps_to_list(d.steps)}
            for d in model.demonstrations
        ],
    }


def model_from_dict(payload: dict[str, Any], where: str = "model") -> PreferenceModel:
    cfg = _field(payload, "config", where)
    try:
        config = TrainingConfig(
            linkage=cfg["linkage"], metric=cfg["metric"], seed=int(cfg["seed"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed config: {exc}") from exc
    high = []
    for entry in _field(payload, "high_clusters", where):
        try:
            high.append(
                HighLevelCluster(
                    cluster_id=int(entry["cluster_id"]),
                    member_user_ids=tuple(entry["member_user_ids"]),
                    representative=tuple(frozenset(i) for i in entry["representative"]),
                    prior=Fraction(entry["prior"][0], entry["prior"][1]),
                )
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"{where}: malformed high cluster: {exc}") from exc
    low: dict[frozenset[str], tuple[LowLevelCluster, ...]] = {}
    for entry in _field(payload, "low_clusters", where):
        try:
            identity = frozenset(entry["identity"])
            clusters = tuple(
                LowLevelCluster(
                    cluster_id=int(c["cluster_id"]),
                    identity=identity,
                    members=tuple((m[0], int(m[1])) for m in c["members"]),
                    sequences=tuple(
                        tuple(SecondaryActionSet(frozenset(s)) for s in seq)
                        for seq in c["sequences"]
                    ),
                    prior=Fraction(c["prior"][0], c["prior"][1]),
                )
                for c in entry["clusters"]
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"{where}: malformed low cluster: {exc}") from exc
        low[identity] = clusters
    demos = tuple(
        Demonstration(
            user_id=_field(d, "user_id", where),
            steps=_steps_from_list(_field(d, "steps", where), where),
        )
        for d in _field(payload, "demonstrations", where)
    )
    return PreferenceModel(
        task_id=_field(payload, "task_id", where),
        config=config,
        high_clusters=tuple(high),
        low_clusters=low,
        demonstrations=demos,
    )


def save_model(model: PreferenceModel, path: Path) -> None:
    _dump(model_to_dict(model), path)


def load_model(path: Path) -> PreferenceModel:
    return model_from_dict(_load(path, "model"), where=str(path))
