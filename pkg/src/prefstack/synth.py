"""Synthetic corpus generation mimicking the study's structure.

The built-in bookcase task has 17 parts in 4 fungible types (long boards,
short boards, connectors, shelves) and 32 unique connections. The fig4-like
preset produces 18 users: three groups with identical event orders (6/3/5
users) plus 4 outliers whose orders derive from a group order by an
event-level shift or swap. Shelf events come in two secondary styles,
"one side first" (a single NOOP after each shelf supply) and "both sides"
(three NOOPs after each supply), so their sequences form two exact-duplicate
pools for the low-level stage.

Generated users pick concrete part instances at random (seeded), which
canonicalization collapses; segmentation of every generated demonstration
is self-checked against the intended event order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import InconsistentPreset
from .events import identities, segment
from .model import (
    Action,
    ActionKind,
    Demonstration,
    Part,
    PrimaryActionDef,
    SecondaryActionDef,
    TaskDefinition,
    canonical_supply_token,
    canonicalize,
    to_timesteps,
)

TypeSet = frozenset[str]
EMPTY: TypeSet = frozenset()


@dataclass(frozen=True)
class EventTemplate:
    """One reusable event: its identity (part types), primaries, and styles."""

    name: str
    identity: TypeSet
    primary_pool: tuple[str, ...]
    styles: dict[str, tuple[TypeSet, ...]]

    def style(self, name: str) -> tuple[TypeSet, ...]:
        if name not in self.styles:
            raise InconsistentPreset(f"event {self.name!r} has no style {name!r}")
        return self.styles[name]


@dataclass(frozen=True)
class GroupSpec:
    name: str
    user_ids: tuple[str, ...]
    event_order: tuple[str, ...]
    styles: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class OutlierSpec:
    user_id: str
    base_group: str
    op: tuple  # ("swap", i, j) | ("shift", src, dst)
    styles: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SynthPreset:
    name: str
    events: dict[str, EventTemplate]
    groups: tuple[GroupSpec, ...]
    outliers: tuple[OutlierSpec, ...]

    def corpus_size(self) -> int:
        return sum(len(g.user_ids) for g in self.groups) + len(self.outliers)


# -- bookcase fixture ---------------------------------------------------------

LONG, SHORT, CONN, SHELF = "long_board", "short_board", "connector", "shelf"


def bookcase_task() -> TaskDefinition:
    """17 parts of 4 types; 32 unique connections; every part type fungible."""
    parts = (
        [Part(f"long_board_{i}", LONG, True) for i in range(1, 5)]
        + [Part(f"short_board_{i}", SHORT, True) for i in range(1, 5)]
        + [Part(f"connector_{i}", CONN, True) for i in range(1, 7)]
        + [Part(f"shelf_{i}", SHELF, True) for i in range(1, 4)]
    )
    primaries = (
        [
            PrimaryActionDef(f"conn_frame_{k}_{x}", (LONG, SHORT))
            for k in range(1, 5)
            for x in ("a", "b")
        ]
        + [
            PrimaryActionDef(f"conn_bracket_{k}_{x}", (CONN,))
            for k in range(1, 7)
            for x in ("a", "b")
        ]
        + [
            PrimaryActionDef(f"conn_shelf_{k}_{c}", (SHELF,))
            for k in range(1, 4)
            for c in ("a", "b", "c", "d")
        ]
    )
    secondaries = [SecondaryActionDef(f"bring_{p.part_id}", p.part_type) for p in parts]
    return TaskDefinition(
        task_id="bookcase",
        parts=tuple(parts),
        primary_actions=tuple(primaries),
        secondary_actions=tuple(secondaries),
    )


def _paired(supply: TypeSet, pairs: int) -> tuple[TypeSet, ...]:
    out: list[TypeSet] = []
    for _ in range(pairs):
        out += [supply, EMPTY]
    return tuple(out)


def _bookcase_events(task: TaskDefinition) -> dict[str, EventTemplate]:
    frame = tuple(a.action_id for a in task.primary_actions if a.action_id.startswith("conn_frame"))
    bracket = tuple(a.action_id for a in task.primary_actions if a.action_id.startswith("conn_bracket"))
    shelf = tuple(a.action_id for a in task.primary_actions if a.action_id.startswith("conn_shelf"))
    sh = frozenset({SHELF})
    one_side = (sh, EMPTY, sh, EMPTY, sh, EMPTY) + (EMPTY,) * 6
    both_sides = (sh, EMPTY, EMPTY, EMPTY) * 3
    sf = frozenset({SHELF, LONG, SHORT})
    return {
        "boards": EventTemplate(
            name="boards",
            identity=frozenset({LONG, SHORT}),
            primary_pool=frame,
            styles={"paired": _paired(frozenset({LONG, SHORT}), 4)},
        ),
        "con": EventTemplate(
            name="con",
            identity=frozenset({CONN}),
            primary_pool=bracket,
            styles={"paired": _paired(frozenset({CONN}), 6)},
        ),
        "shelves": EventTemplate(
            name="shelves",
            identity=sh,
            primary_pool=shelf,
            styles={"one_side": one_side, "both_sides": both_sides},
        ),
        "shelves_first": EventTemplate(
            name="shelves_first",
            identity=sf,
            primary_pool=shelf,
            styles={
                "one_side": (sf,) + one_side[1:],
                "both_sides": (sf,) + both_sides[1:],
            },
        ),
    }


def fig4_preset(task: TaskDefinition | None = None) -> SynthPreset:
    """18 users shaped like the study: groups of 6/3/5 plus 4 outliers.

    User indices mirror the study figure: [0,1,4,5,11,16], [12,13,15] and
    [3,9,10,14,17] share event orders; 2, 6, 7 and 8 are outliers.
    """
    task = task or bookcase_task()
    events = _bookcase_events(task)

    def users(*idx: int) -> tuple[str, ...]:
        return tuple(f"user_{i:02d}" for i in idx)

    groups = (
        GroupSpec("g1-one-side", users(0, 4, 16), ("boards", "con", "shelves"), {"shelves": "one_side"}),
        GroupSpec("g1-both-sides", users(1, 5, 11), ("boards", "con", "shelves"), {"shelves": "both_sides"}),
        GroupSpec("g2", users(12, 13, 15), ("shelves_first", "con", "boards"), {"shelves_first": "both_sides"}),
        GroupSpec("g3-one-side", users(3, 9, 10), ("boards", "shelves", "con"), {"shelves": "one_side"}),
        GroupSpec("g3-both-sides", users(14, 17), ("boards", "shelves", "con"), {"shelves": "both_sides"}),
    )
    outliers = (
        OutlierSpec("user_02", "g1-one-side", ("swap", 0, 1), {"shelves": "one_side"}),
        OutlierSpec("user_06", "g1-one-side", ("shift", 0, 2), {"shelves": "one_side"}),
        OutlierSpec("user_07", "g3-one-side", ("swap", 0, 1), {"shelves": "one_side"}),
        OutlierSpec("user_08", "g1-both-sides", ("swap", 0, 2), {"shelves": "both_sides"}),
    )
    return SynthPreset(name="fig4-like", events=events, groups=groups, outliers=outliers)


PRESETS = {"fig4-like": fig4_preset}


# -- generation ---------------------------------------------------------------


def _apply_op(order: tuple[str, ...], op: tuple) -> tuple[str, ...]:
    seq = list(order)
    kind = op[0]
    if kind == "swap":
        _, i, j = op
        seq[i], seq[j] = seq[j], seq[i]
    elif kind == "shift":
        _, src, dst = op
        ev = seq.pop(src)
        seq.insert(dst, ev)
    else:
        raise InconsistentPreset(f"unknown perturbation op {kind!r}")
    return tuple(seq)


def _check_template(template: EventTemplate, style: str) -> tuple[TypeSet, ...]:
    sets = template.style(style)
    if len(sets) != len(template.primary_pool):
        raise InconsistentPreset(
            f"event {template.name!r} style {style!r}: {len(sets)} steps "
            f"for {len(template.primary_pool)} primaries"
        )
    realized = frozenset().union(*sets) if sets else EMPTY
    if realized != template.identity:
        raise InconsistentPreset(
            f"event {template.name!r} style {style!r} realizes identity "
            f"{sorted(realized)}, declared {sorted(template.identity)}"
        )
    return sets


def _check_boundaries(preset: SynthPreset, order: tuple[str, ...], who: str) -> None:
    for prev, nxt in zip(order, order[1:]):
        prev_id = preset.events[prev].identity
        next_first = None
        # the first non-empty step set of the next event must bring a new type
        for s in next(iter(preset.events[nxt].styles.values())):
            if s:
                next_first = s
                break
        if next_first is None or next_first <= prev_id:
            raise InconsistentPreset(
                f"{who}: event {nxt!r} would merge into preceding {prev!r}"
            )


@dataclass(frozen=True)
class _UserPlan:
    user_id: str
    order: tuple[str, ...]
    styles: dict[str, str]
    is_outlier: bool


def _plans(preset: SynthPreset) -> list[_UserPlan]:
    plans: list[_UserPlan] = []
    by_name = {g.name: g for g in preset.groups}
    for g in preset.groups:
        for uid in g.user_ids:
            plans.append(_UserPlan(uid, g.event_order, dict(g.styles), False))
    for o in preset.outliers:
        base = by_name.get(o.base_group)
        if base is None:
            raise InconsistentPreset(f"outlier {o.user_id}: unknown base group {o.base_group!r}")
        order = _apply_op(base.event_order, o.op)
        styles = dict(base.styles)
        styles.update(o.styles)
        plans.append(_UserPlan(o.user_id, order, styles, True))
    return plans


def _realize(preset: SynthPreset, task: TaskDefinition, seed: int) -> list[tuple[str, list[Action]]]:
    """Raw (instance-level) action logs per user, deterministic under seed."""
    by_type: dict[str, list[str]] = {}
    for p in task.parts:
        by_type.setdefault(p.part_type, []).append(p.part_id)
    master = random.Random(seed)
    logs: list[tuple[str, list[Action]]] = []
    for plan in _plans(preset):
        rng = random.Random(master.randrange(2**32))
        _check_boundaries(preset, plan.order, plan.user_id)
        raw: list[Action] = []
        for ev_name in plan.order:
            template = preset.events.get(ev_name)
            if template is None:
                raise InconsistentPreset(f"{plan.user_id}: unknown event {ev_name!r}")
            style = plan.styles.get(ev_name) or next(iter(template.styles))
            sets = _check_template(template, style)
            pool = list(template.primary_pool)
            rng.shuffle(pool)
            for step_set, primary_id in zip(sets, pool):
                for part_type in sorted(step_set):
                    instance = rng.choice(by_type[part_type])
                    raw.append(Action(id=f"bring_{instance}", kind=ActionKind.SECONDARY))
                raw.append(Action(id=primary_id, kind=ActionKind.PRIMARY))
        logs.append((plan.user_id, raw))
    return logs


def generate(preset: SynthPreset, task: TaskDefinition, seed: int) -> list[Demonstration]:
    """Generate canonical demonstrations; segmentation is self-checked."""
    demos: list[Demonstration] = []
    plans = {p.user_id: p for p in _plans(preset)}
    for user_id, raw in _realize(preset, task, seed):
        canonical = [canonicalize(a.id, task) for a in raw if a.id]
        demo = to_timesteps(canonical, user_id=user_id, task=task)
        intended = tuple(
            frozenset(canonical_supply_token(t) for t in preset.events[name].identity)
            for name in plans[user_id].order
        )
        got = tuple(i.members for i in identities(segment(demo)))
        if got != intended:
            raise InconsistentPreset(
                f"{user_id}: segmentation recovered {len(got)} events, "
                f"intended {len(intended)} — preset cannot realize its event order"
            )
        demos.append(demo)
    return demos


def generate_raw_logs(
    preset: SynthPreset, task: TaskDefinition, seed: int
) -> list[tuple[str, list[Action]]]:
    """Instance-level logs for writing demonstration files (same seed, same corpus)."""
    generate(preset, task, seed)  # runs the self-check
    return _realize(preset, task, seed)
