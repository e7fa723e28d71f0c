"""Core domain types: tasks, actions, secondary-action sets, demonstrations.

A demonstration is stored in the turn-taking form: an ordered list of time
steps, each pairing the set of secondary (supportive) actions performed
before a primary (task) action. Consecutive secondary actions in a raw log
are merged into one set; a primary with no preceding secondary gets the
empty set, which stands for NOOP throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptyLog, TrailingSecondary, UnknownAction


class ActionKind(str, Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"
    NOOP = "noop"


@dataclass(frozen=True)
class Action:
    """A single canonical action. NOOP actions carry no id."""

    id: str | None
    kind: ActionKind

    def __post_init__(self) -> None:
        if self.kind is ActionKind.NOOP:
            if self.id is not None:
                raise ValueError("NOOP actions have no id")
        elif not self.id:
            raise ValueError(f"{self.kind.value} action requires an id")


NOOP_ACTION = Action(id=None, kind=ActionKind.NOOP)


@dataclass(frozen=True)
class SecondaryActionSet:
    """A set of canonical secondary-action tokens; empty means NOOP."""

    members: frozenset[str] = frozenset()

    @property
    def is_noop(self) -> bool:
        return not self.members

    def sorted_tokens(self) -> list[str]:
        """Canonical (lexicographic) ordering, used for serialization."""
        return sorted(self.members)

    def issubset(self, other: frozenset[str]) -> bool:
        return self.members <= other

    def __contains__(self, token: str) -> bool:
        return token in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(self.sorted_tokens()) + "}"


NOOP = SecondaryActionSet()


def secondary_set(*tokens: str) -> SecondaryActionSet:
    return SecondaryActionSet(frozenset(tokens))


@dataclass(frozen=True)
class TimeStep:
    secondary: SecondaryActionSet
    primary: Action


@dataclass(frozen=True)
class Demonstration:
    """One user's full run in turn-taking form."""

    user_id: str
    steps: tuple[TimeStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def flatten(self) -> list[Action]:
        """Emit the raw action order: each step's secondaries (sorted) then its primary."""
        out: list[Action] = []
        for step in self.steps:
            for token in step.secondary.sorted_tokens():
                out.append(Action(id=token, kind=ActionKind.SECONDARY))
            out.append(step.primary)
        return out


@dataclass(frozen=True)
class Part:
    part_id: str
    part_type: str
    fungible: bool


@dataclass(frozen=True)
class PrimaryActionDef:
    action_id: str
    required_part_types: tuple[str, ...]


@dataclass(frozen=True)
class SecondaryActionDef:
    action_id: str
    supplied_part_type: str


@dataclass(frozen=True)
class TaskDefinition:
    """Vocabulary of parts and actions for one assembly task.

    Primary action ids are treated as unique connections; secondary actions
    supply one part each. A part type is fungible when any instance of it is
    interchangeable, in which case supplying actions canonicalize to a
    type-level token ("bring:<part_type>").
    """

    task_id: str
    parts: tuple[Part, ...]
    primary_actions: tuple[PrimaryActionDef, ...]
    secondary_actions: tuple[SecondaryActionDef, ...]
    unique_connections: bool = True

    def __post_init__(self) -> None:
        if not self.primary_actions:
            raise ValueError("task needs at least one primary action")
        ids = [a.action_id for a in self.primary_actions]
        ids += [a.action_id for a in self.secondary_actions]
        if len(ids) != len(set(ids)):
            raise ValueError("action ids must be unique across primary and secondary")
        types = {p.part_type for p in self.parts}
        for pa in self.primary_actions:
            missing = set(pa.required_part_types) - types
            if missing:
                raise ValueError(f"{pa.action_id}: unknown part types {sorted(missing)}")
        for sa in self.secondary_actions:
            if sa.supplied_part_type not in types:
                raise ValueError(f"{sa.action_id}: unknown part type {sa.supplied_part_type}")

    def fungible_types(self) -> frozenset[str]:
        return frozenset(p.part_type for p in self.parts if p.fungible)

    def primary_ids(self) -> frozenset[str]:
        return frozenset(a.action_id for a in self.primary_actions)


def canonical_supply_token(part_type: str) -> str:
    return f"bring:{part_type}"


def canonicalize(raw_action: str, task: TaskDefinition) -> Action:
    """Resolve a raw action id to its canonical Action.

    Primary ids pass through verbatim. A secondary action supplying a
    fungible part type is rewritten to the type-level token so that users
    who picked different (but equivalent) part instances compare equal.
    Idempotent: canonical tokens resolve to themselves.
    """
    if raw_action in task.primary_ids():
        return Action(id=raw_action, kind=ActionKind.PRIMARY)
    fungible = task.fungible_types()
    for sa in task.secondary_actions:
        if sa.action_id == raw_action:
            if sa.supplied_part_type in fungible:
                return Action(
                    id=canonical_supply_token(sa.supplied_part_type),
                    kind=ActionKind.SECONDARY,
                )
            return Action(id=raw_action, kind=ActionKind.SECONDARY)
    # already-canonical supply tokens resolve to themselves
    for t in fungible:
        if raw_action == canonical_supply_token(t):
            return Action(id=raw_action, kind=ActionKind.SECONDARY)
    raise UnknownAction(f"action id {raw_action!r} does not resolve in task {task.task_id!r}")


def to_timesteps(raw: list[Action], user_id: str = "", task: TaskDefinition | None = None) -> Demonstration:
    """Group a raw action stream into (secondary set, primary) time steps.

    Consecutive secondary actions preceding a primary merge into one set;
    a primary with none gets the empty set. Explicit NOOP entries in the raw
    stream contribute nothing. The log must end with a primary action.
    """
    if not raw:
        raise EmptyLog("raw action log is empty")
    steps: list[TimeStep] = []
    pending: set[str] = set()
    for action in raw:
        if action.kind is ActionKind.SECONDARY:
            assert action.id is not None
            pending.add(action.id)
        elif action.kind is ActionKind.PRIMARY:
            steps.append(TimeStep(SecondaryActionSet(frozenset(pending)), action))
            pending = set()
        # NOOP entries are no-operations by definition
    if pending:
        raise TrailingSecondary(
            f"log ends with {len(pending)} secondary action(s) after the last primary"
        )
    if not steps:
        raise EmptyLog("raw action log contains no primary actions")
    return Demonstration(user_id=user_id, steps=tuple(steps))


@dataclass
class ValidationReport:
    """Findings from checking a demonstration against a task."""

    step_count: int
    unknown_actions: list[str] = field(default_factory=list)
    duplicate_primaries: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.unknown_actions and not self.duplicate_primaries

    def findings(self) -> list[str]:
        out = [f"UnknownAction:{a}" for a in self.unknown_actions]
        out += [f"DuplicatePrimary:{a}" for a in self.duplicate_primaries]
        return out


def validate(demo: Demonstration, task: TaskDefinition) -> ValidationReport:
    """Check a demonstration against a task without raising."""
    report = ValidationReport(step_count=len(demo.steps))
    fungible_tokens = {canonical_supply_token(t) for t in task.fungible_types()}
    secondary_ids = {sa.action_id for sa in task.secondary_actions}
    primary_ids = task.primary_ids()
    seen_primary: set[str] = set()
    for step in demo.steps:
        pid = step.primary.id
        if pid not in primary_ids:
            report.unknown_actions.append(str(pid))
        elif task.unique_connections:
            if pid in seen_primary:
                report.duplicate_primaries.append(str(pid))
            seen_primary.add(pid)
        for token in step.secondary.sorted_tokens():
            if token not in fungible_tokens and token not in secondary_ids:
                report.unknown_actions.append(token)
    return report
