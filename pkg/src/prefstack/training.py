"""Offline training: two-stage clustering of demonstrations.

High level: users are clustered on their event-identity sequences. Low
level: for every event identity seen anywhere in the corpus, all of its
occurrences (across all users and high clusters) are clustered on their
within-event secondary-set sequences, NOOPs included. The resulting model
keeps the training demonstrations, because online inference re-segments
their prefixes at every time step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cluster import LINKAGES, agglomerate, select_partition
from .distance import METRICS, distance_matrix
from .errors import TooFewUsers
from .events import identities, prefix_identity_table, segment
from .model import Demonstration, SecondaryActionSet, TaskDefinition, validate

IdentitySeq = tuple[frozenset[str], ...]


@dataclass(frozen=True)
class TrainingConfig:
    linkage: str = "average"
    metric: str = "mod"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.linkage not in LINKAGES:
            raise ValueError(f"unknown linkage {self.linkage!r}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")


@dataclass(frozen=True)
class HighLevelCluster:
    cluster_id: int
    member_user_ids: tuple[str, ...]
    representative: IdentitySeq
    prior: Fraction


@dataclass(frozen=True)
class LowLevelCluster:
    cluster_id: int
    identity: frozenset[str]
    members: tuple[tuple[str, int], ...]  # (user_id, occurrence index)
    sequences: tuple[tuple[SecondaryActionSet, ...], ...]  # aligned with members
    prior: Fraction


@dataclass
class PreferenceModel:
    task_id: str
    config: TrainingConfig
    high_clusters: tuple[HighLevelCluster, ...]
    low_clusters: dict[frozenset[str], tuple[LowLevelCluster, ...]]
    demonstrations: tuple[Demonstration, ...]
    _prefix_tables: dict[str, list[tuple[frozenset[str], ...]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def demo(self, user_id: str) -> Demonstration:
        for d in self.demonstrations:
            if d.user_id == user_id:
                return d
        raise KeyError(user_id)

    def prefix_table(self, user_id: str) -> list[tuple[frozenset[str], ...]]:
        if user_id not in self._prefix_tables:
            self._prefix_tables[user_id] = prefix_identity_table(self.demo(user_id))
        return self._prefix_tables[user_id]

    def high_cluster(self, cluster_id: int) -> HighLevelCluster:
        return self.high_clusters[cluster_id]


def _identity_sort_key(identity: frozenset[str]):
    return tuple(sorted(identity))


def _seq_sort_key(seq: IdentitySeq):
    return tuple(tuple(sorted(i)) for i in seq)


def _representative(seqs: list[IdentitySeq]) -> IdentitySeq:
    """Most frequent sequence; ties broken lexicographically on serialized form."""
    counts: dict[IdentitySeq, int] = {}
    for s in seqs:
        counts[s] = counts.get(s, 0) + 1
    best_count = max(counts.values())
    candidates = [s for s, c in counts.items() if c == best_count]
    return min(candidates, key=_seq_sort_key)


def train_high(demos: list[Demonstration], config: TrainingConfig) -> list[HighLevelCluster]:
    """Cluster users on their event-identity sequences."""
    if len(demos) < 2:
        raise TooFewUsers(f"high-level training needs >= 2 demonstrations, got {len(demos)}")
    id_seqs: list[IdentitySeq] = [
        tuple(i.members for i in identities(segment(d))) for d in demos
    ]
    matrix = distance_matrix(id_seqs, metric=config.metric)
    dendro = agglomerate(matrix, linkage=config.linkage)
    part = select_partition(dendro, matrix)
    total = len(demos)
    clusters: list[HighLevelCluster] = []
    for cid, members in enumerate(part.clusters):
        clusters.append(
            HighLevelCluster(
                cluster_id=cid,
                member_user_ids=tuple(sorted(demos[i].user_id for i in members)),
                representative=_representative([id_seqs[i] for i in members]),
                prior=Fraction(len(members), total),
            )
        )
    return clusters


def train_low(
    demos: list[Demonstration], config: TrainingConfig
) -> dict[frozenset[str], tuple[LowLevelCluster, ...]]:
    """Cluster, per event identity, the secondary-set sequences of its occurrences."""
    pools: dict[frozenset[str], list[tuple[str, int, tuple[SecondaryActionSet, ...]]]] = {}
    for demo in demos:
        occ_count: dict[frozenset[str], int] = {}
        for event in segment(demo).events:
            key = event.identity.members
            idx = occ_count.get(key, 0)
            occ_count[key] = idx + 1
            pools.setdefault(key, []).append((demo.user_id, idx, event.secondaries))
    out: dict[frozenset[str], tuple[LowLevelCluster, ...]] = {}
    for key in sorted(pools, key=_identity_sort_key):
        occurrences = pools[key]
        total = len(occurrences)
        seqs = [o[2] for o in occurrences]
        if total == 1:
            groups: tuple[tuple[int, ...], ...] = ((0,),)
        else:
            matrix = distance_matrix(seqs, metric=config.metric)
            dendro = agglomerate(matrix, linkage=config.linkage)
            groups = select_partition(dendro, matrix).clusters
        clusters = []
        for cid, members in enumerate(groups):
            clusters.append(
                LowLevelCluster(
                    cluster_id=cid,
                    identity=key,
                    members=tuple((occurrences[i][0], occurrences[i][1]) for i in members),
                    sequences=tuple(occurrences[i][2] for i in members),
                    prior=Fraction(len(members), total),
                )
            )
        out[key] = tuple(clusters)
    return out


def train(
    demos: list[Demonstration], task: TaskDefinition, config: TrainingConfig | None = None
) -> PreferenceModel:
    """Full offline phase; the returned model is self-contained for inference."""
    config = config or TrainingConfig()
    if len(demos) < 2:
        raise TooFewUsers(f"training needs >= 2 demonstrations, got {len(demos)}")
    seen: set[str] = set()
    for d in demos:
        if d.user_id in seen:
            raise ValueError(f"duplicate user_id {d.user_id!r} in corpus")
        seen.add(d.user_id)
        report = validate(d, task)
        if not report.valid:
            raise ValueError(f"demonstration {d.user_id!r} invalid: {report.findings()}")
    ordered = sorted(demos, key=lambda d: d.user_id)
    return PreferenceModel(
        task_id=task.task_id,
        config=config,
        high_clusters=tuple(train_high(ordered, config)),
        low_clusters=train_low(ordered, config),
        demonstrations=tuple(ordered),
    )
