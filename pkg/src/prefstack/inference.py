"""Online inference: per-session Bayesian preference tracking and prediction.

At each time step the session re-segments the observed prefix, updates the
posterior over high-level clusters (likelihood = fraction of a cluster's
training users whose same-length prefix has the same event-identity
sequence), commits the argmax cluster, and predicts the next secondary set
from the committed cluster's representative event sequence and the matching
low-level cluster. Exact ties are broken uniformly at random with the
session rng; everything else is deterministic. Posteriors are computed in
exact rational arithmetic and exposed as floats.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import (
    MissingActual,
    NoPendingPrediction,
    PendingFeedback,
    UnknownEvent,
    WrongKind,
)
from .events import EventSequence, identities
from .model import NOOP, Action, ActionKind, SecondaryActionSet, TimeStep
from .training import PreferenceModel

IdentitySeq = tuple[frozenset[str], ...]


def _posterior_high_ids(model: PreferenceModel, observed: IdentitySeq, t: int) -> dict[int, Fraction]:
    """Posterior over high clusters given the observed identity-sequence prefix.

    t=0 returns the priors; so does an observation no training user can
    produce (zero-likelihood fallback).
    """
    if t == 0:
        return {c.cluster_id: c.prior for c in model.high_clusters}
    weights: dict[int, Fraction] = {}
    for c in model.high_clusters:
        matches = 0
        for uid in c.member_user_ids:
            table = model.prefix_table(uid)
            if t <= len(table) and table[t - 1] == observed:
                matches += 1
        weights[c.cluster_id] = Fraction(matches, len(c.member_user_ids)) * c.prior
    total = sum(weights.values())
    if total == 0:
        return {c.cluster_id: c.prior for c in model.high_clusters}
    return {cid: w / total for cid, w in weights.items()}


def posterior_high(model: PreferenceModel, prefix: EventSequence, t: int) -> dict[int, Fraction]:
    """Posterior over high clusters for an observed event-sequence prefix."""
    observed = tuple(i.members for i in identities(prefix))
    return _posterior_high_ids(model, observed, t)


def commit_high(posterior: dict[int, Fraction], rng: random.Random) -> int:
    """Argmax cluster; exact ties resolved uniformly at random."""
    return _argmax(posterior, rng)


def _argmax(mapping: dict[int, Fraction], rng: random.Random) -> int:
    best = max(mapping.values())
    candidates = sorted(k for k, v in mapping.items() if v == best)
    if len(candidates) == 1:
        return candidates[0]
    return rng.choice(candidates)


def posterior_low(
    model: PreferenceModel,
    event_identity: frozenset[str],
    observed: tuple[SecondaryActionSet, ...],
) -> dict[int, Fraction]:
    """Posterior over an event's low clusters given its observed secondary sets."""
    clusters = model.low_clusters.get(frozenset(event_identity))
    if clusters is None:
        raise UnknownEvent(f"no low-level clusters for identity {sorted(event_identity)}")
    m = len(observed)
    if m == 0:
        return {c.cluster_id: c.prior for c in clusters}
    weights: dict[int, Fraction] = {}
    for c in clusters:
        matches = sum(1 for seq in c.sequences if len(seq) >= m and seq[:m] == observed)
        weights[c.cluster_id] = Fraction(matches, len(c.sequences)) * c.prior
    total = sum(weights.values())
    if total == 0:
        return {c.cluster_id: c.prior for c in clusters}
    return {cid: w / total for cid, w in weights.items()}


def _modal_set(
    candidates: list[SecondaryActionSet], rng: random.Random
) -> SecondaryActionSet:
    """Most frequent set; ties resolved uniformly at random."""
    counts: dict[SecondaryActionSet, int] = {}
    for s in candidates:
        counts[s] = counts.get(s, 0) + 1
    best = max(counts.values())
    tied = sorted(
        (s for s, c in counts.items() if c == best), key=lambda s: s.sorted_tokens()
    )
    if len(tied) == 1:
        return tied[0]
    return rng.choice(tied)


class PrefixTracker:
    """Incremental event segmentation of an observed step stream.

    Mirrors events.segment: a step opens a new event when its secondary set
    is not a subset of the non-empty union accumulated in the current event.
    """

    def __init__(self) -> None:
        self.closed: list[frozenset[str]] = []
        self.open_accum: frozenset[str] | None = None
        self.open_secondaries: list[SecondaryActionSet] = []

    def add(self, secondary: SecondaryActionSet) -> None:
        if (
            self.open_accum is not None
            and self.open_accum
            and not secondary.issubset(self.open_accum)
        ):
            self.closed.append(self.open_accum)
            self.open_accum = frozenset()
            self.open_secondaries = []
        if self.open_accum is None:
            self.open_accum = frozenset()
        self.open_accum = self.open_accum | secondary.members
        self.open_secondaries.append(secondary)

    def identity_seq(self) -> IdentitySeq:
        if self.open_accum is None:
            return tuple(self.closed)
        return tuple(self.closed) + (self.open_accum,)

    @property
    def event_index(self) -> int:
        """Index of the ongoing event (0 before any observation)."""
        return len(self.closed) if self.open_accum is not None else 0

    @property
    def offset(self) -> int:
        """Secondary sets observed so far within the ongoing event."""
        return len(self.open_secondaries)


@dataclass
class TranscriptRecord:
    step: int
    predicted: SecondaryActionSet
    accepted: bool | None = None
    actual: SecondaryActionSet | None = None
    posterior_high: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "predicted": self.predicted.sorted_tokens(),
            "accepted": self.accepted,
            "actual": None if self.actual is None else self.actual.sorted_tokens(),
            "posterior_high": {str(k): v for k, v in sorted(self.posterior_high.items())},
        }


class Session:
    """Inference state for one new user against a read-only model.

    Not internally synchronized; callers must serialize access to a single
    session. The protocol per time step is predict -> observe_feedback ->
    observe_primary. With auto_resolve=True an unresolved prediction is
    implicitly accepted when the next primary arrives.
    """

    def __init__(self, model: PreferenceModel, seed: int = 0, auto_resolve: bool = False):
        self.model = model
        self.seed = seed
        self.rng = random.Random(seed)
        self.auto_resolve = auto_resolve
        self.steps: list[TimeStep] = []
        self.pending: SecondaryActionSet | None = None
        self.plan_exhausted = False
        self.transcript: list[TranscriptRecord] = []
        self._resolved: SecondaryActionSet | None = None
        self._tracker = PrefixTracker()

    # -- observation bookkeeping ------------------------------------------

    @property
    def t(self) -> int:
        return len(self.steps)

    def observed_identity_seq(self) -> IdentitySeq:
        return self._tracker.identity_seq()

    def posterior_high_now(self) -> dict[int, Fraction]:
        return _posterior_high_ids(self.model, self.observed_identity_seq(), self.t)

    # -- protocol ----------------------------------------------------------

    def predict(self) -> SecondaryActionSet:
        """Predict the next secondary set and mark it pending feedback."""
        posterior = self.posterior_high_now()
        committed = commit_high(posterior, self.rng)
        prediction = self._predict_from(committed)
        self.pending = prediction
        self._resolved = None
        self.transcript.append(
            TranscriptRecord(
                step=self.t + 1,
                predicted=prediction,
                posterior_high={k: float(v) for k, v in posterior.items()},
            )
        )
        return prediction

    def _predict_from(self, committed: int) -> SecondaryActionSet:
        rep = self.model.high_cluster(committed).representative
        event_index = self._tracker.event_index
        observed = tuple(self._tracker.open_secondaries)
        if event_index >= len(rep):
            self.plan_exhausted = True
            return NOOP
        current = rep[event_index]
        clusters = self.model.low_clusters.get(current)
        if clusters is None:
            self.plan_exhausted = True
            return NOOP
        low_posterior = posterior_low(self.model, current, observed)
        low_id = _argmax(low_posterior, self.rng)
        sequences = clusters[low_id].sequences
        m = len(observed)
        longer = [seq for seq in sequences if len(seq) > m]
        if 2 * len(longer) > len(sequences):
            return _modal_set([seq[m] for seq in longer], self.rng)
        # ongoing event looks finished: advance along the representative
        if event_index + 1 >= len(rep):
            self.plan_exhausted = True
            return NOOP
        nxt = rep[event_index + 1]
        next_clusters = self.model.low_clusters.get(nxt)
        if next_clusters is None:
            self.plan_exhausted = True
            return NOOP
        priors = {c.cluster_id: c.prior for c in next_clusters}
        chosen = next_clusters[_argmax(priors, self.rng)]
        return _modal_set([seq[0] for seq in chosen.sequences if seq], self.rng)

    def observe_feedback(
        self, accepted: bool, actual: SecondaryActionSet | None = None
    ) -> None:
        """Resolve the pending prediction: accepted as-is or replaced by actual."""
        if self.pending is None:
            raise NoPendingPrediction("no prediction awaiting feedback")
        if accepted:
            self._resolved = self.pending
        else:
            if actual is None:
                raise MissingActual("rejected prediction requires the actual secondary set")
            self._resolved = actual
        if self.transcript:
            rec = self.transcript[-1]
            rec.accepted = accepted
            rec.actual = self._resolved
        self.pending = None

    def observe_primary(self, action: Action) -> None:
        """Append the next primary with its resolved secondary set."""
        if action.kind is not ActionKind.PRIMARY:
            raise WrongKind(f"expected a primary action, got {action.kind.value}")
        if self._resolved is not None:
            secondary = self._resolved
        elif self.pending is not None:
            if not self.auto_resolve:
                raise PendingFeedback("previous prediction still awaits feedback")
            secondary = self.pending
            self.observe_feedback(accepted=True)
        else:
            secondary = NOOP
        self._resolved = None
        self.pending = None
        self.steps.append(TimeStep(secondary, action))
        self._tracker.add(secondary)

    def transcript_dicts(self) -> list[dict[str, Any]]:
        return [r.to_dict() for r in self.transcript]

    def transcript_jsonl(self) -> str:
        """Line-delimited transcript for the evaluation and UI layers."""
        import json

        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.transcript_dicts())


def replay_consistency_check(session: Session) -> bool:
    """The incrementally tracked prefix must equal a fresh re-segmentation."""
    from .events import segment
    from .model import Demonstration

    if not session.steps:
        return session.observed_identity_seq() == ()
    demo = Demonstration(user_id="_session", steps=tuple(session.steps))
    fresh = tuple(i.members for i in identities(segment(demo)))
    return fresh == session.observed_identity_seq()
