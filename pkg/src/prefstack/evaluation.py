"""Leave-one-out evaluation, baseline predictors, and paired t-tests.

For each held-out user the remaining demonstrations are trained once
(training is deterministic); repeated trials re-run only the online replay,
so they differ solely through random tie-breaking. A step counts as correct
iff the predicted secondary set equals the user's actual set exactly,
NOOP-vs-non-NOOP mismatches included.

Methods:
- two-stage: the full pipeline (high-level commit, low-level prediction).
- event-only: high-level clustering only; the next set is the modal vote of
  the committed cluster's members at the same event position (event index
  plus within-event offset, walked through each member's own segmentation).
- primary: one-stage clustering of raw primary-action sequences; the next
  set is the modal member secondary at the same time step.
- oracle: reads the held-out user's actual next set (harness self-test).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.stats import t as t_dist

from .cluster import agglomerate, select_partition
from .distance import distance_matrix
from .errors import DegenerateInput, TooFewUsers
from .events import segment
from .inference import PrefixTracker, Session, _argmax, _modal_set, _posterior_high_ids
from .model import NOOP, Demonstration, SecondaryActionSet, TaskDefinition
from .training import PreferenceModel, TrainingConfig, train

METHODS = ("two-stage", "event-only", "primary")


@dataclass
class AccuracyReport:
    """Per-user per-timestep accuracy over repeated trials for one method."""

    method: str
    user_ids: tuple[str, ...]
    tensor: np.ndarray  # users x N x trials, NaN where a user has no step

    @property
    def per_timestep_means(self) -> np.ndarray:
        return np.nanmean(self.tensor, axis=(0, 2))

    @property
    def per_timestep_stderr(self) -> np.ndarray:
        by_user = np.nanmean(self.tensor, axis=2)  # users x N
        n = np.sum(~np.isnan(by_user), axis=0)
        sd = np.nanstd(by_user, axis=0, ddof=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            se = sd / np.sqrt(n)
        return np.where(n > 1, se, 0.0)

    @property
    def per_user_means(self) -> np.ndarray:
        return np.nanmean(self.tensor, axis=(1, 2))

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_user_means))

    @property
    def stderr(self) -> float:
        n = len(self.user_ids)
        if n < 2:
            return 0.0
        return float(np.std(self.per_user_means, ddof=1) / math.sqrt(n))


class _TwoStagePredictor:
    def __init__(self, model: PreferenceModel, seed: int):
        self.session = Session(model, seed=seed)

    def predict(self) -> SecondaryActionSet:
        return self.session.predict()

    def observe(self, actual: SecondaryActionSet, primary) -> None:
        if self.session.pending is not None:
            accepted = self.session.pending == actual
            self.session.observe_feedback(accepted, None if accepted else actual)
        self.session.observe_primary(primary)


class _EventOnlyPredictor:
    def __init__(self, model: PreferenceModel, seed: int):
        self.model = model
        self.rng = random.Random(seed)
        self.tracker = PrefixTracker()
        self.t = 0
        self._segmented = {
            d.user_id: segment(d).events for d in model.demonstrations
        }

    def predict(self) -> SecondaryActionSet:
        posterior = _posterior_high_ids(self.model, self.tracker.identity_seq(), self.t)
        committed = _argmax(posterior, self.rng)
        cluster = self.model.high_cluster(committed)
        k = self.tracker.event_index
        m = self.tracker.offset
        votes: list[SecondaryActionSet] = []
        for uid in cluster.member_user_ids:
            vote = self._member_vote(self._segmented[uid], k, m)
            if vote is not None:
                votes.append(vote)
        if not votes:
            return NOOP
        return _modal_set(votes, self.rng)

    @staticmethod
    def _member_vote(events, k: int, m: int) -> SecondaryActionSet | None:
        while k < len(events) and m >= len(events[k].secondaries):
            m -= len(events[k].secondaries)
            k += 1
        if k >= len(events):
            return None
        return events[k].secondaries[m]

    def observe(self, actual: SecondaryActionSet, primary) -> None:
        self.tracker.add(actual)
        self.t += 1


@dataclass(frozen=True)
class _PrimaryCluster:
    member_user_ids: tuple[str, ...]
    prior: Fraction


class _PrimaryModel:
    """One-stage clustering of raw primary-action id sequences."""

    def __init__(self, demos: list[Demonstration], config: TrainingConfig):
        ordered = sorted(demos, key=lambda d: d.user_id)
        self.primaries = {
            d.user_id: tuple(s.primary.id for s in d.steps) for d in ordered
        }
        self.secondaries = {
            d.user_id: tuple(s.secondary for s in d.steps) for d in ordered
        }
        seqs = [self.primaries[d.user_id] for d in ordered]
        matrix = distance_matrix(seqs, metric=config.metric)
        part = select_partition(agglomerate(matrix, config.linkage), matrix)
        total = len(ordered)
        self.clusters = tuple(
            _PrimaryCluster(
                member_user_ids=tuple(sorted(ordered[i].user_id for i in members)),
                prior=Fraction(len(members), total),
            )
            for members in part.clusters
        )


class _PrimaryBaselinePredictor:
    def __init__(self, pmodel: _PrimaryModel, seed: int):
        self.pmodel = pmodel
        self.rng = random.Random(seed)
        self.observed: list[str] = []

    def _posterior(self) -> dict[int, Fraction]:
        t = len(self.observed)
        if t == 0:
            return {i: c.prior for i, c in enumerate(self.pmodel.clusters)}
        observed = tuple(self.observed)
        weights: dict[int, Fraction] = {}
        for i, c in enumerate(self.pmodel.clusters):
            matches = sum(
                1
                for uid in c.member_user_ids
                if self.pmodel.primaries[uid][:t] == observed
            )
            weights[i] = Fraction(matches, len(c.member_user_ids)) * c.prior
        total = sum(weights.values())
        if total == 0:
            return {i: c.prior for i, c in enumerate(self.pmodel.clusters)}
        return {i: w / total for i, w in weights.items()}

    def predict(self) -> SecondaryActionSet:
        committed = _argmax(self._posterior(), self.rng)
        cluster = self.pmodel.clusters[committed]
        t = len(self.observed)
        votes = [
            self.pmodel.secondaries[uid][t]
            for uid in cluster.member_user_ids
            if t < len(self.pmodel.secondaries[uid])
        ]
        if not votes:
            return NOOP
        return _modal_set(votes, self.rng)

    def observe(self, actual: SecondaryActionSet, primary) -> None:
        self.observed.append(primary.id)


class _OraclePredictor:
    """Reads the held-out user's actual sets; ceiling self-test only."""

    def __init__(self, demo: Demonstration):
        self.demo = demo
        self.t = 0

    def predict(self) -> SecondaryActionSet:
        return self.demo.steps[self.t].secondary

    def observe(self, actual: SecondaryActionSet, primary) -> None:
        self.t += 1


def _replay(predictor, demo: Demonstration) -> list[float]:
    out: list[float] = []
    for step in demo.steps:
        predicted = predictor.predict()
        out.append(1.0 if predicted == step.secondary else 0.0)
        predictor.observe(step.secondary, step.primary)
    return out


def replay_predictions(
    model: PreferenceModel, demo: Demonstration, seed: int
) -> list[SecondaryActionSet]:
    """The two-stage prediction sequence for one replayed user."""
    predictor = _TwoStagePredictor(model, seed)
    out = []
    for step in demo.steps:
        out.append(predictor.predict())
        predictor.observe(step.secondary, step.primary)
    return out


def loocv(
    demos: list[Demonstration],
    task: TaskDefinition,
    method: str = "two-stage",
    trials: int = 100,
    seed: int = 0,
    config: TrainingConfig | None = None,
) -> AccuracyReport:
    """Leave-one-out accuracy of next-secondary-set prediction."""
    if method not in METHODS and method != "oracle":
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if len(demos) < 3:
        raise TooFewUsers(f"LOOCV needs >= 3 demonstrations, got {len(demos)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    config = config or TrainingConfig(seed=seed)
    ordered = sorted(demos, key=lambda d: d.user_id)
    max_n = max(len(d.steps) for d in ordered)
    rng = random.Random(seed)
    trial_seeds = [
        [rng.randrange(2**32) for _ in range(trials)] for _ in ordered
    ]
    tensor = np.full((len(ordered), max_n, trials), np.nan)
    for ui, held_out in enumerate(ordered):
        rest = [d for d in ordered if d.user_id != held_out.user_id]
        if method in ("two-stage", "event-only"):
            fold_model = train(rest, task, config)
        elif method == "primary":
            fold_primary = _PrimaryModel(rest, config)
        for trial in range(trials):
            s = trial_seeds[ui][trial]
            if method == "two-stage":
                predictor = _TwoStagePredictor(fold_model, s)
            elif method == "event-only":
                predictor = _EventOnlyPredictor(fold_model, s)
            elif method == "primary":
                predictor = _PrimaryBaselinePredictor(fold_primary, s)
            else:
                predictor = _OraclePredictor(held_out)
            row = _replay(predictor, held_out)
            tensor[ui, : len(row), trial] = row
    return AccuracyReport(
        method=method,
        user_ids=tuple(d.user_id for d in ordered),
        tensor=tensor,
    )


def paired_t_test(a, b) -> tuple[float, float, int]:
    """Two-tailed paired t-test; returns (t, p, degrees of freedom)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise DegenerateInput("need two equal-length vectors of length >= 2")
    d = a - b
    n = len(d)
    df = n - 1
    if not d.any():
        raise DegenerateInput("all differences are zero")
    sd = float(np.std(d, ddof=1))
    mean = float(np.mean(d))
    if sd == 0.0:
        # exact constant difference: infinite statistic by convention
        return (math.inf if mean > 0 else -math.inf, 0.0, df)
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(t_dist.sf(abs(t), df))
    return (t, p, df)


def export_report(reports, path: Path) -> None:
    """Write per-timestep means as CSV: timestep,method,mean,stderr."""
    if isinstance(reports, AccuracyReport):
        reports = [reports]
    lines = ["timestep,method,mean,stderr"]
    for report in reports:
        means = report.per_timestep_means
        errs = report.per_timestep_stderr
        for t in range(len(means)):
            lines.append(f"{t + 1},{report.method},{float(means[t])!r},{float(errs[t])!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
