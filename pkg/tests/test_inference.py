import random
from fractions import Fraction

import pytest

from conftest import demo_from_pattern
from prefstack.errors import (
    MissingActual,
    NoPendingPrediction,
    PendingFeedback,
    UnknownEvent,
    WrongKind,
)
from prefstack.events import segment_prefix
from prefstack.inference import (
    Session,
    commit_high,
    posterior_high,
    posterior_low,
    replay_consistency_check,
)
from prefstack.model import NOOP, Action, ActionKind, secondary_set
from prefstack.training import PreferenceModel, TrainingConfig, train_high, train_low

CFG = TrainingConfig(seed=0)


def build_model(demos, task_id="t"):
    ordered = sorted(demos, key=lambda d: d.user_id)
    return PreferenceModel(
        task_id=task_id,
        config=CFG,
        high_clusters=tuple(train_high(ordered, CFG)),
        low_clusters=train_low(ordered, CFG),
        demonstrations=tuple(ordered),
    )


def pri(id_):
    return Action(id=id_, kind=ActionKind.PRIMARY)


def four_user_model():
    """Hand-built clusters: {u1,u2,u3} (prior 3/4) and {u4} (prior 1/4)."""
    from prefstack.training import HighLevelCluster

    demos = [
        demo_from_pattern("u1", [({"x"}, "p1"), ({"y"}, "p2")]),
        demo_from_pattern("u2", [({"x"}, "p1"), ({"y"}, "p2")]),
        demo_from_pattern("u3", [({"x"}, "p1"), ({"w"}, "p2")]),
        demo_from_pattern("u4", [({"z"}, "p1"), ({"y"}, "p2")]),
    ]
    high = (
        HighLevelCluster(
            cluster_id=0,
            member_user_ids=("u1", "u2", "u3"),
            representative=(frozenset({"x"}), frozenset({"y"})),
            prior=Fraction(3, 4),
        ),
        HighLevelCluster(
            cluster_id=1,
            member_user_ids=("u4",),
            representative=(frozenset({"z"}), frozenset({"y"})),
            prior=Fraction(1, 4),
        ),
    )
    return PreferenceModel(
        task_id="t",
        config=CFG,
        high_clusters=high,
        low_clusters=train_low(demos, CFG),
        demonstrations=tuple(demos),
    )


class TestPosteriorHigh:
    def test_hand_counted_example(self):
        # cluster {u1,u2,u3} has 2 of 3 members matching the 2-step prefix,
        # cluster {u4} none: (2/3 * 3/4) vs (0 * 1/4) -> 1.0 after normalizing
        model = four_user_model()
        observed = demo_from_pattern("new", [({"x"}, "p1"), ({"y"}, "p2")])
        post = posterior_high(model, segment_prefix(observed, 2), 2)
        assert post == {0: Fraction(1), 1: Fraction(0)}

    def test_symmetric_clusters_split_evenly(self):
        demos = [
            demo_from_pattern("u1", [({"x"}, "p1"), ({"y"}, "p2")]),
            demo_from_pattern("u2", [({"x"}, "p1"), ({"z"}, "p2")]),
        ]
        model = build_model(demos)
        observed = demo_from_pattern("new", [({"x"}, "p1")])
        post = posterior_high(model, segment_prefix(observed, 1), 1)
        assert post == {0: Fraction(1, 2), 1: Fraction(1, 2)}

    def test_zero_likelihood_falls_back_to_priors(self):
        model = four_user_model()
        observed = demo_from_pattern("new", [({"q"}, "p1")])
        post = posterior_high(model, segment_prefix(observed, 1), 1)
        priors = {c.cluster_id: c.prior for c in model.high_clusters}
        assert post == priors

    def test_t_zero_returns_priors(self):
        model = four_user_model()
        observed = demo_from_pattern("new", [({"x"}, "p1")])
        post = posterior_high(model, segment_prefix(observed, 1), 0)
        assert post == {c.cluster_id: c.prior for c in model.high_clusters}


class TestCommitHigh:
    def test_clear_winner(self):
        rng = random.Random(0)
        assert commit_high({0: Fraction(1), 1: Fraction(0)}, rng) == 0

    def test_strict_argmax_never_randomizes(self):
        post = {0: Fraction(2, 5), 1: Fraction(7, 20), 2: Fraction(1, 4)}
        for seed in range(50):
            assert commit_high(post, random.Random(seed)) == 0

    def test_tie_frequencies(self):
        rng = random.Random(42)
        post = {0: Fraction(1, 2), 1: Fraction(1, 2)}
        picks = [commit_high(post, rng) for _ in range(1000)]
        share = picks.count(0) / 1000
        assert abs(share - 0.5) < 0.05


class TestPosteriorLow:
    def test_prefix_match_selects_cluster(self):
        # shelf styles: u1/u2 pause once after a supply, u3 three times
        demos = [
            demo_from_pattern("u1", [({"s"}, "p1"), ((), "p2"), ({"s"}, "p3"), ((), "p4")]),
            demo_from_pattern("u2", [({"s"}, "p1"), ((), "p2"), ({"s"}, "p3"), ((), "p4")]),
            demo_from_pattern("u3", [({"s"}, "p1"), ((), "p2"), ((), "p3"), ((), "p4")]),
        ]
        model = build_model(demos)
        identity = frozenset({"s"})
        observed = (secondary_set("s"), NOOP, secondary_set("s"))
        post = posterior_low(model, identity, observed)
        by_prior = {c.cluster_id: len(c.members) for c in model.low_clusters[identity]}
        big = max(by_prior, key=by_prior.get)
        assert post[big] == 1

    def test_empty_observation_returns_priors(self):
        model = four_user_model()
        identity = frozenset({"x"})
        post = posterior_low(model, identity, ())
        priors = {c.cluster_id: c.prior for c in model.low_clusters[identity]}
        assert post == priors

    def test_unknown_event(self):
        model = four_user_model()
        with pytest.raises(UnknownEvent):
            posterior_low(model, frozenset({"nope"}), ())


class TestPredict:
    def test_t0_unanimous_start(self, task, fig4_demos):
        from prefstack.training import train

        model = train(list(fig4_demos), task, CFG)
        session = Session(model, seed=0)
        assert session.predict() == secondary_set(
            "bring:long_board", "bring:short_board"
        )

    def test_mid_event_prediction_matches_majority_count(self, task, fig4_demos):
        from prefstack.training import train

        held = next(d for d in fig4_demos if d.user_id == "user_00")
        rest = [d for d in fig4_demos if d.user_id != "user_00"]
        model = train(rest, task, CFG)
        session = Session(model, seed=5)
        # replay through the boards event into the con event
        for step in held.steps[:10]:
            session.predict()
            session.observe_feedback(True)  # feedback content irrelevant here
            session._resolved = step.secondary
            session.observe_primary(step.primary)
        # direct majority count among con-event sequences at offset 2
        identity = frozenset({"bring:connector"})
        seqs = [s for c in model.low_clusters[identity] for s in c.sequences]
        offset = 2
        votes = [s[offset] for s in seqs if len(s) > offset]
        expected = max(set(votes), key=votes.count)
        assert session.predict() == expected

    def test_event_boundary_advances_plan(self):
        # two users, single cluster, two events; after the first event's two
        # steps the majority-of-lengths rule moves to the next event
        demos = [
            demo_from_pattern("u1", [({"x"}, "p1"), ((), "p2"), ({"y"}, "p3")]),
            demo_from_pattern("u2", [({"x"}, "p1"), ((), "p2"), ({"y"}, "p3")]),
        ]
        model = build_model(demos)
        session = Session(model, seed=0)
        for step in demos[0].steps[:2]:
            session.predict()
            session.observe_feedback(True)
            session._resolved = step.secondary
            session.observe_primary(step.primary)
        assert session.predict() == secondary_set("y")

    def test_plan_exhaustion_predicts_noop_and_flags(self):
        demos = [
            demo_from_pattern("u1", [({"x"}, "p1")]),
            demo_from_pattern("u2", [({"x"}, "p1")]),
        ]
        model = build_model(demos)
        session = Session(model, seed=0)
        session.predict()
        session.observe_feedback(True)
        session.observe_primary(pri("p1"))
        assert not session.plan_exhausted
        assert session.predict() == NOOP
        assert session.plan_exhausted


class TestObserve:
    def test_feedback_accept_carries_prediction(self):
        model = four_user_model()
        session = Session(model, seed=0)
        predicted = session.predict()
        session.observe_feedback(True)
        session.observe_primary(pri("p1"))
        assert session.steps[0].secondary == predicted

    def test_feedback_reject_carries_actual(self):
        model = four_user_model()
        session = Session(model, seed=0)
        session.predict()
        session.observe_feedback(False, secondary_set("bring:shelf"))
        session.observe_primary(pri("p1"))
        assert session.steps[0].secondary == secondary_set("bring:shelf")

    def test_reject_without_actual(self):
        session = Session(four_user_model(), seed=0)
        session.predict()
        with pytest.raises(MissingActual):
            session.observe_feedback(False)

    def test_feedback_without_prediction(self):
        session = Session(four_user_model(), seed=0)
        with pytest.raises(NoPendingPrediction):
            session.observe_feedback(True)

    def test_wrong_kind_rejected(self):
        session = Session(four_user_model(), seed=0)
        with pytest.raises(WrongKind):
            session.observe_primary(Action(id="s", kind=ActionKind.SECONDARY))

    def test_unresolved_prediction_blocks_primary_in_strict_mode(self):
        session = Session(four_user_model(), seed=0)
        session.predict()
        with pytest.raises(PendingFeedback):
            session.observe_primary(pri("p1"))

    def test_auto_resolve_accepts_implicitly(self):
        session = Session(four_user_model(), seed=0, auto_resolve=True)
        predicted = session.predict()
        session.observe_primary(pri("p1"))
        assert session.steps[0].secondary == predicted
        assert session.transcript[0].accepted is True

    def test_first_primary_without_prediction_gets_noop(self):
        session = Session(four_user_model(), seed=0)
        session.observe_primary(pri("p1"))
        assert session.steps[0].secondary == NOOP

    def test_prefix_tracking_matches_resegmentation(self, task, fig4_demos):
        from prefstack.training import train

        model = train(list(fig4_demos[1:]), task, CFG)
        session = Session(model, seed=3)
        for step in fig4_demos[0].steps:
            pred = session.predict()
            ok = pred == step.secondary
            session.observe_feedback(ok, None if ok else step.secondary)
            session.observe_primary(step.primary)
            assert replay_consistency_check(session)


class TestReplayProperties:
    def test_clone_user_posterior_locks_and_stays(self, task, fig4_demos):
        from prefstack.training import train

        target = next(d for d in fig4_demos if d.user_id == "user_12")
        model = train(list(fig4_demos), task, CFG)
        cluster = next(
            c for c in model.high_clusters if "user_12" in c.member_user_ids
        )
        session = Session(model, seed=0)
        locked = False
        for step in target.steps:
            pred = session.predict()
            ok = pred == step.secondary
            session.observe_feedback(ok, None if ok else step.secondary)
            session.observe_primary(step.primary)
            post = session.posterior_high_now()
            if post[cluster.cluster_id] == 1:
                locked = True
            elif locked:
                pytest.fail("posterior dropped after locking on the true cluster")
        assert locked

    def test_zero_likelihood_clusters_get_zero_mass(self, task, fig4_demos):
        from prefstack.training import train

        model = train(list(fig4_demos), task, CFG)
        # after observing a shelves_first start only g2's cluster matches
        target = next(d for d in fig4_demos if d.user_id == "user_13")
        session = Session(model, seed=0, auto_resolve=True)
        session.predict()
        session.observe_feedback(False, target.steps[0].secondary)
        session.observe_primary(target.steps[0].primary)
        post = session.posterior_high_now()
        g2 = next(c for c in model.high_clusters if "user_13" in c.member_user_ids)
        assert post[g2.cluster_id] == 1
        assert all(v == 0 for cid, v in post.items() if cid != g2.cluster_id)

    def test_seeded_determinism(self, task, fig4_demos):
        from prefstack.training import train

        model = train(list(fig4_demos[1:]), task, CFG)

        def run():
            session = Session(model, seed=99)
            preds = []
            for step in fig4_demos[0].steps:
                pred = session.predict()
                preds.append(pred)
                ok = pred == step.secondary
                session.observe_feedback(ok, None if ok else step.secondary)
                session.observe_primary(step.primary)
            return preds

        assert run() == run()


def test_posterior_normalization_randomized():
    rng = random.Random(7)
    tokens = ["a", "b", "c", "d"]
    checked_high = checked_low = 0
    for trial in range(50):
        n_users = rng.randint(3, 6)
        demos = []
        for u in range(n_users):
            steps = []
            for i in range(rng.randint(3, 8)):
                size = rng.choice([0, 1, 1, 2])
                toks = rng.sample(tokens, size)
                steps.append((toks, f"p{i}"))
            demos.append(demo_from_pattern(f"u{u}", steps))
        model = build_model(demos)
        for _ in range(10):
            probe_len = rng.randint(1, 6)
            probe = demo_from_pattern(
                "probe",
                [
                    (rng.sample(tokens, rng.choice([0, 1, 2])), f"q{i}")
                    for i in range(probe_len)
                ],
            )
            t = rng.randint(0, probe_len)
            post = posterior_high(
                model, segment_prefix(probe, max(t, 1)), t
            )
            assert sum(post.values()) == 1
            assert abs(sum(float(v) for v in post.values()) - 1.0) < 1e-9
            checked_high += 1
            identity = rng.choice(sorted(model.low_clusters, key=sorted))
            member_seqs = [
                s for c in model.low_clusters[identity] for s in c.sequences
            ]
            base = rng.choice(member_seqs)
            cut = rng.randint(0, len(base))
            observed = base[:cut]
            if rng.random() < 0.3:
                observed = observed + (secondary_set(rng.choice(tokens)),)
            low = posterior_low(model, identity, observed)
            assert sum(low.values()) == 1
            assert abs(sum(float(v) for v in low.values()) - 1.0) < 1e-9
            checked_low += 1
    assert checked_high == checked_low == 500
