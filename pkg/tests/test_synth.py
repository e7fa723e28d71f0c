import pytest

from prefstack.errors import InconsistentPreset
from prefstack.events import identities, segment
from prefstack.model import canonical_supply_token, validate
from prefstack.synth import (
    EventTemplate,
    GroupSpec,
    SynthPreset,
    _bookcase_events,
    bookcase_task,
    fig4_preset,
    generate,
    generate_raw_logs,
)


class TestFig4Preset:
    def test_corpus_shape(self, fig4_demos):
        assert len(fig4_demos) == 18
        assert all(len(d.steps) == 32 for d in fig4_demos)

    def test_all_demos_validate(self, task, fig4_demos):
        for demo in fig4_demos:
            assert validate(demo, task).valid

    def test_segmentation_recovers_intended_orders(self, task, fig4_demos):
        preset = fig4_preset(task)
        orders = {}
        for g in preset.groups:
            for uid in g.user_ids:
                orders[uid] = g.event_order
        for demo in fig4_demos:
            if demo.user_id not in orders:
                continue  # outliers checked separately
            expected = tuple(
                frozenset(
                    canonical_supply_token(t) for t in preset.events[n].identity
                )
                for n in orders[demo.user_id]
            )
            got = tuple(i.members for i in identities(segment(demo)))
            assert got == expected, demo.user_id

    def test_outliers_are_permutations_of_group_orders(self, task, fig4_demos):
        outliers = {"user_02", "user_06", "user_07", "user_08"}
        seqs = {}
        for demo in fig4_demos:
            seqs[demo.user_id] = tuple(
                tuple(sorted(i.members)) for i in identities(segment(demo))
            )
        group_orders = {
            seqs["user_00"],
            seqs["user_12"],
            seqs["user_03"],
        }
        for uid in outliers:
            assert seqs[uid] not in group_orders
        assert len({seqs[u] for u in outliers}) == 4

    def test_determinism(self, task):
        preset = fig4_preset(task)
        assert generate(preset, task, seed=7) == generate(preset, task, seed=7)
        a = generate(preset, task, seed=7)
        b = generate(preset, task, seed=8)
        assert a != b

    def test_raw_logs_share_the_seeded_realization(self, task):
        preset = fig4_preset(task)
        from prefstack.model import canonicalize, to_timesteps

        logs = generate_raw_logs(preset, task, seed=7)
        rebuilt = [
            to_timesteps([canonicalize(a.id, task) for a in actions], user_id=uid, task=task)
            for uid, actions in logs
        ]
        assert rebuilt == generate(preset, task, seed=7)


class TestSingleGroup:
    def test_identical_up_to_fungible_choice(self, task):
        events = _bookcase_events(task)
        preset = SynthPreset(
            name="uniform",
            events=events,
            groups=(
                GroupSpec(
                    "only",
                    ("u1", "u2"),
                    ("boards", "con", "shelves"),
                    {"shelves": "both_sides"},
                ),
            ),
            outliers=(),
        )
        d1, d2 = generate(preset, task, seed=3)
        assert [s.secondary for s in d1.steps] == [s.secondary for s in d2.steps]


class TestInconsistentPreset:
    def test_style_outside_identity_rejected(self, task):
        events = dict(_bookcase_events(task))
        broken = EventTemplate(
            name="broken",
            identity=frozenset({"shelf"}),
            primary_pool=events["shelves"].primary_pool,
            # supplies a connector the identity does not declare
            styles={"bad": (frozenset({"shelf", "connector"}),) + (frozenset(),) * 11},
        )
        events["broken"] = broken
        preset = SynthPreset(
            name="bad",
            events=events,
            groups=(GroupSpec("g", ("u1",), ("broken",), {"broken": "bad"}),),
            outliers=(),
        )
        with pytest.raises(InconsistentPreset):
            generate(preset, task, seed=0)

    def test_merging_order_rejected(self, task):
        events = _bookcase_events(task)
        preset = SynthPreset(
            name="merge",
            events=events,
            groups=(
                GroupSpec(
                    "g",
                    ("u1",),
                    ("shelves_first", "boards"),  # boards folds into shelves_first
                ),
            ),
            outliers=(),
        )
        with pytest.raises(InconsistentPreset):
            generate(preset, task, seed=0)

    def test_pattern_length_mismatch_rejected(self, task):
        events = dict(_bookcase_events(task))
        short = EventTemplate(
            name="short",
            identity=frozenset({"shelf"}),
            primary_pool=events["shelves"].primary_pool,
            styles={"s": (frozenset({"shelf"}),)},
        )
        events["short"] = short
        preset = SynthPreset(
            name="bad",
            events=events,
            groups=(GroupSpec("g", ("u1",), ("short",), {"short": "s"}),),
            outliers=(),
        )
        with pytest.raises(InconsistentPreset):
            generate(preset, task, seed=0)


def test_bookcase_counts():
    task = bookcase_task()
    assert len(task.parts) == 17
    assert len(task.primary_actions) == 32
    assert len({a.action_id for a in task.primary_actions}) == 32
