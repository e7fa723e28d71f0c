import json

import pytest

from prefstack.errors import ParseError, SchemaMismatch
from prefstack.storage import (
    load_demo,
    load_demos,
    load_model,
    load_task,
    save_demo,
    save_demos,
    save_model,
    save_task,
)
from prefstack.training import TrainingConfig, train


class TestTaskFiles:
    def test_roundtrip(self, task, tmp_path):
        path = tmp_path / "task.json"
        save_task(task, path)
        assert load_task(path) == task

    def test_bookcase_fixture_counts(self, task, tmp_path):
        path = tmp_path / "task.json"
        save_task(task, path)
        loaded = load_task(path)
        assert len(loaded.parts) == 17
        assert len(loaded.primary_actions) == 32

    def test_corrupted_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"task_id": "x", ')
        with pytest.raises(ParseError):
            load_task(path)

    def test_schema_mismatch(self, tmp_path):
        path = tmp_path / "future.json"
        path.write_text(json.dumps({"schema_version": 99, "task_id": "x"}))
        with pytest.raises(SchemaMismatch):
            load_task(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"schema_version": 1, "task_id": "x"}))
        with pytest.raises(ParseError):
            load_task(path)


class TestDemoFiles:
    def test_roundtrip(self, task, fig4_demos, tmp_path):
        demo = fig4_demos[0]
        path = tmp_path / "demo.json"
        save_demo(demo, path)
        assert load_demo(path, task) == demo

    def test_directory_roundtrip_order(self, task, fig4_demos, tmp_path):
        save_demos(list(fig4_demos), tmp_path / "demos")
        loaded = load_demos(tmp_path / "demos", task)
        assert [d.user_id for d in loaded] == sorted(d.user_id for d in fig4_demos)
        assert sorted(loaded, key=lambda d: d.user_id) == sorted(
            fig4_demos, key=lambda d: d.user_id
        )

    def test_empty_directory(self, task, tmp_path):
        (tmp_path / "none").mkdir()
        with pytest.raises(ParseError):
            load_demos(tmp_path / "none", task)

    def test_raw_instance_log_canonicalizes(self, task, tmp_path):
        payload = {
            "schema_version": 1,
            "user_id": "u",
            "actions": [
                {"id": "bring_shelf_2", "kind": "secondary"},
                {"id": "conn_shelf_1_a", "kind": "primary"},
            ],
        }
        path = tmp_path / "raw.json"
        path.write_text(json.dumps(payload))
        demo = load_demo(path, task)
        assert demo.steps[0].secondary.sorted_tokens() == ["bring:shelf"]


class TestModelFiles:
    def test_roundtrip(self, task, fig4_demos, tmp_path):
        model = train(list(fig4_demos), task, TrainingConfig(seed=7))
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.task_id == model.task_id
        assert loaded.config == model.config
        assert loaded.high_clusters == model.high_clusters
        assert loaded.low_clusters == model.low_clusters
        assert loaded.demonstrations == model.demonstrations

    def test_save_load_save_byte_identical(self, task, fig4_demos, tmp_path):
        model = train(list(fig4_demos), task, TrainingConfig(seed=7))
        p1 = tmp_path / "m1.json"
        p2 = tmp_path / "m2.json"
        save_model(model, p1)
        save_model(load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_malformed_cluster_payload(self, tmp_path):
        payload = {
            "schema_version": 1,
            "task_id": "t",
            "config": {"linkage": "average", "metric": "mod", "seed": 0},
            "high_clusters": [{"cluster_id": 0}],
            "low_clusters": [],
            "demonstrations": [],
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ParseError):
            load_model(path)
