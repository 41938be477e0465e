import json

import numpy as np
import pytest

from relspace.errors import CorruptSnapshot
from relspace.geometry import CylCoords
from relspace.memory import LongTermMemory
from relspace.relations import (
    RelationModel,
    RelationSymbol,
    update_incremental,
)
from relspace.synth import default_relation_symbols

from test_relations import make_demo

RIGHT = RelationSymbol("right_of", "right")
LEFT = RelationSymbol("left_of", "left")


def filled_memory(n_relations=3, demos_per_relation=5):
    symbols = default_relation_symbols()[:n_relations]
    mem = LongTermMemory(symbols)
    catalog = None
    rng = np.random.default_rng(1)
    for symbol in symbols:
        model = RelationModel(symbol)
        for j in range(demos_per_relation):
            c = CylCoords(rng.uniform(0.3, 2.5), rng.uniform(-3, 3), rng.uniform(-1, 1))
            catalog, demo = make_demo(c, relation=symbol, t0=10.0 * j)
            mem.store_sample(demo, timestamp=float(j))
            update_incremental(catalog, model, demo)
            mem.commands.append(float(j), demo.command)
        mem.relations.put_model(model)
    return catalog, mem


class TestSegments:
    def test_store_then_query_appends(self):
        mem = LongTermMemory([RIGHT])
        catalog, demo1 = make_demo(CylCoords(1, 0, 0), t0=0.0)
        _, demo2 = make_demo(CylCoords(2, 1, 0), t0=5.0)
        mem.store_sample(demo1, 0.0)
        mem.store_sample(demo2, 1.0)
        got = mem.query_samples(RIGHT)
        assert got == [demo1, demo2]

    def test_unknown_relation_empty(self):
        mem = LongTermMemory([RIGHT])
        assert mem.query_samples(LEFT) == []

    def test_models_absent_initially(self):
        mem = LongTermMemory(default_relation_symbols())
        for s in mem.relations.symbols():
            assert mem.relations.get_model(s.id) is None

    def test_command_segment_latest(self):
        mem = LongTermMemory([RIGHT, LEFT])
        catalog, demo1 = make_demo(CylCoords(1, 0, 0))
        _, demo2 = make_demo(CylCoords(1, 0, 0), relation=LEFT)
        mem.commands.append(0.0, demo1.command)
        mem.commands.append(1.0, demo2.command)
        assert mem.commands.latest() == (1.0, demo2.command)
        assert mem.commands.latest_for("right_of") == (0.0, demo1.command)
        assert mem.commands.latest_for("between") is None


class TestPersistence:
    def test_disk_backed_segments(self, tmp_path):
        mem = LongTermMemory([RIGHT], root=tmp_path / "mem")
        catalog, demo = make_demo(CylCoords(1.5, 0.3, 0.2))
        mem.store_sample(demo, 0.0)
        mem.commands.append(0.0, demo.command)
        model = update_incremental(catalog, RelationModel(RIGHT), demo)
        mem.relations.put_model(model)
        assert (tmp_path / "mem" / "samples" / "right_of.jsonl").exists()
        assert (tmp_path / "mem" / "relations.json").exists()
        assert (tmp_path / "mem" / "commands.jsonl").exists()


class TestSnapshot:
    def test_round_trip_lossless(self, tmp_path):
        catalog, mem = filled_memory()
        snap = tmp_path / "snap"
        mem.snapshot(snap)
        back = LongTermMemory.restore(snap)
        for symbol in mem.relations.symbols():
            a = mem.relations.get_model(symbol.id)
            b = back.relations.get_model(symbol.id)
            assert a.demo_count == b.demo_count
            assert a.gaussian_acc.state() == b.gaussian_acc.state()
            assert a.vonmises_acc.state() == b.vonmises_acc.state()
            assert np.array_equal(a.theta.rh.mean, b.theta.rh.mean)
            assert np.array_equal(a.theta.rh.covariance, b.theta.rh.covariance)
            assert a.theta.phi == b.theta.phi
            assert mem.query_samples(symbol) == back.query_samples(symbol)
        assert mem.commands.all() == back.commands.all()

    def test_empty_memory_round_trips(self, tmp_path):
        mem = LongTermMemory(default_relation_symbols())
        mem.snapshot(tmp_path / "snap")
        back = LongTermMemory.restore(tmp_path / "snap")
        assert [s.id for s in back.relations.symbols()] == [
            s.id for s in mem.relations.symbols()
        ]
        assert back.commands.latest() is None

    def test_truncated_file_rejected(self, tmp_path):
        catalog, mem = filled_memory()
        snap = tmp_path / "snap"
        mem.snapshot(snap)
        target = snap / "samples" / "right_of.jsonl"
        target.write_text(target.read_text()[:-10])
        with pytest.raises(CorruptSnapshot):
            LongTermMemory.restore(snap)

    def test_missing_manifest_rejected(self, tmp_path):
        catalog, mem = filled_memory()
        snap = tmp_path / "snap"
        mem.snapshot(snap)
        (snap / "manifest.json").unlink()
        with pytest.raises(CorruptSnapshot):
            LongTermMemory.restore(snap)

    def test_edited_model_rejected(self, tmp_path):
        catalog, mem = filled_memory()
        snap = tmp_path / "snap"
        mem.snapshot(snap)
        payload = json.loads((snap / "relations.json").read_text())
        payload["relations"][0]["model"]["demo_count"] = 99
        (snap / "relations.json").write_text(json.dumps(payload))
        with pytest.raises(CorruptSnapshot):
            LongTermMemory.restore(snap)

    def test_post_restore_update_equals_unbroken(self, tmp_path):
        """State sufficiency: restoring and continuing equals never stopping."""
        catalog, mem = filled_memory(n_relations=1, demos_per_relation=3)
        snap = tmp_path / "snap"
        mem.snapshot(snap)
        back = LongTermMemory.restore(snap)

        c = CylCoords(1.7, -1.1, 0.9)
        catalog, fresh_demo = make_demo(c, t0=100.0)

        unbroken = mem.relations.get_model("right_of")
        update_incremental(catalog, unbroken, fresh_demo)
        restored = back.relations.get_model("right_of")
        update_incremental(catalog, restored, fresh_demo)

        assert unbroken.gaussian_acc.state() == restored.gaussian_acc.state()
        assert unbroken.vonmises_acc.state() == restored.vonmises_acc.state()
        assert np.array_equal(unbroken.theta.rh.mean, restored.theta.rh.mean)
        assert np.array_equal(unbroken.theta.rh.covariance, restored.theta.rh.covariance)
        assert unbroken.theta.phi == restored.theta.phi


class TestBudgetContract:
    def test_incremental_update_never_queries_samples(self, monkeypatch):
        """The incremental updater must read only the model and the new demo."""
        from relspace import memory as memory_mod

        def boom(self, relation):
            raise AssertionError("incremental update read the sample archive")

        monkeypatch.setattr(memory_mod.SampleSegment, "query", boom)
        mem = LongTermMemory([RIGHT])
        catalog, demo = make_demo(CylCoords(1.2, 0.4, 0.1))
        mem.store_sample(demo, 0.0)
        model = RelationModel(RIGHT)
        update_incremental(catalog, model, demo)  # must not touch the segment
        assert model.demo_count == 1
