"""Review-service endpoints, the retrain slot, and crash recovery."""
import json
import os
import signal
import socket
import subprocess
import sys
import time
import urllib.error
import urllib.request
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from examqc import workflows
from examqc.cli import main
from examqc.data import SynthSpec
from examqc.service import create_app
from examqc.store import Store

DENSE = SynthSpec(n_items=12, n_persons=150, comment_rate=0.5,
                  relevant_rate=0.2, bait_rate=0.05)


def build_store(root, seed=3, variants=("M1", "M3")):
    store = Store(Path(root))
    workflows.synth_workflow(store, DENSE, seed=seed)
    workflows.stats_workflow(store)
    workflows.train_scorer_workflow(store, seed=seed,
                                    epoch_grid=(100, 400))
    workflows.score_workflow(store)
    for v in variants:
        workflows.run_workflow(store, v, seed=seed, grid_preset="small")
    return store


@pytest.fixture(scope="module")
def served(tmp_path_factory):
    store = build_store(tmp_path_factory.mktemp("svc"))
    client = TestClient(create_app(store), raise_server_exceptions=False)
    return store, client


class TestQueue:
    def test_order_and_limit(self, served):
        store, client = served
        r = client.get("/api/queue", params={"variant": "M1", "limit": 5})
        assert r.status_code == 200
        body = r.json()
        assert body["run_id"] == store.latest_run_for_variant("M1")
        entries = body["entries"]
        assert len(entries) == min(5, body["total"])
        keys = [(-e["probability"], e["comment_id"]) for e in entries]
        assert keys == sorted(keys)

    def test_entries_are_unlabeled_flagged_comments(self, served):
        store, client = served
        rid = store.latest_run_for_variant("M1")
        flagged = {r["comment_id"] for r in store.read_flagged_comments(rid)
                   if r["flagged"]}
        labeled = set(store.label_view())
        r = client.get("/api/queue",
                       params={"variant": "M1", "limit": 10_000})
        ids = {e["comment_id"] for e in r.json()["entries"]}
        assert ids == flagged - labeled

    def test_feature_snapshot(self, served):
        store, client = served
        ds = store.load_data()
        e = client.get("/api/queue", params={"variant": "M1",
                                             "limit": 1}).json()["entries"][0]
        comment = ds.comments[e["comment_id"]]
        assert e["item_id"] == comment.item_id
        assert e["text"] == comment.text
        counts = ds.comment_counts_by_item()
        feats = e["features"]
        assert feats["comment_n"] == counts[comment.item_id]
        assert feats["exam_score"] == \
            ds.candidates[comment.candidate_id].exam_score
        assert feats["b"] is not None and feats["p"] is not None
        assert e["label"] is None

    def test_item_filter(self, served):
        _store, client = served
        first = client.get("/api/queue", params={
            "variant": "M1", "limit": 1}).json()["entries"][0]
        r = client.get("/api/queue", params={
            "variant": "M1", "limit": 500, "item_id": first["item_id"]})
        entries = r.json()["entries"]
        assert entries
        assert all(e["item_id"] == first["item_id"] for e in entries)

    def test_unknown_variant(self, served):
        _store, client = served
        r = client.get("/api/queue", params={"variant": "M7"})
        assert r.status_code == 404
        assert r.json() == {"code": "unknown_variant",
                            "message": "unknown variant 'M7'"}

    def test_no_completed_run(self, served):
        _store, client = served
        r = client.get("/api/queue", params={"variant": "M5"})
        assert r.status_code == 404
        assert r.json()["code"] == "no_run"


class TestLabels:
    def test_label_excludes_from_queue_and_is_idempotent(self, served):
        store, client = served
        before = client.get("/api/queue", params={
            "variant": "M1", "limit": 10_000}).json()
        cid = before["entries"][0]["comment_id"]
        r = client.post("/api/labels", json={
            "comment_id": cid, "label": 0, "reviewer": "svc-test"})
        assert r.status_code == 200
        epoch = store.label_epoch()
        r = client.post("/api/labels", json={
            "comment_id": cid, "label": 0, "reviewer": "svc-test"})
        assert r.status_code == 200
        assert store.label_epoch() == epoch
        after = client.get("/api/queue", params={
            "variant": "M1", "limit": 10_000}).json()
        assert after["total"] == before["total"] - 1
        assert cid not in {e["comment_id"] for e in after["entries"]}

    def test_changed_decision_appends(self, served):
        store, client = served
        queue = client.get("/api/queue", params={
            "variant": "M1", "limit": 2}).json()["entries"]
        cid = queue[-1]["comment_id"]
        client.post("/api/labels", json={"comment_id": cid, "label": 0,
                                         "reviewer": "svc-test"})
        epoch = store.label_epoch()
        client.post("/api/labels", json={"comment_id": cid, "label": 1,
                                         "reviewer": "svc-test"})
        assert store.label_epoch() == epoch + 1
        assert client.get("/api/labels").json()["labels"][cid] == 1

    def test_unknown_comment(self, served):
        _store, client = served
        r = client.post("/api/labels", json={"comment_id": "ghost",
                                             "label": 1})
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_comment"

    def test_invalid_label_value(self, served):
        _store, client = served
        queue = client.get("/api/queue", params={
            "variant": "M1", "limit": 1}).json()["entries"]
        r = client.post("/api/labels", json={
            "comment_id": queue[0]["comment_id"], "label": 5})
        assert r.status_code == 422
        assert r.json()["code"] == "validation"


class TestRunsAndItems:
    def test_run_status_and_reports(self, served):
        store, client = served
        rid = store.latest_run_for_variant("M3")
        assert client.get(f"/api/runs/{rid}").json() == {
            "run_id": rid, "status": "complete"}
        body = client.get(f"/api/runs/{rid}/reports").json()
        on_disk = json.loads(
            (store.run_dir(rid) / "reports" / "table4.json").read_text())
        assert body["table4"] == on_disk
        assert body["manifest"]["variant"] == "M3"

    def test_unknown_run(self, served):
        _store, client = served
        assert client.get("/api/runs/nope").status_code == 404
        assert client.get("/api/runs/nope/reports").status_code == 404

    def test_item_detail(self, served):
        store, client = served
        ds = store.load_data()
        iid = sorted(ds.items)[0]
        body = client.get(f"/api/items/{iid}").json()
        assert body["item_id"] == iid
        assert body["statistics"]["n"] > 0
        expected = sorted(c.comment_id for c in ds.comments.values()
                          if c.item_id == iid)
        assert [c["comment_id"] for c in body["comments"]] == expected

    def test_unknown_item(self, served):
        _store, client = served
        r = client.get("/api/items/ghost")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_item"


class TestRetrain:
    def test_single_class_store_rejected(self, tmp_path):
        root = tmp_path / "flat"
        assert main(["--store", str(root), "synth", "--items", "8",
                     "--persons", "60", "--seed", "1"]) == 0
        store = Store(root)
        ds = store.load_data()
        for c in ds.comments.values():
            c.label = 0
        store.save_data(ds)
        client = TestClient(create_app(store),
                            raise_server_exceptions=False)
        r = client.post("/api/retrain", json={"variant": "M1", "seed": 1})
        assert r.status_code == 422
        assert r.json()["code"] == "single_class"

    def test_retrain_cycle_with_busy_slot(self, served):
        store, client = served
        old_rid = store.latest_run_for_variant("M3")
        r = client.post("/api/retrain", json={"variant": "M3", "seed": 3})
        assert r.status_code == 200
        new_rid = r.json()["run_id"]
        assert new_rid != old_rid
        busy = client.post("/api/retrain", json={"variant": "M3",
                                                 "seed": 4})
        assert busy.status_code == 409
        assert busy.json()["code"] == "busy"
        # reads during the job still serve the last completed run
        during = client.get("/api/queue", params={"variant": "M3",
                                                  "limit": 1})
        assert during.json()["run_id"] == old_rid
        deadline = time.time() + 120
        while time.time() < deadline:
            status = client.get(f"/api/runs/{new_rid}").json()["status"]
            if status != "pending":
                break
            time.sleep(0.2)
        assert status == "complete", store.root
        after = client.get("/api/queue", params={"variant": "M3",
                                                 "limit": 1})
        assert after.json()["run_id"] == new_rid

    def test_unknown_variant(self, served):
        _store, client = served
        r = client.post("/api/retrain", json={"variant": "M8", "seed": 0})
        assert r.status_code == 404


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def http_json(method, url, payload=None, timeout=5):
    data = None if payload is None else json.dumps(payload).encode()
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type":
                                          "application/json"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return json.loads(resp.read())


def wait_ready(port, deadline=20.0):
    t0 = time.time()
    while time.time() - t0 < deadline:
        try:
            return http_json("GET", f"http://127.0.0.1:{port}/api/labels")
        except (urllib.error.URLError, ConnectionError, OSError):
            time.sleep(0.2)
    raise TimeoutError(f"service on port {port} never became ready")


def spawn_service(root, port):
    return subprocess.Popen(
        [sys.executable, "-m", "examqc.cli", "--store", str(root),
         "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)


class TestCrashRecovery:
    def test_label_log_survives_sigkill(self, tmp_path):
        store = build_store(tmp_path / "crash", seed=5, variants=("M1",))
        rid = store.latest_run_for_variant("M1")
        victims = [r["comment_id"]
                   for r in store.read_flagged_comments(rid)
                   if r["flagged"]][:5]
        assert len(victims) == 5
        port = free_port()
        proc = spawn_service(store.root, port)
        second = None
        try:
            wait_ready(port)
            base = f"http://127.0.0.1:{port}"
            for k, cid in enumerate(victims):
                body = http_json("POST", f"{base}/api/labels",
                                 {"comment_id": cid, "label": k % 2,
                                  "reviewer": "crash-test"})
                assert body["status"] == "ok"
            before = http_json("GET", f"{base}/api/labels")
            assert len(before["labels"]) == 5

            os.kill(proc.pid, signal.SIGKILL)
            proc.wait(timeout=10)

            port2 = free_port()
            second = spawn_service(store.root, port2)
            after = wait_ready(port2)
            assert after == before
            assert store.label_view() == before["labels"]
        finally:
            for p in (proc, second):
                if p is not None and p.poll() is None:
                    p.kill()
                    p.wait(timeout=10)
