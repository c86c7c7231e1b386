import json

import pytest
from fastapi.testclient import TestClient

from regeval.review import compute_stats, create_app
from regeval.runner import RunStore

LABELS = ["A", "B", "C", "D"]


def make_case(i, rule, regen):
    return {
        "case_id": f"case/{i}",
        "question": f"Question {i}?",
        "choices": [{"label": lab, "text": f"text {lab}"} for lab in LABELS],
        "label_set": LABELS,
        "response_text": f"<think>reasoning {i}</think>\nanswer text",
        "think_text": f"reasoning {i}",
        "post_think_text": "\nanswer text",
        "thinking_complete": True,
        "rule_method": "answer_is_correct",
        "rule_answer": rule,
        "regen_answer": regen,
        "gold": "B",
    }


# rule agrees with the human label on 2 of 5, regen on 3 of 5
FIVE_CASES = [
    make_case(0, "B", "C"),  # human B -> rule hit
    make_case(1, "A", "B"),  # human B -> regen hit
    make_case(2, "C", "D"),  # human D -> regen hit
    make_case(3, "A", "C"),  # human C -> regen hit
    make_case(4, "D", "A"),  # human D -> rule hit
]
HUMAN = {"case/0": "B", "case/1": "B", "case/2": "D", "case/3": "C", "case/4": "D"}


@pytest.fixture
def run_dir(tmp_path):
    store = RunStore(tmp_path / "run")
    store.write_jsonl("disagreements.jsonl", FIVE_CASES)
    return store.dir


@pytest.fixture
def client(run_dir):
    return TestClient(create_app(run_dir))


def label_all(client):
    for case_id, label in HUMAN.items():
        response = client.post(
            f"/api/cases/{case_id}/label",
            json={"gold_label": label, "annotator": "alice"},
        )
        assert response.status_code == 200


class TestCases:
    def test_page_listing(self, client):
        page = client.get("/api/cases", params={"offset": 0, "limit": 2}).json()
        assert page["total"] == 5
        assert len(page["cases"]) == 2

    def test_get_single_case(self, client):
        case = client.get("/api/cases/case/3").json()
        assert case["question"] == "Question 3?"
        assert case["label"] is None

    def test_unknown_case_404(self, client):
        assert client.get("/api/cases/nope").status_code == 404

    def test_unlabeled_sort_first(self, client):
        client.post("/api/cases/case/0/label", json={"gold_label": "B", "annotator": "a"})
        page = client.get("/api/cases", params={"limit": 50}).json()
        ids = [c["case_id"] for c in page["cases"]]
        assert ids.index("case/0") == len(ids) - 1


class TestLabeling:
    def test_label_then_stats(self, client):
        client.post("/api/cases/case/0/label", json={"gold_label": "B", "annotator": "a"})
        stats = client.get("/api/stats").json()
        assert stats["labeled"] == 1
        assert stats["rule_agreement"] == 1.0
        assert stats["regen_agreement"] == 0.0

    def test_full_fixture_agreement_rates(self, client):
        label_all(client)
        stats = client.get("/api/stats").json()
        assert stats["labeled"] == 5
        assert stats["excluded"] == 0
        assert stats["rule_agreement"] == pytest.approx(0.4)
        assert stats["regen_agreement"] == pytest.approx(0.6)

    def test_exclusions_removed_from_denominator(self, client):
        label_all(client)
        # relabel case/0 (a rule hit) as having no definitive answer
        client.post("/api/cases/case/0/label", json={"no_definitive": True, "annotator": "a"})
        stats = client.get("/api/stats").json()
        assert stats["labeled"] == 5
        assert stats["excluded"] == 1
        assert stats["rule_agreement"] == pytest.approx(1 / 4)
        assert stats["regen_agreement"] == pytest.approx(3 / 4)

    def test_multiple_labels_exclusion(self, client):
        client.post("/api/cases/case/1/label", json={"multiple_labels": True, "annotator": "a"})
        stats = client.get("/api/stats").json()
        assert stats["excluded"] == 1
        assert stats["rule_agreement"] == 0.0

    def test_label_outside_label_set_rejected(self, client):
        response = client.post("/api/cases/case/0/label", json={"gold_label": "Z", "annotator": "a"})
        assert response.status_code == 400
        assert "label set" in response.json()["detail"]

    def test_malformed_payload_rejected(self, client):
        assert client.post("/api/cases/case/0/label", json={}).status_code == 400
        both = {"gold_label": "A", "no_definitive": True}
        assert client.post("/api/cases/case/0/label", json=both).status_code == 400

    def test_last_write_wins_audit_trail_kept(self, run_dir):
        client = TestClient(create_app(run_dir))
        client.post("/api/cases/case/0/label", json={"gold_label": "A", "annotator": "a"})
        client.post("/api/cases/case/0/label", json={"gold_label": "B", "annotator": "a"})
        case = client.get("/api/cases/case/0").json()
        assert case["label"]["gold_label"] == "B"
        lines = (run_dir / "labels.jsonl").read_text().splitlines()
        assert len(lines) == 2  # both writes kept

    def test_labels_survive_restart(self, run_dir):
        client = TestClient(create_app(run_dir))
        label_all(client)
        reloaded = TestClient(create_app(run_dir))
        stats = reloaded.get("/api/stats").json()
        assert stats["labeled"] == 5
        assert stats["rule_agreement"] == pytest.approx(0.4)


class TestAgreementIdentity:
    def test_server_stats_match_independent_recomputation(self, run_dir):
        client = TestClient(create_app(run_dir))
        label_all(client)
        client.post("/api/cases/case/2/label", json={"no_definitive": True, "annotator": "a"})
        served = client.get("/api/stats").json()

        # recompute from the raw artifacts, not through the server
        cases = [json.loads(l) for l in (run_dir / "disagreements.jsonl").read_text().splitlines()]
        effective = {}
        for line in (run_dir / "labels.jsonl").read_text().splitlines():
            record = json.loads(line)
            effective[record["case_id"]] = record
        definitive = {
            cid: rec["gold_label"] for cid, rec in effective.items()
            if rec["decision"] == "gold_label"
        }
        rule_hits = sum(
            1 for c in cases if c["case_id"] in definitive
            and c["rule_answer"] == definitive[c["case_id"]]
        )
        regen_hits = sum(
            1 for c in cases if c["case_id"] in definitive
            and c["regen_answer"] == definitive[c["case_id"]]
        )
        assert served["rule_agreement"] == pytest.approx(rule_hits / len(definitive))
        assert served["regen_agreement"] == pytest.approx(regen_hits / len(definitive))
        assert served["excluded"] == len(effective) - len(definitive)

    def test_zero_labels_all_zero(self, client):
        stats = client.get("/api/stats").json()
        assert stats == {
            "total_cases": 5, "labeled": 0, "excluded": 0,
            "rule_agreement": 0.0, "regen_agreement": 0.0,
        }


def test_missing_disagreements_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        create_app(tmp_path)


def test_compute_stats_ignores_unknown_cases():
    stats = compute_stats(FIVE_CASES[:1], {"ghost": {"decision": "gold_label", "gold_label": "A"}})
    assert stats["labeled"] == 0
