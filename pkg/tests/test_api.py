from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from assaykg.api import create_app
from assaykg.compare import build_comparison, to_json_dict
from assaykg.graph import normalize_label
from assaykg.store import Store


@pytest.fixture
def store(fixture_corpus, fixture_model) -> Store:
    s = Store()
    s.ingest_corpus(fixture_corpus)
    s.set_model(fixture_model, None)
    return s


@pytest.fixture
def client(store) -> TestClient:
    return TestClient(create_app(store))


@pytest.fixture
def bare_client() -> TestClient:
    return TestClient(create_app(Store()))


ASSAY_TEXT = "Luciferase reporter gene assay with luminescence readout on HEK293 cells."


class TestAssays:
    def test_create_valid(self, client):
        response = client.post("/api/assays", json={"text": ASSAY_TEXT, "title": "New assay"})
        assert response.status_code == 201
        assert response.json()["assay_id"].startswith("A")

    def test_empty_text_400(self, client):
        response = client.post("/api/assays", json={"text": ""})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "EmptyText"

    def test_duplicate_text_two_distinct_assays(self, client):
        a = client.post("/api/assays", json={"text": ASSAY_TEXT}).json()["assay_id"]
        b = client.post("/api/assays", json={"text": ASSAY_TEXT}).json()["assay_id"]
        assert a != b

    def test_missing_body_field_400(self, client):
        assert client.post("/api/assays", json={}).status_code == 400


class TestSemantify:
    def test_proposals_sorted_descending(self, client):
        assay = client.post("/api/assays", json={"text": ASSAY_TEXT}).json()["assay_id"]
        response = client.post(f"/api/assays/{assay}/semantify", json={})
        assert response.status_code == 201
        body = response.json()
        assert body["session_id"].startswith("S")
        scores = [p["score"] for p in body["proposals"]]
        assert scores == sorted(scores, reverse=True)
        assert all(p["accepted_by_threshold"] for p in body["proposals"])

    def test_unknown_assay_404(self, client):
        assert client.post("/api/assays/A404/semantify", json={}).status_code == 404

    def test_no_model_409(self, bare_client):
        assay = bare_client.post("/api/assays", json={"text": ASSAY_TEXT}).json()["assay_id"]
        response = bare_client.post(f"/api/assays/{assay}/semantify", json={})
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "ModelUnavailable"

    def test_bad_top_k_400(self, client):
        assay = client.post("/api/assays", json={"text": ASSAY_TEXT}).json()["assay_id"]
        assert client.post(f"/api/assays/{assay}/semantify", json={"top_k": 0}).status_code == 400


def open_session(client, text=ASSAY_TEXT):
    assay = client.post("/api/assays", json={"text": text}).json()["assay_id"]
    body = client.post(f"/api/assays/{assay}/semantify", json={}).json()
    return assay, body["session_id"], body["proposals"]


class TestDecisions:
    def test_accept_200(self, client):
        _, session, proposals = open_session(client)
        response = client.patch(
            f"/api/sessions/{session}/proposals/{proposals[0]['proposal_id']}",
            json={"decision": "accepted"},
        )
        assert response.status_code == 200
        assert response.json()["decision"] == "accepted"

    def test_bad_decision_string_400(self, client):
        _, session, proposals = open_session(client)
        response = client.patch(
            f"/api/sessions/{session}/proposals/{proposals[0]['proposal_id']}",
            json={"decision": "perhaps"},
        )
        assert response.status_code == 400

    def test_finalized_session_409(self, client):
        _, session, proposals = open_session(client)
        for proposal in proposals:
            client.patch(
                f"/api/sessions/{session}/proposals/{proposal['proposal_id']}",
                json={"decision": "rejected"},
            )
        assert client.post(f"/api/sessions/{session}/finalize", json={"paper_title": "T"}).status_code == 201
        response = client.patch(
            f"/api/sessions/{session}/proposals/{proposals[0]['proposal_id']}",
            json={"decision": "accepted"},
        )
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "SessionClosed"

    def test_unknown_proposal_404(self, client):
        _, session, _ = open_session(client)
        response = client.patch(f"/api/sessions/{session}/proposals/PP99", json={"decision": "accepted"})
        assert response.status_code == 404


class TestManualAndFinalize:
    def test_finalize_with_pending_409(self, client):
        _, session, proposals = open_session(client)
        assert proposals
        response = client.post(f"/api/sessions/{session}/finalize", json={"paper_title": "T"})
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "PendingProposalsRemain"

    def test_conservation_on_finalize(self, client, store):
        _, session, proposals = open_session(client)
        accepted = 0
        for n, proposal in enumerate(proposals):
            decision = "accepted" if n % 2 == 0 else "rejected"
            accepted += decision == "accepted"
            client.patch(
                f"/api/sessions/{session}/proposals/{proposal['proposal_id']}",
                json={"decision": decision},
            )
        added = client.post(
            f"/api/sessions/{session}/statements",
            json={"property": "has significant direction", "value": "increase"},
        )
        assert added.status_code == 201
        response = client.post(f"/api/sessions/{session}/finalize", json={"paper_title": "Done"})
        assert response.status_code == 201
        body = response.json()
        assert body["statement_count"] == accepted + 1
        assert store.graph.has_contribution(body["contribution_id"])

    def test_duplicate_manual_409(self, client):
        _, session, _ = open_session(client)
        payload = {"property": "has significant direction", "value": "increase"}
        assert client.post(f"/api/sessions/{session}/statements", json=payload).status_code == 201
        assert client.post(f"/api/sessions/{session}/statements", json=payload).status_code == 409

    def test_empty_manual_label_400(self, client):
        _, session, _ = open_session(client)
        response = client.post(f"/api/sessions/{session}/statements", json={"property": "", "value": "x"})
        assert response.status_code == 400


class TestComparisonsAndSimilar:
    def test_comparison_matches_module_golden(self, client, store, fixture_corpus):
        ids = [store.assays[a.id].contribution_id for a in fixture_corpus]
        response = client.get("/api/comparisons", params={"contributions": ",".join(ids)})
        assert response.status_code == 200
        expected = to_json_dict(build_comparison(store.graph, ids))
        assert response.json() == expected

    def test_unknown_id_in_list_404_naming_it(self, client, store, fixture_corpus):
        good = store.assays[fixture_corpus[0].id].contribution_id
        response = client.get("/api/comparisons", params={"contributions": f"{good},C404"})
        assert response.status_code == 404
        assert "C404" in response.json()["error"]["message"]

    def test_empty_selection_400(self, client):
        assert client.get("/api/comparisons", params={"contributions": " , "}).status_code == 400

    def test_similar_k_zero_400(self, client, store, fixture_corpus):
        cid = store.assays[fixture_corpus[0].id].contribution_id
        assert client.get(f"/api/assays/{cid}/similar", params={"k": 0}).status_code == 400

    def test_similar_results_sorted(self, client, store, fixture_corpus):
        cid = store.assays[fixture_corpus[0].id].contribution_id
        response = client.get(f"/api/assays/{cid}/similar", params={"k": 5})
        assert response.status_code == 200
        results = response.json()["results"]
        scores = [r["score"] for r in results]
        assert scores == sorted(scores, reverse=True)
        assert cid not in [r["contribution"] for r in results]

    def test_stats_shape(self, client):
        body = client.get("/api/stats").json()
        assert body["assay_count"] == 3
        assert body["statements_min"] == 5
        assert body["statements_max"] == 92
        assert body["statements_mean"] == 50.0
        assert "per_label_frequency" in body


class TestInterleavedSessions:
    def test_two_sessions_on_different_assays_stay_independent(self, client, store):
        _, s1, p1 = open_session(client, "Luciferase reporter gene assay one.")
        _, s2, p2 = open_session(client, "Radioligand binding assay on membranes.")
        # interleave decisions across the two sessions
        for a, b in zip(p1, p2):
            client.patch(f"/api/sessions/{s1}/proposals/{a['proposal_id']}", json={"decision": "accepted"})
            client.patch(f"/api/sessions/{s2}/proposals/{b['proposal_id']}", json={"decision": "rejected"})
        for p in p1[len(p2):]:
            client.patch(f"/api/sessions/{s1}/proposals/{p['proposal_id']}", json={"decision": "accepted"})
        for p in p2[len(p1):]:
            client.patch(f"/api/sessions/{s2}/proposals/{p['proposal_id']}", json={"decision": "rejected"})
        c1 = client.post(f"/api/sessions/{s1}/finalize", json={"paper_title": "One"}).json()
        c2 = client.post(f"/api/sessions/{s2}/finalize", json={"paper_title": "Two"}).json()
        assert c1["statement_count"] == len(p1)
        assert c2["statement_count"] == 0
        assert c1["contribution_id"] != c2["contribution_id"]


class TestFullFlow:
    def test_rq2_flow_leaves_exact_statement_set(self, client, store):
        assay, session, proposals = open_session(client)
        kept = []
        for n, proposal in enumerate(proposals):
            decision = "accepted" if n < 2 else "rejected"
            if decision == "accepted":
                kept.append((proposal["property"], proposal["value"]))
            client.patch(
                f"/api/sessions/{session}/proposals/{proposal['proposal_id']}",
                json={"decision": decision},
            )
        client.post(
            f"/api/sessions/{session}/statements",
            json={"property": "has significant direction", "value": "increase"},
        )
        kept.append(("has significant direction", "increase"))
        contribution = client.post(
            f"/api/sessions/{session}/finalize", json={"paper_title": "Flow"}
        ).json()["contribution_id"]
        got = {
            (
                normalize_label(store.graph.predicate(s.predicate).label),
                normalize_label(store.graph.object_label(s.object)),
            )
            for s in store.graph.statements_of(contribution)
        }
        assert got == {(normalize_label(p), normalize_label(v)) for p, v in kept}
        # the assay now resolves to its contribution for downstream queries
        response = client.get(f"/api/assays/{assay}/similar", params={"k": 3})
        assert response.status_code == 200
