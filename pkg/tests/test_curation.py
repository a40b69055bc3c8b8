from __future__ import annotations

import random

import pytest

from assaykg.curation import (
    ACCEPTED,
    REJECTED,
    add_manual,
    apply_decisions,
    decide,
    discard,
    finalize,
    open_session,
)
from assaykg.errors import (
    DuplicateStatementInSession,
    EmptyLabel,
    EmptyText,
    InvalidDecision,
    ParseError,
    PendingProposalsRemain,
    SessionClosed,
    UnknownProposal,
)
from assaykg.graph import KnowledgeGraph, normalize_label
from assaykg.semantify import Prediction, StatementLabel


def prediction(prop: str, value: str, score: float, accepted: bool = True) -> Prediction:
    return Prediction(
        label=StatementLabel(normalize_label(prop), normalize_label(value)),
        score=score,
        accepted_by_threshold=accepted,
    )


def five_predictions() -> list[Prediction]:
    return [prediction(f"prop {i}", f"value {i}", 0.9 - i * 0.1) for i in range(5)]


class TestOpenSession:
    def test_five_accepted_predictions_become_pending_proposals(self):
        session = open_session("assay text", five_predictions())
        assert len(session.proposals) == 5
        assert all(p.decision == "pending" for p in session.proposals)
        assert session.state == "open"

    def test_zero_predictions_opens_manual_entry_session(self):
        session = open_session("assay text", [])
        assert session.proposals == []
        assert session.state == "open"

    def test_proposals_ordered_by_score_descending(self):
        predictions = [
            prediction("pa", "v", 0.9),
            prediction("pb", "v", 0.4),
            prediction("pc", "v", 0.7),
        ]
        session = open_session("assay text", predictions)
        assert [p.score for p in session.proposals] == [0.9, 0.7, 0.4]

    def test_non_accepted_predictions_excluded(self):
        predictions = [prediction("pa", "v", 0.9), prediction("pb", "v", 0.8, accepted=False)]
        session = open_session("assay text", predictions)
        assert [p.label.property for p in session.proposals] == ["pa"]

    def test_empty_text_rejected(self):
        with pytest.raises(EmptyText):
            open_session("  ", five_predictions())


class TestDecide:
    def test_pending_to_accepted(self):
        session = open_session("t", five_predictions())
        decide(session, "PP1", ACCEPTED)
        assert session.proposal("PP1").decision == ACCEPTED

    def test_redecision_overwrites(self):
        session = open_session("t", five_predictions())
        decide(session, "PP1", ACCEPTED)
        decide(session, "PP1", REJECTED)
        assert session.proposal("PP1").decision == REJECTED

    def test_decide_on_finalized_session(self):
        graph = KnowledgeGraph()
        session = open_session("t", [])
        finalize(session, graph, "Paper title")
        with pytest.raises(SessionClosed):
            decide(session, "PP1", ACCEPTED)

    def test_unknown_proposal(self):
        session = open_session("t", five_predictions())
        with pytest.raises(UnknownProposal):
            decide(session, "PP99", ACCEPTED)

    def test_invalid_decision_string(self):
        session = open_session("t", five_predictions())
        with pytest.raises(InvalidDecision):
            decide(session, "PP1", "maybe")


class TestAddManual:
    def test_curator_defined_statement_recorded(self):
        session = open_session("t", [])
        add_manual(session, "has significant direction", "increase")
        assert session.manual_additions[0].key == "has significant direction :: increase"

    def test_duplicate_of_accepted_proposal_rejected(self):
        session = open_session("t", [prediction("prop 0", "value 0", 0.9)])
        decide(session, "PP1", ACCEPTED)
        with pytest.raises(DuplicateStatementInSession):
            add_manual(session, "Prop 0", "Value 0")

    def test_duplicate_manual_rejected(self):
        session = open_session("t", [])
        add_manual(session, "p", "v")
        with pytest.raises(DuplicateStatementInSession):
            add_manual(session, "p", "v")

    def test_rejected_proposal_may_be_added_manually(self):
        session = open_session("t", [prediction("prop 0", "value 0", 0.9)])
        decide(session, "PP1", REJECTED)
        add_manual(session, "prop 0", "value 0")
        assert len(session.manual_additions) == 1

    def test_empty_label(self):
        session = open_session("t", [])
        with pytest.raises(EmptyLabel):
            add_manual(session, "", "x")

    def test_closed_session(self):
        session = open_session("t", [])
        discard(session)
        with pytest.raises(SessionClosed):
            add_manual(session, "p", "v")


class TestFinalize:
    def test_accepted_plus_manual_counts(self):
        graph = KnowledgeGraph()
        session = open_session("t", five_predictions()[:3])
        decide(session, "PP1", ACCEPTED)
        decide(session, "PP2", ACCEPTED)
        decide(session, "PP3", REJECTED)
        add_manual(session, "has significant direction", "increase")
        contribution = finalize(session, graph, "Paper title")
        assert len(graph.statements_of(contribution)) == 3

    def test_all_rejected_no_manual_gives_empty_contribution(self):
        graph = KnowledgeGraph()
        session = open_session("t", five_predictions()[:2])
        decide(session, "PP1", REJECTED)
        decide(session, "PP2", REJECTED)
        contribution = finalize(session, graph, "Paper title")
        assert graph.statements_of(contribution) == ()

    def test_finalize_twice_raises_session_closed(self):
        graph = KnowledgeGraph()
        session = open_session("t", [])
        finalize(session, graph, "Paper title")
        with pytest.raises(SessionClosed):
            finalize(session, graph, "Paper title")

    def test_pending_proposals_block_finalize(self):
        graph = KnowledgeGraph()
        session = open_session("t", five_predictions()[:2])
        decide(session, "PP1", ACCEPTED)
        with pytest.raises(PendingProposalsRemain):
            finalize(session, graph, "Paper title")

    def test_manual_then_accept_same_pair_absorbed(self):
        # a pair can end up both accepted and manual; the graph keeps one copy
        graph = KnowledgeGraph()
        session = open_session("t", [prediction("p", "v", 0.9)])
        add_manual(session, "p", "v")
        decide(session, "PP1", ACCEPTED)
        contribution = finalize(session, graph, "Paper title")
        assert len(graph.statements_of(contribution)) == 1


class TestConservation:
    def test_randomized_sessions_conserve_statements(self):
        rng = random.Random(4242)
        for _ in range(100):
            graph = KnowledgeGraph()
            n = rng.randrange(0, 8)
            predictions = [prediction(f"p{i}", f"v{i}", rng.random()) for i in range(n)]
            session = open_session("assay text", predictions)
            for proposal in session.proposals:
                decide(session, proposal.proposal_id, rng.choice([ACCEPTED, REJECTED]))
            for i in range(rng.randrange(0, 4)):
                try:
                    add_manual(session, f"mp{rng.randrange(6)}", f"mv{rng.randrange(6)}")
                except DuplicateStatementInSession:
                    pass
            # some re-decisions
            for proposal in session.proposals:
                if rng.random() < 0.3:
                    decide(session, proposal.proposal_id, rng.choice([ACCEPTED, REJECTED]))
            expected = {l.key for l in session.accepted_labels()} | {
                l.key for l in session.manual_additions
            }
            rejected = {
                p.label.key for p in session.proposals if p.decision == REJECTED
            } - {l.key for l in session.manual_additions}
            contribution = finalize(session, graph, "Randomized paper")
            got = {
                f"{normalize_label(graph.predicate(s.predicate).label)} :: "
                f"{normalize_label(graph.object_label(s.object))}"
                for s in graph.statements_of(contribution)
            }
            assert got == expected
            assert not (got & rejected)


class TestAuditLog:
    def test_events_are_timestamped_and_append_only(self):
        graph = KnowledgeGraph()
        session = open_session("t", five_predictions()[:1])
        decide(session, "PP1", ACCEPTED)
        decide(session, "PP1", REJECTED)
        add_manual(session, "p", "v")
        finalize(session, graph, "Paper")
        kinds = [e["event"] for e in session.events]
        assert kinds == ["opened", "decided", "decided", "manual_added", "finalized"]
        assert all("ts" in e for e in session.events)
        redecision = session.events[2]
        assert redecision["previous"] == ACCEPTED
        assert redecision["decision"] == REJECTED


class TestApplyDecisions:
    def test_decisions_file_applied_in_order(self):
        graph = KnowledgeGraph()
        session = open_session("t", five_predictions()[:2])
        lines = [
            '{"proposal_id": "PP1", "decision": "accepted"}',
            '{"proposal_id": "PP2", "decision": "rejected"}',
            '{"manual": {"property": "has significant direction", "value": "increase"}}',
        ]
        assert apply_decisions(session, lines) == 3
        contribution = finalize(session, graph, "Paper")
        assert len(graph.statements_of(contribution)) == 2

    def test_malformed_line_raises_parse_error_with_number(self):
        session = open_session("t", five_predictions()[:1])
        lines = ['{"proposal_id": "PP1", "decision": "accepted"}', "{nope"]
        with pytest.raises(ParseError) as err:
            apply_decisions(session, lines)
        assert err.value.line == 2

    def test_unknown_shape_rejected(self):
        session = open_session("t", [])
        with pytest.raises(ParseError):
            apply_decisions(session, ['{"something": 1}'])


class TestDiscard:
    def test_discarded_session_rejects_mutations(self):
        session = open_session("t", five_predictions()[:1])
        discard(session)
        assert session.state == "discarded"
        with pytest.raises(SessionClosed):
            decide(session, "PP1", ACCEPTED)
        with pytest.raises(SessionClosed):
            finalize(session, KnowledgeGraph(), "Paper")
