"""Human-in-the-loop curation sessions.

A session holds the semantifier's accepted proposals for one assay text.
The curator accepts or rejects each proposal (re-decidable while the session
is open), optionally adds statements the model missed, and finalizes: exactly
the accepted proposals plus the manual additions enter the graph as one new
contribution. Pending proposals block finalization; silence is not a decision.

Every mutation is recorded in an append-only, timestamped event log.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicateStatement,
    DuplicateStatementInSession,
    EmptyLabel,
    EmptyText,
    InvalidDecision,
    ParseError,
    PendingProposalsRemain,
    SessionClosed,
    UnknownProposal,
)
from .graph import KnowledgeGraph, normalize_label
from .semantify import Prediction, StatementLabel

log = logging.getLogger(__name__)

PENDING = "pending"
ACCEPTED = "accepted"
REJECTED = "rejected"

OPEN = "open"
FINALIZED = "finalized"
DISCARDED = "discarded"

_session_counter = itertools.count(1)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class ProposedStatement:
    proposal_id: str
    label: StatementLabel
    score: float
    decision: str = PENDING


@dataclass
class CurationSession:
    id: str
    assay_text: str
    proposals: list[ProposedStatement] = field(default_factory=list)
    manual_additions: list[StatementLabel] = field(default_factory=list)
    state: str = OPEN
    events: list[dict] = field(default_factory=list)
    assay_id: Optional[str] = None
    contribution_id: Optional[str] = None

    def proposal(self, proposal_id: str) -> ProposedStatement:
        for proposal in self.proposals:
            if proposal.proposal_id == proposal_id:
                return proposal
        raise UnknownProposal(f"session {self.id} has no proposal {proposal_id}")

    def pending_ids(self) -> list[str]:
        return [p.proposal_id for p in self.proposals if p.decision == PENDING]

    def accepted_labels(self) -> list[StatementLabel]:
        return [p.label for p in self.proposals if p.decision == ACCEPTED]

    def _record(self, event: str, **payload) -> None:
        self.events.append({"ts": _now(), "event": event, **payload})

    def _require_open(self) -> None:
        if self.state != OPEN:
            raise SessionClosed(f"session {self.id} is {self.state}")


def open_session(
    assay_text: str,
    predictions: Sequence[Prediction],
    session_id: Optional[str] = None,
    assay_id: Optional[str] = None,
) -> CurationSession:
    """One pending proposal per accepted-by-threshold prediction, score-descending."""
    if not assay_text.strip():
        raise EmptyText("cannot open a curation session on empty text")
    session = CurationSession(
        id=session_id or f"S{next(_session_counter)}",
        assay_text=assay_text,
        assay_id=assay_id,
    )
    accepted = [p for p in predictions if p.accepted_by_threshold]
    accepted.sort(key=lambda p: -p.score)
    for n, prediction in enumerate(accepted, start=1):
        session.proposals.append(
            ProposedStatement(
                proposal_id=f"PP{n}",
                label=prediction.label,
                score=prediction.score,
            )
        )
    session._record("opened", proposals=len(session.proposals))
    return session


def decide(session: CurationSession, proposal_id: str, decision: str) -> CurationSession:
    """Record accept/reject for one proposal; re-decision overwrites."""
    session._require_open()
    if decision not in (ACCEPTED, REJECTED):
        raise InvalidDecision(f"decision must be 'accepted' or 'rejected', got {decision!r}")
    proposal = session.proposal(proposal_id)
    previous = proposal.decision
    proposal.decision = decision
    session._record("decided", proposal_id=proposal_id, decision=decision, previous=previous)
    return session


def add_manual(session: CurationSession, prop: str, value: str) -> CurationSession:
    """Add a curator-defined statement not already accepted or manually added."""
    session._require_open()
    norm_prop, norm_value = normalize_label(prop), normalize_label(value)
    if not norm_prop or not norm_value:
        raise EmptyLabel("manual statement needs nonempty property and value")
    label = StatementLabel(norm_prop, norm_value)
    taken = {l.key for l in session.accepted_labels()} | {l.key for l in session.manual_additions}
    if label.key in taken:
        raise DuplicateStatementInSession(f"{label.key!r} already present in session {session.id}")
    session.manual_additions.append(label)
    session._record("manual_added", property=norm_prop, value=norm_value)
    return session


def finalize(session: CurationSession, graph: KnowledgeGraph, paper_title: str) -> str:
    """Create paper + contribution carrying exactly accepted + manual statements."""
    session._require_open()
    pending = session.pending_ids()
    if pending:
        raise PendingProposalsRemain(f"undecided proposals in session {session.id}: {', '.join(pending)}")
    paper = graph.create_paper(paper_title)
    contribution = graph.create_contribution(paper, label=f"curated:{session.id}")
    labels = session.accepted_labels() + session.manual_additions
    for label in labels:
        try:
            graph.add_statement(contribution, predicate_label=label.property, object_label=label.value)
        except DuplicateStatement:
            pass
    if not labels:
        log.warning("session %s finalized with zero statements", session.id)
    session.state = FINALIZED
    session.contribution_id = contribution
    session._record("finalized", contribution=contribution, statements=len({l.key for l in labels}))
    return contribution


def discard(session: CurationSession) -> CurationSession:
    session._require_open()
    session.state = DISCARDED
    session._record("discarded")
    return session


def apply_decisions(session: CurationSession, lines: Iterable[str]) -> int:
    """Apply a headless decisions file (JSON Lines) in order; returns ops applied.

    Each line is either {"proposal_id": ..., "decision": "accepted"|"rejected"}
    or {"manual": {"property": ..., "value": ...}}.
    """
    applied = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"decisions line {lineno}: invalid JSON ({exc.msg})", line=lineno) from exc
        if not isinstance(record, dict):
            raise ParseError(f"decisions line {lineno}: not a JSON object", line=lineno)
        if "proposal_id" in record:
            decide(session, record["proposal_id"], record.get("decision", ""))
        elif "manual" in record:
            manual = record["manual"]
            if not isinstance(manual, dict):
                raise ParseError(f"decisions line {lineno}: 'manual' must be an object", line=lineno)
            add_manual(session, manual.get("property", ""), manual.get("value", ""))
        else:
            raise ParseError(
                f"decisions line {lineno}: expected 'proposal_id' or 'manual'", line=lineno
            )
        applied += 1
    return applied


# -- session serialization (used by snapshot persistence) ---------------------


def session_to_payload(session: CurationSession) -> dict:
    return {
        "id": session.id,
        "assay_text": session.assay_text,
        "assay_id": session.assay_id,
        "contribution_id": session.contribution_id,
        "state": session.state,
        "proposals": [
            {
                "proposal_id": p.proposal_id,
                "property": p.label.property,
                "value": p.label.value,
                "score": p.score,
                "decision": p.decision,
            }
            for p in session.proposals
        ],
        "manual_additions": [{"property": l.property, "value": l.value} for l in session.manual_additions],
        "events": list(session.events),
    }


def session_from_payload(payload: dict) -> CurationSession:
    session = CurationSession(
        id=payload["id"],
        assay_text=payload["assay_text"],
        assay_id=payload.get("assay_id"),
        contribution_id=payload.get("contribution_id"),
        state=payload["state"],
    )
    for p in payload.get("proposals", []):
        session.proposals.append(
            ProposedStatement(
                proposal_id=p["proposal_id"],
                label=StatementLabel(p["property"], p["value"]),
                score=p["score"],
                decision=p["decision"],
            )
        )
    for m in payload.get("manual_additions", []):
        session.manual_additions.append(StatementLabel(m["property"], m["value"]))
    session.events = list(payload.get("events", []))
    return session
