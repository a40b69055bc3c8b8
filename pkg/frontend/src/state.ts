import type { Api } from "./api.js";
import type { Decision, ManualAddition, ProposalPayload, SemantifyResponse } from "./types.js";

export interface ProposalState {
  proposalId: string;
  property: string;
  value: string;
  score: number;
  decision: Decision;
  /** true while a local edit has not been confirmed by the server */
  dirty: boolean;
}

/**
 * Local mirror of one curation session. Toggles apply optimistically and
 * reconcile to the server payload after every successful PATCH; on failure
 * the previous decision is restored.
 */
export class SessionViewState {
  readonly sessionId: string;
  proposals: ProposalState[];
  manualAdditions: ManualAddition[] = [];
  contributionId: string | null = null;
  validationMessages: string[] = [];

  constructor(payload: SemantifyResponse) {
    this.sessionId = payload.session_id;
    this.proposals = [...payload.proposals]
      .sort((a, b) => b.score - a.score)
      .map((p) => ({
        proposalId: p.proposal_id,
        property: p.property,
        value: p.value,
        score: p.score,
        decision: p.decision ?? "pending",
        dirty: false,
      }));
  }

  proposal(proposalId: string): ProposalState {
    const found = this.proposals.find((p) => p.proposalId === proposalId);
    if (!found) {
      throw new Error(`no proposal ${proposalId} in session ${this.sessionId}`);
    }
    return found;
  }

  get pendingCount(): number {
    return this.proposals.filter((p) => p.decision === "pending").length;
  }

  get finalized(): boolean {
    return this.contributionId !== null;
  }

  /** Finalize is enabled exactly when nothing is pending and nothing is in flight. */
  get canFinalize(): boolean {
    return !this.finalized && this.pendingCount === 0 && !this.proposals.some((p) => p.dirty);
  }

  /** Reconcile one proposal to what the server confirmed. */
  applyServer(payload: ProposalPayload): void {
    const proposal = this.proposal(payload.proposal_id);
    proposal.decision = payload.decision ?? proposal.decision;
    proposal.dirty = false;
  }

  pushMessage(message: string): void {
    this.validationMessages.push(message);
  }
}

/**
 * Optimistically set a decision, PATCH it, reconcile or roll back.
 * Resolves true when the server accepted the change.
 */
export async function decideOptimistic(
  state: SessionViewState,
  api: Api,
  proposalId: string,
  decision: Decision,
): Promise<boolean> {
  const proposal = state.proposal(proposalId);
  const previous = proposal.decision;
  proposal.decision = decision;
  proposal.dirty = true;
  try {
    const confirmed = await api.decide(state.sessionId, proposalId, decision);
    state.applyServer(confirmed);
    return true;
  } catch (err) {
    proposal.decision = previous;
    proposal.dirty = false;
    state.pushMessage(err instanceof Error ? err.message : String(err));
    return false;
  }
}

/** Client-side validation mirrors the server's EmptyLabel rule. */
export async function addManualStatement(
  state: SessionViewState,
  api: Api,
  property: string,
  value: string,
): Promise<boolean> {
  if (!property.trim() || !value.trim()) {
    state.pushMessage("property and value must be nonempty");
    return false;
  }
  try {
    const added = await api.addStatement(state.sessionId, {
      property: property.trim(),
      value: value.trim(),
    });
    state.manualAdditions.push(added);
    return true;
  } catch (err) {
    state.pushMessage(err instanceof Error ? err.message : String(err));
    return false;
  }
}

export async function finalizeSession(
  state: SessionViewState,
  api: Api,
  paperTitle: string,
): Promise<boolean> {
  if (!state.canFinalize) {
    state.pushMessage("finalize requires every proposal to be decided");
    return false;
  }
  try {
    state.contributionId = await api.finalize(state.sessionId, paperTitle);
    return true;
  } catch (err) {
    state.pushMessage(err instanceof Error ? err.message : String(err));
    return false;
  }
}
