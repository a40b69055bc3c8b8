// Payload shapes mirroring the JSON API. The UI never fabricates statements:
// everything rendered traces back to one of these fields.

export type Decision = "pending" | "accepted" | "rejected";

export interface ProposalPayload {
  proposal_id: string;
  property: string;
  value: string;
  score: number;
  accepted_by_threshold: boolean;
  decision?: Decision;
}

export interface SemantifyResponse {
  session_id: string;
  proposals: ProposalPayload[];
}

export interface SessionResponse {
  session_id: string;
  assay_id: string | null;
  state: "open" | "finalized" | "discarded";
  contribution_id: string | null;
  proposals: ProposalPayload[];
  manual_additions: { property: string; value: string }[];
}

export interface ComparisonColumn {
  contribution: string;
  title: string;
}

export interface ComparisonRow {
  property: string;
  uri: string | null;
  coverage: number;
  cells: string[][];
}

export interface ComparisonTable {
  columns: ComparisonColumn[];
  rows: ComparisonRow[];
}

export interface SimilarResult {
  contribution: string;
  score: number;
}

export interface SimilarResponse {
  query: string;
  results: SimilarResult[];
}

export interface ManualAddition {
  property: string;
  value: string;
}
