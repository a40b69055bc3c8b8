import type { Api } from "../src/api.js";
import type {
  ComparisonTable,
  Decision,
  ManualAddition,
  ProposalPayload,
  SemantifyResponse,
} from "../src/types.js";

export function proposal(
  id: string,
  property: string,
  value: string,
  score: number,
  decision: Decision = "pending",
): ProposalPayload {
  return {
    proposal_id: id,
    property,
    value,
    score,
    accepted_by_threshold: true,
    decision,
  };
}

export function semantifyResponse(proposals: ProposalPayload[]): SemantifyResponse {
  return { session_id: "S1", proposals };
}

/** In-memory Api double; individual methods can be overridden per test. */
export function mockApi(overrides: Partial<Api> = {}): Api {
  const base: Api = {
    createAssay: async () => "A1",
    semantify: async () => semantifyResponse([]),
    getSession: async () => {
      throw new Error("not stubbed");
    },
    decide: async (_session, proposalId, decision) =>
      proposal(proposalId, "p", "v", 0, decision),
    addStatement: async (_session, statement: ManualAddition) => statement,
    finalize: async () => "C9",
    getComparison: async (): Promise<ComparisonTable> => ({ columns: [], rows: [] }),
    getSimilar: async () => ({ query: "C1", results: [] }),
  };
  return { ...base, ...overrides };
}

export const SAMPLE_TABLE: ComparisonTable = {
  columns: [
    { contribution: "C1", title: "Luciferase reporter assay" },
    { contribution: "C2", title: "Kinase FP assay" },
    { contribution: "C3", title: "Viability panel" },
  ],
  rows: [
    {
      property: "Has assay format",
      uri: "http://www.bioassayontology.org/bao#BAO_0000019",
      coverage: 3,
      cells: [["tissue-based format"], ["biochemical format"], ["cell-based format"]],
    },
    {
      property: "Has assay method",
      uri: null,
      coverage: 2,
      cells: [["reporter gene"], [], ["atp quantitation", "cell counting"]],
    },
    {
      property: "Has endpoint",
      uri: null,
      coverage: 1,
      cells: [[], [], ["percent inhibition"]],
    },
  ],
};
