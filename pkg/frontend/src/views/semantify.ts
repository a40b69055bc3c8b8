import type { Api } from "../api.js";
import { ApiError } from "../api.js";
import {
  SessionViewState,
  addManualStatement,
  decideOptimistic,
  finalizeSession,
} from "../state.js";

export interface SemantifyHandlers {
  onChanged: () => void;
}

/** Score-sorted proposal rows with accept/reject toggles and an add form. */
export function renderSession(
  container: HTMLElement,
  state: SessionViewState,
  api: Api,
  handlers: SemantifyHandlers,
): void {
  container.innerHTML = "";

  const list = document.createElement("table");
  list.className = "proposals";
  const rows = [...state.proposals].sort((a, b) => b.score - a.score);
  for (const proposal of rows) {
    const row = document.createElement("tr");
    row.className = `proposal decision-${proposal.decision}`;
    row.dataset.proposalId = proposal.proposalId;
    row.dataset.score = proposal.score.toFixed(4);

    const label = document.createElement("td");
    label.className = "label";
    label.textContent = `${proposal.property} :: ${proposal.value}`;
    const score = document.createElement("td");
    score.className = "score";
    score.textContent = proposal.score.toFixed(2);
    const status = document.createElement("td");
    status.className = "status";
    status.textContent = proposal.decision;

    const actions = document.createElement("td");
    for (const decision of ["accepted", "rejected"] as const) {
      const button = document.createElement("button");
      button.className = `toggle-${decision}`;
      button.textContent = decision === "accepted" ? "accept" : "reject";
      button.disabled = state.finalized;
      button.addEventListener("click", () => {
        void decideOptimistic(state, api, proposal.proposalId, decision).then(handlers.onChanged);
        handlers.onChanged(); // reflect the optimistic flip immediately
      });
      actions.appendChild(button);
    }

    row.append(label, score, status, actions);
    list.appendChild(row);
  }
  container.appendChild(list);

  const form = document.createElement("form");
  form.className = "add-statement";
  const property = document.createElement("input");
  property.name = "property";
  property.placeholder = "property (e.g. has significant direction)";
  const value = document.createElement("input");
  value.name = "value";
  value.placeholder = "value (e.g. increase)";
  const add = document.createElement("button");
  add.type = "submit";
  add.textContent = "add statement";
  add.disabled = state.finalized;
  form.append(property, value, add);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void addManualStatement(state, api, property.value, value.value).then(handlers.onChanged);
  });
  container.appendChild(form);

  const additions = document.createElement("ul");
  additions.className = "manual-additions";
  for (const manual of state.manualAdditions) {
    const item = document.createElement("li");
    item.textContent = `${manual.property} :: ${manual.value}`;
    additions.appendChild(item);
  }
  container.appendChild(additions);

  const finalize = document.createElement("button");
  finalize.className = "finalize";
  finalize.textContent = state.finalized
    ? `finalized as ${state.contributionId}`
    : `finalize (${state.pendingCount} pending)`;
  finalize.disabled = !state.canFinalize;
  finalize.addEventListener("click", () => {
    const title = window.prompt("Paper title?") ?? "";
    if (title.trim()) {
      void finalizeSession(state, api, title).then(handlers.onChanged);
    }
  });
  container.appendChild(finalize);

  const messages = document.createElement("ul");
  messages.className = "messages";
  for (const message of state.validationMessages) {
    const item = document.createElement("li");
    item.textContent = message;
    messages.appendChild(item);
  }
  container.appendChild(messages);
}

/** The paste-text entry point; empty text never reaches the server. */
export function renderSemantifyForm(
  container: HTMLElement,
  api: Api,
  onSession: (state: SessionViewState) => void,
): void {
  container.innerHTML = "";
  const form = document.createElement("form");
  form.className = "semantify-form";
  const text = document.createElement("textarea");
  text.name = "text";
  text.placeholder = "Paste the bioassay description";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "semantify";
  const banner = document.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  form.append(text, submit, banner);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    banner.hidden = true;
    if (!text.value.trim()) {
      banner.hidden = false;
      banner.className = "banner validation";
      banner.textContent = "Assay text is required.";
      return;
    }
    void (async () => {
      try {
        const assayId = await api.createAssay(text.value);
        const session = await api.semantify(assayId);
        onSession(new SessionViewState(session));
      } catch (err) {
        banner.hidden = false;
        if (err instanceof ApiError && err.code === "ModelUnavailable") {
          banner.className = "banner model-unavailable";
          banner.textContent =
            "No trained model is loaded. Run `assaykg train` against the store, then restart the service.";
        } else {
          banner.className = "banner error";
          banner.textContent = err instanceof Error ? err.message : String(err);
        }
      }
    })();
  });
  container.appendChild(form);
}
