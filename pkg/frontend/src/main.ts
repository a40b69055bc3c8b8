import { ApiClient, ApiError } from "./api.js";
import type { SessionViewState } from "./state.js";
import { renderComparisonError, renderComparisonGrid } from "./views/comparison.js";
import { renderSemantifyForm, renderSession } from "./views/semantify.js";
import { clampK, renderKSelector, renderSimilarPanel } from "./views/similar.js";

const api = new ApiClient("");

function mount(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing mount point #${id}`);
  }
  return el;
}

function setupSemantify(): void {
  const formHost = mount("semantify-form");
  const sessionHost = mount("session");
  let current: SessionViewState | null = null;

  const redraw = () => {
    if (current) {
      renderSession(sessionHost, current, api, { onChanged: redraw });
    }
  };
  renderSemantifyForm(formHost, api, (state) => {
    current = state;
    redraw();
  });
}

function setupComparison(): void {
  const host = mount("comparison");
  const form = mount("comparison-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>("input[name=contributions]");
    const ids = (input?.value ?? "")
      .split(",")
      .map((s) => s.trim())
      .filter(Boolean);
    if (ids.length === 0) {
      renderComparisonError(host, "Select at least one contribution id.");
      return;
    }
    void api
      .getComparison(ids)
      .then((table) => renderComparisonGrid(host, table))
      .catch((err) =>
        renderComparisonError(host, err instanceof ApiError ? err.message : String(err)),
      );
  });
}

function setupSimilar(): void {
  const host = mount("similar");
  const form = mount("similar-form") as HTMLFormElement;
  const kHost = mount("similar-k");
  let k = 5;
  renderKSelector(kHost, (value) => {
    k = value;
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>("input[name=contribution]");
    const id = input?.value.trim();
    if (!id) {
      return;
    }
    void api
      .getSimilar(id, clampK(k))
      .then((body) => renderSimilarPanel(host, body.results))
      .catch((err) => renderComparisonError(host, err instanceof Error ? err.message : String(err)));
  });
}

setupSemantify();
setupComparison();
setupSimilar();
