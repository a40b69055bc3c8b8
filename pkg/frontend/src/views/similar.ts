import type { SimilarResult } from "../types.js";

export const MIN_K = 1;
export const MAX_K = 20;

export function clampK(k: number): number {
  if (!Number.isFinite(k)) {
    return MIN_K;
  }
  return Math.min(MAX_K, Math.max(MIN_K, Math.trunc(k)));
}

/** Top-k similar contributions with two-decimal scores; empty graphs get a note. */
export function renderSimilarPanel(container: HTMLElement, results: SimilarResult[]): void {
  container.innerHTML = "";
  if (results.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No other contributions in the graph yet.";
    container.appendChild(empty);
    return;
  }
  const list = document.createElement("ol");
  list.className = "similar";
  for (const result of results) {
    const item = document.createElement("li");
    item.dataset.contribution = result.contribution;
    item.textContent = `${result.contribution} ${result.score.toFixed(2)}`;
    list.appendChild(item);
  }
  container.appendChild(list);
}

/** k selector bounded to [1, 20]. */
export function renderKSelector(container: HTMLElement, onChange: (k: number) => void): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "number";
  input.className = "k-selector";
  input.min = String(MIN_K);
  input.max = String(MAX_K);
  input.value = "5";
  input.addEventListener("change", () => {
    const clamped = clampK(Number(input.value));
    input.value = String(clamped);
    onChange(clamped);
  });
  container.appendChild(input);
  return input;
}
