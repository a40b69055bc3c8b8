import type { ComparisonTable } from "../types.js";

export const EMPTY_CELL_MARKER = "—";

/**
 * Render the comparison table JSON as a grid: one column per contribution,
 * rows already coverage-ordered by the server, empty cells marked.
 */
export function renderComparisonGrid(container: HTMLElement, table: ComparisonTable): void {
  container.innerHTML = "";
  const grid = document.createElement("table");
  grid.className = "comparison";

  const head = document.createElement("tr");
  const corner = document.createElement("th");
  corner.textContent = "property";
  head.appendChild(corner);
  for (const column of table.columns) {
    const cell = document.createElement("th");
    cell.dataset.contribution = column.contribution;
    cell.textContent = `${column.contribution} ${column.title}`.trim();
    head.appendChild(cell);
  }
  grid.appendChild(head);

  for (const row of table.rows) {
    const tr = document.createElement("tr");
    tr.dataset.coverage = String(row.coverage);
    const property = document.createElement("th");
    property.className = "property";
    property.textContent = row.property;
    if (row.uri) {
      property.title = row.uri;
    }
    tr.appendChild(property);
    for (const cell of row.cells) {
      const td = document.createElement("td");
      if (cell.length === 0) {
        td.className = "empty-cell";
        td.textContent = EMPTY_CELL_MARKER;
      } else {
        td.textContent = cell.join("; ");
      }
      tr.appendChild(td);
    }
    grid.appendChild(tr);
  }
  container.appendChild(grid);
}

/** Inline error banner for bad selections (unknown ids and the like). */
export function renderComparisonError(container: HTMLElement, message: string): void {
  container.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "banner error";
  banner.textContent = message;
  container.appendChild(banner);
}
