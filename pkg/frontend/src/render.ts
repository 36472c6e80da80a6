/**
 * Pure HTML rendering.  Every function maps response bodies to markup
 * strings with no DOM access, so the whole layer is testable in Node.
 */

import { Cell, IntegrateBody, NuggetScoreBody, PipelineBody, SearchBody } from "./api.js";
import { ViewState, canSubmit } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatScore(score: number): string {
  return score.toFixed(4);
}

export function renderErrorBanner(message: string | null): string {
  if (message === null) {
    return "";
  }
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}

export function renderSearchPanel(body: SearchBody | null): string {
  if (body === null) {
    return '<section class="panel panel-unstructured"><h2>Text search</h2><p class="empty">No results yet.</p></section>';
  }
  const items = body.results
    .map(
      (hit) =>
        `<li class="hit" data-card-id="${escapeHtml(hit.card_id)}">` +
        `<span class="card-id">${escapeHtml(hit.card_id)}</span>` +
        `<span class="score">${formatScore(hit.score)}</span></li>`,
    )
    .join("");
  return (
    '<section class="panel panel-unstructured"><h2>Text search</h2>' +
    `<p class="meta">${escapeHtml(body.method)}, k=${body.k}</p>` +
    `<ol class="hits">${items}</ol></section>`
  );
}

export function renderPipelinePanel(body: PipelineBody | null): string {
  if (body === null) {
    return '<section class="panel panel-structured"><h2>Table-routed search</h2><p class="empty">No results yet.</p></section>';
  }
  const anchors = body.anchor_card_ids
    .map((id) => `<span class="badge badge-anchor">${escapeHtml(id)}</span>`)
    .join("");
  const items = body.cards
    .map((card) => {
      const tables = card.table_ids
        .map((tid) => `<span class="badge badge-table" data-table-id="${escapeHtml(tid)}">${escapeHtml(tid)}</span>`)
        .join("");
      return (
        `<li class="hit" data-card-id="${escapeHtml(card.card_id)}">` +
        `<span class="card-id">${escapeHtml(card.card_id)}</span>` +
        `<span class="score">${formatScore(card.score)}</span>` +
        `<span class="tables">${tables}</span></li>`
      );
    })
    .join("");
  const warnings = body.warnings.map((w) => `<p class="warning">${escapeHtml(w)}</p>`).join("");
  return (
    '<section class="panel panel-structured"><h2>Table-routed search</h2>' +
    `<p class="meta">${escapeHtml(body.semantic_method)} + ${escapeHtml(body.method)}, k=${body.k}</p>` +
    `<p class="anchors">anchors: ${anchors}</p>` +
    `<ol class="hits">${items}</ol>${warnings}</section>`
  );
}

function renderCell(value: Cell, source: string | null): string {
  const title = source === null ? "" : ` title="${escapeHtml(source)}"`;
  if (value === null) {
    // Filled-in holes stay visible instead of collapsing into blanks.
    return `<td class="cell cell-null"${title}>&empty;</td>`;
  }
  return `<td class="cell"${title}>${escapeHtml(String(value))}</td>`;
}

export function renderIntegratedTable(body: IntegrateBody | null): string {
  if (body === null) {
    return '<section class="integration"><p class="empty">No integrated view.</p></section>';
  }
  const head = body.headers.map((h) => `<th>${escapeHtml(h)}</th>`).join("");
  const rows = body.rows
    .map((row, i) => {
      const provRow = body.provenance[i] ?? [];
      const cells = row.map((value, j) => renderCell(value, provRow[j] ?? null)).join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");
  const sources = body.tables.map((tid) => `<span class="badge badge-table">${escapeHtml(tid)}</span>`).join("");
  return (
    '<section class="integration">' +
    `<p class="meta">anchor ${escapeHtml(body.anchor)}, ${body.null_cells} filled holes</p>` +
    `<p class="sources">${sources}</p>` +
    `<table class="integrated"><thead><tr>${head}</tr></thead><tbody>${rows}</tbody></table></section>`
  );
}

export function renderNuggetPanel(body: NuggetScoreBody | null): string {
  if (body === null) {
    return "";
  }
  const cards = body.cards.map((id) => `<span class="badge">${escapeHtml(id)}</span>`).join("");
  return (
    '<section class="nuggets"><h2>Evidence score</h2>' +
    `<p class="score">${body.score}</p><p class="cards">${cards}</p></section>`
  );
}

/** Render the whole view: banner, dual panels, optional integration and nugget sections. */
export function renderApp(state: ViewState): string {
  const disabled = canSubmit(state.query) && !state.pending ? "" : " disabled";
  const form =
    '<form class="query-form">' +
    `<input class="query-input" type="text" value="${escapeHtml(state.query)}" placeholder="query" />` +
    `<button class="submit" type="submit"${disabled}>Search</button></form>`;
  return (
    renderErrorBanner(state.error) +
    form +
    '<div class="panels">' +
    renderSearchPanel(state.unstructured) +
    renderPipelinePanel(state.structured) +
    "</div>" +
    renderIntegratedTable(state.integration) +
    renderNuggetPanel(state.nuggets)
  );
}
