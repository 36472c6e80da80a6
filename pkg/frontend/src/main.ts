/**
 * Browser bootstrap.  Everything interesting lives in state.ts and
 * render.ts; this file only wires DOM events to the controller and
 * repaints on state change.
 */

import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { AppController, ViewState, canSubmit } from "./state.js";

function serviceBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "http://127.0.0.1:8000";
}

export function mount(root: HTMLElement, client: ApiClient): AppController {
  let controller: AppController;

  function paint(state: ViewState): void {
    root.innerHTML = renderApp(state);
    const form = root.querySelector<HTMLFormElement>(".query-form");
    const input = root.querySelector<HTMLInputElement>(".query-input");
    const button = root.querySelector<HTMLButtonElement>(".submit");
    if (form && input && button) {
      input.addEventListener("input", () => {
        button.disabled = !canSubmit(input.value) || controller.getState().pending;
      });
      form.addEventListener("submit", (event) => {
        event.preventDefault();
        void controller.submitQuery(input.value);
      });
    }
    for (const badge of root.querySelectorAll<HTMLElement>(".panel-structured .badge-table")) {
      badge.addEventListener("click", () => {
        const tableId = badge.dataset.tableId;
        const current = controller.getState().structured;
        if (!tableId || !current) {
          return;
        }
        const rest = current.cards
          .flatMap((card) => card.table_ids)
          .filter((tid) => tid !== tableId);
        void controller.openIntegration(tableId, rest);
      });
    }
  }

  controller = new AppController(client, paint);
  paint(controller.getState());
  return controller;
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    mount(root, new ApiClient(serviceBase()));
  }
}
