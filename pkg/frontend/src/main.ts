// App wiring: URL is the single source of truth. Every interaction writes a
// new URL (pushState) and re-runs the query; popstate replays history; at
// most one search is honored at a time (latest wins, stale results dropped).

import { fetchRecord, searchRecords, ApiError, type SearchResponse } from "./api.js";
import { renderRecordDetail, renderSearchPage, type SearchHandlers } from "./render.js";
import {
  parseState,
  stateToQueryString,
  toApiParams,
  toggleFacet,
  validateState,
  type FacetField,
  type UiSearchState,
} from "./state.js";

const PAGE_SIZE = 10;

export class App {
  private root: HTMLElement;
  private requestSeq = 0;

  constructor(root: HTMLElement) {
    this.root = root;
    window.addEventListener("popstate", () => {
      void this.route();
    });
  }

  /** Render whatever the current location says. */
  async route(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    const recordId = params.get("record");
    if (recordId !== null) {
      await this.showRecord(recordId);
      return;
    }
    await this.showSearch(parseState(window.location.search));
  }

  private navigate(state: UiSearchState): void {
    const qs = stateToQueryString(state);
    history.pushState(null, "", qs ? `?${qs}` : window.location.pathname);
    void this.showSearch(state);
  }

  private handlers(state: UiSearchState): SearchHandlers {
    return {
      onSubmit: (next) => this.navigate(next),
      onFacetToggle: (field: FacetField, value: string) =>
        this.navigate(toggleFacet(state, field, value)),
      onPage: (page) => this.navigate({ ...state, page }),
    };
  }

  async showSearch(state: UiSearchState): Promise<void> {
    const errors = validateState(state);
    if (errors.length > 0) {
      renderSearchPage(this.root, state, null, errors, this.handlers(state));
      return;
    }
    renderSearchPage(this.root, state, null, [], this.handlers(state));
    const seq = ++this.requestSeq;
    let result: SearchResponse;
    try {
      result = await searchRecords(toApiParams(state, PAGE_SIZE));
    } catch (error) {
      if (seq !== this.requestSeq) return; // a newer search superseded this one
      const message = error instanceof ApiError ? error.message : "search failed";
      renderSearchPage(this.root, state, null, [message], this.handlers(state));
      return;
    }
    if (seq !== this.requestSeq) return; // stale response, discard
    renderSearchPage(this.root, state, result, [], this.handlers(state));
  }

  async showRecord(id: string): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    params.delete("record");
    const backHref = params.toString() ? `?${params.toString()}` : window.location.pathname;
    const outcome = await fetchRecord(id);
    renderRecordDetail(this.root, outcome, backHref);
  }
}

export function boot(): App {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = new App(root);
  void app.route();
  return app;
}

// auto-boot in the browser; tests import and drive App directly
if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
