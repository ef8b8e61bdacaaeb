// DOM construction for the two views. Pure functions of (state, data):
// re-rendering with the same inputs yields the same document.

import type { FacetCount, RecordDetail, SearchResponse } from "./api.js";
import {
  FACET_FIELDS,
  type FacetField,
  type UiSearchState,
  rssQueryString,
} from "./state.js";

export interface SearchHandlers {
  onSubmit(next: UiSearchState): void;
  onFacetToggle(field: FacetField, value: string): void;
  onPage(page: number): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function labeled(labelText: string, input: HTMLInputElement): HTMLLabelElement {
  const label = el("label", {}, labelText + " ");
  label.appendChild(input);
  return label;
}

function readForm(form: HTMLFormElement, previous: UiSearchState): UiSearchState {
  const value = (name: string) =>
    (form.querySelector(`[name=${name}]`) as HTMLInputElement | null)?.value.trim() ?? "";
  return {
    ...previous,
    q: value("q"),
    west: value("west"),
    south: value("south"),
    east: value("east"),
    north: value("north"),
    start: value("start"),
    end: value("end"),
    page: 0,
  };
}

function coverageBadges(hit: {
  bbox: unknown | null;
  temporal: { start: string | null; end: string | null } | null;
}): HTMLElement {
  const wrap = el("span", { class: "badges" });
  if (hit.bbox) wrap.appendChild(el("span", { class: "badge badge-spatial" }, "spatial"));
  if (hit.temporal) {
    const t = hit.temporal;
    wrap.appendChild(
      el("span", { class: "badge badge-temporal" }, `${t.start ?? "…"} – ${t.end ?? "…"}`),
    );
  }
  return wrap;
}

function facetSidebar(
  state: UiSearchState,
  facets: Record<string, FacetCount[]>,
  handlers: SearchHandlers,
): HTMLElement {
  const aside = el("aside", { class: "facets" });
  for (const field of FACET_FIELDS) {
    const counts = facets[field] ?? [];
    if (counts.length === 0) continue;
    const section = el("section", { class: `facet-${field}` });
    section.appendChild(el("h3", {}, field));
    const list = el("ul");
    for (const fc of counts) {
      const item = el("li");
      const active = state.facets.includes(`${field}:${fc.value}`);
      const button = el(
        "button",
        {
          type: "button",
          class: active ? "facet-value active" : "facet-value",
          "data-facet-field": field,
          "data-facet-value": fc.value,
        },
        `${fc.value} (${fc.count})`,
      );
      button.addEventListener("click", () => handlers.onFacetToggle(field, fc.value));
      item.appendChild(button);
      list.appendChild(item);
    }
    section.appendChild(list);
    aside.appendChild(section);
  }
  return aside;
}

function resultList(result: SearchResponse, handlers: SearchHandlers): HTMLElement {
  const main = el("section", { class: "results" });
  main.appendChild(el("p", { class: "total" }, `${result.total} results`));
  const list = el("ol", { class: "hits", start: String(result.page * result.size + 1) });
  for (const hit of result.hits) {
    const item = el("li", { class: "hit" });
    const title = el("a", { class: "hit-title", href: `?record=${encodeURIComponent(hit.id)}` }, hit.title);
    item.appendChild(title);
    item.appendChild(el("span", { class: "hit-origin" }, ` ${hit.source} · ${hit.schema}`));
    if (hit.abstract_snippet) {
      item.appendChild(el("p", { class: "hit-snippet" }, hit.abstract_snippet));
    }
    item.appendChild(coverageBadges(hit));
    list.appendChild(item);
  }
  main.appendChild(list);

  const pages = Math.ceil(result.total / result.size);
  if (pages > 1) {
    const nav = el("nav", { class: "pager" });
    const prev = el("button", { type: "button", class: "pager-prev" }, "previous");
    prev.disabled = result.page === 0;
    prev.addEventListener("click", () => handlers.onPage(result.page - 1));
    const next = el("button", { type: "button", class: "pager-next" }, "next");
    next.disabled = result.page >= pages - 1;
    next.addEventListener("click", () => handlers.onPage(result.page + 1));
    nav.appendChild(prev);
    nav.appendChild(el("span", {}, ` page ${result.page + 1} of ${pages} `));
    nav.appendChild(next);
    main.appendChild(nav);
  }
  return main;
}

export function renderSearchPage(
  root: HTMLElement,
  state: UiSearchState,
  result: SearchResponse | null,
  errors: string[],
  handlers: SearchHandlers,
): void {
  root.replaceChildren();
  const form = el("form", { class: "search-form" });
  const qInput = el("input", { type: "search", name: "q", value: state.q, placeholder: "query, e.g. title:eagles" });
  form.appendChild(labeled("Search", qInput));

  const spatial = el("fieldset", { class: "spatial" });
  spatial.appendChild(el("legend", {}, "Bounding box"));
  for (const name of ["west", "south", "east", "north"] as const) {
    spatial.appendChild(
      labeled(name, el("input", { type: "text", name, value: state[name], size: "6" })),
    );
  }
  form.appendChild(spatial);

  const temporal = el("fieldset", { class: "temporal" });
  temporal.appendChild(el("legend", {}, "Time range"));
  temporal.appendChild(labeled("start", el("input", { type: "date", name: "start", value: state.start })));
  temporal.appendChild(labeled("end", el("input", { type: "date", name: "end", value: state.end })));
  form.appendChild(temporal);

  const submit = el("button", { type: "submit" }, "Search");
  form.appendChild(submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmit(readForm(form, state));
  });
  root.appendChild(form);

  if (errors.length > 0) {
    const box = el("div", { class: "errors", role: "alert" });
    for (const message of errors) box.appendChild(el("p", {}, message));
    root.appendChild(box);
    return;
  }

  const rss = el("a", { class: "rss-link", href: `/rss?${rssQueryString(state)}` }, "RSS feed for this query");
  root.appendChild(rss);

  if (result === null) {
    root.appendChild(el("p", { class: "loading" }, "Searching…"));
    return;
  }
  const layout = el("div", { class: "layout" });
  layout.appendChild(facetSidebar(state, result.facets, handlers));
  layout.appendChild(resultList(result, handlers));
  root.appendChild(layout);
}

export function renderRecordDetail(
  root: HTMLElement,
  outcome: { kind: "found"; record: RecordDetail } | { kind: "missing" } | { kind: "deleted" },
  backHref: string,
): void {
  root.replaceChildren();
  root.appendChild(el("a", { class: "back-link", href: backHref }, "← back to search"));
  if (outcome.kind !== "found") {
    const box = el("div", { class: "not-found" });
    box.appendChild(el("h2", {}, "Record not found"));
    if (outcome.kind === "deleted") {
      box.appendChild(
        el("p", { class: "deleted-notice" }, "This record was deleted by its provider."),
      );
    } else {
      box.appendChild(el("p", {}, "No record exists with this identifier."));
    }
    root.appendChild(box);
    return;
  }
  const record = outcome.record;
  const article = el("article", { class: "record-detail" });
  article.appendChild(el("h2", {}, record.title));
  article.appendChild(el("p", { class: "record-id" }, record.id));
  article.appendChild(el("p", { class: "record-origin" }, `${record.source_id} · ${record.schema} · ${record.datestamp}`));
  if (record.abstract) article.appendChild(el("p", { class: "record-abstract" }, record.abstract));
  if (record.authors.length) {
    article.appendChild(el("p", { class: "record-authors" }, record.authors.join("; ")));
  }
  if (record.keywords.length) {
    const list = el("ul", { class: "record-keywords" });
    for (const keyword of record.keywords) list.appendChild(el("li", {}, keyword));
    article.appendChild(list);
  }
  if (record.bbox) {
    const b = record.bbox;
    article.appendChild(
      el("p", { class: "record-bbox" }, `Coverage: ${b.west}, ${b.south} to ${b.east}, ${b.north}`),
    );
  }
  if (record.temporal) {
    article.appendChild(
      el(
        "p",
        { class: "record-temporal" },
        `Time: ${record.temporal.start ?? "open"} to ${record.temporal.end ?? "open"}`,
      ),
    );
  }
  if (record.data_urls.length) {
    const list = el("ul", { class: "record-data" });
    for (const url of record.data_urls) {
      const item = el("li");
      item.appendChild(el("a", { href: url, rel: "noopener" }, url));
      list.appendChild(item);
    }
    article.appendChild(list);
  }
  root.appendChild(article);
}
