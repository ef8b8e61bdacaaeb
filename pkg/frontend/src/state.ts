// Search-page state, fully URL-serializable so every view is shareable and
// reloading a URL reproduces the exact query and page.

export interface UiSearchState {
  q: string;
  west: string;
  south: string;
  east: string;
  north: string;
  start: string;
  end: string;
  /** selected facet values as "field:value" entries */
  facets: string[];
  page: number;
}

export const FACET_FIELDS = ["source", "schema", "keywords"] as const;
export type FacetField = (typeof FACET_FIELDS)[number];

export function emptyState(): UiSearchState {
  return {
    q: "",
    west: "",
    south: "",
    east: "",
    north: "",
    start: "",
    end: "",
    facets: [],
    page: 0,
  };
}

export function parseState(search: string): UiSearchState {
  const params = new URLSearchParams(search);
  const state = emptyState();
  state.q = params.get("q") ?? "";
  state.west = params.get("west") ?? "";
  state.south = params.get("south") ?? "";
  state.east = params.get("east") ?? "";
  state.north = params.get("north") ?? "";
  state.start = params.get("start") ?? "";
  state.end = params.get("end") ?? "";
  state.facets = dedupe(params.getAll("facet").filter((f) => f.includes(":")));
  const page = Number.parseInt(params.get("page") ?? "0", 10);
  state.page = Number.isFinite(page) && page > 0 ? page : 0;
  return state;
}

/** Canonical query string: fixed key order, facets sorted, defaults omitted. */
export function stateToQueryString(state: UiSearchState): string {
  const params = new URLSearchParams();
  if (state.q) params.set("q", state.q);
  for (const key of ["west", "south", "east", "north", "start", "end"] as const) {
    if (state[key]) params.set(key, state[key]);
  }
  for (const facet of [...state.facets].sort()) params.append("facet", facet);
  if (state.page > 0) params.set("page", String(state.page));
  return params.toString();
}

function dedupe(values: string[]): string[] {
  return [...new Set(values)];
}

/** Facet selections compose into the query text as fielded whole-value
 * terms, sorted so equal selections always produce the same query. */
export function effectiveQuery(state: UiSearchState): string {
  const parts: string[] = [];
  if (state.q.trim()) parts.push(state.q.trim());
  for (const facet of [...state.facets].sort()) {
    const colon = facet.indexOf(":");
    const field = facet.slice(0, colon);
    const value = facet.slice(colon + 1).replace(/"/g, "");
    parts.push(`${field}:"${value}"`);
  }
  return parts.join(" ");
}

export function toggleFacet(
  state: UiSearchState,
  field: FacetField,
  value: string,
): UiSearchState {
  const entry = `${field}:${value}`;
  const facets = state.facets.includes(entry)
    ? state.facets.filter((f) => f !== entry)
    : [...state.facets, entry];
  return { ...state, facets, page: 0 };
}

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;

function isValidDate(value: string): boolean {
  if (!DATE_RE.test(value)) return false;
  const parsed = new Date(`${value}T00:00:00Z`);
  return !Number.isNaN(parsed.getTime()) && parsed.toISOString().slice(0, 10) === value;
}

/** Client-side validation mirroring the API's rules, so well-formed inputs
 * never produce a request the server rejects. Returns human messages. */
export function validateState(state: UiSearchState): string[] {
  const errors: string[] = [];
  const bboxFields = [state.west, state.south, state.east, state.north];
  const filled = bboxFields.filter((v) => v !== "").length;
  if (filled !== 0 && filled !== 4) {
    errors.push("bounding box needs all four of west, south, east, north");
  } else if (filled === 4) {
    const [west, south, east, north] = bboxFields.map(Number) as [
      number, number, number, number,
    ];
    if (bboxFields.some((v) => Number.isNaN(Number(v)))) {
      errors.push("bounding box values must be numbers");
    } else {
      if (west < -180 || west > 180 || east < -180 || east > 180) {
        errors.push("longitudes must be between -180 and 180");
      }
      if (south < -90 || south > 90 || north < -90 || north > 90) {
        errors.push("latitudes must be between -90 and 90");
      }
      if (south > north) errors.push("south must not exceed north");
    }
  }
  if (state.start && !isValidDate(state.start)) {
    errors.push("start must be a YYYY-MM-DD date");
  }
  if (state.end && !isValidDate(state.end)) {
    errors.push("end must be a YYYY-MM-DD date");
  }
  if (state.start && state.end && isValidDate(state.start) && isValidDate(state.end)
      && state.start > state.end) {
    errors.push("start must not be after end");
  }
  return errors;
}

/** Parameters for GET /api/search. Assumes validateState returned []. */
export function toApiParams(state: UiSearchState, size: number): URLSearchParams {
  const params = new URLSearchParams();
  const q = effectiveQuery(state);
  if (q) params.set("q", q);
  if (state.west !== "") {
    params.set("bbox", `${state.west},${state.south},${state.east},${state.north}`);
  }
  if (state.start) params.set("start", state.start);
  if (state.end) params.set("end", state.end);
  params.set("page", String(state.page));
  params.set("size", String(size));
  params.set("facets", FACET_FIELDS.join(","));
  return params;
}

/** The RSS feed for the same query, advertised on the search page. */
export function rssQueryString(state: UiSearchState): string {
  const params = new URLSearchParams();
  const q = effectiveQuery(state);
  if (q) params.set("q", q);
  if (state.west !== "") {
    params.set("bbox", `${state.west},${state.south},${state.east},${state.north}`);
  }
  if (state.start) params.set("start", state.start);
  if (state.end) params.set("end", state.end);
  return params.toString();
}
