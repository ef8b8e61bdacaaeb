import { describe, expect, it } from "vitest";

import {
  effectiveQuery,
  emptyState,
  parseState,
  stateToQueryString,
  toApiParams,
  toggleFacet,
  validateState,
  type UiSearchState,
} from "../src/state.js";

function state(overrides: Partial<UiSearchState>): UiSearchState {
  return { ...emptyState(), ...overrides };
}

describe("URL round trip", () => {
  const cases: UiSearchState[] = [
    emptyState(),
    state({ q: "title:eagles" }),
    state({ q: "soil moisture NOT ocean", page: 3 }),
    state({ west: "-100", south: "30", east: "-90", north: "40" }),
    state({ start: "2003-04-01", end: "2003-10-31" }),
    state({ facets: ["source:ornl", "keywords:snow depth"] }),
    state({
      q: "carbon",
      west: "170", south: "-5", east: "-170", north: "5",
      start: "2000-01-01",
      facets: ["schema:FGDC"],
      page: 2,
    }),
  ];

  for (const [i, original] of cases.entries()) {
    it(`case ${i} reproduces exactly`, () => {
      const qs = stateToQueryString(original);
      const reparsed = parseState(qs ? `?${qs}` : "");
      const normalized = { ...original, facets: [...original.facets].sort() };
      expect(reparsed).toEqual(normalized);
      // and serializing again is a fixed point
      expect(stateToQueryString(reparsed)).toBe(qs);
    });
  }

  it("ignores junk parameters and malformed facets", () => {
    const parsed = parseState("?q=x&bogus=1&facet=notvalid&page=-4");
    expect(parsed.q).toBe("x");
    expect(parsed.facets).toEqual([]);
    expect(parsed.page).toBe(0);
  });
});

describe("facet composition", () => {
  it("composes deterministically regardless of selection order", () => {
    const a = state({ q: "eagles", facets: ["source:bio", "schema:FGDC"] });
    const b = state({ q: "eagles", facets: ["schema:FGDC", "source:bio"] });
    expect(effectiveQuery(a)).toBe(effectiveQuery(b));
    expect(toApiParams(a, 10).toString()).toBe(toApiParams(b, 10).toString());
    expect(stateToQueryString(a)).toBe(stateToQueryString(b));
  });

  it("quotes facet values as whole-value fielded terms", () => {
    const s = state({ q: "eagles", facets: ["keywords:snow depth"] });
    expect(effectiveQuery(s)).toBe('eagles keywords:"snow depth"');
  });

  it("strips embedded quotes so the query always lexes", () => {
    const s = state({ facets: ['keywords:say "hi"'] });
    expect(effectiveQuery(s)).toBe('keywords:"say hi"');
  });

  it("toggle adds then removes and resets the page", () => {
    const once = toggleFacet(state({ page: 4 }), "source", "ornl");
    expect(once.facets).toEqual(["source:ornl"]);
    expect(once.page).toBe(0);
    const twice = toggleFacet(once, "source", "ornl");
    expect(twice.facets).toEqual([]);
  });
});

describe("validation mirrors the API", () => {
  it("accepts an empty state", () => {
    expect(validateState(emptyState())).toEqual([]);
  });

  it("rejects partial bounding boxes", () => {
    expect(validateState(state({ west: "1" }))).not.toEqual([]);
  });

  it("rejects out-of-range coordinates", () => {
    const s = state({ west: "181", south: "0", east: "10", north: "10" });
    expect(validateState(s).join(" ")).toMatch(/longitude/);
  });

  it("rejects south above north", () => {
    const s = state({ west: "0", south: "50", east: "10", north: "10" });
    expect(validateState(s).join(" ")).toMatch(/south/);
  });

  it("accepts an antimeridian-crossing box", () => {
    const s = state({ west: "170", south: "-5", east: "-170", north: "5" });
    expect(validateState(s)).toEqual([]);
  });

  it("rejects malformed and impossible dates", () => {
    expect(validateState(state({ start: "junk" }))).not.toEqual([]);
    expect(validateState(state({ start: "2020-02-30" }))).not.toEqual([]);
    expect(validateState(state({ start: "2020-01-02", end: "2020-01-01" }))).not.toEqual([]);
  });

  it("builds API parameters only for valid states", () => {
    const s = state({
      q: "snow",
      west: "-10", south: "-5", east: "10", north: "5",
      start: "2020-01-01",
      facets: ["source:lter"],
      page: 1,
    });
    expect(validateState(s)).toEqual([]);
    const params = toApiParams(s, 10);
    expect(params.get("q")).toBe('snow source:"lter"');
    expect(params.get("bbox")).toBe("-10,-5,10,5");
    expect(params.get("start")).toBe("2020-01-01");
    expect(params.get("page")).toBe("1");
    expect(params.get("facets")).toBe("source,schema,keywords");
  });
});
