// Thin client over the catalog service's JSON API.

export interface BBox {
  west: number;
  east: number;
  south: number;
  north: number;
}

export interface Temporal {
  start: string | null;
  end: string | null;
}

export interface SearchHit {
  id: string;
  title: string;
  abstract_snippet: string;
  source: string;
  schema: string;
  bbox: BBox | null;
  temporal: Temporal | null;
  datestamp: string;
  score: number;
  data_urls: string[];
}

export interface FacetCount {
  value: string;
  count: number;
}

export interface SearchResponse {
  total: number;
  page: number;
  size: number;
  hits: SearchHit[];
  facets: Record<string, FacetCount[]>;
}

export interface RecordDetail {
  id: string;
  title: string;
  abstract: string;
  keywords: string[];
  authors: string[];
  data_urls: string[];
  bbox: BBox | null;
  temporal: Temporal | null;
  datestamp: string;
  sets: string[];
  source_id: string;
  schema: string;
  has_raw_document: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: { error?: string; position?: number; deleted?: boolean },
  ) {
    super(body.error ?? `HTTP ${status}`);
  }
}

export async function searchRecords(params: URLSearchParams): Promise<SearchResponse> {
  const resp = await fetch(`/api/search?${params.toString()}`);
  const body = await resp.json();
  if (!resp.ok) throw new ApiError(resp.status, body);
  return body as SearchResponse;
}

export type RecordResult =
  | { kind: "found"; record: RecordDetail }
  | { kind: "missing" }
  | { kind: "deleted" };

export async function fetchRecord(id: string): Promise<RecordResult> {
  const resp = await fetch(`/api/records/${encodeURIComponent(id)}`);
  const body = await resp.json();
  if (resp.status === 404) {
    return body.deleted ? { kind: "deleted" } : { kind: "missing" };
  }
  if (!resp.ok) throw new ApiError(resp.status, body);
  return { kind: "found", record: body as RecordDetail };
}
