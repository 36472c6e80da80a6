/**
 * Typed client for the retrieval service HTTP API.
 *
 * Every method maps to one GET endpoint and returns the parsed body
 * unchanged: the UI renders service numbers, it never recomputes them.
 */

export type Cell = string | number | null;

export interface HealthBody {
  status: string;
  cards: number;
  tables: number;
  format_version: number;
}

export interface SearchHit {
  card_id: string;
  score: number;
}

export interface SearchBody {
  query: string;
  method: string;
  k: number;
  results: SearchHit[];
}

export interface PipelineCard {
  card_id: string;
  score: number;
  table_ids: string[];
}

export interface PipelineBody {
  query: string;
  method: string;
  semantic_method: string;
  k: number;
  cards: PipelineCard[];
  anchor_card_ids: string[];
  warnings: string[];
}

export interface CardBody {
  id: string;
  text: string;
  tags: string[];
  table_ids: string[];
}

export interface TableBody {
  id: string;
  headers: string[];
  rows: Cell[][];
  card_ids: string[];
}

export interface DiscoverHit {
  table_id: string;
  score: number;
}

export interface DiscoverBody {
  anchor_table: string;
  operator: string;
  k: number;
  results: DiscoverHit[];
}

export interface IntegrateBody {
  headers: string[];
  rows: Cell[][];
  provenance: (string | null)[][];
  source_ids: string[];
  null_cells: number;
  anchor: string;
  tables: string[];
}

export interface NuggetScoreBody {
  query: string;
  cards: string[];
  score: number;
  constraint: Record<string, { kind: string; terms: string[] }>;
  audit_id: number;
}

/** Raised for any failed request; status 0 means the service was unreachable. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(status === 0 ? `service unreachable: ${detail}` : `HTTP ${status}: ${detail}`);
    this.name = "ServiceError";
  }
}

export type FetchLike = (url: string) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url) => fetch(url),
  ) {}

  private async get<T>(path: string, params?: Record<string, string | number>): Promise<T> {
    const url = new URL(path, this.baseUrl);
    for (const [key, value] of Object.entries(params ?? {})) {
      url.searchParams.set(key, String(value));
    }
    let response: Response;
    try {
      response = await this.fetchImpl(url.toString());
    } catch (err) {
      throw new ServiceError(0, err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthBody> {
    return this.get("/health");
  }

  search(q: string, method: string, k: number): Promise<SearchBody> {
    return this.get("/search", { q, method, k });
  }

  pipeline(q: string, semantic: string, operator: string, k: number): Promise<PipelineBody> {
    return this.get("/pipeline", { q, semantic, operator, k });
  }

  card(cardId: string): Promise<CardBody> {
    return this.get(`/card/${cardId}`);
  }

  table(tableId: string): Promise<TableBody> {
    return this.get(`/table/${tableId}`);
  }

  discover(anchor: string, operator: string, k: number): Promise<DiscoverBody> {
    return this.get("/discover", { anchor, operator, k });
  }

  integrate(anchor: string, tables: string[]): Promise<IntegrateBody> {
    return this.get("/integrate", { anchor, tables: tables.join(",") });
  }

  nuggetScore(q: string, cards: string[]): Promise<NuggetScoreBody> {
    return this.get("/nuggets/score", { q, cards: cards.join(",") });
  }
}
