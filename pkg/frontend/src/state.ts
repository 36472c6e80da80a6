/**
 * Session state and the query controller.
 *
 * One submission fans out to /search and /pipeline with identical k and
 * lands atomically in the two panels.  Submissions carry a sequence
 * number; a response only applies while its submission is still the
 * latest, so a slow stale response can never overwrite a newer one.
 * Errors
 * set a banner and leave the previous panels in place.
 */

import { ApiClient, IntegrateBody, NuggetScoreBody, PipelineBody, SearchBody } from "./api.js";

export interface QuerySettings {
  method: string;
  operator: string;
  k: number;
}

export const DEFAULT_SETTINGS: QuerySettings = {
  method: "dense",
  operator: "unionable",
  k: 5,
};

export interface ViewState {
  query: string;
  settings: QuerySettings;
  unstructured: SearchBody | null;
  structured: PipelineBody | null;
  integration: IntegrateBody | null;
  nuggets: NuggetScoreBody | null;
  error: string | null;
  pending: boolean;
}

export function initialState(settings: QuerySettings = DEFAULT_SETTINGS): ViewState {
  return {
    query: "",
    settings,
    unstructured: null,
    structured: null,
    integration: null,
    nuggets: null,
    error: null,
    pending: false,
  };
}

/** Only non-blank queries may be submitted; the submit control stays disabled otherwise. */
export function canSubmit(query: string): boolean {
  return query.trim().length > 0;
}

export class AppController {
  private state: ViewState;
  private submitSeq = 0;

  constructor(
    private readonly client: ApiClient,
    private readonly onChange: (state: ViewState) => void = () => {},
    settings: QuerySettings = DEFAULT_SETTINGS,
  ) {
    this.state = initialState(settings);
  }

  getState(): ViewState {
    return this.state;
  }

  private apply(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  /** Query both pipelines; apply the responses only if still the latest submission. */
  async submitQuery(query: string, settings?: Partial<QuerySettings>): Promise<void> {
    if (!canSubmit(query)) {
      return;
    }
    const merged = { ...this.state.settings, ...settings };
    const seq = ++this.submitSeq;
    this.apply({ query, settings: merged, pending: true });
    try {
      const [unstructured, structured] = await Promise.all([
        this.client.search(query, merged.method, merged.k),
        this.client.pipeline(query, merged.method, merged.operator, merged.k),
      ]);
      if (seq !== this.submitSeq) {
        return;
      }
      this.apply({ unstructured, structured, error: null, pending: false });
    } catch (err) {
      if (seq !== this.submitSeq) {
        return;
      }
      this.apply({ error: err instanceof Error ? err.message : String(err), pending: false });
    }
  }

  /** Fetch the integrated comparison view for an anchor and its company. */
  async openIntegration(anchor: string, tables: string[]): Promise<void> {
    try {
      const integration = await this.client.integrate(anchor, tables);
      this.apply({ integration, error: null });
    } catch (err) {
      this.apply({ error: err instanceof Error ? err.message : String(err) });
    }
  }

  /** Score the structured panel's cards against the current query. */
  async scoreNuggets(): Promise<void> {
    const structured = this.state.structured;
    if (!structured || structured.cards.length === 0) {
      return;
    }
    try {
      const nuggets = await this.client.nuggetScore(
        this.state.query,
        structured.cards.map((card) => card.card_id),
      );
      this.apply({ nuggets, error: null });
    } catch (err) {
      this.apply({ error: err instanceof Error ? err.message : String(err) });
    }
  }
}
