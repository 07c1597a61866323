// Session state and the re-query loop.
//
// Invariants kept here:
//  * the target never appears in the evidence map (mirrors server validation);
//  * at most one query is in flight; newer edits abort the older request and
//    a response is applied only when its token is still the latest;
//  * the response is stored verbatim, so rendered explanation order is the
//    server's order.

import { ApiClient, ApiError, QueryBody } from './api.js';
import type { Mode, NetworkInfo, QueryParams, QueryResponse } from './types.js';

export interface SessionState {
  networkId: string | null;
  network: NetworkInfo | null;
  evidence: Record<string, string>;
  target: string | null;
  mode: Mode;
  params: QueryParams;
  response: QueryResponse | null;
  selectedFa: number | null;
  loading: boolean;
  error: string | null;
}

export const DEFAULT_PARAMS: QueryParams = {
  ml: null,
  mc: 2,
  dt: 0.1,
  top_n: null,
  min_strength: null,
};

type Listener = (state: SessionState) => void;

export class SessionStore {
  state: SessionState = {
    networkId: null,
    network: null,
    evidence: {},
    target: null,
    mode: 'direct',
    params: { ...DEFAULT_PARAMS },
    response: null,
    selectedFa: null,
    loading: false,
    error: null,
  };

  private listeners: Listener[] = [];
  private token = 0;
  private controller: AbortController | null = null;

  constructor(private api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  private patch(partial: Partial<SessionState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  async selectNetwork(id: string): Promise<void> {
    const network = await this.api.getNetwork(id);
    this.patch({
      networkId: id,
      network,
      evidence: {},
      target: null,
      response: null,
      selectedFa: null,
      error: null,
    });
  }

  setTarget(name: string | null): Promise<void> {
    const evidence = { ...this.state.evidence };
    if (name !== null && name in evidence) delete evidence[name];
    this.patch({ target: name, evidence, selectedFa: null });
    return this.refresh();
  }

  setEvidence(name: string, state: string | null): Promise<void> {
    const evidence = { ...this.state.evidence };
    if (state === null) {
      delete evidence[name];
    } else {
      if (name === this.state.target) {
        this.patch({ error: `"${name}" is the target; clear it first` });
        return Promise.resolve();
      }
      evidence[name] = state;
    }
    this.patch({ evidence, selectedFa: null });
    return this.refresh();
  }

  clearEvidence(): Promise<void> {
    this.patch({ evidence: {}, selectedFa: null });
    return this.refresh();
  }

  setMode(mode: Mode): Promise<void> {
    this.patch({ mode });
    return this.refresh();
  }

  setParams(params: Partial<QueryParams>): Promise<void> {
    this.patch({ params: { ...this.state.params, ...params }, selectedFa: null });
    return this.refresh();
  }

  // selection is presentational only: no re-query
  selectFa(index: number | null): void {
    this.patch({ selectedFa: index });
  }

  /** Issue the query for the current selections; stale responses are dropped. */
  async refresh(): Promise<void> {
    const { networkId, target } = this.state;
    if (!networkId || !target) {
      this.controller?.abort();
      this.patch({ response: null, loading: false });
      return;
    }
    const token = ++this.token;
    this.controller?.abort();
    this.controller = new AbortController();
    this.patch({ loading: true, error: null });

    const body: QueryBody = {
      evidence: this.state.evidence,
      target,
      params: this.state.params,
      include_graph: true,
    };
    try {
      const response = await this.api.query(networkId, body, this.controller.signal);
      if (token !== this.token) return; // superseded while in flight
      this.patch({ response, loading: false, error: null });
    } catch (err) {
      if (token !== this.token) return;
      if (err instanceof DOMException && err.name === 'AbortError') return;
      const message = err instanceof ApiError ? err.message : String(err);
      this.patch({ loading: false, error: message });
    }
  }
}
