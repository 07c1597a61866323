// Thin typed client over the HTTP service. Every query carries an
// AbortSignal so the store can cancel superseded requests.

import type {
  GraphPayload,
  Mode,
  NetworkInfo,
  QueryParams,
  QueryResponse,
  ServiceError,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let body: ServiceError | null = null;
  try {
    body = (await res.json()) as ServiceError;
  } catch {
    // non-JSON error body
  }
  return new ApiError(res.status, body?.code ?? 'http', body?.message ?? res.statusText);
}

export interface QueryBody {
  evidence: Record<string, string>;
  target: string;
  params?: Partial<QueryParams>;
  mode?: Mode | null;
  include_trace?: boolean;
  include_graph?: boolean;
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, { signal });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/health`);
      return res.ok;
    } catch {
      return false;
    }
  }

  async uploadNetwork(bifText: string): Promise<{ id: string; name: string }> {
    const res = await fetch(`${this.baseUrl}/networks`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/plain; charset=utf-8' },
      body: bifText,
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as { id: string; name: string };
  }

  getNetwork(id: string, signal?: AbortSignal): Promise<NetworkInfo> {
    return this.get(`/networks/${encodeURIComponent(id)}`, signal);
  }

  getGraph(id: string, signal?: AbortSignal): Promise<GraphPayload> {
    return this.get(`/networks/${encodeURIComponent(id)}/graph`, signal);
  }

  async query(id: string, body: QueryBody, signal?: AbortSignal): Promise<QueryResponse> {
    const res = await fetch(`${this.baseUrl}/networks/${encodeURIComponent(id)}/query`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ include_graph: true, ...body }),
      signal,
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as QueryResponse;
  }
}
