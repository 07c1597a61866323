// Shapes of the service payloads. The client never derives probabilities
// itself; everything rendered comes out of these objects.

export type Mode = 'overview' | 'direct' | 'contrastive';

export interface Distribution {
  [state: string]: number;
}

export interface ExplanationStep {
  premises: string[];
  verb: string;
  conclusion: string;
  qualifier: string;
  pattern: string;
}

export interface Explanation {
  mode: Mode;
  steps: ExplanationStep[];
  text: string;
}

export interface Flow {
  from: string;
  to: string;
  child: string;
}

export interface FactorArgumentPayload {
  encoding: string;
  sources: string[];
  strength: number | null;
  certain: boolean;
  argued_state: string;
  length: number;
  effect: Distribution;
  explanations: Partial<Record<Mode, Explanation>>;
  steps?: unknown[];
  edges?: [string, string][];
  flows?: Flow[];
}

export interface NodeBeliefs {
  prior: Distribution;
  posterior: Distribution;
}

export interface QueryParams {
  ml: number | null;
  mc: number | null;
  dt: number;
  top_n: number | null;
  min_strength: number | null;
}

export interface QueryResponse {
  network: string;
  target: string;
  evidence: Record<string, string>;
  params: QueryParams;
  prior: Distribution;
  posterior: Distribution;
  approx_posterior: Distribution;
  converged: boolean;
  factor_arguments: FactorArgumentPayload[];
  node_beliefs: Record<string, NodeBeliefs> | null;
  timing: { search_s: number; total_s: number };
}

export interface GraphNode {
  id: string;
  states: string[];
  x: number;
  y: number;
}

export interface GraphPayload {
  name: string;
  nodes: GraphNode[];
  edges: [string, string][];
}

export interface NetworkInfo {
  name: string;
  variables: { name: string; states: string[] }[];
  edges: [string, string][];
}

export interface ServiceError {
  code: string;
  message: string;
  detail?: string;
}
