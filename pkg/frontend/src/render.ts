// DOM rendering. Pure functions of (state, data): each render call rebuilds
// its container, which keeps the view a direct image of the session state.

import type { SessionState, SessionStore } from './state.js';
import type {
  Distribution,
  FactorArgumentPayload,
  GraphPayload,
  Mode,
} from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const NODE_W = 150;
const NODE_H = 64;
const GAP_X = 40;
const GAP_Y = 56;
const MODES: Mode[] = ['overview', 'direct', 'contrastive'];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): Element {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function fmtPct(p: number): string {
  return `${(p * 100).toFixed(1)}%`;
}

// -- network view -------------------------------------------------------------

interface Point {
  x: number;
  y: number;
}

function nodeCenters(graph: GraphPayload): Map<string, Point> {
  const centers = new Map<string, Point>();
  for (const n of graph.nodes) {
    centers.set(n.id, {
      x: 30 + n.x * (NODE_W + GAP_X) + NODE_W / 2,
      y: 20 + n.y * (NODE_H + GAP_Y) + NODE_H / 2,
    });
  }
  return centers;
}

/** Directed edges (as "from->to" keys) highlighted by the selected argument. */
export function highlightedEdges(fa: FactorArgumentPayload | null): Set<string> {
  const out = new Set<string>();
  if (!fa?.flows) return out;
  for (const flow of fa.flows) {
    // a flow rides the CPT of `child`: premise -> child edge travels along the
    // arc, child -> conclusion (explaining away) travels against it
    if (flow.to === flow.child && flow.from !== flow.child) {
      out.add(`${flow.from}->${flow.to}`);
    } else if (flow.from === flow.child && flow.to !== flow.child) {
      out.add(`${flow.from}->${flow.to}`);
    } else {
      if (flow.from !== flow.child) out.add(`${flow.from}->${flow.child}`);
      if (flow.to !== flow.child) out.add(`${flow.child}->${flow.to}`);
    }
  }
  return out;
}

export function renderNetwork(
  container: HTMLElement,
  graph: GraphPayload,
  state: SessionState,
  store: SessionStore,
): void {
  container.textContent = '';
  const centers = nodeCenters(graph);
  const maxX = Math.max(...[...centers.values()].map((p) => p.x)) + NODE_W / 2 + 30;
  const maxY = Math.max(...[...centers.values()].map((p) => p.y)) + NODE_H / 2 + 20;
  const svg = svgEl('svg', {
    viewBox: `0 0 ${maxX} ${maxY}`,
    width: String(maxX),
    height: String(maxY),
    class: 'network',
  });

  const selected =
    state.selectedFa !== null && state.response
      ? (state.response.factor_arguments[state.selectedFa] ?? null)
      : null;
  const marked = highlightedEdges(selected);

  const defs = svgEl('defs');
  for (const [id, color] of [
    ['arrow', '#8a8f98'],
    ['arrow-hl', '#d97706'],
  ] as const) {
    const marker = svgEl('marker', {
      id,
      viewBox: '0 0 10 10',
      refX: '9',
      refY: '5',
      markerWidth: '7',
      markerHeight: '7',
      orient: 'auto-start-reverse',
    });
    marker.appendChild(svgEl('path', { d: 'M 0 0 L 10 5 L 0 10 z', fill: color }));
    defs.appendChild(marker);
  }
  svg.appendChild(defs);

  for (const [a, b] of graph.edges) {
    const pa = centers.get(a);
    const pb = centers.get(b);
    if (!pa || !pb) continue;
    const forward = marked.has(`${a}->${b}`);
    const backward = marked.has(`${b}->${a}`);
    const hl = forward || backward;
    const line = svgEl('line', {
      x1: String(pa.x),
      y1: String(pa.y + NODE_H / 2),
      x2: String(pb.x),
      y2: String(pb.y - NODE_H / 2),
      stroke: hl ? '#d97706' : '#8a8f98',
      'stroke-width': hl ? '3' : '1.5',
      class: hl ? 'edge highlighted' : 'edge',
      'data-edge': `${a}->${b}`,
      'marker-end': backward && !forward ? '' : `url(#${hl ? 'arrow-hl' : 'arrow'})`,
      ...(backward && !forward ? { 'marker-start': 'url(#arrow-hl)' } : {}),
    });
    svg.appendChild(line);
  }

  const beliefs = state.response?.node_beliefs ?? null;
  for (const n of graph.nodes) {
    const c = centers.get(n.id)!;
    const g = svgEl('g', {
      class: 'node',
      'data-node': n.id,
      transform: `translate(${c.x - NODE_W / 2}, ${c.y - NODE_H / 2})`,
    });
    const isEvidence = n.id in state.evidence;
    const isTarget = n.id === state.target;
    g.appendChild(
      svgEl('rect', {
        width: String(NODE_W),
        height: String(NODE_H),
        rx: '6',
        fill: isTarget ? '#eef6ff' : isEvidence ? '#fef9e7' : '#ffffff',
        stroke: isTarget ? '#2563eb' : isEvidence ? '#d97706' : '#9aa0a8',
        'stroke-width': isTarget || isEvidence ? '2' : '1',
      }),
    );
    const title = svgEl('text', {
      x: '6',
      y: '14',
      'font-size': '11',
      'font-weight': 'bold',
    });
    title.textContent = n.id;
    g.appendChild(title);

    const rows = n.states.length;
    const rowH = Math.min(12, (NODE_H - 20) / rows);
    n.states.forEach((s, i) => {
      const y = 20 + i * rowH;
      const before = beliefs?.[n.id]?.prior?.[s] ?? null;
      const after = beliefs?.[n.id]?.posterior?.[s] ?? null;
      const label = svgEl('text', { x: '6', y: String(y + rowH - 3), 'font-size': '9' });
      label.textContent =
        after === null
          ? s
          : `${s} ${before === null ? '' : fmtPct(before)} → ${fmtPct(after)}`;
      g.appendChild(label);
      if (after !== null) {
        if (before !== null) {
          g.appendChild(
            svgEl('rect', {
              x: '100',
              y: String(y + 1),
              width: String(Math.max(1, before * 44)),
              height: String(Math.max(1, rowH / 2 - 1)),
              fill: '#c5cbd3',
              class: 'bar-before',
            }),
          );
        }
        g.appendChild(
          svgEl('rect', {
            x: '100',
            y: String(y + rowH / 2),
            width: String(Math.max(1, after * 44)),
            height: String(Math.max(1, rowH / 2 - 1)),
            fill: '#2563eb',
            class: 'bar-after',
          }),
        );
      }
    });
    g.addEventListener('click', () => {
      // click cycles: target -> evidence states -> clear
      if (!isTarget && !isEvidence) void store.setTarget(n.id);
    });
    svg.appendChild(g);
  }
  container.appendChild(svg);
}

// -- evidence panel -------------------------------------------------------------

export function renderEvidencePanel(
  container: HTMLElement,
  state: SessionState,
  store: SessionStore,
): void {
  container.textContent = '';
  if (!state.network) {
    container.appendChild(el('p', { class: 'hint' }, 'Load a network to begin.'));
    return;
  }

  const targetRow = el('div', { class: 'control-row' });
  targetRow.appendChild(el('label', { for: 'target-select' }, 'Target'));
  const targetSelect = el('select', { id: 'target-select' });
  targetSelect.appendChild(el('option', { value: '' }, '(choose)'));
  for (const v of state.network.variables) {
    const opt = el('option', { value: v.name }, v.name);
    if (state.target === v.name) opt.setAttribute('selected', 'selected');
    targetSelect.appendChild(opt);
  }
  targetSelect.addEventListener('change', () => {
    void store.setTarget(targetSelect.value || null);
  });
  targetRow.appendChild(targetSelect);
  container.appendChild(targetRow);

  const list = el('div', { class: 'evidence-list' });
  for (const v of state.network.variables) {
    if (v.name === state.target) continue;
    const row = el('div', { class: 'control-row', 'data-evidence-row': v.name });
    row.appendChild(el('label', {}, v.name));
    const select = el('select', { 'data-evidence': v.name });
    select.appendChild(el('option', { value: '' }, '(unobserved)'));
    for (const s of v.states) {
      const opt = el('option', { value: s }, s);
      if (state.evidence[v.name] === s) opt.setAttribute('selected', 'selected');
      select.appendChild(opt);
    }
    select.addEventListener('change', () => {
      void store.setEvidence(v.name, select.value || null);
    });
    row.appendChild(select);
    list.appendChild(row);
  }
  container.appendChild(list);

  const clear = el('button', { id: 'clear-evidence', type: 'button' }, 'Clear evidence');
  clear.addEventListener('click', () => void store.clearEvidence());
  container.appendChild(clear);

  if (state.error) {
    container.appendChild(el('p', { class: 'error', role: 'alert' }, state.error));
  }
}

// -- parameters -----------------------------------------------------------------

export function renderParamsPanel(
  container: HTMLElement,
  state: SessionState,
  store: SessionStore,
): void {
  container.textContent = '';
  const modeRow = el('div', { class: 'control-row' });
  modeRow.appendChild(el('label', {}, 'Mode'));
  const modeSelect = el('select', { id: 'mode-select' });
  for (const m of MODES) {
    const opt = el('option', { value: m }, m);
    if (state.mode === m) opt.setAttribute('selected', 'selected');
    modeSelect.appendChild(opt);
  }
  modeSelect.addEventListener('change', () => {
    void store.setMode(modeSelect.value as Mode);
  });
  modeRow.appendChild(modeSelect);
  container.appendChild(modeRow);

  const numeric: [keyof typeof state.params, string, string][] = [
    ['mc', 'MC (max paths combined)', '1'],
    ['ml', 'ML (max path length)', '1'],
    ['dt', 'DT (independence threshold)', '0.01'],
    ['top_n', 'Top N', '1'],
    ['min_strength', 'Min strength', '0.1'],
  ];
  for (const [key, label, step] of numeric) {
    const row = el('div', { class: 'control-row' });
    row.appendChild(el('label', {}, label));
    const input = el('input', {
      type: 'number',
      step,
      id: `param-${key}`,
      value: state.params[key] === null ? '' : String(state.params[key]),
    });
    input.addEventListener('change', () => {
      const raw = input.value.trim();
      const value = raw === '' ? null : Number(raw);
      if (value !== null && Number.isNaN(value)) return;
      if (key === 'dt' && (value === null || value <= 0)) return;
      void store.setParams({ [key]: value });
    });
    row.appendChild(input);
    container.appendChild(row);
  }
}

// -- beliefs and explanations -----------------------------------------------------

function distTable(dist: Distribution): HTMLElement {
  const table = el('table', { class: 'dist' });
  for (const [s, p] of Object.entries(dist)) {
    const tr = el('tr');
    tr.appendChild(el('td', {}, s));
    tr.appendChild(el('td', {}, fmtPct(p)));
    table.appendChild(tr);
  }
  return table;
}

export function renderBeliefs(container: HTMLElement, state: SessionState): void {
  container.textContent = '';
  const r = state.response;
  if (!r) {
    container.appendChild(
      el('p', { class: 'hint' }, 'Pick a target variable to see beliefs.'),
    );
    return;
  }
  container.appendChild(el('h3', {}, `Beliefs for ${r.target}`));
  const grid = el('div', { class: 'belief-grid' });
  const prior = el('div', { id: 'prior-beliefs' });
  prior.appendChild(el('h4', {}, 'Prior'));
  prior.appendChild(distTable(r.prior));
  grid.appendChild(prior);
  const post = el('div', { id: 'posterior-beliefs' });
  post.appendChild(el('h4', {}, Object.keys(r.evidence).length ? 'Posterior' : 'Posterior (no evidence)'));
  post.appendChild(distTable(r.posterior));
  grid.appendChild(post);
  container.appendChild(grid);
  if (!r.converged) {
    container.appendChild(
      el('p', { class: 'warning' }, 'Message passing did not converge; beliefs are approximate.'),
    );
  }
}

export function renderExplanations(
  container: HTMLElement,
  state: SessionState,
  store: SessionStore,
): void {
  container.textContent = '';
  const r = state.response;
  if (!r || Object.keys(r.evidence).length === 0) {
    container.appendChild(
      el('p', { class: 'hint', id: 'no-explanations' },
        'No evidence set: the posterior equals the prior.'),
    );
    return;
  }
  container.appendChild(el('h3', {}, `${r.factor_arguments.length} factor argument(s)`));
  const list = el('ol', { class: 'explanations', id: 'explanation-list' });
  r.factor_arguments.forEach((fa, i) => {
    const item = el('li', { class: 'explanation', 'data-fa-index': String(i) });
    if (state.selectedFa === i) item.classList.add('selected');
    const head = el('div', { class: 'explanation-head' });
    const strength = fa.certain ? '∞' : (fa.strength ?? 0).toFixed(3);
    head.appendChild(
      el('span', { class: 'strength' }, `strength ${strength}`),
    );
    head.appendChild(
      el('span', { class: 'sources' }, `from ${fa.sources.join(', ')}`),
    );
    item.appendChild(head);
    const explanation = fa.explanations[state.mode];
    const body = el('pre', { class: 'explanation-text' });
    body.textContent = explanation ? explanation.text : '';
    item.appendChild(body);
    item.addEventListener('click', () => {
      store.selectFa(state.selectedFa === i ? null : i);
    });
    list.appendChild(item);
  });
  container.appendChild(list);
}

export interface Panels {
  network: HTMLElement;
  evidence: HTMLElement;
  params: HTMLElement;
  beliefs: HTMLElement;
  explanations: HTMLElement;
}

export function renderAll(
  panels: Panels,
  state: SessionState,
  graph: GraphPayload | null,
  store: SessionStore,
): void {
  if (graph) renderNetwork(panels.network, graph, state, store);
  renderEvidencePanel(panels.evidence, state, store);
  renderParamsPanel(panels.params, state, store);
  renderBeliefs(panels.beliefs, state);
  renderExplanations(panels.explanations, state, store);
}
