// Application wire-up: pick a network, then render everything off the store.

import { ApiClient } from './api.js';
import { renderAll, Panels } from './render.js';
import { SessionStore } from './state.js';
import type { GraphPayload } from './types.js';

function panelOf(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node;
}

export async function boot(baseUrl = ''): Promise<SessionStore> {
  const api = new ApiClient(baseUrl);
  const store = new SessionStore(api);
  const panels: Panels = {
    network: panelOf('network-panel'),
    evidence: panelOf('evidence-panel'),
    params: panelOf('params-panel'),
    beliefs: panelOf('beliefs-panel'),
    explanations: panelOf('explanations-panel'),
  };
  let graph: GraphPayload | null = null;

  store.subscribe((state) => renderAll(panels, state, graph, store));

  const banner = panelOf('status-banner');
  const setBanner = (text: string, kind: 'ok' | 'bad') => {
    banner.textContent = text;
    banner.className = kind;
  };

  if (!(await api.health())) {
    setBanner('Service unreachable; start `factorargs serve` and reload.', 'bad');
    const retry = document.createElement('button');
    retry.textContent = 'Retry';
    retry.addEventListener('click', () => window.location.reload());
    banner.appendChild(retry);
    return store;
  }
  setBanner('Connected.', 'ok');

  // network picker: free-text id (preloaded model dir) or BIF upload
  const select = panelOf('network-id') as HTMLInputElement;
  const loadBtn = panelOf('load-network');
  loadBtn.addEventListener('click', async () => {
    try {
      const id = select.value.trim();
      graph = await api.getGraph(id);
      await store.selectNetwork(id);
    } catch (err) {
      setBanner(String(err), 'bad');
    }
  });

  const upload = panelOf('bif-upload') as HTMLInputElement;
  upload.addEventListener('change', async () => {
    const file = upload.files?.[0];
    if (!file) return;
    try {
      const { id } = await api.uploadNetwork(await file.text());
      select.value = id;
      graph = await api.getGraph(id);
      await store.selectNetwork(id);
    } catch (err) {
      setBanner(String(err), 'bad');
    }
  });

  return store;
}

if (typeof document !== 'undefined' && document.getElementById('network-panel')) {
  void boot();
}
