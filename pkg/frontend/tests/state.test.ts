import { describe, expect, it } from 'vitest';

import type { ApiClient, QueryBody } from '../src/api.js';
import { SessionStore } from '../src/state.js';
import type { QueryResponse } from '../src/types.js';
import { NETWORK, queryResponse } from './fixtures.js';

type QueryCall = {
  body: QueryBody;
  resolve: (r: QueryResponse) => void;
  reject: (e: unknown) => void;
};

function makeStore() {
  const calls: QueryCall[] = [];
  const api = {
    getNetwork: async () => NETWORK,
    query: (_id: string, body: QueryBody) =>
      new Promise<QueryResponse>((resolve, reject) => {
        calls.push({ body, resolve, reject });
      }),
  } as unknown as ApiClient;
  return { store: new SessionStore(api), calls };
}

describe('SessionStore', () => {
  it('keeps the target out of the evidence map', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const p1 = store.setEvidence('Tuberculosis', 'absent');
    expect(calls.length).toBe(0); // no target yet: no query
    await p1;
    const p2 = store.setTarget('Tuberculosis');
    expect(store.state.evidence).toEqual({});
    calls.at(-1)?.resolve(queryResponse());
    await p2;
  });

  it('rejects observing the current target and surfaces an error', async () => {
    const { store } = makeStore();
    await store.selectNetwork('asia');
    void store.setTarget('Lung Cancer');
    await store.setEvidence('Lung Cancer', 'present');
    expect(store.state.evidence).toEqual({});
    expect(store.state.error).toContain('Lung Cancer');
  });

  it('applies only the response matching the latest request token', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const first = store.setTarget('Lung Cancer');
    const second = store.setEvidence('Tuberculosis', 'absent');
    expect(calls.length).toBe(2);

    const stale = queryResponse();
    stale.posterior = { present: 0.001, absent: 0.999 };
    const fresh = queryResponse();

    calls[1].resolve(fresh); // newest finishes first
    await second;
    calls[0].resolve(stale); // stale response must be dropped
    await first;

    expect(store.state.response?.posterior).toEqual(fresh.posterior);
    expect(store.state.loading).toBe(false);
  });

  it('stores the response verbatim, preserving explanation order', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const p = store.setTarget('Lung Cancer');
    calls[0].resolve(queryResponse());
    await p;
    const got = store.state.response!.factor_arguments.map((f) => f.encoding);
    expect(got).toEqual(queryResponse().factor_arguments.map((f) => f.encoding));
  });

  it('clearing the target clears the response', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const p = store.setTarget('Lung Cancer');
    calls[0].resolve(queryResponse());
    await p;
    expect(store.state.response).not.toBeNull();
    await store.setTarget(null);
    expect(store.state.response).toBeNull();
  });

  it('query errors land in state.error without clobbering the session', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const p = store.setTarget('Lung Cancer');
    calls[0].reject(new Error('boom'));
    await p;
    expect(store.state.error).toContain('boom');
    expect(store.state.target).toBe('Lung Cancer');
  });

  it('selecting an argument never issues a query', async () => {
    const { store, calls } = makeStore();
    await store.selectNetwork('asia');
    const p = store.setTarget('Lung Cancer');
    calls[0].resolve(queryResponse());
    await p;
    const before = calls.length;
    store.selectFa(1);
    store.selectFa(null);
    expect(calls.length).toBe(before);
    expect(store.state.selectedFa).toBeNull();
  });
});
