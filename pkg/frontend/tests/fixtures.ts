// Canned payloads shaped like real service responses.

import type { GraphPayload, NetworkInfo, QueryResponse } from '../src/types.js';

export const NETWORK: NetworkInfo = {
  name: 'asia',
  variables: [
    { name: 'XRay Result', states: ['abnormal', 'normal'] },
    { name: 'Tuberculosis', states: ['present', 'absent'] },
    { name: 'Tuberculosis or Cancer', states: ['true', 'false'] },
    { name: 'Lung Cancer', states: ['present', 'absent'] },
  ],
  edges: [
    ['Tuberculosis', 'Tuberculosis or Cancer'],
    ['Lung Cancer', 'Tuberculosis or Cancer'],
    ['Tuberculosis or Cancer', 'XRay Result'],
  ],
};

export const GRAPH: GraphPayload = {
  name: 'asia',
  nodes: [
    { id: 'Tuberculosis', states: ['present', 'absent'], x: 0, y: 0 },
    { id: 'Lung Cancer', states: ['present', 'absent'], x: 1, y: 0 },
    { id: 'Tuberculosis or Cancer', states: ['true', 'false'], x: 0, y: 1 },
    { id: 'XRay Result', states: ['abnormal', 'normal'], x: 0, y: 2 },
  ],
  edges: [
    ['Tuberculosis', 'Tuberculosis or Cancer'],
    ['Lung Cancer', 'Tuberculosis or Cancer'],
    ['Tuberculosis or Cancer', 'XRay Result'],
  ],
};

export function queryResponse(): QueryResponse {
  return {
    network: 'asia',
    target: 'Lung Cancer',
    evidence: { 'XRay Result': 'abnormal', Tuberculosis: 'absent' },
    params: { ml: null, mc: 2, dt: 0.1, top_n: null, min_strength: null },
    prior: { present: 0.055, absent: 0.945 },
    posterior: { present: 0.5329, absent: 0.4671 },
    approx_posterior: { present: 0.5329, absent: 0.4671 },
    converged: true,
    node_beliefs: {
      'Lung Cancer': {
        prior: { present: 0.055, absent: 0.945 },
        posterior: { present: 0.5329, absent: 0.4671 },
      },
    },
    factor_arguments: [
      {
        encoding:
          'Tuberculosis or Cancer→phi(Tuberculosis or Cancer);Tuberculosis→phi(Tuberculosis or Cancer);XRay Result→phi(XRay Result);phi(Tuberculosis or Cancer)→Lung Cancer;phi(XRay Result)→Tuberculosis or Cancer',
        sources: ['Tuberculosis', 'XRay Result'],
        strength: 2.9755,
        certain: false,
        argued_state: 'present',
        length: 2,
        effect: { present: 0.9515, absent: 0.0485 },
        explanations: {
          direct: {
            mode: 'direct',
            steps: [],
            text: 'We have observed that <XRay Result> is <abnormal> and <Tuberculosis> is <absent>.\nThe updated probability of <XRay Result> = <abnormal> is evidence that the intermediate node <Tuberculosis or Cancer> becomes strongly more likely to be <true>.\nThe updated probability of <Tuberculosis or Cancer> = <true> and <Tuberculosis> = <absent> is evidence that the target node <Lung Cancer> becomes strongly more likely to be <present>.',
          },
          overview: {
            mode: 'overview',
            steps: [],
            text: 'Since <XRay Result> is <abnormal> and <Tuberculosis> is <absent>, we infer that <Lung Cancer> = <present>.',
          },
        },
        flows: [
          { from: 'Tuberculosis', to: 'Lung Cancer', child: 'Tuberculosis or Cancer' },
          {
            from: 'Tuberculosis or Cancer',
            to: 'Lung Cancer',
            child: 'Tuberculosis or Cancer',
          },
          { from: 'XRay Result', to: 'Tuberculosis or Cancer', child: 'XRay Result' },
        ],
      },
      {
        encoding: 'second',
        sources: ['Tuberculosis'],
        strength: 0.0,
        certain: false,
        argued_state: 'present',
        length: 4,
        effect: { present: 0.5, absent: 0.5 },
        explanations: {
          direct: { mode: 'direct', steps: [], text: 'Second explanation body.' },
          overview: { mode: 'overview', steps: [], text: 'Second overview.' },
        },
        flows: [],
      },
    ],
    timing: { search_s: 0.004, total_s: 0.2 },
  };
}
