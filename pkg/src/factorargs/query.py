"""Query execution shared by the CLI and the HTTP service.

Both surfaces funnel through :func:`run_query` so responses are identical
for identical inputs (timing aside).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .arguments import FAParams, RankedFA, approximate_posterior, find_maximal_proper_fas
from .factors import BeliefUpdate
from .inference import Schedule, all_marginals, loopy_posterior, prior_marginal
from .network import BayesianNetwork, Evidence, build_factor_graph
from .nlg import MODES, classify_step, logodds_range, qualifier, render


@dataclass(frozen=True)
class QueryOptions:
    params: FAParams = field(default_factory=FAParams)
    modes: tuple[str, ...] = MODES
    include_trace: bool = False
    include_graph: bool = False
    time_budget_s: float | None = None
    schedule: Schedule = field(default_factory=Schedule)


def _dist(update: BeliefUpdate) -> dict[str, float]:
    return dict(zip(update.variable.states, update.values.tolist()))


def _strength_json(value: float) -> float | None:
    # JSON has no infinity; a null strength means a certain argument
    return None if math.isinf(value) else value


def _flows(ranked: RankedFA) -> list[dict[str, str]]:
    """Variable-to-variable information flows, one per (premise, conclusion)
    pair of every factor node; ``child`` names the CPT the flow rides on."""
    fa = ranked.argument
    out = []
    for phi in fa.factor_nodes:
        for pred in fa.predecessors(phi):
            for succ in fa.successors(phi):
                out.append({"from": pred.name, "to": succ.name, "child": phi.name})
    out.sort(key=lambda f: (f["from"], f["to"], f["child"]))
    return out


def _fa_payload(
    bn: BayesianNetwork, ranked: RankedFA, options: QueryOptions
) -> dict:
    entry = {
        "encoding": ranked.argument.encoding(),
        "sources": sorted(s.name for s in ranked.argument.sources),
        "strength": _strength_json(ranked.strength),
        "certain": math.isinf(ranked.strength) and ranked.strength > 0,
        "argued_state": ranked.argued_state,
        "length": ranked.length,
        "effect": _dist(ranked.effect),
        "explanations": {
            mode: render(ranked, mode, bn).to_json() for mode in options.modes
        },
    }
    if options.include_trace:
        entry["steps"] = [
            {
                "factor": str(st.factor),
                "conclusion": st.conclusion.name,
                "premises": [p.name for p in st.premises],
                "pattern": classify_step(bn, ranked.argument, st.factor, st.conclusion),
                "qualifier": qualifier(logodds_range(st.effect)).label,
                "effect": _dist(st.effect),
            }
            for st in ranked.step_effects
        ]
    if options.include_graph:
        entry["edges"] = [
            [str(a), str(b)]
            for a, b in sorted(
                ranked.argument.edges, key=lambda e: (str(e[0]), str(e[1]))
            )
        ]
        entry["flows"] = _flows(ranked)
    return entry


def run_query(
    bn: BayesianNetwork,
    evidence: dict[str, str],
    target: str,
    options: QueryOptions | None = None,
) -> dict:
    """Full query: message-passing beliefs, ranked arguments, explanations."""
    options = options or QueryOptions()
    ev = Evidence(evidence).validated(bn, target)
    t_total = time.perf_counter()
    fg = build_factor_graph(bn)
    posterior = loopy_posterior(fg, ev, target, options.schedule)
    prior = prior_marginal(fg, target, options.schedule)

    t_search = time.perf_counter()
    if len(ev):
        ranked = find_maximal_proper_fas(
            bn, target, ev, options.params, fg=fg, time_budget_s=options.time_budget_s
        )
    else:
        ranked = []  # nothing observed: the posterior is the prior
    approx = approximate_posterior(prior.update, ranked)
    search_s = time.perf_counter() - t_search

    node_beliefs = None
    if options.include_graph:
        prior_updates, _ = all_marginals(fg, Evidence({}), options.schedule)
        posterior_updates, _ = all_marginals(fg, ev, options.schedule)
        node_beliefs = {
            name: {
                "prior": _dist(prior_updates[name]),
                "posterior": _dist(posterior_updates[name]),
            }
            for name in sorted(prior_updates)
        }

    return {
        "network": bn.name,
        "target": target,
        "evidence": dict(ev),
        "params": {
            "ml": options.params.ml,
            "mc": options.params.mc,
            "dt": options.params.dt,
            "top_n": options.params.top_n,
            "min_strength": options.params.min_strength,
        },
        "prior": _dist(prior.update),
        "posterior": _dist(posterior.update),
        "approx_posterior": _dist(approx),
        "converged": posterior.converged and prior.converged,
        "factor_arguments": [_fa_payload(bn, r, options) for r in ranked],
        "node_beliefs": node_beliefs,
        "timing": {
            "search_s": search_s,
            "total_s": time.perf_counter() - t_total,
        },
    }


def graph_payload(bn: BayesianNetwork) -> dict:
    """Node/edge list with layered layout hints for a DAG drawing."""
    depth: dict[str, int] = {}
    for name in bn.topological_order():
        parents = bn.parents(name)
        depth[name] = 1 + max((depth[p] for p in parents), default=-1)
    by_depth: dict[int, list[str]] = {}
    for name, d in depth.items():
        by_depth.setdefault(d, []).append(name)
    coords = {}
    for d, names in by_depth.items():
        for i, name in enumerate(sorted(names)):
            coords[name] = (i, d)
    return {
        "name": bn.name,
        "nodes": [
            {
                "id": v.name,
                "states": list(v.states),
                "x": coords[v.name][0],
                "y": coords[v.name][1],
            }
            for v in bn.variables
        ],
        "edges": [[p, c] for p, c in bn.edges],
    }
