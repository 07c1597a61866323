"""Posterior computation on the factor graph.

``loopy_posterior`` runs flooding-schedule loopy belief propagation, the
algorithm the factor-argument explanations imitate.  ``exact_posterior`` is a
variable-elimination oracle used by tests and reports on guard-sized
networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError, NumericError
from .factors import BeliefUpdate, Factor, obs
from .network import BayesianNetwork, Evidence, FactorGraph, FGNode


@dataclass(frozen=True)
class LoopyResult:
    """Marginal plus convergence diagnostics for one query."""

    update: BeliefUpdate
    converged: bool
    iterations: int
    residual: float


@dataclass(frozen=True)
class Schedule:
    """Flooding-schedule knobs: synchronous updates with damping."""

    damping: float = 0.5
    tolerance: float = 1e-9
    max_iterations: int = 500


def _variable_potentials(
    fg: FactorGraph, evidence: Evidence
) -> dict[str, np.ndarray]:
    pots: dict[str, np.ndarray] = {}
    for v in fg.bn.variables:
        if v.name in evidence:
            pots[v.name] = obs(v, evidence[v.name]).values
        else:
            pots[v.name] = np.ones(v.cardinality)
    return pots


def _message_fixed_point(
    fg: FactorGraph,
    evidence: Evidence,
    schedule: Schedule,
):
    """Run the flooding schedule to (near) convergence; returns the final
    factor-to-variable messages, variable potentials, and diagnostics."""
    bn = fg.bn

    pots = _variable_potentials(fg, evidence)
    cards = {v.name: v.cardinality for v in bn.variables}

    # messages keyed by (var name, factor child name) per direction
    pairs: list[tuple[str, str]] = []
    for fnode in fg.factor_nodes:
        for vnode in fg.neighbors(fnode):
            pairs.append((vnode.name, fnode.name))
    pairs.sort()

    var_to_fac = {p: np.full(cards[p[0]], 1.0 / cards[p[0]]) for p in pairs}
    fac_to_var = {p: np.full(cards[p[0]], 1.0 / cards[p[0]]) for p in pairs}

    fac_scope = {
        f.name: [v.name for v in fg.factor_of(f).scope] for f in fg.factor_nodes
    }
    fac_flat = {f.name: fg.factor_of(f).flat() for f in fg.factor_nodes}
    fac_dims = {
        f.name: np.asarray(fg.factor_of(f).cards, dtype=np.int64)
        for f in fg.factor_nodes
    }
    max_card = max(cards.values())

    damping = schedule.damping
    residual = float("inf")
    iteration = 0
    for iteration in range(1, schedule.max_iterations + 1):
        residual = 0.0

        new_f2v: dict[tuple[str, str], np.ndarray] = {}
        for fname, scope in fac_scope.items():
            dims = fac_dims[fname]
            incoming = np.ones((len(scope), max_card))
            for d, vname in enumerate(scope):
                incoming[d, : cards[vname]] = var_to_fac[(vname, fname)]
            for d, vname in enumerate(scope):
                saved = incoming[d].copy()
                incoming[d] = 1.0
                msg = kernels.weighted_marginal(dims, fac_flat[fname], incoming, d)
                incoming[d] = saved
                total = msg.sum()
                if total <= 0.0:
                    # only hard evidence against hard factor entries can zero a
                    # whole message: the evidence has zero probability
                    raise NumericError(
                        f"evidence is contradictory: no state of {vname!r} is "
                        f"consistent with factor phi({fname})"
                    )
                new_f2v[(vname, fname)] = msg / total

        new_v2f: dict[tuple[str, str], np.ndarray] = {}
        for vname, fname in pairs:
            if vname in evidence:
                # observed nodes always send their indicator
                new_v2f[(vname, fname)] = pots[vname]
                continue
            prod = pots[vname].copy()
            for other in fg.neighbors(FGNode("var", vname)):
                if other.name != fname:
                    prod = prod * new_f2v[(vname, other.name)]
            total = prod.sum()
            if total > 0.0:
                prod = prod / total
            new_v2f[(vname, fname)] = prod

        for key in pairs:
            mixed = damping * fac_to_var[key] + (1.0 - damping) * new_f2v[key]
            residual = max(residual, float(np.abs(mixed - fac_to_var[key]).max()))
            fac_to_var[key] = mixed
            if key[0] in evidence:
                mixed = new_v2f[key]
            else:
                mixed = damping * var_to_fac[key] + (1.0 - damping) * new_v2f[key]
            residual = max(residual, float(np.abs(mixed - var_to_fac[key]).max()))
            var_to_fac[key] = mixed

        if residual < schedule.tolerance:
            break

    return fac_to_var, pots, iteration, residual


def _extract_marginal(fg, fac_to_var, pots, name: str) -> BeliefUpdate:
    belief = pots[name].copy()
    for fnode in fg.neighbors(FGNode("var", name)):
        belief = belief * fac_to_var[(name, fnode.name)]
    total = belief.sum()
    if total <= 0.0:
        raise NumericError(
            f"posterior of {name!r} has zero mass; the evidence is contradictory"
        )
    return BeliefUpdate(fg.bn.var(name), belief / total)


def loopy_posterior(
    fg: FactorGraph,
    evidence: Evidence,
    target: str,
    schedule: Schedule = Schedule(),
) -> LoopyResult:
    """Normalized marginal of ``target`` after message-passing iteration.

    Messages are initialized uniform and updated synchronously until the
    maximum entrywise change falls under the tolerance or the iteration cap
    is hit, in which case the result carries ``converged=False``.
    """
    Evidence(evidence).validated(fg.bn, target)
    fac_to_var, pots, iteration, residual = _message_fixed_point(fg, evidence, schedule)
    return LoopyResult(
        update=_extract_marginal(fg, fac_to_var, pots, target),
        converged=residual < schedule.tolerance,
        iterations=iteration,
        residual=residual,
    )


def all_marginals(
    fg: FactorGraph,
    evidence: Evidence,
    schedule: Schedule = Schedule(),
) -> tuple[dict[str, BeliefUpdate], bool]:
    """Message-passing marginal of every variable, plus the converged flag."""
    Evidence(evidence).validated(fg.bn)
    fac_to_var, pots, _, residual = _message_fixed_point(fg, evidence, schedule)
    updates = {
        v.name: _extract_marginal(fg, fac_to_var, pots, v.name)
        for v in fg.bn.variables
    }
    return updates, residual < schedule.tolerance


def prior_marginal(fg: FactorGraph, target: str, schedule: Schedule = Schedule()) -> LoopyResult:
    """Marginal of ``target`` with no evidence, by the same message passing."""
    return loopy_posterior(fg, Evidence({}), target, schedule)


# -- exact oracle -------------------------------------------------------------

VARIABLE_GUARD = 25


def _min_fill_order(domains: dict[str, int], neighbors: dict[str, set[str]]) -> list[str]:
    neighbors = {k: set(v) for k, v in neighbors.items()}
    order: list[str] = []
    remaining = set(domains)
    while remaining:
        best, best_fill = None, None
        for n in sorted(remaining):
            ns = neighbors[n] & remaining
            fill = sum(
                1
                for a in ns
                for b in ns
                if a < b and b not in neighbors[a]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = n, fill
        order.append(best)
        ns = neighbors[best] & remaining
        for a in ns:
            neighbors[a] |= ns - {a}
        remaining.discard(best)
    return order


def exact_posterior(
    bn: BayesianNetwork, evidence: Evidence, target: str
) -> BeliefUpdate:
    """Conditional marginal by variable elimination with a min-fill order."""
    if len(bn.variables) > VARIABLE_GUARD:
        raise CapacityError(
            f"network has {len(bn.variables)} variables; exact elimination is "
            f"guarded at {VARIABLE_GUARD}"
        )
    tvar = bn.var(target)
    Evidence(evidence).validated(bn, target)

    factors: list[Factor] = [bn.cpt(v.name) for v in bn.variables]
    for name, state in sorted(evidence.items()):
        factors.append(obs(bn.var(name), state).factor)

    domains = {v.name: v.cardinality for v in bn.variables}
    neighbors: dict[str, set[str]] = {v.name: set() for v in bn.variables}
    for f in factors:
        names = [v.name for v in f.scope]
        for a in names:
            for b in names:
                if a != b:
                    neighbors[a].add(b)
    order = [n for n in _min_fill_order(domains, neighbors) if n != target]

    for name in order:
        bucket = [f for f in factors if any(v.name == name for v in f.scope)]
        if not bucket:
            continue
        prod = bucket[0]
        for f in bucket[1:]:
            prod = prod.product(f)
        summed = prod.marginalize([name])
        factors = [f for f in factors if f not in bucket]
        factors.append(summed)

    result: Factor | None = None
    for f in factors:
        result = f if result is None else result.product(f)
    assert result is not None
    extra = [v.name for v in result.scope if v.name != target]
    if extra:
        result = result.marginalize(extra)
    if not any(v.name == target for v in result.scope):
        result = result.product(Factor.ones((tvar,)))
    total = float(result.values.sum())
    if total <= 0.0:
        raise NumericError(
            f"evidence {dict(evidence)} has zero probability; posterior undefined"
        )
    vec = result.canonical().values if len(result.scope) > 1 else result.values
    return BeliefUpdate(tvar, np.asarray(vec).ravel() / total)


def joint_enumeration_posterior(
    bn: BayesianNetwork, evidence: Evidence, target: str
) -> BeliefUpdate:
    """Brute-force posterior from the full joint table (test oracle)."""
    tvar = bn.var(target)
    joint: Factor | None = None
    for v in bn.variables:
        f = bn.cpt(v.name)
        joint = f if joint is None else joint.product(f)
    for name, state in evidence.items():
        joint = joint.product(obs(bn.var(name), state).factor)
    others = [v.name for v in joint.scope if v.name != target]
    marg = joint.marginalize(others)
    total = float(marg.values.sum())
    if total <= 0.0:
        raise NumericError("evidence has zero probability; posterior undefined")
    return BeliefUpdate(tvar, marg.values / total)
