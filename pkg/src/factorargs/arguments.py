"""Factor arguments: ranked evidence-flow subgraphs of the factor graph.

A factor argument (FA) is a DAG over factor-graph nodes with evidence
variables as sources and the query target as its only sink.  Its effect on
the target is computed by composing per-factor *step effects*; arguments are
ranked by the log-odds strength of that effect, and a distance measure over
effects decides which simple paths must be presented jointly.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import CapacityError, NumericError, ValidationError
from .factors import BeliefUpdate, Factor, Variable, logodds, obs
from .network import (
    BayesianNetwork,
    Evidence,
    FactorGraph,
    FGNode,
    build_factor_graph,
    simple_paths,
)

ARROW = "→"  # separator used in canonical FA encodings


@dataclass(frozen=True)
class FAParams:
    """Search knobs: path-length cap, combination cap, dependence threshold,
    and output truncation.  ``None`` means unbounded."""

    ml: int | None = None
    mc: int | None = 2
    dt: float = 0.1
    top_n: int | None = None
    min_strength: float | None = None

    def __post_init__(self):
        if self.ml is not None and self.ml < 1:
            raise ValidationError("ml must be at least 1")
        if self.mc is not None and self.mc < 1:
            raise ValidationError("mc must be at least 1")
        if not self.dt > 0:
            raise ValidationError("dt must be positive")


class FactorArgument:
    """Directed acyclic subgraph of a factor graph with one variable sink."""

    __slots__ = ("nodes", "edges", "target", "sources", "_pred", "_succ")

    def __init__(self, nodes: Iterable[FGNode], edges: Iterable[tuple[FGNode, FGNode]]):
        self.nodes = frozenset(nodes)
        self.edges = frozenset(edges)
        if not self.edges:
            raise ValidationError("a factor argument needs at least one edge")
        pred: dict[FGNode, set[FGNode]] = {n: set() for n in self.nodes}
        succ: dict[FGNode, set[FGNode]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValidationError(f"edge {a}->{b} leaves the node set")
            if a.kind == b.kind:
                raise ValidationError(
                    f"edge {a}->{b} does not alternate variable and factor nodes"
                )
            pred[b].add(a)
            succ[a].add(b)
        self._pred = {n: tuple(sorted(s, key=FGNode.sort_key)) for n, s in pred.items()}
        self._succ = {n: tuple(sorted(s, key=FGNode.sort_key)) for n, s in succ.items()}

        sinks = [n for n in self.nodes if not self._succ[n]]
        if len(sinks) != 1 or not sinks[0].is_var:
            raise ValidationError(
                f"a factor argument needs exactly one variable-node sink, found "
                f"{sorted(str(s) for s in sinks)}"
            )
        self.target = sinks[0]
        sources = frozenset(n for n in self.nodes if not self._pred[n])
        if any(not s.is_var for s in sources):
            raise ValidationError("factor-argument sources must be variable nodes")
        self.sources = sources

        # acyclicity (Kahn)
        indeg = {n: len(self._pred[n]) for n in self.nodes}
        queue = deque(n for n in self.nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for m in self._succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        if seen != len(self.nodes):
            raise ValidationError("factor argument contains a cycle")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_path(cls, path: Sequence[FGNode]) -> "FactorArgument":
        if len(path) < 3:
            raise ValidationError("a path argument needs at least variable-factor-variable")
        return cls(path, list(zip(path, path[1:])))

    def union(self, *others: "FactorArgument") -> "FactorArgument":
        nodes = set(self.nodes)
        edges = set(self.edges)
        for o in others:
            nodes |= o.nodes
            edges |= o.edges
        return FactorArgument(nodes, edges)

    # -- structure ----------------------------------------------------------

    def predecessors(self, node: FGNode) -> tuple[FGNode, ...]:
        if node not in self.nodes:
            raise ValidationError(f"node {node} is not part of this factor argument")
        return self._pred[node]

    def successors(self, node: FGNode) -> tuple[FGNode, ...]:
        if node not in self.nodes:
            raise ValidationError(f"node {node} is not part of this factor argument")
        return self._succ[node]

    @property
    def variable_nodes(self) -> tuple[FGNode, ...]:
        return tuple(sorted((n for n in self.nodes if n.is_var), key=FGNode.sort_key))

    @property
    def factor_nodes(self) -> tuple[FGNode, ...]:
        return tuple(sorted((n for n in self.nodes if not n.is_var), key=FGNode.sort_key))

    def encoding(self) -> str:
        """Canonical serialization: sorted directed edge list."""
        return ";".join(
            sorted(f"{a}{ARROW}{b}" for a, b in self.edges)
        )

    def is_subgraph_of(self, other: "FactorArgument") -> bool:
        return self.nodes <= other.nodes and self.edges <= other.edges

    def topological_variables(self) -> tuple[FGNode, ...]:
        """Variable nodes in dependency order (stable: by depth, then name)."""
        depth: dict[FGNode, int] = {}
        for node in self._topo_nodes():
            preds = self._pred[node]
            depth[node] = 1 + max((depth[p] for p in preds), default=-1)
        return tuple(
            sorted(
                (n for n in self.nodes if n.is_var),
                key=lambda n: (depth[n], str(n)),
            )
        )

    def _topo_nodes(self) -> list[FGNode]:
        indeg = {n: len(self._pred[n]) for n in self.nodes}
        queue = sorted((n for n in self.nodes if indeg[n] == 0), key=FGNode.sort_key)
        queue = deque(queue)
        out = []
        while queue:
            n = queue.popleft()
            out.append(n)
            ready = []
            for m in self._succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    ready.append(m)
            for m in sorted(ready, key=FGNode.sort_key):
                queue.append(m)
        return out

    def max_hops(self) -> int:
        """Longest source-to-target path, in variable-node hops."""
        hops: dict[FGNode, int] = {}
        for node in self._topo_nodes():
            preds = self._pred[node]
            if not preds:
                hops[node] = 0
            elif node.is_var:
                hops[node] = max(hops[p] for p in preds) + 1
            else:
                hops[node] = max(hops[p] for p in preds)
        return hops[self.target]

    def source_hops(self, source: FGNode) -> int:
        """Longest path from one source to the target, in variable hops."""
        hops: dict[FGNode, int] = {}
        for node in self._topo_nodes():
            preds = [p for p in self._pred[node] if p in hops]
            if node == source:
                hops[node] = 0
            elif preds:
                best = max(hops[p] for p in preds)
                hops[node] = best + 1 if node.is_var else best
        if source not in hops or self.target not in hops:
            raise ValidationError(f"{source} is not a source of this argument")
        return hops[self.target]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FactorArgument)
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self.edges))

    def __repr__(self) -> str:
        return f"FactorArgument({self.encoding()})"


@dataclass(frozen=True)
class StepTrace:
    """One inference step: a factor node updating one successor variable."""

    factor: FGNode
    conclusion: FGNode
    premises: tuple[FGNode, ...]
    effect: BeliefUpdate


@dataclass(frozen=True)
class RankedFA:
    """A factor argument with its effect, strength and rendering trace."""

    argument: FactorArgument
    effect: BeliefUpdate
    strength: float
    argued_state: str
    step_effects: tuple[StepTrace, ...]
    node_effects: Mapping[str, BeliefUpdate] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return self.argument.max_hops()


# -- elementary operations -----------------------------------------------------


def step_effect(
    phi: Factor, premises: Iterable[BeliefUpdate], successor: Variable
) -> BeliefUpdate:
    """Belief change a factor induces on its successor given premise updates.

    Numerator: the factor times all premises, summed down to the successor and
    normalized.  Denominator: the bare factor summed down the same way and
    normalized.  The normalized quotient isolates what the premises add over
    what the factor alone implies.
    """
    premises = list(premises)
    scope_names = [v.name for v in phi.scope]
    if successor.name not in scope_names:
        raise ValidationError(
            f"successor {successor.name!r} not in factor scope {scope_names}"
        )
    if not premises:
        raise ValidationError("a step needs at least one premise")
    seen: set[str] = set()
    for u in premises:
        if u.variable.name == successor.name:
            raise ValidationError("a premise may not cover the successor itself")
        if u.variable.name not in scope_names:
            raise ValidationError(
                f"premise over {u.variable.name!r} is outside factor scope {scope_names}"
            )
        if u.variable.name in seen:
            raise ValidationError(f"duplicate premise over {u.variable.name!r}")
        seen.add(u.variable.name)

    ax = scope_names.index(successor.name)
    dims = np.asarray(phi.cards, dtype=np.int64)
    max_card = max(phi.cards)
    ones = np.ones((len(dims), max_card))
    incoming = np.ones((len(dims), max_card))
    for u in premises:
        d = scope_names.index(u.variable.name)
        incoming[d, : u.values.size] = u.values

    flat = phi.flat()
    num = kernels.weighted_marginal(dims, flat, incoming, ax)
    den = kernels.weighted_marginal(dims, flat, ones, ax)

    num_total = num.sum()
    if num_total <= 0.0:
        raise NumericError(
            f"step effect on {successor.name!r} has zero mass: the premises are "
            f"impossible under the factor"
        )
    num = num / num_total
    den = den / den.sum()

    out = np.empty_like(num)
    for i in range(out.size):
        if den[i] == 0.0:
            if num[i] != 0.0:
                raise NumericError(
                    f"step effect undefined at {successor.name}="
                    f"{successor.states[i]}: zero denominator under positive mass"
                )
            out[i] = 0.0
        else:
            out[i] = num[i] / den[i]
    return BeliefUpdate(successor, out / out.sum(), _checked=True)


def fa_strength(effect: BeliefUpdate, state: int | str) -> float:
    """Log-odds of the effect at a state versus the mean of the other states.

    A zero denominator yields the +inf sentinel (a certain argument)."""
    idx = state if isinstance(state, int) else effect.variable.index(state)
    return logodds(effect, idx)


def fa_distance(a: BeliefUpdate, b: BeliefUpdate) -> float:
    """Largest log-odds disagreement between two belief updates.

    Divides one update by the other and takes the max over states of the
    absolute log-odds of the ratio vector.  Symmetric in its arguments."""
    if a.variable.name != b.variable.name:
        raise ValidationError(
            f"cannot compare updates over {a.variable.name!r} and {b.variable.name!r}"
        )
    r = np.empty(a.values.size)
    for i in range(r.size):
        if b.values[i] == 0.0:
            if a.values[i] != 0.0:
                raise NumericError(
                    f"distance undefined at {a.variable.name}="
                    f"{a.variable.states[i]}: ratio has zero denominator"
                )
            r[i] = 0.0
        else:
            r[i] = a.values[i] / b.values[i]
    n = r.size
    dist = 0.0
    for i in range(n):
        others = (float(r.sum()) - float(r[i])) / (n - 1)
        if others <= 0.0 or r[i] == 0.0:
            return math.inf
        dist = max(dist, abs(math.log(float(r[i]) / others)))
    return dist


def compose_fas(parts: Iterable[FactorArgument]) -> FactorArgument:
    """Graph union of arguments sharing one target sink."""
    parts = list(parts)
    if not parts:
        raise ValidationError("cannot compose an empty set of arguments")
    targets = {p.target for p in parts}
    if len(targets) != 1:
        raise ValidationError(
            f"cannot compose arguments with different targets: "
            f"{sorted(str(t) for t in targets)}"
        )
    return parts[0].union(*parts[1:])


# -- effect evaluation ---------------------------------------------------------


class EffectEngine:
    """Evaluates FA effects against one (network, evidence) context, caching
    full-argument effects by canonical encoding."""

    def __init__(self, fg: FactorGraph, evidence: Evidence | Mapping[str, str]):
        self.fg = fg
        self.bn = fg.bn
        self.evidence = Evidence(evidence).validated(fg.bn)
        self._cache: dict[str, BeliefUpdate] = {}

    def _premise(self, fa: FactorArgument, node: FGNode, memo: dict) -> BeliefUpdate:
        if node in memo:
            return memo[node]
        if node.name in self.evidence:
            upd = obs(self.bn.var(node.name), self.evidence[node.name])
        elif node in fa.sources:
            raise ValidationError(
                f"source {node} carries no evidence; every source must be observed"
            )
        else:
            upd = self.node_effect(fa, node, memo)
        memo[node] = upd
        return upd

    def step(self, fa: FactorArgument, phi: FGNode, successor: FGNode, memo: dict) -> BeliefUpdate:
        premises = [self._premise(fa, y, memo) for y in fa.predecessors(phi)]
        return step_effect(
            self.fg.factor_of(phi), premises, self.bn.var(successor.name)
        )

    def node_effect(self, fa: FactorArgument, node: FGNode, memo: dict) -> BeliefUpdate:
        incoming = [self.step(fa, phi, node, memo) for phi in fa.predecessors(node)]
        result = incoming[0]
        for se in incoming[1:]:
            result = result.multiply(se)
        return result.normalize()

    def effect(self, fa: FactorArgument) -> BeliefUpdate:
        if fa.target.name in self.evidence:
            raise ValidationError(
                f"target {fa.target} may not carry evidence"
            )
        key = fa.encoding()
        cached = self._cache.get(key)
        if cached is None:
            cached = self.node_effect(fa, fa.target, {})
            self._cache[key] = cached
        return cached

    def trace(self, fa: FactorArgument) -> tuple[tuple[StepTrace, ...], dict[str, BeliefUpdate]]:
        """Per-step effects plus cumulative per-variable updates, for rendering."""
        memo: dict[FGNode, BeliefUpdate] = {}
        steps: list[StepTrace] = []
        node_effects: dict[str, BeliefUpdate] = {}
        for node in fa.topological_variables():
            upd = self._premise(fa, node, memo)
            node_effects[node.name] = upd
            for phi in fa.predecessors(node):
                steps.append(
                    StepTrace(
                        factor=phi,
                        conclusion=node,
                        premises=fa.predecessors(phi),
                        effect=self.step(fa, phi, node, memo),
                    )
                )
        return tuple(steps), node_effects

    def rank(self, fa: FactorArgument) -> RankedFA:
        effect = self.effect(fa)
        steps, node_effects = self.trace(fa)
        argued = effect.argued_state_index()
        return RankedFA(
            argument=fa,
            effect=effect,
            strength=logodds(effect, argued),
            argued_state=effect.variable.states[argued],
            step_effects=steps,
            node_effects=node_effects,
        )


def fa_effect(
    bn: BayesianNetwork,
    fa: FactorArgument,
    evidence: Evidence | Mapping[str, str],
    node: FGNode | None = None,
) -> BeliefUpdate:
    """Effect of an argument on one of its nodes (default: its target)."""
    engine = EffectEngine(build_factor_graph(bn), evidence)
    if node is None or node == fa.target:
        return engine.effect(fa)
    return engine._premise(fa, node, {})


# -- dependence and the search ------------------------------------------------


def _set_partitions(items: Sequence, full_limit: int = 5):
    """Nontrivial partitions: all of them up to ``full_limit`` items, only
    bipartitions beyond that (full Bell-number enumeration is infeasible)."""
    items = list(items)
    n = len(items)
    if n < 2:
        return
    if n <= full_limit:

        def rec(rest: list) -> Iterable[list[list]]:
            if not rest:
                yield []
                return
            first, tail = rest[0], rest[1:]
            for part in rec(tail):
                for i in range(len(part)):
                    yield part[:i] + [[first] + part[i]] + part[i + 1 :]
                yield [[first]] + part

        for part in rec(items):
            if len(part) >= 2:
                yield part
    else:
        for mask in range(1, 1 << (n - 1)):
            left = [items[i] for i in range(n) if mask >> i & 1]
            right = [items[i] for i in range(n) if not mask >> i & 1]
            yield [left, right]


def _blocks_distance(
    union_effect: BeliefUpdate, block_effects: Sequence[BeliefUpdate]
) -> float:
    prod = block_effects[0]
    for e in block_effects[1:]:
        prod = prod.multiply(e)
    try:
        return fa_distance(union_effect, prod.normalize())
    except NumericError:
        # the product rules out a state the union allows: maximal disagreement
        return math.inf


def check_dependence(
    bn: BayesianNetwork,
    parts: Sequence[FactorArgument],
    dt: float,
    evidence: Evidence | Mapping[str, str],
    engine: EffectEngine | None = None,
) -> bool:
    """True when the parts must be presented jointly.

    The union's effect is compared against the product of effects over every
    nontrivial partition; one partition within ``dt`` proves independence."""
    if len(parts) < 2:
        raise ValidationError("dependence needs at least two arguments")
    if engine is None:
        engine = EffectEngine(build_factor_graph(bn), evidence)
    union = compose_fas(parts)
    union_effect = engine.effect(union)
    for partition in _set_partitions(list(range(len(parts)))):
        try:
            effects = [
                engine.effect(compose_fas([parts[i] for i in block]))
                for block in partition
            ]
        except (ValidationError, NumericError):
            continue  # cyclic or unevaluable block; not a usable decomposition
        if _blocks_distance(union_effect, effects) < dt:
            return False
    return True


def single_path_arguments(
    fg: FactorGraph,
    target: str,
    evidence: Evidence | Mapping[str, str],
    ml: int | None = None,
) -> list[FactorArgument]:
    """One argument per simple path from an evidence variable to the target.

    Deterministic: evidence variables in name order, paths in DFS order.
    Other evidence variables are excluded from intermediate positions."""
    out: list[FactorArgument] = []
    for ev in sorted(evidence):
        for path in simple_paths(fg, ev, target, max_len=ml, forbidden=set(evidence)):
            out.append(FactorArgument.from_path(path))
    return out


def _strength_key(engine: EffectEngine, fa: FactorArgument):
    try:
        effect = engine.effect(fa)
    except NumericError:
        # unevaluable under this evidence: sort after everything rankable
        return (3, 0.0, len(fa.nodes), fa.encoding())
    s = logodds(effect, effect.argued_state_index())
    if math.isinf(s) and s > 0:
        return (0, 0.0, len(fa.nodes), fa.encoding())
    if math.isinf(s):
        return (2, 0.0, len(fa.nodes), fa.encoding())
    return (1, -s, len(fa.nodes), fa.encoding())


def _remove_subgraphs(fas: list[FactorArgument]) -> list[FactorArgument]:
    out = []
    for fa in fas:
        if not any(o is not fa and fa.is_subgraph_of(o) for o in fas):
            out.append(fa)
    return out


def _pairwise_refine(
    fas: list[FactorArgument], engine: EffectEngine, dt: float, deadline: float | None
) -> list[FactorArgument]:
    """Merge dependent pairs (strongest first) until all pairs independent."""
    fas = list(fas)
    changed = True
    while changed:
        changed = False
        fas.sort(key=lambda fa: _strength_key(engine, fa))
        for i, j in itertools.combinations(range(len(fas)), 2):
            _check_deadline(deadline)
            try:
                union = compose_fas([fas[i], fas[j]])
            except ValidationError:
                continue  # cyclic union: the pair cannot be presented jointly
            try:
                union_effect = engine.effect(union)
                d = _blocks_distance(
                    union_effect, [engine.effect(fas[i]), engine.effect(fas[j])]
                )
            except NumericError:
                continue  # a side is unevaluable; leave the pair apart
            if d >= dt:
                merged = union
                fas = [f for k, f in enumerate(fas) if k not in (i, j)]
                if all(merged != f for f in fas):
                    fas.append(merged)
                changed = True
                break
    return fas


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise CapacityError(
            "time budget exceeded during the argument search; lower ML or MC"
        )


def find_maximal_proper_fas(
    bn: BayesianNetwork,
    target: str,
    evidence: Evidence | Mapping[str, str],
    params: FAParams | None = None,
    *,
    max_paths: int = 64,
    time_budget_s: float | None = None,
    fg: FactorGraph | None = None,
) -> list[RankedFA]:
    """Search for maximal, proper, pairwise-independent factor arguments.

    Enumerates simple evidence-to-target paths (ML cap), walks combinations
    in increasing cardinality (MC cap) with the dependence check pruned to
    partitions into previously identified proper arguments, removes
    subsumed and non-maximal arguments, and re-merges dependent pairs when
    the caps were finite.  Output is sorted by descending strength and is
    deterministic for fixed inputs.
    """
    params = params or FAParams()
    evidence = Evidence(evidence).validated(bn, target)
    if not len(evidence):
        raise ValidationError("the argument search needs at least one evidence variable")
    if fg is None:
        fg = build_factor_graph(bn)
    engine = EffectEngine(fg, evidence)
    deadline = None if time_budget_s is None else time.monotonic() + time_budget_s

    paths = single_path_arguments(fg, target, evidence, params.ml)
    if not paths:
        return []
    if len(paths) > max_paths:
        raise CapacityError(
            f"{len(paths)} simple paths exceed the budget of {max_paths}; "
            f"tighten ML or MC"
        )

    n = len(paths)
    mc = n if params.mc is None else min(params.mc, n)
    proper: dict[frozenset[int], FactorArgument] = {}
    for card in range(1, mc + 1):
        for combo in itertools.combinations(range(n), card):
            _check_deadline(deadline)
            key = frozenset(combo)
            if card == 1:
                proper[key] = paths[combo[0]]
                continue
            try:
                union = compose_fas([paths[i] for i in combo])
            except ValidationError:
                continue  # cyclic union of paths
            try:
                union_effect = engine.effect(union)
            except NumericError:
                continue  # effect undefined under this evidence
            dependent = True
            for partition in _set_partitions(list(combo)):
                blocks = [frozenset(b) for b in partition]
                if any(b not in proper for b in blocks):
                    continue
                try:
                    effects = [engine.effect(proper[b]) for b in blocks]
                except NumericError:
                    continue
                if _blocks_distance(union_effect, effects) < params.dt:
                    dependent = False
                    break
            if dependent:
                proper[key] = union

    candidates: list[FactorArgument] = []
    seen: set[str] = set()
    for key in sorted(proper, key=lambda k: (len(k), sorted(k))):
        fa = proper[key]
        enc = fa.encoding()
        if enc not in seen:
            seen.add(enc)
            candidates.append(fa)

    # AdjustProperFAs: drop subsumed arguments, then merge dependent pairs
    candidates = _remove_subgraphs(candidates)
    candidates = _pairwise_refine(candidates, engine, params.dt, deadline)
    # FilterNonMaximalFAs
    candidates = _remove_subgraphs(candidates)
    # the caps may have hidden combinations: force pairwise independence
    if params.ml is not None or mc < n:
        candidates = _pairwise_refine(candidates, engine, params.dt, deadline)
        candidates = _remove_subgraphs(candidates)

    ranked = []
    for fa in candidates:
        try:
            ranked.append(engine.rank(fa))
        except NumericError:
            continue
    ranked.sort(key=lambda r: _strength_key(engine, r.argument))
    if params.min_strength is not None:
        ranked = [r for r in ranked if r.strength >= params.min_strength]
    if params.top_n is not None:
        ranked = ranked[: params.top_n]
    return ranked


def approximate_posterior(prior: BeliefUpdate, fas: Sequence[RankedFA]) -> BeliefUpdate:
    """Posterior approximation: the prior times every argument's effect."""
    vec = prior.values.copy()
    for r in fas:
        if r.effect.variable.name != prior.variable.name:
            raise ValidationError(
                f"effect over {r.effect.variable.name!r} does not match the "
                f"prior over {prior.variable.name!r}"
            )
        vec = vec * r.effect.values
    total = vec.sum()
    if total <= 0.0:
        raise NumericError("approximate posterior has zero total mass")
    return BeliefUpdate(prior.variable, vec / total, _checked=True)
