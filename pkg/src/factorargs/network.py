"""Bayesian network model, factor-graph view, and graph utilities."""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .factors import Factor, Variable


class Evidence(Mapping):
    """Observed states, one per variable; the query target may not appear."""

    def __init__(self, assignments: Mapping[str, str]):
        self._map = dict(assignments)

    def __getitem__(self, key: str) -> str:
        return self._map[key]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def validated(self, bn: "BayesianNetwork", target: str | None = None) -> "Evidence":
        for name, state in self._map.items():
            bn.var(name).index(state)
        if target is not None and target in self._map:
            raise ValidationError(f"target variable {target!r} cannot carry evidence")
        return self

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self._map.items())
        return f"Evidence({inner})"


class BayesianNetwork:
    """Immutable DAG of discrete variables with one CPT factor per variable.

    Each CPT factor's scope is the variable's parents (in declaration order)
    followed by the variable itself.
    """

    def __init__(self, name: str, variables: Sequence[Variable], cpts: Mapping[str, Factor]):
        self.name = name
        self.variables = tuple(variables)
        self._by_name = {v.name: v for v in self.variables}
        if len(self._by_name) != len(self.variables):
            raise ValidationError("duplicate variable names in network")
        missing = set(self._by_name) - set(cpts)
        if missing:
            raise ValidationError(f"variables without a CPT: {sorted(missing)}")
        extra = set(cpts) - set(self._by_name)
        if extra:
            raise ValidationError(f"CPTs for unknown variables: {sorted(extra)}")

        self.cpts: dict[str, Factor] = {}
        self._parents: dict[str, tuple[str, ...]] = {}
        for name_, f in cpts.items():
            if f.scope[-1].name != name_:
                raise ValidationError(
                    f"CPT scope for {name_!r} must end with the variable itself"
                )
            for v in f.scope:
                declared = self._by_name.get(v.name)
                if declared is None:
                    raise ValidationError(
                        f"CPT for {name_!r} mentions undeclared variable {v.name!r}"
                    )
                if declared.states != v.states:
                    raise ValidationError(
                        f"CPT for {name_!r} disagrees on states of {v.name!r}"
                    )
            self.cpts[name_] = f
            self._parents[name_] = tuple(v.name for v in f.scope[:-1])

        self._children: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for child, parents in self._parents.items():
            for p in parents:
                self._children[p].append(child)
        for lst in self._children.values():
            lst.sort()
        self._order = self._toposort()

    def _toposort(self) -> tuple[str, ...]:
        indeg = {v.name: len(self._parents[v.name]) for v in self.variables}
        queue = deque(sorted(n for n, d in indeg.items() if d == 0))
        order: list[str] = []
        while queue:
            n = queue.popleft()
            order.append(n)
            for c in self._children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
            # keep the frontier sorted so the order is reproducible
            queue = deque(sorted(queue))
        if len(order) != len(self.variables):
            cyclic = sorted(n for n, d in indeg.items() if d > 0)
            raise ValidationError(f"probability dependencies contain a cycle: {cyclic}")
        return tuple(order)

    # -- accessors ----------------------------------------------------------

    def var(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"unknown variable {name!r}") from None

    def parents(self, name: str) -> tuple[str, ...]:
        self.var(name)
        return self._parents[name]

    def children(self, name: str) -> tuple[str, ...]:
        self.var(name)
        return tuple(self._children[name])

    def cpt(self, name: str) -> Factor:
        self.var(name)
        return self.cpts[name]

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(p, c) for c in sorted(self._parents) for p in self._parents[c]]

    def topological_order(self) -> tuple[str, ...]:
        return self._order

    def equals(self, other: "BayesianNetwork") -> bool:
        if [v.name for v in self.variables] != [v.name for v in other.variables]:
            return False
        if any(a.states != b.states for a, b in zip(self.variables, other.variables)):
            return False
        for name in self._by_name:
            a, b = self.cpts[name], other.cpts[name]
            if [v.name for v in a.scope] != [v.name for v in b.scope]:
                return False
            if not np.array_equal(a.values, b.values):
                return False
        return True

    def __repr__(self) -> str:
        return f"BayesianNetwork({self.name!r}, {len(self.variables)} variables)"


def network_to_json(bn: BayesianNetwork) -> dict:
    """Compact JSON mirror of the network (tables in canonical layout)."""
    return {
        "name": bn.name,
        "variables": [{"name": v.name, "states": list(v.states)} for v in bn.variables],
        "edges": [[p, c] for p, c in bn.edges],
        "cpts": [
            {
                "child": v.name,
                "parents": list(bn.parents(v.name)),
                "table": bn.cpt(v.name).flat().tolist(),
            }
            for v in bn.variables
        ],
    }


# -- factor-graph view -------------------------------------------------------


@dataclass(frozen=True)
class FGNode:
    """A node of the bipartite factor graph: a variable or a CPT factor."""

    kind: str  # "var" | "factor"
    name: str  # variable name; for factor nodes, the CPT's child variable

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    def __str__(self) -> str:
        return self.name if self.kind == "var" else f"phi({self.name})"

    def sort_key(self) -> tuple[str, str]:
        return (str(self), self.kind)


class FactorGraph:
    """Undirected bipartite graph: one node per variable, one per CPT."""

    def __init__(self, bn: BayesianNetwork):
        self.bn = bn
        self.var_nodes = tuple(FGNode("var", v.name) for v in bn.variables)
        self.factor_nodes = tuple(FGNode("factor", v.name) for v in bn.variables)
        adj: dict[FGNode, list[FGNode]] = {n: [] for n in self.var_nodes + self.factor_nodes}
        for v in bn.variables:
            fnode = FGNode("factor", v.name)
            for sv in bn.cpt(v.name).scope:
                vnode = FGNode("var", sv.name)
                adj[fnode].append(vnode)
                adj[vnode].append(fnode)
        self._adj = {
            n: tuple(sorted(ns, key=FGNode.sort_key)) for n, ns in adj.items()
        }

    @property
    def nodes(self) -> tuple[FGNode, ...]:
        return self.var_nodes + self.factor_nodes

    def neighbors(self, node: FGNode) -> tuple[FGNode, ...]:
        try:
            return self._adj[node]
        except KeyError:
            raise ValidationError(f"node {node} not in factor graph") from None

    def var_node(self, name: str) -> FGNode:
        self.bn.var(name)
        return FGNode("var", name)

    def factor_node(self, child: str) -> FGNode:
        self.bn.var(child)
        return FGNode("factor", child)

    def factor_of(self, node: FGNode) -> Factor:
        if node.is_var:
            raise ValidationError(f"{node} is not a factor node")
        return self.bn.cpt(node.name)

    @property
    def edge_count(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2


def build_factor_graph(bn: BayesianNetwork) -> FactorGraph:
    return FactorGraph(bn)


def simple_paths(
    fg: FactorGraph,
    source: str,
    target: str,
    max_len: int | float | None = None,
    forbidden: Iterable[str] = (),
) -> list[tuple[FGNode, ...]]:
    """All simple alternating paths from one variable node to another.

    Length is measured in variable-node hops (a chain A-phi-B-phi-C has two).
    Variables in ``forbidden`` (other observed evidence) may not appear as
    intermediate nodes.  Enumeration order is deterministic: depth-first with
    neighbors visited in lexicographic order.
    """
    if source == target:
        raise ValidationError("path source and target must differ")
    limit = float("inf") if max_len is None else float(max_len)
    src, dst = fg.var_node(source), fg.var_node(target)
    blocked = {fg.var_node(n) for n in forbidden if n not in (source, target)}

    paths: list[tuple[FGNode, ...]] = []
    path: list[FGNode] = [src]
    on_path = {src}

    def walk(node: FGNode, hops: int) -> None:
        for nxt in fg.neighbors(node):
            if nxt in on_path:
                continue
            if nxt.is_var:
                if hops + 1 > limit:
                    continue
                if nxt == dst:
                    paths.append(tuple(path) + (nxt,))
                    continue
                if nxt in blocked:
                    continue
                path.append(nxt)
                on_path.add(nxt)
                walk(nxt, hops + 1)
                on_path.discard(nxt)
                path.pop()
            else:
                path.append(nxt)
                on_path.add(nxt)
                walk(nxt, hops)
                on_path.discard(nxt)
                path.pop()

    walk(src, 0)
    return paths


def d_separated(
    bn: BayesianNetwork,
    sources: Iterable[str],
    target: str,
    given: Iterable[str] = (),
) -> bool:
    """Standard active-trail test: no active trail from any source to target."""
    sources = set(sources)
    given = set(given)
    for name in sources | given | {target}:
        bn.var(name)
    if sources & given or target in sources or target in given:
        raise ValidationError("sources, target and conditioning set must be disjoint")

    ancestors = set(given)
    frontier = deque(given)
    while frontier:
        n = frontier.popleft()
        for p in bn.parents(n):
            if p not in ancestors:
                ancestors.add(p)
                frontier.append(p)

    # Reachability over (node, direction): "up" arrived from a child,
    # "down" arrived from a parent.
    visited: set[tuple[str, str]] = set()
    todo = deque((s, "up") for s in sorted(sources))
    while todo:
        node, direction = todo.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node == target and node not in given:
            return False
        if direction == "up" and node not in given:
            for p in bn.parents(node):
                todo.append((p, "up"))
            for c in bn.children(node):
                todo.append((c, "down"))
        elif direction == "down":
            if node not in given:
                for c in bn.children(node):
                    todo.append((c, "down"))
            if node in ancestors:
                for p in bn.parents(node):
                    todo.append((p, "up"))
    return True
