"""Value-semantic factor algebra over discrete variables.

A :class:`Factor` maps every joint state of its scope to a nonnegative real.
Tables are dense, row-major, with the *last* scope variable varying fastest,
so ``factor.values.ravel()`` is the canonical flat layout.  All operations
return new factors; nothing is mutated in place, which makes factors safe to
share across threads.

Division follows the convention 0/0 = 0: cells with no mass in the
denominator never receive mass from any later product, so zero is the only
consistent completion.  Dividing positive mass by zero is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import NumericError, ValidationError

#: absolute tolerance used by value comparisons unless a caller overrides it
ATOL = 1e-9

#: tolerance for CPT row sums on load (published files carry rounded values)
CPT_ROW_TOL = 1e-6


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered list of states."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise ValidationError(f"variable {self.name!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValidationError(f"variable {self.name!r} has duplicate state names")

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise ValidationError(
                f"variable {self.name!r} has no state {state!r}; states are {list(self.states)}"
            ) from None


def _canonical_strides(cards: Sequence[int]) -> list[int]:
    strides = [0] * len(cards)
    acc = 1
    for i in range(len(cards) - 1, -1, -1):
        strides[i] = acc
        acc *= cards[i]
    return strides


class Factor:
    """Nonnegative dense table over an ordered variable scope."""

    __slots__ = ("scope", "values")

    def __init__(self, scope: Sequence[Variable], values, *, _checked: bool = False):
        scope = tuple(scope)
        names = [v.name for v in scope]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate variables in scope: {names}")
        shape = tuple(v.cardinality for v in scope)
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.shape != shape:
            if arr.size != int(np.prod(shape, dtype=np.int64)):
                raise ValidationError(
                    f"table size {arr.size} does not match scope shape {shape}"
                )
            arr = arr.reshape(shape)
        if not _checked:
            if not np.all(np.isfinite(arr)):
                raise ValidationError("factor values must be finite")
            if np.any(arr < 0):
                raise ValidationError("factor values must be nonnegative")
        if not arr.flags.owndata:
            arr = arr.copy()
        arr.setflags(write=False)
        self.scope = scope
        self.values = arr

    # -- construction -----------------------------------------------------

    @classmethod
    def from_cpt(cls, child: Variable, parents: Sequence[Variable], rows) -> "Factor":
        """Build the factor of a CPT; scope is parents followed by child.

        ``rows`` is either a mapping from parent-state tuples to child
        distributions, or an array already in canonical (parents..., child)
        order.  Each conditioning row must sum to 1 within ``CPT_ROW_TOL``.
        """
        parents = tuple(parents)
        scope = parents + (child,)
        shape = tuple(v.cardinality for v in scope)
        if isinstance(rows, Mapping):
            table = np.zeros(shape, dtype=np.float64)
            seen = set()
            for key, dist in rows.items():
                key = (key,) if isinstance(key, str) else tuple(key)
                if len(key) != len(parents):
                    raise ValidationError(
                        f"CPT row {key} arity {len(key)} != {len(parents)} parents"
                    )
                idx = tuple(p.index(s) for p, s in zip(parents, key))
                table[idx] = np.asarray(dist, dtype=np.float64)
                seen.add(idx)
            expected = int(np.prod(shape[:-1], dtype=np.int64)) if parents else 1
            if len(seen) != expected:
                raise ValidationError(
                    f"CPT for {child.name!r} has {len(seen)} rows, expected {expected}"
                )
        else:
            table = np.ascontiguousarray(rows, dtype=np.float64).reshape(shape)
        sums = np.atleast_1d(table.sum(axis=-1))
        bad = np.where(np.abs(sums.ravel() - 1.0) > CPT_ROW_TOL)[0]
        if bad.size:
            first = int(bad[0])
            idx = np.unravel_index(first, sums.shape) if parents else ()
            config = ", ".join(
                f"{p.name}={p.states[int(i)]}" for p, i in zip(parents, idx)
            ) or "(no parents)"
            raise ValidationError(
                f"CPT row for {child.name!r} given {config} sums to "
                f"{float(sums.ravel()[first]):.9g}, expected 1"
            )
        return cls(scope, table)

    @classmethod
    def ones(cls, scope: Sequence[Variable]) -> "Factor":
        shape = tuple(v.cardinality for v in scope)
        return cls(scope, np.ones(shape), _checked=True)

    # -- helpers -----------------------------------------------------------

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.scope)

    def flat(self) -> np.ndarray:
        """Canonical flat table (last scope variable fastest)."""
        return self.values.ravel()

    def var(self, name: str) -> Variable:
        for v in self.scope:
            if v.name == name:
                return v
        raise ValidationError(f"variable {name!r} not in scope of factor")

    def _axis(self, variable: Variable) -> int:
        for i, v in enumerate(self.scope):
            if v.name == variable.name:
                return i
        raise ValidationError(
            f"variable {variable.name!r} not in scope {[v.name for v in self.scope]}"
        )

    def value_at(self, assignment: Mapping[str, str]) -> float:
        idx = tuple(v.index(assignment[v.name]) for v in self.scope)
        return float(self.values[idx])

    def _assignment_str(self, flat_index: int) -> str:
        parts = []
        for v, s in zip(self.scope, np.unravel_index(flat_index, self.cards)):
            parts.append(f"{v.name}={v.states[int(s)]}")
        return ", ".join(parts) if parts else "()"

    @staticmethod
    def _check_shared(a: "Factor", b: "Factor") -> None:
        states = {v.name: v.states for v in a.scope}
        for v in b.scope:
            if v.name in states and states[v.name] != v.states:
                raise ValidationError(
                    f"shared variable {v.name!r} disagrees on states: "
                    f"{list(states[v.name])} vs {list(v.states)}"
                )

    # -- algebra -----------------------------------------------------------

    def product(self, other: "Factor") -> "Factor":
        """Pointwise product over the union of the two scopes."""
        self._check_shared(self, other)
        scope = self.scope + tuple(
            v for v in other.scope if all(u.name != v.name for u in self.scope)
        )
        cards = [v.cardinality for v in scope]
        dims = np.asarray(cards, dtype=np.int64)

        def op_strides(f: Factor) -> np.ndarray:
            own = _canonical_strides(f.cards)
            pos = {v.name: i for i, v in enumerate(f.scope)}
            return np.asarray(
                [own[pos[v.name]] if v.name in pos else 0 for v in scope],
                dtype=np.int64,
            )

        flat = kernels.multiply(
            dims, self.flat(), op_strides(self), other.flat(), op_strides(other)
        )
        return Factor(scope, flat, _checked=True)

    __mul__ = product

    def marginalize(self, out: Iterable[Variable | str]) -> "Factor":
        """Sum out the given variables; an empty set returns an equal factor."""
        names = {v if isinstance(v, str) else v.name for v in out}
        in_scope = {v.name for v in self.scope}
        missing = names - in_scope
        if missing:
            raise ValidationError(
                f"cannot marginalize {sorted(missing)}: not in scope {sorted(in_scope)}"
            )
        keep = np.asarray(
            [0 if v.name in names else 1 for v in self.scope], dtype=np.int64
        )
        dims = np.asarray(self.cards, dtype=np.int64)
        flat = kernels.sum_out(dims, self.flat(), keep)
        scope = tuple(v for v in self.scope if v.name not in names)
        return Factor(scope, flat, _checked=True)

    def divide(self, den: "Factor") -> "Factor":
        """Pointwise quotient; the denominator scope must be a subset."""
        self._check_shared(self, den)
        num_names = {v.name for v in self.scope}
        extra = [v.name for v in den.scope if v.name not in num_names]
        if extra:
            raise ValidationError(
                f"denominator scope {extra} not contained in numerator scope"
            )
        own = _canonical_strides(den.cards)
        pos = {v.name: i for i, v in enumerate(den.scope)}
        den_strides = np.asarray(
            [own[pos[v.name]] if v.name in pos else 0 for v in self.scope],
            dtype=np.int64,
        )
        dims = np.asarray(self.cards, dtype=np.int64)
        flat, bad = kernels.divide(dims, self.flat(), den.flat(), den_strides)
        if bad >= 0:
            raise NumericError(
                f"division of positive mass by zero at {self._assignment_str(int(bad))}"
            )
        return Factor(self.scope, flat, _checked=True)

    __truediv__ = divide

    def normalize(self) -> "Factor":
        total = float(self.values.sum())
        if total <= 0.0:
            raise NumericError("cannot normalize a factor with zero total mass")
        return Factor(self.scope, self.values / total, _checked=True)

    # -- comparison --------------------------------------------------------

    def canonical(self) -> "Factor":
        """Same factor with its scope reordered to sorted-by-name."""
        order = sorted(range(len(self.scope)), key=lambda i: self.scope[i].name)
        scope = tuple(self.scope[i] for i in order)
        return Factor(scope, np.ascontiguousarray(self.values.transpose(order)), _checked=True)

    def allclose(self, other: "Factor", atol: float = ATOL) -> bool:
        a, b = self.canonical(), other.canonical()
        if [v.name for v in a.scope] != [v.name for v in b.scope]:
            return False
        return bool(np.allclose(a.values, b.values, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        names = ", ".join(v.name for v in self.scope)
        return f"Factor([{names}], {self.values.ravel().tolist()})"


class BeliefUpdate:
    """A single-variable factor expressing an inferred belief change."""

    __slots__ = ("variable", "values")

    def __init__(self, variable: Variable, values, *, _checked: bool = False):
        arr = np.ascontiguousarray(values, dtype=np.float64).ravel()
        if arr.size != variable.cardinality:
            raise ValidationError(
                f"belief update over {variable.name!r} has {arr.size} entries, "
                f"expected {variable.cardinality}"
            )
        if not _checked:
            if not np.all(np.isfinite(arr)):
                raise ValidationError("belief update values must be finite")
            if np.any(arr < 0):
                raise ValidationError("belief update values must be nonnegative")
        if not (arr > 0).any():
            raise ValidationError(
                f"belief update over {variable.name!r} has no positive entry"
            )
        if not arr.flags.owndata:
            arr = arr.copy()
        arr.setflags(write=False)
        self.variable = variable
        self.values = arr

    @classmethod
    def uniform(cls, variable: Variable) -> "BeliefUpdate":
        n = variable.cardinality
        return cls(variable, np.full(n, 1.0 / n), _checked=True)

    @property
    def factor(self) -> Factor:
        return Factor((self.variable,), self.values, _checked=True)

    def multiply(self, other: "BeliefUpdate") -> "BeliefUpdate":
        if other.variable.name != self.variable.name:
            raise ValidationError(
                f"cannot combine updates over {self.variable.name!r} and {other.variable.name!r}"
            )
        return BeliefUpdate(self.variable, self.values * other.values, _checked=True)

    def normalize(self) -> "BeliefUpdate":
        return BeliefUpdate(self.variable, self.values / self.values.sum(), _checked=True)

    def prob(self, state: str) -> float:
        return float(self.values[self.variable.index(state)])

    def logodds_vector(self) -> np.ndarray:
        return np.asarray([logodds(self, i) for i in range(self.values.size)])

    def argued_state_index(self) -> int:
        """State with the largest log-odds magnitude.

        Near-ties (binary updates tie by construction) prefer the state whose
        log-odds is positive, i.e. the state that became more likely; exact
        ties fall back to the lowest index.
        """
        lv = self.logodds_vector()
        mag = np.abs(lv)
        best = float(np.max(mag))
        if math.isinf(best):
            cands = [i for i in range(lv.size) if math.isinf(mag[i])]
        else:
            thr = best - 1e-9 * max(best, 1.0)
            cands = [i for i in range(lv.size) if mag[i] >= thr]
        pick = cands[0]
        for i in cands[1:]:
            if lv[i] > lv[pick]:
                pick = i
        return pick

    def argued_state(self) -> str:
        return self.variable.states[self.argued_state_index()]

    def allclose(self, other: "BeliefUpdate", atol: float = ATOL) -> bool:
        return self.variable.name == other.variable.name and bool(
            np.allclose(self.values, other.values, rtol=0.0, atol=atol)
        )

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"{s}: {v:.6g}" for s, v in zip(self.variable.states, self.values)
        )
        return f"BeliefUpdate({self.variable.name}; {pairs})"


def obs(variable: Variable, state: str) -> BeliefUpdate:
    """Lopsided update: probability 1 at the observed state, 0 elsewhere."""
    vec = np.zeros(variable.cardinality)
    vec[variable.index(state)] = 1.0
    return BeliefUpdate(variable, vec, _checked=True)


def logodds(update: BeliefUpdate, o: int) -> float:
    """Natural log of state ``o``'s mass over the mean mass of the others.

    A zero denominator yields ``+inf`` (the update is certain of state ``o``);
    zero mass at ``o`` yields ``-inf``.  No exception is raised for either.
    """
    vals = update.values
    if not 0 <= o < vals.size:
        raise ValidationError(f"state index {o} out of range for {update.variable.name!r}")
    others = (float(vals.sum()) - float(vals[o])) / (vals.size - 1)
    if others <= 0.0:
        return math.inf
    if vals[o] == 0.0:
        return -math.inf
    return math.log(float(vals[o]) / others)
