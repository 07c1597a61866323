"""Randomized comparison of the argument-based posterior approximation
against message passing, with summary statistics and report export."""

from __future__ import annotations

import csv
import json
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .arguments import FAParams, approximate_posterior, find_maximal_proper_fas
from .errors import CapacityError, FactorArgsError, NumericError
from .factors import BeliefUpdate, logodds
from .inference import (
    VARIABLE_GUARD,
    Schedule,
    exact_posterior,
    loopy_posterior,
    prior_marginal,
)
from .network import BayesianNetwork, Evidence, build_factor_graph


@dataclass
class TrialResult:
    network: str
    seed: int
    evidence: dict[str, str]
    target: str
    approx: dict[str, float] | None
    reference: dict[str, float] | None
    exact: dict[str, float] | None = None
    abs_errors: list[float] = field(default_factory=list)
    approx_logodds: list[float] = field(default_factory=list)
    reference_logodds: list[float] = field(default_factory=list)
    elapsed_s: float = 0.0
    fa_count: int = 0
    fa_lengths: list[int] = field(default_factory=list)
    fa_strengths: list[float] = field(default_factory=list)
    converged: bool = True
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class EvalSummary:
    network: str
    nodes: int
    treewidth_est: int
    trials: int
    mean_abs_err: float
    spearman_rho: float
    slope: float
    mean_time_s: float
    std_time_s: float
    nonconverged: int

    FIELDS = (
        "network",
        "nodes",
        "treewidth_est",
        "trials",
        "mean_abs_err",
        "spearman_rho",
        "slope",
        "mean_time_s",
        "std_time_s",
        "nonconverged",
    )

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}


def _sample_query(bn: BayesianNetwork, seed: int) -> tuple[str, dict[str, str]]:
    """Deterministic per-seed draw: target plus 1..3 evidence assignments."""
    rng = random.Random(seed)
    names = [v.name for v in bn.variables]
    k = rng.randint(1, min(3, len(names) - 1))
    chosen = rng.sample(names, k + 1)
    target, ev_names = chosen[0], chosen[1:]
    evidence = {n: rng.choice(bn.var(n).states) for n in ev_names}
    return target, evidence


def run_trials(
    bn: BayesianNetwork,
    n_trials: int,
    params: FAParams | None = None,
    seed_base: int = 0,
    schedule: Schedule = Schedule(),
) -> list[TrialResult]:
    """Run seeded trials; trial ``i`` uses seed ``seed_base + i``.

    Search and inference failures are recorded on the trial, never raised."""
    if n_trials < 1:
        raise FactorArgsError("n_trials must be at least 1")
    params = params or FAParams()
    fg = build_factor_graph(bn)
    prior_cache: dict[str, BeliefUpdate] = {}
    prior_conv: dict[str, bool] = {}
    results: list[TrialResult] = []

    for i in range(n_trials):
        seed = seed_base + i
        target, evidence = _sample_query(bn, seed)
        trial = TrialResult(
            network=bn.name, seed=seed, evidence=evidence, target=target,
            approx=None, reference=None,
        )
        tvar = bn.var(target)
        try:
            reference = loopy_posterior(fg, Evidence(evidence), target, schedule)
            if target not in prior_cache:
                p = prior_marginal(fg, target, schedule)
                prior_cache[target] = p.update
                prior_conv[target] = p.converged
            prior = prior_cache[target]

            t0 = time.perf_counter()
            ranked = find_maximal_proper_fas(bn, target, evidence, params, fg=fg)
            approx = approximate_posterior(prior, ranked)
            trial.elapsed_s = time.perf_counter() - t0

            trial.converged = reference.converged and prior_conv[target]
            trial.reference = dict(zip(tvar.states, reference.update.values.tolist()))
            trial.approx = dict(zip(tvar.states, approx.values.tolist()))
            if len(bn.variables) <= VARIABLE_GUARD:
                exact = exact_posterior(bn, Evidence(evidence), target)
                trial.exact = dict(zip(tvar.states, exact.values.tolist()))
            trial.abs_errors = [
                abs(a - r)
                for a, r in zip(approx.values, reference.update.values)
            ]
            trial.approx_logodds = [logodds(approx, j) for j in range(tvar.cardinality)]
            trial.reference_logodds = [
                logodds(reference.update, j) for j in range(tvar.cardinality)
            ]
            trial.fa_count = len(ranked)
            trial.fa_lengths = [r.length for r in ranked]
            trial.fa_strengths = [r.strength for r in ranked]
        except (NumericError, CapacityError) as exc:
            trial.error = f"{type(exc).__name__}: {exc}"
        results.append(trial)
    return results


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation with average ranks on ties; NaN when a side has no
    rank variance."""
    if len(x) != len(y) or not x:
        raise FactorArgsError("spearman needs two equally sized nonempty lists")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    sx, sy = np.std(rx), np.std(ry)
    if sx == 0.0 or sy == 0.0:
        return math.nan
    return float(np.mean((rx - np.mean(rx)) * (ry - np.mean(ry))) / (sx * sy))


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.float64)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def regression_slope(approx_logodds: Sequence[float], reference_logodds: Sequence[float]) -> float:
    """Least-squares slope of the reference on the approximation.

    Pairs with a non-finite entry are excluded; NaN when fewer than two
    finite pairs remain or the x variance is zero."""
    pairs = [
        (a, r)
        for a, r in zip(approx_logodds, reference_logodds)
        if math.isfinite(a) and math.isfinite(r)
    ]
    if len(pairs) < 2:
        return math.nan
    xs = np.asarray([p[0] for p in pairs])
    ys = np.asarray([p[1] for p in pairs])
    var = float(np.var(xs))
    if var == 0.0:
        return math.nan
    return float(np.mean((xs - xs.mean()) * (ys - ys.mean())) / var)


def treewidth_estimate(bn: BayesianNetwork) -> int:
    """Width of a min-fill elimination order on the moral graph (upper bound)."""
    neighbors: dict[str, set[str]] = {v.name: set() for v in bn.variables}
    for child in neighbors:
        parents = bn.parents(child)
        for p in parents:
            neighbors[p].add(child)
            neighbors[child].add(p)
        for a in parents:
            for b in parents:
                if a != b:
                    neighbors[a].add(b)
    remaining = set(neighbors)
    width = 0
    while remaining:
        best, best_fill = None, None
        for n in sorted(remaining):
            ns = neighbors[n] & remaining
            fill = sum(1 for a in ns for b in ns if a < b and b not in neighbors[a])
            if best_fill is None or fill < best_fill:
                best, best_fill = n, fill
        ns = neighbors[best] & remaining
        width = max(width, len(ns))
        for a in ns:
            neighbors[a] |= ns - {a}
        remaining.discard(best)
    return width


def fa_length_stats(trials: Sequence[TrialResult]) -> dict[int, list[float]]:
    """Histogram mapping argument length to the strengths observed at it."""
    hist: dict[int, list[float]] = {}
    for t in trials:
        if not t.ok:
            continue
        for length, strength in zip(t.fa_lengths, t.fa_strengths):
            hist.setdefault(length, []).append(strength)
    return {k: hist[k] for k in sorted(hist)}


def summarize(bn: BayesianNetwork, trials: Sequence[TrialResult]) -> EvalSummary:
    ok = [t for t in trials if t.ok]
    approx_flat: list[float] = []
    ref_flat: list[float] = []
    lo_approx: list[float] = []
    lo_ref: list[float] = []
    errs: list[float] = []
    times: list[float] = []
    for t in ok:
        approx_flat.extend(t.approx.values())
        ref_flat.extend(t.reference.values())
        lo_approx.extend(t.approx_logodds)
        lo_ref.extend(t.reference_logodds)
        errs.append(float(np.mean(t.abs_errors)))
        times.append(t.elapsed_s)
    return EvalSummary(
        network=bn.name,
        nodes=len(bn.variables),
        treewidth_est=treewidth_estimate(bn),
        trials=len(ok),
        mean_abs_err=float(np.mean(errs)) if errs else math.nan,
        spearman_rho=spearman(approx_flat, ref_flat) if approx_flat else math.nan,
        slope=regression_slope(lo_approx, lo_ref),
        mean_time_s=float(np.mean(times)) if times else math.nan,
        std_time_s=float(np.std(times)) if times else math.nan,
        nonconverged=sum(1 for t in ok if not t.converged),
    )


def _fmt_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def export_report(summaries: Sequence[EvalSummary], out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``report.csv`` and ``report.json``; identical summaries produce
    byte-identical files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "report.csv"
    json_path = out / "report.json"
    try:
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(EvalSummary.FIELDS)
            for s in summaries:
                writer.writerow([_fmt_cell(getattr(s, k)) for k in EvalSummary.FIELDS])
        with json_path.open("w") as fh:
            json.dump([s.as_dict() for s in summaries], fh, indent=2, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise FactorArgsError(f"cannot write report under {out}: {exc}") from exc
    return csv_path, json_path
