"""Command-line interface: explain a query, run the evaluation, serve HTTP."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .arguments import FAParams
from .bif import parse_bif
from .errors import CapacityError, FactorArgsError, NumericError, ValidationError
from .evaluation import export_report, run_trials, summarize
from .nlg import MODES
from .query import QueryOptions, run_query

EXIT_VALIDATION = 2
EXIT_CAPACITY = 3


def _fail(exc: Exception, code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _load_network(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(exc, EXIT_VALIDATION)
    return parse_bif(text)


def _parse_evidence(pairs: tuple[str, ...]) -> dict[str, str]:
    evidence: dict[str, str] = {}
    for item in pairs:
        name, sep, state = item.partition("=")
        if not sep or not name.strip() or not state.strip():
            raise ValidationError(
                f"evidence must look like 'Variable=state', got {item!r}"
            )
        evidence[name.strip()] = state.strip()
    return evidence


@click.group()
@click.version_option(package_name="factorargs")
def main() -> None:
    """Factor-argument explanations for discrete Bayesian networks."""


@main.command()
@click.option("--network", "network_path", required=True, help="Path to a BIF file.")
@click.option(
    "--evidence", "evidence_pairs", multiple=True,
    help="Observed 'Variable=state'; repeatable.",
)
@click.option("--target", required=True, help="Query variable.")
@click.option("--mode", type=click.Choice(MODES), default="direct", show_default=True)
@click.option("--mc", type=int, default=2, show_default=True,
              help="Max simple paths combined into one argument.")
@click.option("--ml", type=int, default=None, help="Max simple-path length in hops.")
@click.option("--dt", type=float, default=0.1, show_default=True,
              help="Dependence threshold on the effect distance.")
@click.option("--top-n", type=int, default=None, help="Render at most this many arguments.")
@click.option("--min-strength", type=float, default=None, help="Strength floor for rendering.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full query response as JSON.")
def explain(network_path, evidence_pairs, target, mode, mc, ml, dt, top_n, min_strength, as_json):
    """Explain how the evidence moves the target's belief."""
    try:
        bn = _load_network(network_path)
        evidence = _parse_evidence(evidence_pairs)
        params = FAParams(ml=ml, mc=mc, dt=dt, top_n=top_n, min_strength=min_strength)
        options = QueryOptions(params=params, modes=(mode,), include_trace=True)
        response = run_query(bn, evidence, target, options)
    except CapacityError as exc:
        _fail(exc, EXIT_CAPACITY)
    except (ValidationError, NumericError, FactorArgsError) as exc:
        _fail(exc, EXIT_VALIDATION)

    if as_json:
        click.echo(json.dumps(response, indent=2))
        return

    click.echo(f"Posterior of {target} (message passing):")
    for state, p in response["posterior"].items():
        click.echo(f"  {state}: {p:.6f}")
    click.echo("Approximation from factor arguments:")
    for state, p in response["approx_posterior"].items():
        click.echo(f"  {state}: {p:.6f}")
    if not response["converged"]:
        click.echo("note: message passing did not converge", err=True)

    fas = response["factor_arguments"]
    click.echo(f"\n{len(fas)} factor argument(s), strongest first:")
    for i, fa in enumerate(fas, 1):
        strength = "inf" if fa["strength"] is None else f"{fa['strength']:.4f}"
        click.echo(
            f"\n[{i}] strength={strength} argued={fa['argued_state']} "
            f"sources={', '.join(fa['sources'])}"
        )
        click.echo(fa["explanations"][mode]["text"])


@main.command("eval")
@click.option(
    "--networks", "networks_spec", required=True,
    help="Directory of BIF files, or a comma-separated list of files.",
)
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--mc", type=int, default=2, show_default=True)
@click.option("--seed-base", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", default="eval-report", show_default=True)
def eval_cmd(networks_spec, trials, mc, seed_base, out_dir):
    """Compare the argument approximation against message passing."""
    spec = Path(networks_spec)
    if spec.is_dir():
        paths = sorted(spec.glob("*.bif"))
    else:
        paths = [Path(p) for p in networks_spec.split(",") if p.strip()]
    if not paths:
        _fail(ValidationError(f"no networks found under {networks_spec!r}"), EXIT_VALIDATION)

    summaries = []
    try:
        for path in paths:
            bn = _load_network(str(path))
            results = run_trials(bn, trials, FAParams(mc=mc), seed_base=seed_base)
            summary = summarize(bn, results)
            summaries.append(summary)
            click.echo(
                f"{summary.network}: trials={summary.trials} "
                f"err={summary.mean_abs_err:.4f} rho={summary.spearman_rho:.4f} "
                f"slope={summary.slope:.4f} time={summary.mean_time_s:.4f}s"
            )
        csv_path, json_path = export_report(summaries, out_dir)
    except CapacityError as exc:
        _fail(exc, EXIT_CAPACITY)
    except FactorArgsError as exc:
        _fail(exc, EXIT_VALIDATION)
    click.echo(f"wrote {csv_path} and {json_path}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--model-dir", default=None,
    help="Directory of BIF files preloaded at startup (FA_MODEL_DIR).",
)
def serve(port, host, model_dir):
    """Run the HTTP service."""
    from .service import serve as _serve

    _serve(port=port, model_dir=model_dir, host=host)


if __name__ == "__main__":
    main()
