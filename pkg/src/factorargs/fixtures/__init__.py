"""Bundled example networks and programmatic test networks."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..bif import parse_bif
from ..factors import Factor, Variable
from ..network import BayesianNetwork

_DIR = Path(__file__).parent


def list_fixtures() -> list[str]:
    return sorted(p.stem for p in _DIR.glob("*.bif"))


def fixture_path(name: str) -> Path:
    path = _DIR / f"{name}.bif"
    if not path.exists():
        raise FileNotFoundError(f"no bundled network named {name!r}; have {list_fixtures()}")
    return path


def load(name: str) -> BayesianNetwork:
    return parse_bif(fixture_path(name).read_text(encoding="utf-8"))


def and_network() -> BayesianNetwork:
    """Two fair binary causes and a child that is 1 iff both are 1."""
    a = Variable("A", ("0", "1"))
    b = Variable("B", ("0", "1"))
    c = Variable("C", ("0", "1"))
    table = np.zeros((2, 2, 2))
    for i in range(2):
        for j in range(2):
            table[i, j, 1 if i and j else 0] = 1.0
    return BayesianNetwork(
        "and",
        [a, b, c],
        {
            "A": Factor.from_cpt(a, (), [0.5, 0.5]),
            "B": Factor.from_cpt(b, (), [0.5, 0.5]),
            "C": Factor.from_cpt(c, (a, b), table),
        },
    )


def chain_network(p01: float = 0.2, p11: float = 0.9) -> BayesianNetwork:
    """Three-variable chain A -> B -> C with noisy links."""
    a = Variable("A", ("0", "1"))
    b = Variable("B", ("0", "1"))
    c = Variable("C", ("0", "1"))

    def link(child, parent):
        return Factor.from_cpt(
            child, (parent,), {("0",): [1 - p01, p01], ("1",): [1 - p11, p11]}
        )

    return BayesianNetwork(
        "chain",
        [a, b, c],
        {
            "A": Factor.from_cpt(a, (), [0.6, 0.4]),
            "B": link(b, a),
            "C": link(c, b),
        },
    )
