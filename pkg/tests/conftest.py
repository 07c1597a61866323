import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from factorargs import BayesianNetwork, Factor, Variable
from factorargs.fixtures import and_network, chain_network, load


@pytest.fixture(scope="session")
def asia() -> BayesianNetwork:
    return load("asia")


@pytest.fixture(scope="session")
def and_net() -> BayesianNetwork:
    return and_network()


@pytest.fixture(scope="session")
def chain() -> BayesianNetwork:
    return chain_network()


FIG1C_EVIDENCE = {"XRay Result": "abnormal", "Tuberculosis": "absent"}
FIG1C_TARGET = "Lung Cancer"


@pytest.fixture(scope="session")
def fig1c_query():
    return FIG1C_TARGET, dict(FIG1C_EVIDENCE)


def dense_network(width: int = 3, depth: int = 2) -> BayesianNetwork:
    """Layered network with many evidence-to-target simple paths."""
    src = Variable("E", ("0", "1"))
    layers = [[src]]
    variables = [src]
    cpts = {"E": Factor.from_cpt(src, (), [0.5, 0.5])}
    for d in range(depth):
        layer = []
        for w in range(width):
            v = Variable(f"M{d}{w}", ("0", "1"))
            parents = tuple(layers[-1])
            rows = {}
            for key in np.ndindex(*(2,) * len(parents)):
                states = tuple("01"[i] for i in key)
                p = 0.2 + 0.6 * (sum(key) / max(1, len(key)))
                rows[states] = [1 - p, p]
            cpts[v.name] = Factor.from_cpt(v, parents, rows)
            layer.append(v)
            variables.append(v)
        layers.append(layer)
    sink = Variable("T", ("0", "1"))
    parents = tuple(layers[-1])
    rows = {}
    for key in np.ndindex(*(2,) * len(parents)):
        states = tuple("01"[i] for i in key)
        p = 0.1 + 0.8 * (sum(key) / len(key))
        rows[states] = [1 - p, p]
    cpts["T"] = Factor.from_cpt(sink, parents, rows)
    variables.append(sink)
    return BayesianNetwork("dense", variables, cpts)
