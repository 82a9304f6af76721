"""Shared fixtures: the bundled corpus, explored and reduced once per session."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tfgkit.net_io import parse_net
from tfgkit.petri import Marking, PetriNet, StateSpace, explore
from tfgkit.reductions import ReductionResult, build_graph, reduce
from tfgkit.tfg import TokenFlowGraph

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


def marking_key(m: Marking):
    """Deterministic sort key for iterating marking sets in tests."""
    return tuple(m.items())


@dataclass(frozen=True)
class CorpusInstance:
    name: str
    net: PetriNet
    m0: Marking
    space1: StateSpace
    result: ReductionResult
    graph: TokenFlowGraph
    space2: StateSpace


def _load_instance(path: Path) -> CorpusInstance:
    net, m0 = parse_net(path.read_text())
    space1 = explore(net, m0, max_states=10_000, max_token=1)
    assert space1.is_complete, f"{path.stem}: corpus net must explore completely"
    result = reduce(net, m0)
    graph = build_graph(net, result)
    space2 = explore(
        result.reduced_net, result.reduced_marking, max_states=10_000, max_token=1
    )
    assert space2.is_complete, f"{path.stem}: reduced net must explore completely"
    return CorpusInstance(path.stem, net, m0, space1, result, graph, space2)


@pytest.fixture(scope="session")
def corpus() -> list[CorpusInstance]:
    paths = sorted(CORPUS_DIR.glob("*.net"))
    assert len(paths) >= 30, "bundled corpus must hold at least 30 nets"
    return [_load_instance(path) for path in paths]
