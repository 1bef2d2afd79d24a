import random
from pathlib import Path
from typing import Sequence

import pytest

from cachecap import FileClass, Link, Network, Node, load_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"
FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


def scenario_path(name: str) -> Path:
    return SCENARIO_DIR / name


@pytest.fixture(scope="session")
def fig1() -> Network:
    return load_scenario(scenario_path("fig1.json"))


@pytest.fixture(scope="session")
def fig2() -> Network:
    return load_scenario(scenario_path("fig2.json"))


@pytest.fixture(scope="session")
def fig2_shared() -> Network:
    return load_scenario(scenario_path("fig2-shared.json"))


@pytest.fixture(scope="session")
def three_file() -> Network:
    return load_scenario(scenario_path("three-file.json"))


def single_node_network(terms: Sequence[tuple[int, float]]) -> tuple[Network, str]:
    """One node reading its own classes; one (count, time) term per class."""
    classes = tuple(FileClass(id=f"c{i}", count=count) for i, (count, _) in enumerate(terms))
    node = Node(id="n", stores=frozenset(fc.id for fc in classes))
    links = tuple(
        Link(reader="n", provider="n", time=time, classes=frozenset({f"c{i}"}))
        for i, (_, time) in enumerate(terms)
    )
    return Network(classes=classes, nodes=(node,), links=links), "n"


def scale_times(net: Network, s: float) -> Network:
    """Copy of a network with every link time multiplied by s."""
    return Network(
        classes=net.classes,
        nodes=net.nodes,
        links=tuple(
            Link(reader=l.reader, provider=l.provider, time=l.time * s, classes=l.classes)
            for l in net.links
        ),
    )


def random_terms(
    rng: random.Random,
    max_classes: int = 6,
    max_files: int = 50,
    time_range: tuple[float, float] = (0.1, 20.0),
    integer_times: bool = False,
) -> list[tuple[int, float]]:
    """Random catalog terms with 2..max_files files spread over a few classes."""
    n_classes = rng.randint(1, max_classes)
    counts = [1] * n_classes
    extra = rng.randint(max(0, 2 - n_classes), max_files - n_classes)
    for _ in range(extra):
        counts[rng.randrange(n_classes)] += 1
    lo, hi = time_range
    if integer_times:
        times = [float(rng.randint(max(1, int(lo)), int(hi))) for _ in range(n_classes)]
    else:
        times = [rng.uniform(lo, hi) for _ in range(n_classes)]
    return list(zip(counts, times))
