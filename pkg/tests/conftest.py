import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from afforest import kernels  # noqa: E402
from afforest.digraph import build_org_structure  # noqa: E402
from afforest.games import AttachmentGame, example_convexity_game  # noqa: E402
from afforest.measures import OrganisationalSituation  # noqa: E402

DATA = Path(__file__).parent / "data"
LABELS5 = ["1", "2", "3", "4", "5"]
FIG1_ARCS = [("1", "2"), ("1", "3"), ("2", "4"), ("5", "2")]
FIXB_ARCS = [("1", "3"), ("2", "3"), ("4", "3"), ("4", "2"), ("5", "4"), ("1", "4")]
GAMMA1_ARCS = [("1", "2"), ("3", "2"), ("2", "4")]
GAMMA2_ARCS = [("1", "2"), ("2", "3"), ("2", "4")]
FIG3_ARCS = [("1", "2"), ("1", "3"), ("2", "3"), ("2", "4"), ("3", "4"), ("4", "5"), ("4", "6")]


def labels(n):
    return [str(i + 1) for i in range(n)]


@pytest.fixture
def fig1():
    return build_org_structure(LABELS5, FIG1_ARCS)


@pytest.fixture
def fixb_graph():
    return build_org_structure(LABELS5, FIXB_ARCS)


@pytest.fixture
def fixture_a(fig1):
    return OrganisationalSituation(fig1, AttachmentGame(5))


@pytest.fixture
def fixture_b(fixb_graph):
    return OrganisationalSituation(fixb_graph, example_convexity_game(LABELS5))


@pytest.fixture
def fixture_a_path():
    return DATA / "fixture_a.json"


@pytest.fixture
def fixture_b_path():
    return DATA / "fixture_b.json"


@pytest.fixture(params=kernels.available_backends())
def each_backend(request):
    before = kernels.backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(before)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

