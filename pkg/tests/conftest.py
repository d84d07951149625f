import random

import pytest

from phylonet.acceptance import fig1_rootings, fig1_trees, fig6_instance


@pytest.fixture
def fig1():
    return fig1_trees()


@pytest.fixture
def fig1_rooted():
    return fig1_rootings()


@pytest.fixture
def fig6():
    return fig6_instance()


@pytest.fixture
def rng():
    return random.Random(20240817)
