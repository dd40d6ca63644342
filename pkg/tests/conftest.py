# Copyright (c) Jupyter Development Team.
# Distributed under the terms of the Modified BSD License.

import os

# isort: off
# This must come before any Jupyter imports.
os.environ["JUPYTER_PLATFORM_DIRS"] = "1"
# isort: on

import pytest  # noqa: E402

from norden_lab.instance_forge import flat_model, quasi_kahler_search, random_norden  # noqa: E402
from norden_lab.norden_model import load_model  # noqa: E402

CORPUS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")


def corpus_instance(name):
    document = load_model(os.path.join(CORPUS, f"{name}.json"))
    return document.structure, document.frame


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture(scope="session")
def flat4():
    return flat_model(2)


@pytest.fixture(scope="session")
def flat6():
    return flat_model(3)


@pytest.fixture(scope="session")
def qk6():
    """Integer 2-step nilpotent quasi-Kähler instance in the standard frame."""
    return corpus_instance("QK6")


@pytest.fixture(scope="session")
def qk4():
    """Quasi-Kähler instance of dim 4 found by numeric descent."""
    return quasi_kahler_search(2, seed=3)


@pytest.fixture(scope="session")
def random4():
    """Norden instance of dim 4 outside the quasi-Kähler class."""
    return random_norden(2, seed=1)


@pytest.fixture(scope="session")
def chart():
    return corpus_instance("CH4")


@pytest.fixture(scope="session")
def chart2():
    return corpus_instance("CH2")
