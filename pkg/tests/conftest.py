"""add global fixtures"""

import os
from os.path import abspath, dirname, join

import pytest
from hypothesis import settings

from kbl_snm import DATADIR
from kbl_snm.snm import SocialNetworkModel
from kbl_snm.utils import parse_formula, read_kripke, read_model

TESTDATADIR = join(dirname(abspath(__file__)), "data")
SMALL_KRIPKE = join(DATADIR, "fig1.kripke")
NETWORK = join(DATADIR, "fig2.snm")

# the characteristic formula of fig2.snm has 19 subformulas
NETWORK_GUARD = 20

# HYPOTHESIS_PROFILE=full runs the randomized suites on the large corpora
settings.register_profile("default", max_examples=40)
settings.register_profile("full", max_examples=1000)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def small_kripke():
    return read_kripke(SMALL_KRIPKE)


@pytest.fixture
def network():
    return read_model(NETWORK)


def model(agents, kbs=None, connections=None, actions=None):
    """Small model from formula strings, with an inferred vocabulary."""
    kbs = {a: [parse_formula(t) for t in texts] for a, texts in (kbs or {}).items()}
    return SocialNetworkModel(
        agents, kbs=kbs, connections=connections, actions=actions
    )
