"""Test the symbolic checking costs"""

import pytest

from kbl_snm.check_config import CheckConfig
from kbl_snm.utils import parse_formula
from kbl_snm.workflows.cost import characteristic_size, cost_report, kb_size

from .conftest import model


def test_kb_size(network):
    assert kb_size(network.kb("Alice")) == 14
    assert kb_size(network.kb("Charlie")) == 4
    assert kb_size(network.kb("Bob")) == 0
    assert characteristic_size(network) == 30


def test_cost_report(network):
    report = cost_report(network, parse_formula("K[Charlie] loc(Bob,pub,1)"))
    assert report.formula_size == 5
    assert report.outer == ("K[Charlie] loc(Bob,pub,1)",)
    assert report.kb_sizes == {"Charlie": 4}
    assert report.m_phi == 5
    assert report.snm_steps == 2**4 + 5 == 21
    assert report.kripke_steps == 2**30 + 5 == 1073741829
    assert report.snm_bound == 2**4 * 4
    assert report.kripke_bound == 2**30 * 5
    assert report.bound_holds is True
    assert report.verdict == "false"
    assert report.seconds >= 0


def test_cost_report_options(network):
    phi = parse_formula("K[Alice] loc(Bob,pub,1) && !K[Charlie] loc(Bob,pub,1)")
    cfg = CheckConfig.from_dict({"node_cost": 3})
    report = cost_report(network, phi, cfg, run_check=False)
    assert report.verdict is None and report.seconds is None
    assert report.m_phi == 3 * report.formula_size
    assert report.snm_steps == 2**14 + 2**4 + report.m_phi
    out = report.to_dict()
    assert out["outer"] == list(report.outer)
    assert out["bound_holds"] is True


def test_cost_report_no_knowledge(network):
    report = cost_report(network, parse_formula("friend(Alice,Bob)"))
    assert report.outer == ()
    assert report.bound_holds is None
    assert report.snm_steps == report.m_phi
    assert report.verdict == "true"


@pytest.mark.parametrize(
    "text", ["K[a] p", "E[a,b] p", "K[a] K[b] p && K[b] q", "S[a,b] (p || q)"]
)
def test_bound_inequality(text):
    snm = model(["a", "b"], kbs={"a": ["p", "p -> q"], "b": ["q"]})
    assert cost_report(snm, parse_formula(text), run_check=False).bound_holds is True
