"""Test kbl_snm utils"""

from os.path import join

import pytest

from kbl_snm import utils
from kbl_snm.log import setuplog
from kbl_snm.errors import InconsistentKnowledgeError, ParseError, VocabularyError
from kbl_snm.workflows.syntax import (
    And,
    Constant,
    EveryoneKnows,
    Forall,
    Knows,
    Not,
    Pred,
    Value,
    Variable,
    implies,
    to_text,
)

from .conftest import NETWORK, TESTDATADIR


@pytest.mark.parametrize(
    "text",
    [
        "K[a] p(b) && q",
        "forall x:s . p(x) -> q(x)",
        "!(p && q)",
        "E[a,b] p",
        "p || q -> r",
        "p -> q -> r",
        "(p -> q) -> r",
        "K[a] (p && K[b] !q)",
        "D[a,b] p(f(c))",
        "false",
        "!false",
    ],
)
def test_formula_print_parse(text):
    phi = utils.parse_formula(text)
    assert to_text(phi) == text
    assert utils.parse_formula(to_text(phi)) == phi


def test_parse_formula():
    phi = utils.parse_formula("K[a] p(b) && q")
    assert phi == And(Knows("a", Pred("p", (Constant("b"),))), Pred("q"))
    phi = utils.parse_formula("forall t:time . post(Bob,t)")
    assert phi == Forall(
        "t", "time", Pred("post", (Constant("Bob"), Variable("t", "time")))
    )
    # implication is right associative and stored as a negated conjunction
    phi = utils.parse_formula("p -> q -> r")
    assert phi == implies(Pred("p"), implies(Pred("q"), Pred("r")))
    assert isinstance(phi, Not) and isinstance(phi.body, And)
    phi = utils.parse_formula("E[b,a] p")
    assert phi == EveryoneKnows(frozenset({"a", "b"}), Pred("p"))


@pytest.mark.parametrize(
    "text", ["K[a,b] p", "p &&", "forall x . p(x)", "p(a", "K[] p", "(p"]
)
def test_parse_formula_errors(text):
    with pytest.raises(ParseError):
        utils.parse_formula(text)


def test_parse_error_position():
    text = "agents: a\npredicates:\n  p/1\nkb a:\n  p(a)\n  p(a) && && p(a)\n"
    with pytest.raises(ParseError) as excinfo:
        utils.parse_model(text)
    err = excinfo.value
    assert err.line == 6
    assert err.column >= 3
    assert str(err).startswith("6:")


def test_parse_model(network):
    assert network.agents == ("Alice", "Bob", "Charlie")
    assert network.vocab.domain("place") == ("pub", "library")
    assert network.vocab.predicates["friend"] == (2, "connection")
    assert network.vocab.predicates["friendRequest"] == (2, "action")
    assert network.connections["friend"] == {("Alice", "Bob"), ("Bob", "Alice")}
    assert network.actions["friendRequest"] == {("Charlie", "Alice")}
    # the quantified rule is grounded over the one-element sort visit
    post = Pred("post", (Value("Bob"), Value("pub"), Value("1")))
    loc = Pred("loc", (Value("Bob"), Value("pub"), Value("1")))
    assert post in network.kb("Alice")
    assert implies(post, loc) in network.kb("Alice")
    assert len(network.kb("Charlie")) == 1
    assert len(network.kb("Bob")) == 0
    assert network.validate() == []


def test_parse_model_functions():
    snm = utils.read_model(join(TESTDATADIR, "functions.snm"))
    at_work = Pred("at", (Value("Alice"), Value("work")))
    assert at_work in snm.environment
    assert at_work in snm.kb("Bob")
    assert snm.policies["Alice"] == ("nobody may know at(Alice,home)",)
    assert snm.vocab.constants == {"office": "work"}
    assert snm.vocab.functions["next"].table[("home",)] == "work"


def test_parse_model_errors():
    with pytest.raises(ParseError, match="unknown section"):
        utils.parse_model("agents: a\nfriends:\n  a\n")
    with pytest.raises(VocabularyError, match="reserved prefix"):
        utils.parse_model("agents: a b\npredicates:\n  co_friend/2 connection\n")
    with pytest.raises(VocabularyError, match="not declared as a connection"):
        utils.parse_model("agents: a b\nconnections:\n  friend(a,b)\n")
    with pytest.raises(VocabularyError, match="line 5"):
        utils.parse_model("agents: a\npredicates:\n  p/1\nkb a:\n  q(a)\n")
    with pytest.raises(InconsistentKnowledgeError) as excinfo:
        utils.read_model(join(TESTDATADIR, "inconsistent.snm"))
    assert excinfo.value.agent == "a"
    # diagnostics are left to the caller without validation
    snm = utils.read_model(join(TESTDATADIR, "inconsistent.snm"), validate=False)
    assert snm.validate() == ["agent 'a': inconsistent knowledge base"]


def test_parse_model_section_order():
    text = (
        "agents: a b\n"
        "connections:\n  friend(a,b)\n"
        "predicates:\n  friend/2 connection\n"
    )
    snm = utils.parse_model(text)
    assert snm.connection_holds("friend", "a", "b")


def test_model_io(tmpdir, network):
    fn_out = str(tmpdir.join("network.snm"))
    network.write(fn_out)
    snm = utils.read_model(fn_out)
    assert snm == network
    assert utils.print_model(snm) == utils.print_model(network)
    snm = utils.read_model(join(TESTDATADIR, "functions.snm"))
    assert utils.parse_model(snm.to_text()) == snm


def test_kripke_io(tmpdir, small_kripke):
    assert small_kripke.agents == ("a", "b")
    assert small_kripke.states == ("s0", "s1", "s2")
    assert small_kripke.pairs("a") == {("s0", "s1"), ("s1", "s0")}
    assert small_kripke.valuation["s2"] == frozenset()
    fn_out = str(tmpdir.join("small.kripke"))
    utils.write_kripke(fn_out, small_kripke)
    assert utils.read_kripke(fn_out) == small_kripke


def test_parse_kripke_errors():
    with pytest.raises(ParseError, match="needs an argument"):
        utils.parse_kripke("agents: a\nstates: s0\nrel:\n  s0: s0\n")
    with pytest.raises(ParseError):
        # unknown state in a relation
        utils.parse_kripke("agents: a\nstates: s0\nrel a:\n  s0: s1\n")
    with pytest.raises(ParseError, match="'true' or 'false'"):
        utils.parse_kripke("agents: a\nstates: s0\nmarked: yes\n")


def test_read_network_file():
    with open(NETWORK, "r") as f:
        text = f.read()
    assert utils.parse_model(text) == utils.read_model(NETWORK)


def test_setuplog(tmpdir):
    path = str(tmpdir.join("kbl.log"))
    logger = setuplog("kbl_snm.test", path=path, log_level=10)
    assert logger.level == 10
    assert len(logger.handlers) == 2
    logger.info("written to file")
    for handler in logger.handlers:
        handler.flush()
    assert "written to file" in tmpdir.join("kbl.log").read()
    # handlers are replaced, not added
    assert len(setuplog("kbl_snm.test").handlers) == 1
