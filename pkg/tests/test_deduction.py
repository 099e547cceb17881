"""Test derivability in multi-agent KD4"""

import pytest

from kbl_snm.errors import KindError, ResourceExhaustedError, UnsupportedModalityError
from kbl_snm.kripke import frame_properties, kripke_sat
from kbl_snm.utils import parse_formula
from kbl_snm.workflows.deduction import (
    KnowledgeBase,
    consistent,
    derive,
    derive_group,
    group_premises,
    normalize,
    prove,
)
from kbl_snm.workflows.syntax import Distributed, Knows, literalize


def _f(text):
    return literalize(parse_formula(text))


def _kb(owner, *texts):
    return KnowledgeBase(owner, [_f(t) for t in texts])


def test_knowledge_base():
    kb = _kb("a", "p", "q", "p")
    assert len(kb) == 2
    assert _f("q") in kb
    assert kb == _kb("a", "q", "p")
    assert kb != _kb("b", "q", "p")
    assert len({kb, _kb("a", "q", "p")}) == 1
    assert kb.add(_f("r")).formulas == (_f("p"), _f("q"), _f("r"))
    assert kb.closure() == (
        _f("p"),
        _f("q"),
        Knows("a", _f("p")),
        Knows("a", _f("q")),
    )


def test_derive(network):
    alice = network.kb("Alice")
    assert derive(alice, _f("loc(Bob,pub,1)"))
    assert derive(alice, _f("K[Alice] loc(Bob,pub,1)"))
    assert not derive(network.kb("Charlie"), _f("loc(Bob,pub,1)"))
    assert derive(KnowledgeBase("a"), _f("p(a) || !p(a)"))
    # no self-awareness across agents
    assert not derive(_kb("a", "p(a)"), _f("K[b] p(a)"))
    assert derive(_kb("a", "p(a)"), _f("K[a] p(a)"))
    # D and 4 hold, T does not
    assert derive(KnowledgeBase("a"), _f("K[a] p -> !K[a] !p"))
    assert derive(KnowledgeBase("a"), _f("K[a] p -> K[a] K[a] p"))
    assert not derive(KnowledgeBase("a"), _f("K[a] p -> p"))


def test_consistent(network):
    assert consistent(network.kb("Alice"))
    assert consistent(KnowledgeBase("a"))
    assert not consistent(_kb("a", "p(a)", "!p(a)"))
    assert not consistent(_kb("a", "p(a) -> q(a)", "p(a)", "!q(a)"))
    # knowing a contradiction is inconsistent by seriality
    assert not consistent(_kb("a", "K[a] false"))
    assert consistent(_kb("a", "K[b] p", "K[b] !p -> q"))


def test_countermodel():
    # negative introspection is not sound
    phi = _f("!K[a] p -> K[a] !K[a] p")
    result = prove([], phi)
    assert not result.proved
    m = result.countermodel
    assert m is not None
    assert frame_properties(m).kd4()
    assert not kripke_sat(m, "w0", phi)
    # premises hold at the root of the countermodel
    premises = list(_kb("a", "p(a)").closure())
    result = prove(premises, _f("K[b] p(a)"))
    m = result.countermodel
    assert frame_properties(m).kd4()
    assert all(kripke_sat(m, "w0", f) for f in premises)
    assert not kripke_sat(m, "w0", _f("K[b] p(a)"))
    assert prove([], _f("p || !p")).countermodel is None


def test_trace():
    result = prove([_f("p"), _f("p -> q")], _f("q"), trace=True)
    assert result.proved and bool(result)
    assert result.trace[0].startswith("world {")
    assert result.text().endswith(f"tableau closed after {result.steps} steps")
    assert prove([_f("p")], _f("q")).trace == []


def test_derive_group():
    kb_a, kb_b = _kb("a", "p(a)"), _kb("b", "p(a) -> q(a)")
    assert derive_group([kb_a, kb_b], _f("q(a)"))
    assert not derive(kb_a, _f("q(a)"))
    assert not derive(kb_b, _f("q(a)"))
    group = frozenset({"a", "b"})
    assert derive_group([kb_a, kb_b], Distributed(group, _f("q(a)")))
    # a single member is its own distributed knowledge
    assert derive_group([kb_a], _f("D[a] p(a)"))
    assert group_premises([kb_a, kb_b])[0] == group
    with pytest.raises(ValueError):
        derive_group([], _f("p"))


def test_normalize_errors():
    with pytest.raises(UnsupportedModalityError, match="Common knowledge"):
        derive(KnowledgeBase("a"), _f("C[a,b] p"))
    with pytest.raises(UnsupportedModalityError, match="Distributed"):
        derive(KnowledgeBase("a"), _f("D[a,b] p"))
    with pytest.raises(KindError):
        normalize(parse_formula("forall x:s . p(x)"))
    assert normalize(_f("E[a,b] p")) == _f("K[a] p && K[b] p")


def test_budget():
    kb = _kb("a", "p1 || q1", "p2 || q2", "p3 || q3", "p4 || q4")
    with pytest.raises(ResourceExhaustedError, match="budget"):
        derive(kb, _f("r"), budget=5)
