"""Test canonical KD4 models"""

import pytest

from kbl_snm.errors import InconsistentFormulaError, ResourceExhaustedError
from kbl_snm.kripke import frame_properties, satisfying_states
from kbl_snm.utils import parse_formula
from kbl_snm.workflows.canonical import canonical_model, formula_closure
from kbl_snm.workflows.syntax import Not, literalize


def _f(text):
    return literalize(parse_formula(text))


def test_formula_closure():
    closure = formula_closure(_f("p && K[a] q"))
    assert len(closure.sub) == 4
    assert len(closure.subplus) == 8
    # two atoms times both values of the box
    assert closure.truth.shape == (8, 4)
    for theta in closure.con:
        assert len(theta) == 4
        assert all((f in theta) != (Not(f) in theta) for f in closure.sub)
    # K[a] false is not consistent, so the box is never chosen
    closure = formula_closure(_f("p || K[a] false"))
    box = closure.sub.index(_f("K[a] false"))
    assert not closure.truth[:, box].any()


def test_canonical_model():
    m = canonical_model(_f("p(a)"))
    assert m.n_states == 2
    assert m.agents == ()
    assert satisfying_states(m, _f("p(a)")) == ("s1",)
    m = canonical_model(_f("K[a] p"), agents=["b"])
    assert m.agents == ("a", "b")
    assert m.n_states == 4
    assert frame_properties(m).kd4()
    for s in satisfying_states(m, _f("K[a] p")):
        assert _f("K[a] p") in m.theta[s]
        assert all(_f("p") in m.theta[t] for t in m.successors("a", s))


def test_canonical_model_truth_lemma():
    phi = _f("K[a] (p -> K[b] q) && !K[b] p")
    m = canonical_model(phi)
    assert frame_properties(m).kd4()
    # every state satisfies exactly the members of its set
    for s in m.states:
        for f in m.theta[s]:
            assert s in satisfying_states(m, f)


def test_canonical_model_errors():
    with pytest.raises(InconsistentFormulaError):
        canonical_model(_f("p(a) && !p(a)"))
    with pytest.raises(InconsistentFormulaError):
        canonical_model(_f("K[a] p && K[a] !p"))
    with pytest.raises(ResourceExhaustedError) as excinfo:
        canonical_model(_f("p && q"), guard=2)
    assert excinfo.value.estimate == 2**3
    with pytest.raises(ResourceExhaustedError, match="guard of 2"):
        formula_closure(_f("p && q"), guard=2)
