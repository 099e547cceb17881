"""Test Kripke models, satisfaction and small model search"""

import numpy as np
import pytest

from kbl_snm.kripke import (
    KripkeModel,
    frame_properties,
    kripke_sat,
    satisfying_states,
    search_countermodel,
    transitive_closure,
)
from kbl_snm.utils import parse_formula
from kbl_snm.workflows.syntax import literalize


def _f(text):
    return literalize(parse_formula(text))


def test_model_class(small_kripke):
    assert small_kripke.n_states == 3
    assert small_kripke.size == 3 + 4
    assert small_kripke.successors("a", "s0") == ("s1",)
    assert small_kripke.successors("a", "s2") == ()
    assert small_kripke.relation("z").sum() == 0
    assert small_kripke.truth(_f("p(a)")).tolist() == [True, True, False]
    assert repr(small_kripke) == "KripkeModel(states=3, agents=['a', 'b'], size=7)"
    with pytest.raises(ValueError, match="Unknown state"):
        small_kripke.index("s9")
    with pytest.raises(ValueError, match="unique"):
        KripkeModel(["s0", "s0"], {})
    with pytest.raises(ValueError, match="shape"):
        KripkeModel(["s0"], {"a": np.ones((2, 2), dtype=bool)})


def test_relation_input():
    pairs = KripkeModel(["s0", "s1"], {"a": [("s0", "s1"), ("s1", "s1")]})
    matrix = KripkeModel(["s0", "s1"], {"a": np.array([[0, 1], [0, 1]], dtype=bool)})
    assert pairs == matrix
    # relations are read only
    with pytest.raises(ValueError):
        pairs.relation("a")[0, 0] = True


def test_kripke_sat(small_kripke):
    assert kripke_sat(small_kripke, "s0", _f("K[a] p(a)"))
    assert kripke_sat(small_kripke, "s1", _f("!K[b] p(a)"))
    # no successor makes every box true
    assert kripke_sat(small_kripke, "s2", _f("K[a] false"))
    assert not kripke_sat(small_kripke, "s1", _f("K[b] p(a) || !p(a)"))
    assert kripke_sat(small_kripke, "s0", _f("K[a] K[a] p(a)"))
    with pytest.raises(ValueError, match="quantifier-free"):
        kripke_sat(small_kripke, "s0", parse_formula("forall x:s . p(x)"))


def test_satisfying_states(small_kripke):
    assert satisfying_states(small_kripke, _f("K[a] p(a)")) == ("s0", "s1", "s2")
    assert satisfying_states(small_kripke, _f("K[b] p(a)")) == ("s0", "s2")
    assert satisfying_states(small_kripke, _f("p(a) && !p(a)")) == ()


def test_group_modalities(small_kripke):
    assert satisfying_states(small_kripke, _f("E[a,b] p(a)")) == ("s0", "s2")
    assert satisfying_states(small_kripke, _f("S[a,b] p(a)")) == ("s0", "s1", "s2")
    # the relations of a and b share no pair
    assert satisfying_states(small_kripke, _f("D[a,b] false")) == ("s0", "s1", "s2")
    # every state reaches s2 through the union of both relations
    assert satisfying_states(small_kripke, _f("C[a,b] p(a)")) == ()
    assert satisfying_states(small_kripke, _f("C[a] p(a)")) == ("s0", "s1", "s2")


def test_frame_properties(small_kripke):
    frames = frame_properties(small_kripke)
    # s2 has no a-successor and s0 has no b-successor
    assert frames.serial == {"a": False, "b": False}
    # s0 sees s1 sees s0 for a, but s0 does not see itself
    assert frames.transitive == {"a": False, "b": False}
    assert not frames.kd4()
    closed = KripkeModel(
        small_kripke.states,
        {a: transitive_closure(small_kripke.relation(a)) for a in small_kripke.agents},
    )
    assert all(frame_properties(closed).transitive.values())


def test_transitive_closure():
    chain = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=bool)
    expected = np.array([[0, 1, 1], [0, 0, 1], [0, 0, 0]], dtype=bool)
    assert np.array_equal(transitive_closure(chain), expected)


def test_search_countermodel():
    # T fails in KD4: some model has K[a] p without p
    found = search_countermodel([_f("K[a] p"), _f("!p")])
    assert found is not None
    m, state = found
    assert frame_properties(m).kd4()
    assert kripke_sat(m, state, _f("K[a] p && !p"))
    # D holds in KD4
    assert search_countermodel([_f("K[a] p"), _f("K[a] !p")]) is None
    # 4 holds in KD4
    assert search_countermodel([_f("K[a] p"), _f("!K[a] K[a] p")]) is None
    with pytest.raises(ValueError, match="exceeds"):
        search_countermodel([_f("p && q && r")], max_atoms=2)
