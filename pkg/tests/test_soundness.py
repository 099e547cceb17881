"""Randomized checks of the prover, the checker and the translation"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbl_snm.check_config import CheckConfig
from kbl_snm.errors import InconsistentKnowledgeError, ResourceExhaustedError
from kbl_snm.kripke import frame_properties, kripke_sat, search_countermodel
from kbl_snm.snm import SocialNetworkModel
from kbl_snm.utils import parse_formula
from kbl_snm.workflows.checker import Verdict, check, check_common, evaluate
from kbl_snm.workflows.deduction import KnowledgeBase, derive, derive_group, prove
from kbl_snm.workflows.generate import (
    atom_pool,
    random_corpus,
    random_formula,
    random_kd4_instance,
    random_snm,
)
from kbl_snm.workflows.syntax import (
    And,
    Common,
    Distributed,
    EveryoneKnows,
    Forall,
    Knows,
    Not,
    Pred,
    SomeoneKnows,
    Value,
    Variable,
    Vocabulary,
    atoms,
    ground,
    implies,
    substitute,
    to_text,
)
from kbl_snm.workflows.translate import (
    characteristic_formula,
    characteristic_set,
    kripke_to_snm,
    kt,
    mark,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
# example counts come from the hypothesis profile loaded in conftest
_settings = settings(deadline=None, derandomize=True)
_few = settings(
    max_examples=max(10, settings.default.max_examples // 2),
    deadline=None,
    derandomize=True,
)

GROUP = frozenset({"a", "b"})


def _pair(seed, depth=2):
    rng = np.random.default_rng(seed)
    pool = [Pred(name) for name in "pqr"]
    return tuple(random_formula(rng, pool, ("a", "b"), depth) for _ in range(2))


def _group(rng, agents):
    k = rng.integers(1, len(agents) + 1)
    return frozenset(str(a) for a in rng.choice(agents, size=k, replace=False))


def _quantified_snm(rng, n_elements):
    """Two agents and unary atoms over a domain of n_elements elements."""
    elements = tuple(f"o{k}" for k in range(n_elements))
    vocab = Vocabulary(
        {"p": (1, "regular"), "q": (1, "regular")},
        domains={"element": elements, "agent": ("a", "b")},
    )
    pool = [Pred(name, (Value(o),), "regular") for name in "pq" for o in elements]
    environment = [p for p in pool if rng.random() < 0.5]
    snm = SocialNetworkModel(("a", "b"), vocab, kbs={"e": environment})
    for agent in snm.agents:
        for _ in range(2):
            try:
                snm = snm.kb_insert(agent, random_formula(rng, pool, snm.agents, 1))
            except InconsistentKnowledgeError:
                pass
    return snm


@_settings
@given(seeds)
def test_prover_agrees_with_small_models(seed):
    kb, phi = random_kd4_instance(np.random.default_rng(seed))
    premises = list(kb.closure())
    result = prove(premises, phi)
    found = search_countermodel(premises + [Not(phi)])
    if result.proved:
        assert found is None
        return
    m = result.countermodel
    assert m is not None
    assert frame_properties(m).kd4()
    assert all(kripke_sat(m, "w0", f) for f in premises)
    assert not kripke_sat(m, "w0", phi)


@_settings
@given(seeds)
def test_kd4_axioms(seed):
    a, b = _pair(seed)
    empty = KnowledgeBase("b")
    # distribution
    axiom = implies(Knows("a", implies(a, b)), implies(Knows("a", a), Knows("a", b)))
    assert derive(empty, axiom)
    # consistency
    assert derive(empty, implies(Knows("a", a), Not(Knows("a", Not(a)))))
    # positive introspection
    assert derive(empty, implies(Knows("a", a), Knows("a", Knows("a", a))))


@_settings
@given(seeds)
def test_necessitation(seed):
    phi, _ = _pair(seed)
    theorem = implies(phi, phi)
    assert derive(KnowledgeBase("a"), theorem)
    assert derive(KnowledgeBase("a"), Knows("b", theorem))


@_settings
@given(seeds)
def test_distributed_axioms(seed):
    a, b = _pair(seed, depth=1)
    d = Distributed
    axiom = implies(d(GROUP, implies(a, b)), implies(d(GROUP, a), d(GROUP, b)))
    assert prove([], axiom, group=GROUP).proved
    axiom = implies(d(GROUP, a), d(GROUP, d(GROUP, a)))
    assert prove([], axiom, group=GROUP).proved


@_settings
@given(seeds)
def test_distributed_knowledge(seed):
    rng = np.random.default_rng(seed)
    kb_a, phi = random_kd4_instance(rng)
    kb_b, _ = random_kd4_instance(rng, agents=("b", "a"))
    # a single member is its own distributed knowledge
    assert derive_group([kb_a], phi) == derive(kb_a, phi)
    # a larger group knows more
    if derive(kb_a, phi):
        assert derive_group([kb_a, kb_b], phi)


@_few
@given(seeds)
def test_common_knowledge(seed):
    snm = random_snm(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    pool = atom_pool(snm.vocab, relations=False)
    phi = random_formula(rng, pool, snm.agents, depth=1)
    cfg = CheckConfig.from_dict({"common_bound": 2})
    verdict = check_common(snm, snm.agents, phi, cfg)
    group = frozenset(snm.agents)
    everyone = evaluate(snm, EveryoneKnows(group, phi), cfg)
    twice = evaluate(snm, EveryoneKnows(group, EveryoneKnows(group, phi)), cfg)
    if verdict is Verdict.TRUE:
        assert everyone is Verdict.TRUE and twice is Verdict.TRUE
    if everyone is Verdict.FALSE or twice is Verdict.FALSE:
        assert verdict is Verdict.FALSE


@_few
@given(seeds)
def test_common_knowledge_fixpoint(seed):
    snm = random_snm(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    pool = atom_pool(snm.vocab, relations=False)
    phi = random_formula(rng, pool, snm.agents, depth=1)
    group = frozenset(snm.agents)
    cfg = CheckConfig.from_dict({"common_bound": 2})
    # a theorem is always common knowledge
    for psi in (phi, implies(phi, phi)):
        if check_common(snm, group, psi, cfg) is Verdict.TRUE:
            fixpoint = EveryoneKnows(group, And(psi, Common(group, psi)))
            assert check(snm, fixpoint, cfg)
    assert check_common(snm, group, implies(phi, phi), cfg) is Verdict.TRUE


@_few
@given(seeds)
def test_knowledge_axioms_on_models(seed):
    snm = random_snm(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    pool = atom_pool(snm.vocab)
    a, b = (random_formula(rng, pool, snm.agents, depth=1) for _ in range(2))
    for i in snm.agents:
        # distribution
        axiom = implies(Knows(i, implies(a, b)), implies(Knows(i, a), Knows(i, b)))
        assert check(snm, axiom)
        # consistency
        assert check(snm, implies(Knows(i, a), Not(Knows(i, Not(a)))))
        # positive introspection
        assert check(snm, implies(Knows(i, a), Knows(i, Knows(i, a))))


@_few
@given(seeds)
def test_self_awareness(seed):
    snm = random_snm(np.random.default_rng(seed))
    for i in snm.agents:
        kb = snm.kb(i)
        for f in kb:
            assert derive(kb, Knows(i, f))
            assert check(snm, Knows(i, Knows(i, f)))


@_few
@given(seeds)
def test_knowledge_extensional(seed):
    snm = random_snm(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    phi = random_formula(rng, atom_pool(snm.vocab), snm.agents, depth=1)
    group = _group(rng, snm.agents)
    known = [check(snm, Knows(i, phi)) for i in sorted(group)]
    assert check(snm, EveryoneKnows(group, phi)) is all(known)
    assert check(snm, SomeoneKnows(group, phi)) is any(known)


@_few
@given(seeds)
def test_negation(seed):
    snm = random_snm(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    pool = atom_pool(snm.vocab)
    phi = random_formula(rng, pool, snm.agents, depth=2, modalities=("K", "E", "S"))
    assert check(snm, Not(phi)) is not check(snm, phi)
    group = _group(rng, snm.agents)
    body = random_formula(rng, pool, snm.agents, depth=1)
    assert check(snm, Not(Distributed(group, body))) is not check(
        snm, Distributed(group, body)
    )


@_settings
@given(seeds)
def test_derive_monotone(seed):
    rng = np.random.default_rng(seed)
    kb, phi = random_kd4_instance(rng)
    if not derive(kb, phi):
        return
    for extra in _pair(seed + 1):
        kb = kb.add(extra)
        assert derive(kb, phi)


@_few
@given(seeds, st.integers(min_value=1, max_value=4))
def test_forall_grounding(seed, n_elements):
    rng = np.random.default_rng(seed)
    snm = _quantified_snm(rng, n_elements)
    x = Variable("x", "element")
    pool = [Pred("p", (x,), "regular"), Pred("q", (x,), "regular")]
    pool.append(Pred("p", (Value("o0"),), "regular"))
    body = random_formula(rng, pool, snm.agents, depth=2)
    phi = Forall("x", "element", body)
    domain = snm.vocab.domain("element")
    instances = [check(snm, substitute(body, "x", o)) for o in domain]
    assert check(snm, phi) is all(instances)
    # grounding is idempotent and keeps the meaning
    g = ground(snm.vocab.resolve(phi), snm.vocab)
    assert ground(g, snm.vocab) == g
    assert check(snm, g) is check(snm, phi)


@_few
@given(seeds)
def test_characteristic_formula_consistent(seed):
    snm = random_snm(np.random.default_rng(seed))
    phi = characteristic_formula(characteristic_set(snm))
    assert not derive(KnowledgeBase("e"), Not(phi))


@pytest.mark.slow
@_few
@given(seeds)
def test_round_trip(seed):
    snm = random_snm(np.random.default_rng(seed), n_atoms=2, kb_size=1, depth=1)
    try:
        m = kt(snm, marked=True, guard=20)
    except ResourceExhaustedError:
        return
    assert kripke_to_snm(m, vocab=snm.vocab).same_structure(snm)


@pytest.mark.slow
@_few
@given(seeds)
def test_translation_preserves_truth(seed):
    snm = random_snm(np.random.default_rng(seed), n_atoms=2, kb_size=1, depth=1)
    try:
        m = kt(snm, guard=20)
        marked = kt(snm, marked=True, guard=20)
    except ResourceExhaustedError:
        return
    # atoms outside the characteristic formula are not described by it
    closure = atoms(characteristic_formula(characteristic_set(snm)))
    if not closure:
        return
    pool = sorted(closure, key=to_text)
    rng = np.random.default_rng(seed + 1)
    for _ in range(5):
        phi = random_formula(rng, pool, snm.agents, depth=2)
        holds = check(snm, phi)
        assert kripke_sat(m, m.distinguished, phi) is holds
        assert kripke_sat(marked, marked.distinguished, mark(phi)) is holds


def test_print_parse_corpus():
    for snm, formulas in random_corpus(5, 3, n_formulas=10):
        for phi in formulas:
            text = to_text(phi)
            assert to_text(parse_formula(text)) == text
