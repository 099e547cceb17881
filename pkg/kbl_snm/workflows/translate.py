"""Translations between social network models and canonical Kripke models."""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping

from .. import kripke
from ..errors import KBLError, KindError
from ..snm import SocialNetworkModel
from .canonical import DEFAULT_GUARD, canonical_model
from .checker import Verdict, evaluate
from .deduction import normalize
from .syntax import (
    Formula,
    Knows,
    Not,
    Pred,
    Value,
    conjoin,
    expand_derived,
    map_atoms,
    modal_agents,
    subformulas,
    to_text,
)

__all__ = [
    "CharacteristicSet",
    "mark",
    "unmark",
    "characteristic_set",
    "characteristic_formula",
    "kt",
    "kripke_to_snm",
]

logger = logging.getLogger(__name__)

_PREFIX = {"connection": "co_", "action": "ac_"}
_KIND = {prefix: kind for kind, prefix in _PREFIX.items()}


@dataclass(frozen=True)
class CharacteristicSet:
    """Formulas describing a social network model.

    ``provenance`` maps every formula to where it came from: ``regular`` for
    environment atoms, ``connection`` and ``action`` for relation atoms and
    ``knowledge`` for ``K[i] phi`` with phi in the knowledge base of i.
    """

    formulas: FrozenSet[Formula]
    marked: bool = False
    provenance: Mapping[Formula, str] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.formulas)

    def __contains__(self, phi: Formula) -> bool:
        return phi in self.formulas


def mark(phi: Formula) -> Formula:
    """Rename connection and action predicates to ``co_`` and ``ac_`` atoms."""

    def fn(p):
        if p.kind in _PREFIX:
            return Pred(_PREFIX[p.kind] + p.name, p.args)
        return p

    return map_atoms(phi, fn)


def unmark(phi: Formula) -> Formula:
    """Undo :py:func:`mark`: ``co_`` and ``ac_`` atoms get their kind back."""

    def fn(p):
        prefix = p.name[:3]
        if prefix in _KIND:
            return Pred(p.name[3:], p.args, _KIND[prefix])
        return p

    return map_atoms(phi, fn)


def _relation_atom(name: str, i: str, j: str, kind: str, marked: bool) -> Pred:
    if marked:
        return Pred(_PREFIX[kind] + name, (Value(i), Value(j)))
    return Pred(name, (Value(i), Value(j)), kind)


def characteristic_set(snm, marked: bool = False) -> CharacteristicSet:
    """Return the characteristic set of a social network model.

    It holds the environment atoms, ``K[i] phi`` for every phi in the
    knowledge base of every agent i, and the connection and action atoms of
    every related pair. The marked set renames connection and action
    predicates everywhere, so that the model can be reconstructed from it.

    Parameters
    ----------
    snm: SocialNetworkModel
        Model to describe.
    marked: bool, optional
        Return the marked characteristic set, by default False.

    Returns
    -------
    CharacteristicSet
        The set with the provenance of each member.
    """
    provenance: Dict[Formula, str] = {}
    for p in snm.environment:
        provenance[p] = "regular"
    for agent in snm.agents:
        for f in snm.kb(agent):
            provenance[Knows(agent, mark(f) if marked else f)] = "knowledge"
    for kind, rels in (("connection", snm.connections), ("action", snm.actions)):
        for name, pairs in rels.items():
            for i, j in pairs:
                provenance[_relation_atom(name, i, j, kind, marked)] = kind
    return CharacteristicSet(frozenset(provenance), marked, provenance)


def characteristic_formula(cs: CharacteristicSet) -> Formula:
    """Return the conjunction of a characteristic set, ordered by printed form."""
    return conjoin(sorted(cs.formulas, key=to_text))


def _distinguished(snm, m: kripke.KripkeModel, phi: Formula, cs, logger=logger) -> str:
    """Locate the state of m that contains the characteristic set.

    Among the states containing the whole set, the one agreeing with the
    social network model on every subformula is preferred.
    """
    members = [expand_derived(f) for f in cs.formulas]
    candidates = [s for s in m.states if all(f in m.theta[s] for f in members)]
    if not candidates:
        raise KBLError("No state of the canonical model holds the characteristic set.")
    sub = subformulas(expand_derived(normalize(phi)))
    try:
        row = frozenset(
            f if evaluate(snm, unmark(f), logger=logger) is Verdict.TRUE else Not(f)
            for f in sub
        )
    except KBLError as err:
        logger.debug(f"Cannot evaluate the subformulas on the model: {err}")
        row = None
    for s in candidates:
        if m.theta[s] == row:
            return s
    logger.warning(
        "No canonical state agrees with the model on every subformula; "
        f"using {candidates[0]}."
    )
    return candidates[0]


def kt(
    snm,
    marked: bool = False,
    guard: int = DEFAULT_GUARD,
    budget: int = None,
    logger=logger,
):
    """Translate a social network model to the canonical KD4 model of its
    characteristic formula.

    Parameters
    ----------
    snm: SocialNetworkModel
        Model to translate.
    marked: bool, optional
        Use the marked characteristic set, which makes the result invertible
        with :py:func:`kripke_to_snm`, by default False.
    guard: int, optional
        Largest accepted number of subformulas of the characteristic formula.
    budget: int, optional
        Prover step budget.

    Returns
    -------
    KripkeModel
        Canonical model with every agent of snm, carrying the characteristic
        set and the distinguished state that holds it.
    """
    cs = characteristic_set(snm, marked)
    phi = characteristic_formula(cs)
    m = canonical_model(
        phi, guard=guard, agents=snm.agents, budget=budget, logger=logger
    )
    state = _distinguished(snm, m, phi, cs, logger=logger)
    logger.info(f"Distinguished state {state} of {m.n_states} states.")
    return kripke.KripkeModel(
        m.states,
        {a: m.relation(a) for a in m.agents},
        m.valuation,
        theta=m.theta,
        characteristic=cs.formulas,
        marked=marked,
        distinguished=state,
    )


def kripke_to_snm(m: kripke.KripkeModel, vocab=None, logger=logger):
    """Reconstruct a social network model from a marked canonical model.

    Every agent occurring in the marked characteristic set becomes an agent;
    plain atoms go to the environment, ``co_`` and ``ac_`` atoms become
    connection and action pairs, and ``K[i] phi`` puts phi into the
    knowledge base of i.

    Parameters
    ----------
    m: KripkeModel
        Model built with ``kt(snm, marked=True)``.
    vocab: Vocabulary, optional
        Vocabulary of the result; its agents are kept even if they do not
        occur in the characteristic set. If None, it is inferred.

    Returns
    -------
    SocialNetworkModel
        The reconstructed model, without policies.
    """
    if not m.marked or m.characteristic is None:
        raise KindError(
            "Only Kripke models carrying a marked characteristic set can be "
            "translated back."
        )
    agents: Dict[str, None] = {}
    if vocab is not None and "agent" in vocab.domains:
        agents.update(dict.fromkeys(vocab.domain("agent")))
    environment: List[Formula] = []
    kbs: Dict[str, List[Formula]] = {}
    relations = {"connection": {}, "action": {}}
    found = set()
    for f in sorted(m.characteristic, key=to_text):
        found.update(modal_agents(f))
        if isinstance(f, Pred) and f.name[:3] in _KIND:
            i, j = (a.name for a in f.args)
            found.update((i, j))
            kind = _KIND[f.name[:3]]
            relations[kind].setdefault(f.name[3:], set()).add((i, j))
        elif isinstance(f, Pred):
            environment.append(f)
        elif isinstance(f, Knows):
            kbs.setdefault(f.agent, []).append(unmark(f.body))
        else:
            raise KindError(f"Not a member of a characteristic set: {to_text(f)}")
        for p in subformulas(f):
            if isinstance(p, Pred) and p.name[:3] in _KIND:
                found.update(a.name for a in p.args)
    agents.update(dict.fromkeys(sorted(found - set(agents))))
    kbs["e"] = environment
    snm = SocialNetworkModel(
        agents,
        vocab,
        connections=relations["connection"],
        actions=relations["action"],
        kbs=kbs,
        logger=logger,
    )
    logger.info(f"Reconstructed a model with {len(snm.agents)} agents.")
    return snm
