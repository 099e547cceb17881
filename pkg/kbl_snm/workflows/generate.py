"""Random social network models and formulas for benchmarks and tests."""

import logging
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..errors import InconsistentKnowledgeError
from ..snm import SocialNetworkModel
from .deduction import KnowledgeBase
from .syntax import (
    And,
    Common,
    Distributed,
    EveryoneKnows,
    Formula,
    Knows,
    Not,
    Pred,
    SomeoneKnows,
    Value,
    Vocabulary,
    disjoin,
    implies,
)

__all__ = [
    "AGENT_NAMES",
    "ATOM_NAMES",
    "random_vocabulary",
    "atom_pool",
    "random_formula",
    "random_snm",
    "random_corpus",
    "random_kd4_instance",
]

logger = logging.getLogger(__name__)

AGENT_NAMES = ("a", "b", "c", "d", "f", "g")
ATOM_NAMES = ("p", "q", "r", "s", "t", "u")

_GROUP_MODALITIES = {
    "E": EveryoneKnows,
    "S": SomeoneKnows,
    "C": Common,
    "D": Distributed,
}


def random_vocabulary(n_agents: int = 2, n_atoms: int = 3) -> Vocabulary:
    """Unary regular predicates over the element ``o``, the connection
    ``friend`` and the action ``request``."""
    predicates = {name: (1, "regular") for name in ATOM_NAMES[:n_atoms]}
    predicates["friend"] = (2, "connection")
    predicates["request"] = (2, "action")
    domains = {"element": ("o",), "agent": AGENT_NAMES[:n_agents]}
    return Vocabulary(predicates=predicates, domains=domains)


def atom_pool(vocab: Vocabulary, relations: bool = True) -> List[Pred]:
    """Ground atoms of a generated vocabulary, regular atoms first."""
    pool = [
        Pred(name, (Value("o"),))
        for name, (_, kind) in vocab.predicates.items()
        if kind == "regular"
    ]
    if relations:
        agents = vocab.domain("agent")
        for name, (_, kind) in vocab.predicates.items():
            if kind == "regular":
                continue
            pool.extend(
                Pred(name, (Value(i), Value(j)), kind)
                for i in agents
                for j in agents
                if i != j
            )
    return pool


def random_formula(
    rng: np.random.Generator,
    atoms: Sequence[Pred],
    agents: Sequence[str],
    depth: int = 2,
    modalities: Sequence[str] = ("K",),
) -> Formula:
    """Draw a ground formula of nesting depth at most ``depth``.

    Parameters
    ----------
    rng: numpy.random.Generator
        Source of randomness.
    atoms: sequence of Pred
        Atoms at the leaves.
    agents: sequence of str
        Agents indexing the modalities.
    depth: int, optional
        Largest nesting depth, by default 2.
    modalities: sequence of str, optional
        Modalities to draw from among ``K``, ``E``, ``S``, ``C`` and ``D``.

    Returns
    -------
    Formula
        A ground formula.
    """
    if depth == 0 or rng.random() < 0.3:
        return atoms[rng.integers(len(atoms))]
    ops = ["not", "and", "implies", "or"] + list(modalities)
    op = ops[rng.integers(len(ops))]

    def sub():
        return random_formula(rng, atoms, agents, depth - 1, modalities)

    if op == "not":
        return Not(sub())
    if op == "and":
        return And(sub(), sub())
    if op == "implies":
        return implies(sub(), sub())
    if op == "or":
        return disjoin([sub(), sub()])
    if op == "K":
        return Knows(agents[rng.integers(len(agents))], sub())
    k = rng.integers(1, len(agents) + 1)
    group = frozenset(agents[i] for i in rng.choice(len(agents), size=k, replace=False))
    return _GROUP_MODALITIES[op](group, sub())


def random_snm(
    rng: np.random.Generator,
    n_agents: int = 2,
    n_atoms: int = 3,
    kb_size: int = 2,
    depth: int = 1,
    p_relation: float = 0.3,
    logger=logger,
) -> SocialNetworkModel:
    """Draw a valid social network model.

    Every ordered pair of distinct agents is a friend and may send a request
    with probability ``p_relation``, every regular atom is in the
    environment with probability one half, and each agent gets up to
    ``kb_size`` knowledge-modal formulas; draws that would make a knowledge
    base inconsistent are dropped.
    """
    agents = AGENT_NAMES[:n_agents]
    vocab = random_vocabulary(n_agents, n_atoms)
    pairs = [(i, j) for i in agents for j in agents if i != j]
    connections = {"friend": [pq for pq in pairs if rng.random() < p_relation]}
    actions = {"request": [pq for pq in pairs if rng.random() < p_relation]}
    regular = atom_pool(vocab, relations=False)
    environment = [p for p in regular if rng.random() < 0.5]
    snm = SocialNetworkModel(
        agents,
        vocab,
        connections=connections,
        actions=actions,
        kbs={"e": environment},
        logger=logger,
    )
    atoms = atom_pool(vocab)
    for agent in agents:
        for _ in range(kb_size):
            f = random_formula(rng, atoms, agents, depth)
            try:
                snm = snm.kb_insert(agent, f)
            except InconsistentKnowledgeError:
                logger.debug(f"Dropped inconsistent draw {f} for {agent}.")
    return snm


def random_corpus(
    seed: int,
    n_models: int,
    n_formulas: int = 5,
    modalities: Sequence[str] = ("K", "E", "S", "D"),
    formula_depth: int = 2,
    **kwargs,
) -> Iterator[Tuple[SocialNetworkModel, List[Formula]]]:
    """Yield models with query formulas; a fixed seed yields the same corpus.

    Keyword arguments are passed to :py:func:`random_snm`.
    """
    rng = np.random.default_rng(seed)
    for _ in range(n_models):
        snm = random_snm(rng, **kwargs)
        atoms = atom_pool(snm.vocab)
        formulas = [
            random_formula(rng, atoms, snm.agents, formula_depth, modalities)
            for _ in range(n_formulas)
        ]
        yield snm, formulas


def random_kd4_instance(
    rng: np.random.Generator,
    agents: Sequence[str] = ("a", "b"),
    n_atoms: int = 3,
    kb_size: int = 2,
    depth: int = 2,
) -> Tuple[KnowledgeBase, Formula]:
    """Draw a knowledge base of the first agent and a query over nullary atoms."""
    atoms = [Pred(name) for name in ATOM_NAMES[:n_atoms]]
    formulas = [random_formula(rng, atoms, agents, depth) for _ in range(kb_size)]
    return KnowledgeBase(agents[0], formulas), random_formula(rng, atoms, agents, depth)
