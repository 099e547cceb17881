"""
SocialNetworkModel class
"""
from __future__ import annotations

import itertools
import logging
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, List, Mapping, Tuple, Union

from .check_config import CheckConfig
from .errors import (
    InconsistentKnowledgeError,
    KBLError,
    KindError,
    ResourceExhaustedError,
    VocabularyError,
)
from .workflows.checker import check, evaluate, Verdict
from .workflows.deduction import KnowledgeBase, consistent, derive
from .workflows.syntax import (
    RESERVED_PREFIXES,
    Common,
    Constant,
    Distributed,
    Forall,
    Formula,
    Not,
    Pred,
    Value,
    Vocabulary,
    atoms,
    contains,
    free_variables,
    ground,
    modal_agents,
    to_text,
)

__all__ = ["SocialNetworkModel", "SNM", "infer_vocabulary"]

logger = logging.getLogger(__name__)

Pairs = Iterable[Tuple[str, str]]


def infer_vocabulary(
    agents: Iterable[str],
    connections: Mapping[str, Pairs] = None,
    actions: Mapping[str, Pairs] = None,
    formulas: Iterable[Formula] = (),
) -> Vocabulary:
    """Infer a vocabulary from the predicates and arguments in use.

    Predicates get the arity and kind they are used with, relation names
    are binary connection or action predicates, and every argument that is
    not an agent becomes an element of the sort ``element``.
    """
    agents = tuple(agents)
    predicates = {}
    elements = {}
    for f in formulas:
        for p in sorted(atoms(f), key=to_text):
            predicates.setdefault(p.name, (len(p.args), p.kind))
            for a in p.args:
                if isinstance(a, (Constant, Value)) and a.name not in agents:
                    elements.setdefault(a.name, None)
    for kind, rels in (("connection", connections), ("action", actions)):
        for name in rels or {}:
            predicates[name] = (2, kind)
    domains = {"agent": agents}
    if elements:
        domains["element"] = tuple(elements)
    return Vocabulary(predicates=predicates, domains=domains)


class SocialNetworkModel:
    """The social network model (SNM) class holds agents, their connection and
    action relations and the knowledge base of every agent and of the
    environment. Models are immutable: updates return a new model.
    """

    _ENVIRONMENT = "e"
    _AGENT_SORT = "agent"

    def __init__(
        self,
        agents: Iterable[str],
        vocab: Vocabulary = None,
        connections: Mapping[str, Pairs] = None,
        actions: Mapping[str, Pairs] = None,
        kbs: Mapping[str, Union[KnowledgeBase, Iterable[Formula]]] = None,
        policies: Mapping[str, Iterable[str]] = None,
        logger=logger,
    ):
        """
        Parameters
        ----------
        agents: iterable of str
            Agent names; ``e`` is reserved for the environment.
        vocab: Vocabulary, optional
            Predicates, functions, constants and domains. The sort ``agent``
            is always set to the agents. Relation names missing from the
            vocabulary are declared as binary predicates of their kind. If
            None, the vocabulary is inferred from the model contents.
        connections, actions: dict, optional
            Relation name to ``(agent, agent)`` pairs.
        kbs: dict, optional
            Agent (or ``e``) to knowledge base or iterable of formulas.
            Closed formulas are resolved and grounded where the vocabulary
            allows it.
        policies: dict, optional
            Agent to opaque policy lines; carried but never interpreted.
        """
        self.logger = logger
        agents = tuple(dict.fromkeys(agents))
        if self._ENVIRONMENT in agents:
            raise VocabularyError(
                f"'{self._ENVIRONMENT}' is reserved for the environment agent."
            )
        connections = {
            k: frozenset(map(tuple, v)) for k, v in (connections or {}).items()
        }
        actions = {k: frozenset(map(tuple, v)) for k, v in (actions or {}).items()}
        raw = {}
        for owner, kb in (kbs or {}).items():
            raw[owner] = tuple(kb.formulas if isinstance(kb, KnowledgeBase) else kb)
        if vocab is None:
            formulas = itertools.chain.from_iterable(raw.values())
            vocab = infer_vocabulary(agents, connections, actions, formulas)
        predicates = dict(vocab.predicates)
        for kind, rels in (("connection", connections), ("action", actions)):
            for name in rels:
                predicates.setdefault(name, (2, kind))
        vocab = Vocabulary(predicates, vocab.functions, vocab.constants, vocab.domains)
        self._vocab = vocab.with_domain(self._AGENT_SORT, agents)
        self._agents = agents
        self._connections = MappingProxyType(connections)
        self._actions = MappingProxyType(actions)
        kbs = {}
        for owner in agents + (self._ENVIRONMENT,):
            formulas = [self._settle(f) for f in raw.pop(owner, ())]
            kbs[owner] = KnowledgeBase(owner, formulas)
        if raw:
            raise VocabularyError(
                f"Knowledge bases of undeclared agents: {', '.join(sorted(raw))}."
            )
        self._kbs = MappingProxyType(kbs)
        self._policies = MappingProxyType(
            {a: tuple(lines) for a, lines in (policies or {}).items()}
        )

    def _settle(self, phi: Formula) -> Formula:
        """Resolve and ground a closed formula, if the vocabulary allows it."""
        if free_variables(phi):
            return phi
        try:
            return ground(self._vocab.resolve(phi), self._vocab)
        except KBLError as err:
            self.logger.warning(f"Kept {to_text(phi)} as given: {err}")
            return phi

    ## PROPERTIES

    @property
    def agents(self) -> Tuple[str, ...]:
        """Returns the agents, without the environment."""
        return self._agents

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    @property
    def connections(self) -> Mapping[str, FrozenSet[Tuple[str, str]]]:
        return self._connections

    @property
    def actions(self) -> Mapping[str, FrozenSet[Tuple[str, str]]]:
        return self._actions

    @property
    def kbs(self) -> Mapping[str, KnowledgeBase]:
        """Returns the knowledge bases of all agents and the environment."""
        return self._kbs

    @property
    def environment(self) -> KnowledgeBase:
        return self._kbs[self._ENVIRONMENT]

    @property
    def policies(self) -> Mapping[str, Tuple[str, ...]]:
        return self._policies

    def kb(self, agent: str) -> KnowledgeBase:
        """Returns the knowledge base of an agent or of the environment."""
        if agent not in self._kbs:
            raise VocabularyError(f"Unknown agent '{agent}'.")
        return self._kbs[agent]

    def _replace(self, **kwargs) -> "SocialNetworkModel":
        args = dict(
            agents=self._agents,
            vocab=self._vocab,
            connections=self._connections,
            actions=self._actions,
            kbs=self._kbs,
            policies=self._policies,
            logger=self.logger,
        )
        args.update(kwargs)
        return SocialNetworkModel(**args)

    def __repr__(self) -> str:
        n_rel = sum(len(p) for p in self._connections.values()) + sum(
            len(p) for p in self._actions.values()
        )
        n_kb = sum(len(kb) for kb in self._kbs.values())
        return (
            f"SocialNetworkModel(agents={list(self._agents)}, "
            f"relation_pairs={n_rel}, kb_formulas={n_kb})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialNetworkModel):
            return NotImplemented
        return (
            self.same_structure(other)
            and self._vocab == other._vocab
            and dict(self._policies) == dict(other._policies)
        )

    ## RELATIONS

    def _relation(self, kind: str, name: str) -> FrozenSet[Tuple[str, str]]:
        declared = self._vocab.predicates.get(name)
        if declared is None or declared[1] != kind:
            raise VocabularyError(f"'{name}' is not declared as a {kind}.")
        rels = self._connections if kind == "connection" else self._actions
        return rels.get(name, frozenset())

    def connection_holds(self, name: str, i: str, j: str) -> bool:
        """Returns True if connection ``name`` holds from agent i to agent j."""
        return (i, j) in self._relation("connection", name)

    def action_holds(self, name: str, i: str, j: str) -> bool:
        """Returns True if agent i may perform action ``name`` on agent j."""
        return (i, j) in self._relation("action", name)

    ## KNOWLEDGE

    def kb_insert(self, agent: str, phi: Formula) -> "SocialNetworkModel":
        """Returns a new model where the knowledge base of agent holds phi.

        The formula is resolved against the vocabulary and grounded first.
        Insertion into an agent's knowledge base is rejected if the extended
        knowledge base derives the negation of the formula. The environment
        only accepts ground atoms of regular predicates.

        Parameters
        ----------
        agent: str
            Agent name or ``e``.
        phi: Formula
            Closed formula.

        Returns
        -------
        SocialNetworkModel
            Updated copy of the model.
        """
        if free_variables(phi):
            raise ValueError(f"Cannot insert a formula with free variables: {phi}")
        kb = self.kb(agent)
        if contains(phi, Common, Distributed):
            raise KindError(
                f"Knowledge bases cannot hold common or distributed knowledge: {phi}"
            )
        g = ground(self._vocab.resolve(phi), self._vocab)
        undeclared = modal_agents(g) - set(self._agents)
        if undeclared:
            raise VocabularyError(
                f"Modalities of undeclared agents: {', '.join(sorted(undeclared))}."
            )
        if agent == self._ENVIRONMENT:
            if not isinstance(g, Pred) or g.kind != "regular":
                raise KindError(
                    f"The environment only holds atoms of regular predicates, got {g}"
                )
        elif derive(kb.add(g), Not(g), logger=self.logger):
            raise InconsistentKnowledgeError(
                f"Knowledge of {agent} would derive the negation of {g}",
                agent=agent,
                formula=g,
            )
        self.logger.debug(f"Inserted {g} into the knowledge base of {agent}.")
        kbs = dict(self._kbs)
        kbs[agent] = kb.add(g)
        return self._replace(kbs=kbs)

    def validate(self) -> List[str]:
        """Returns diagnostics of every violated model invariant.

        An empty list means the model is well formed and every agent's
        knowledge base is consistent.
        """
        diagnostics = []
        vocab = self._vocab
        if not self._agents:
            diagnostics.append("no agents declared")
        for sort, elements in vocab.domains.items():
            if len(elements) == 0:
                diagnostics.append(f"domain '{sort}' is empty")
        for name, (arity, kind) in vocab.predicates.items():
            if name.startswith(RESERVED_PREFIXES):
                diagnostics.append(f"predicate '{name}' uses a reserved prefix")
            if kind != "regular" and arity != 2:
                diagnostics.append(f"{kind} predicate '{name}' must be binary")
        for name, func in vocab.functions.items():
            sorts = [s for s in func.sorts + (func.result,) if s not in vocab.domains]
            if sorts:
                diagnostics.append(
                    f"function '{name}' uses unknown sorts {', '.join(sorts)}"
                )
                continue
            domains = [vocab.domains[s] for s in func.sorts]
            for args in itertools.product(*domains):
                if args not in func.table:
                    diagnostics.append(
                        f"function '{name}' is not total: no value for "
                        f"({','.join(args)})"
                    )
                elif func.table[args] not in vocab.domains[func.result]:
                    diagnostics.append(
                        f"function '{name}' maps ({','.join(args)}) outside "
                        f"sort '{func.result}'"
                    )
        relations = (("connection", self._connections), ("action", self._actions))
        for kind, rels in relations:
            for name, pairs in sorted(rels.items()):
                if vocab.predicates.get(name, (None, None))[1] != kind:
                    diagnostics.append(f"{kind} '{name}' is not declared as a {kind}")
                for i, j in sorted(pairs):
                    if i not in self._agents or j not in self._agents:
                        diagnostics.append(
                            f"{kind} '{name}' relates undeclared agents ({i},{j})"
                        )
        for f in self.environment:
            if not isinstance(f, Pred) or f.kind != "regular" or free_variables(f):
                diagnostics.append(
                    f"environment: not a ground atom of a regular predicate: {f}"
                )
        for agent in self._agents:
            kb = self._kbs[agent]
            errors = []
            for f in kb:
                if free_variables(f) or contains(f, Forall):
                    errors.append(f"agent '{agent}': non-ground formula {f}")
                elif contains(f, Common, Distributed):
                    errors.append(
                        f"agent '{agent}': common or distributed knowledge in {f}"
                    )
                elif modal_agents(f) - set(self._agents):
                    errors.append(
                        f"agent '{agent}': modality of an undeclared agent in {f}"
                    )
                else:
                    try:
                        vocab.resolve(f)
                    except KBLError as err:
                        errors.append(f"agent '{agent}': {err}")
            if not errors:
                try:
                    if not consistent(kb, logger=self.logger):
                        errors.append(f"agent '{agent}': inconsistent knowledge base")
                except ResourceExhaustedError as err:
                    errors.append(f"agent '{agent}': {err}")
            diagnostics.extend(errors)
        return diagnostics

    def same_structure(self, other: "SocialNetworkModel") -> bool:
        """Returns True if both models have the same agents, knowledge bases and
        non-empty relations; vocabulary and policies are not compared."""

        def nonempty(rels):
            return {name: pairs for name, pairs in rels.items() if pairs}

        return (
            set(self._agents) == set(other._agents)
            and dict(self._kbs) == dict(other._kbs)
            and nonempty(self._connections) == nonempty(other._connections)
            and nonempty(self._actions) == nonempty(other._actions)
        )

    ## CHECKING

    def check(self, phi: Formula, cfg: CheckConfig = None) -> bool:
        """Returns True if phi holds in the model, see
        :py:func:`~kbl_snm.workflows.checker.check`."""
        return check(self, phi, cfg, logger=self.logger)

    def evaluate(self, phi: Formula, cfg: CheckConfig = None) -> Verdict:
        """Returns the three-valued verdict of phi in the model."""
        return evaluate(self, phi, cfg, logger=self.logger)

    ## I/O

    @classmethod
    def read(cls, fn: str, logger=logger) -> "SocialNetworkModel":
        """Read a model from a ``.snm`` file."""
        from .utils import read_model

        return read_model(fn, logger=logger)

    def write(self, fn: str) -> None:
        """Write the model to a ``.snm`` file."""
        from .utils import write_model

        write_model(fn, self)
        self.logger.info(f"Model written to {fn}.")

    def to_text(self) -> str:
        """Returns the model in the ``.snm`` text format."""
        from .utils import print_model

        return print_model(self)


SNM = SocialNetworkModel
