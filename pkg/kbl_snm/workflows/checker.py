"""Satisfaction of knowledge-based formulas in social network models."""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..check_config import CheckConfig
from ..errors import BoundExhaustedError, VocabularyError
from .deduction import KnowledgeBase, derive, derive_group, prove
from .syntax import (
    FALSE,
    TRUE,
    And,
    Common,
    Distributed,
    EveryoneKnows,
    Falsum,
    Forall,
    Formula,
    GroupModality,
    Knows,
    Not,
    Pred,
    SomeoneKnows,
    conjoin,
    contains,
    ground,
    to_text,
)

__all__ = [
    "Verdict",
    "DEFAULT_COMMON_BOUND",
    "outer_k",
    "unroll",
    "evaluate",
    "check",
    "check_common",
    "outer_verdicts",
]

logger = logging.getLogger(__name__)

DEFAULT_COMMON_BOUND = 4


class Verdict(Enum):
    """Three-valued outcome of a check."""

    FALSE = "false"
    TRUE = "true"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE

    def __invert__(self) -> "Verdict":
        if self is Verdict.UNKNOWN:
            return self
        return Verdict.FALSE if self is Verdict.TRUE else Verdict.TRUE

    def __and__(self, other: "Verdict") -> "Verdict":
        if Verdict.FALSE in (self, other):
            return Verdict.FALSE
        if Verdict.UNKNOWN in (self, other):
            return Verdict.UNKNOWN
        return Verdict.TRUE

    def __or__(self, other: "Verdict") -> "Verdict":
        return ~(~self & ~other)


def outer_k(phi: Formula) -> FrozenSet[Formula]:
    """Return the knowledge subformulas of phi not under another modality."""
    found = set()

    def rec(f):
        if isinstance(f, Knows):
            found.add(f)
        elif isinstance(f, Not):
            rec(f.body)
        elif isinstance(f, And):
            rec(f.left)
            rec(f.right)
        elif isinstance(f, Forall):
            rec(f.body)

    rec(phi)
    return frozenset(found)


def unroll(group: Iterable[str], phi: Formula, k: int) -> Formula:
    """Return E_G applied k times to phi."""
    for _ in range(k):
        phi = EveryoneKnows(frozenset(group), phi)
    return phi


class _Checker:
    """Evaluates ground formulas on one model, caching prover calls."""

    def __init__(self, snm, common_bound: int, budget: int, logger=logger):
        self.snm = snm
        self.common_bound = common_bound
        self.budget = budget
        self.logger = logger
        self.cache: Dict[Tuple, bool] = {}

    def kb(self, agent: str) -> KnowledgeBase:
        if agent not in self.snm.agents:
            raise VocabularyError(f"Unknown agent '{agent}'.")
        return self.snm.kb(agent)

    def derive(self, agent: str, phi: Formula) -> bool:
        key = (agent, phi)
        if key not in self.cache:
            self.cache[key] = derive(self.kb(agent), phi, self.budget, self.logger)
        return self.cache[key]

    def derive_group(self, group: FrozenSet[str], phi: Formula) -> bool:
        key = (group, phi)
        if key not in self.cache:
            kbs = [self.kb(i) for i in sorted(group)]
            self.cache[key] = derive_group(kbs, phi, self.budget, self.logger)
        return self.cache[key]

    def prefetch(self, members: Iterable[Formula]) -> None:
        """Run the prover calls of independent knowledge subformulas in threads."""
        jobs = [
            (f.agent, f.body)
            for f in sorted(members, key=to_text)
            if not contains(f.body, Common, Distributed)
        ]
        with ThreadPoolExecutor() as pool:
            futures = [
                pool.submit(derive, self.kb(a), body, self.budget, self.logger)
                for a, body in jobs
            ]
            for (a, body), future in zip(jobs, futures):
                self.cache[(a, body)] = future.result()

    def evaluate(self, f: Formula) -> Verdict:
        if isinstance(f, Pred):
            return Verdict.of(self.atom(f))
        if isinstance(f, Falsum):
            return Verdict.FALSE
        if isinstance(f, Not):
            return ~self.evaluate(f.body)
        if isinstance(f, And):
            left = self.evaluate(f.left)
            if left is Verdict.FALSE:
                return left
            return left & self.evaluate(f.right)
        if isinstance(f, Knows):
            return self.knows(f.agent, f.body)
        if isinstance(f, EveryoneKnows):
            verdict = Verdict.TRUE
            for i in sorted(f.group):
                verdict = verdict & self.knows(i, f.body)
                if verdict is Verdict.FALSE:
                    break
            return verdict
        if isinstance(f, SomeoneKnows):
            verdict = Verdict.FALSE
            for i in sorted(f.group):
                verdict = verdict | self.knows(i, f.body)
                if verdict is Verdict.TRUE:
                    break
            return verdict
        if isinstance(f, Distributed):
            return Verdict.of(self.derive_group(f.group, f.body))
        if isinstance(f, Common):
            return self.common(f.group, f.body)
        raise ValueError(f"Formula must be ground: {to_text(f)}")

    def atom(self, p: Pred) -> bool:
        if p.kind == "regular":
            return p in self.snm.environment
        i, j = (a.name for a in p.args)
        if p.kind == "connection":
            return self.snm.connection_holds(p.name, i, j)
        return self.snm.action_holds(p.name, i, j)

    def knows(self, agent: str, body: Formula) -> Verdict:
        if not contains(body, Common):
            return Verdict.of(self.derive(agent, body))
        # common knowledge under a knowledge modality is bracketed between a
        # sufficient and a necessary Common-free replacement
        if self.derive(agent, self.bracket(body, strong=True)):
            return Verdict.TRUE
        if not self.derive(agent, self.bracket(body, strong=False)):
            return Verdict.FALSE
        return Verdict.UNKNOWN

    def bracket(self, f: Formula, strong: bool) -> Formula:
        """Replace common knowledge by a stronger (or weaker) Common-free formula.

        Polarity flips under negation so that the whole formula becomes
        stronger (or weaker) than f.
        """
        if isinstance(f, Common):
            return self.sufficient(f) if strong else self.necessary(f)
        if isinstance(f, Not):
            return Not(self.bracket(f.body, not strong), sugar=f.sugar)
        if isinstance(f, And):
            return And(self.bracket(f.left, strong), self.bracket(f.right, strong))
        if isinstance(f, Knows):
            return Knows(f.agent, self.bracket(f.body, strong))
        if isinstance(f, GroupModality):
            return type(f)(f.group, self.bracket(f.body, strong))
        return f

    def necessary(self, f: Common) -> Formula:
        if contains(f.body, Common):
            return TRUE
        k_max = self.common_bound
        return conjoin(unroll(f.group, f.body, k) for k in range(1, k_max + 1))

    def sufficient(self, f: Common) -> Formula:
        if contains(f.body, Common, Distributed):
            return FALSE
        if prove([], f.body, budget=self.budget, logger=self.logger).proved:
            return TRUE
        if self.invariant(f.group, f.body):
            return conjoin(
                Knows(m, conjoin(self.kb(m).formulas)) for m in sorted(f.group)
            )
        return FALSE

    def invariant(self, group: FrozenSet[str], phi: Formula) -> bool:
        """Every member derives phi and what every other member knows."""
        for j in sorted(group):
            if not self.derive(j, phi):
                return False
            for m in sorted(group - {j}):
                if not self.derive(j, Knows(m, conjoin(self.kb(m).formulas))):
                    return False
        return True

    def common(self, group: FrozenSet[str], phi: Formula) -> Verdict:
        """Common knowledge of phi by group, unrolled up to the bound."""
        for i in sorted(group):
            self.kb(i)
        if not contains(phi, Common, Distributed):
            if prove([], phi, budget=self.budget, logger=self.logger).proved:
                return Verdict.TRUE
            if self.invariant(group, phi):
                return Verdict.TRUE
        for k in range(1, self.common_bound + 1):
            for i in sorted(group):
                if self.knows(i, unroll(group, phi, k - 1)) is Verdict.FALSE:
                    self.logger.debug(
                        f"Common knowledge of {to_text(phi)} fails at depth {k} "
                        f"for agent {i}."
                    )
                    return Verdict.FALSE
        return Verdict.UNKNOWN


def _prepare(snm, phi: Formula) -> Formula:
    return ground(snm.vocab.resolve(phi), snm.vocab)


def evaluate(snm, phi: Formula, cfg=None, logger=logger) -> Verdict:
    """Three-valued satisfaction of phi in a social network model.

    Atoms of regular predicates hold when they are in the environment's
    knowledge base, connection and action atoms when the pair is in the
    relation. ``K[i] phi`` holds when the knowledge base of i derives phi,
    E and S are the conjunction and disjunction over the group, D is
    derivability from the union of the group's knowledge bases and C is
    decided as in :py:func:`check_common`. Only common knowledge can make
    the outcome unknown.

    Parameters
    ----------
    snm: SocialNetworkModel
        Model to check.
    phi: Formula
        Closed formula; it is resolved against the vocabulary and grounded
        once.
    cfg: CheckConfig, optional
        Common knowledge bound, prover budget and parallel evaluation.

    Returns
    -------
    Verdict
        TRUE, FALSE or UNKNOWN.
    """
    cfg = cfg or CheckConfig()
    phi = _prepare(snm, phi)
    checker = _Checker(snm, cfg.common_bound, cfg.step_budget, logger)
    if cfg.parallel:
        checker.prefetch(outer_k(phi))
    verdict = checker.evaluate(phi)
    logger.debug(f"{to_text(phi)}: {verdict.value}")
    return verdict


def check(snm, phi: Formula, cfg=None, logger=logger) -> bool:
    """Return True if phi holds in the model.

    Raises
    ------
    BoundExhaustedError
        If common knowledge in phi cannot be decided within the bound.
    """
    verdict = evaluate(snm, phi, cfg, logger)
    if verdict is Verdict.UNKNOWN:
        raise BoundExhaustedError(
            f"Common knowledge in {to_text(phi)} is undecided within the bound."
        )
    return verdict is Verdict.TRUE


def check_common(
    snm, group: Iterable[str], phi: Formula, cfg=None, logger=logger
) -> Verdict:
    """Decide common knowledge of phi by a group, as far as possible.

    Common knowledge is TRUE if phi is a KD4 theorem, or if every member
    derives phi and every member derives ``K[m]`` of the conjunction of the
    knowledge base of every other member m; by induction every level of
    ``E_G`` then holds. Otherwise ``E_G^k phi`` is checked for k up to the
    bound and the result is FALSE at the first level that fails, UNKNOWN if
    none fails.

    Parameters
    ----------
    snm: SocialNetworkModel
        Model to check.
    group: iterable of str
        Non-empty group of agents.
    phi: Formula
        Closed formula.
    cfg: CheckConfig, optional
        Provides the bound ``common_bound``.

    Returns
    -------
    Verdict
        TRUE, FALSE or UNKNOWN.
    """
    group = frozenset(group)
    if not group:
        raise ValueError("check_common requires a non-empty group.")
    cfg = cfg or CheckConfig()
    checker = _Checker(snm, cfg.common_bound, cfg.step_budget, logger)
    return checker.common(group, _prepare(snm, phi))


def outer_verdicts(
    snm, phi: Formula, cfg=None, logger=logger
) -> Dict[str, Optional[bool]]:
    """Return the verdict of every member of outer_k(phi), keyed by its text.

    Undecided members map to None.
    """
    cfg = cfg or CheckConfig()
    phi = _prepare(snm, phi)
    checker = _Checker(snm, cfg.common_bound, cfg.step_budget, logger)
    result = {}
    for f in sorted(outer_k(phi), key=to_text):
        verdict = checker.evaluate(f)
        if verdict is Verdict.UNKNOWN:
            result[to_text(f)] = None
        else:
            result[to_text(f)] = verdict is Verdict.TRUE
    return result
