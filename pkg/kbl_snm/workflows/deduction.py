"""Derivability from knowledge bases in multi-agent KD4.

The prover is a labelled tableau over serial and transitive frames. A
knowledge base derives a formula when the tableau for its self-aware
closure together with the negated formula closes.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from ..errors import KindError, ResourceExhaustedError, UnsupportedModalityError
from .. import kripke
from .syntax import (
    FALSE,
    And,
    Common,
    Distributed,
    Falsum,
    Forall,
    Formula,
    Knows,
    Not,
    Pred,
    expand_derived,
    formula_key,
    free_variables,
    modal_agents,
    subformulas,
    to_text,
)

__all__ = [
    "DEFAULT_STEP_BUDGET",
    "default_step_budget",
    "KnowledgeBase",
    "Derivation",
    "Tableau",
    "normalize",
    "prove",
    "derive",
    "consistent",
    "group_premises",
    "derive_group",
]

logger = logging.getLogger(__name__)

DEFAULT_STEP_BUDGET = 200000

Index = Union[str, FrozenSet[str]]


def default_step_budget() -> int:
    """Return the step budget, overridden by the KBL_STEP_BUDGET variable."""
    value = os.environ.get("KBL_STEP_BUDGET")
    return int(value) if value else DEFAULT_STEP_BUDGET


class KnowledgeBase:
    """Finite set of ground formulas explicitly known by one agent.

    Formulas keep their insertion order; equality is set equality.
    """

    def __init__(self, owner: str, formulas: Iterable[Formula] = ()):
        self.owner = owner
        self.formulas = tuple(dict.fromkeys(formulas))

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    def __contains__(self, phi: Formula) -> bool:
        return phi in self.formulas

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.owner == other.owner and set(self.formulas) == set(other.formulas)

    def __hash__(self) -> int:
        return hash((self.owner, frozenset(self.formulas)))

    def __repr__(self) -> str:
        body = "; ".join(to_text(f) for f in self.formulas)
        return f"KnowledgeBase({self.owner}: {{{body}}})"

    def add(self, phi: Formula) -> "KnowledgeBase":
        """Return a new knowledge base that also holds phi."""
        return KnowledgeBase(self.owner, self.formulas + (phi,))

    def closure(self) -> Tuple[Formula, ...]:
        """Return the premises together with K_owner of every premise."""
        return self.formulas + tuple(Knows(self.owner, f) for f in self.formulas)


@dataclass
class Derivation:
    """Outcome of a single prover run."""

    proved: bool
    steps: int
    countermodel: Optional["kripke.KripkeModel"] = None
    trace: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.proved

    def text(self) -> str:
        """Return the trace followed by the verdict."""
        verdict = "closed" if self.proved else "open"
        return "\n".join(self.trace + [f"tableau {verdict} after {self.steps} steps"])


## TABLEAU ##


class _World:
    __slots__ = ("literals", "edges")

    def __init__(self, literals: FrozenSet[Formula]):
        self.literals = literals
        self.edges: List[Tuple[Index, "_World"]] = []


def _box(f: Formula) -> Optional[Tuple[Index, Formula]]:
    if isinstance(f, Knows):
        return f.agent, f.body
    if isinstance(f, Distributed):
        return f.group, f.body
    return None


def _index_key(index: Index) -> Tuple[int, str]:
    if isinstance(index, str):
        return 0, index
    return 1, ",".join(sorted(index))


class Tableau:
    """Tableau for satisfiability of formula sets over serial-transitive frames.

    Agent boxes are KD4: a world holding a box of an agent always gets a
    successor for that agent. Distributed boxes are K4. A world whose
    label repeats the label of one of its ancestors is blocked and points
    back to that ancestor. Unsatisfiable labels are cached, so one tableau
    can answer several queries.

    Parameters
    ----------
    budget: int, optional
        Maximum number of rule applications, by default from
        :py:func:`default_step_budget`.
    trace: bool, optional
        Record a textual trace of the expansion, by default False.
    """

    def __init__(self, budget: int = None, trace: bool = False):
        self.budget = default_step_budget() if budget is None else budget
        self.steps = 0
        self.lines: Optional[List[str]] = [] if trace else None
        self._unsat = set()
        self._keys: Dict[Formula, Tuple[int, str]] = {}

    def satisfiable(self, formulas: Iterable[Formula]) -> Optional[_World]:
        """Return the root of an open tableau for formulas, or None."""
        return self._sat(frozenset(formulas), [], 0)

    def _key(self, f: Formula) -> Tuple[int, str]:
        key = self._keys.get(f)
        if key is None:
            key = self._keys[f] = formula_key(f)
        return key

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise ResourceExhaustedError(
                f"Prover step budget of {self.budget} rule applications exceeded."
            )

    def _log(self, depth: int, message: str):
        if self.lines is not None:
            self.lines.append("  " * depth + message)

    def _sat(self, label, path, depth) -> Optional[_World]:
        if label in self._unsat:
            self._log(depth, "known unsatisfiable label")
            return None
        if self.lines is not None:
            texts = ", ".join(to_text(f) for f in sorted(label, key=self._key))
            self._log(depth, f"world {{{texts}}}")
        for literals in self._saturate(sorted(label, key=self._key), depth):
            world = _World(literals)
            if self._expand(world, label, path, depth):
                return world
        self._unsat.add(label)
        return None

    def _saturate(self, todo: List[Formula], depth: int, literals=frozenset()):
        todo = list(todo)
        lits = set(literals)
        betas = []
        while todo:
            f = todo.pop(0)
            self._tick()
            if isinstance(f, Falsum):
                self._log(depth + 1, "clash on false")
                return
            if isinstance(f, And):
                todo[:0] = [f.left, f.right]
                continue
            if isinstance(f, Not):
                g = f.body
                if isinstance(g, Falsum):
                    continue
                if isinstance(g, Not):
                    todo.insert(0, g.body)
                    continue
                if isinstance(g, And):
                    betas.append(f)
                    continue
                if g in lits:
                    self._log(depth + 1, f"clash on {to_text(g)}")
                    return
            elif Not(f) in lits:
                self._log(depth + 1, f"clash on {to_text(f)}")
                return
            lits.add(f)
        if not betas:
            yield frozenset(lits)
            return
        betas.sort(key=self._key)
        beta, rest = betas[0], betas[1:]
        for alt in (Not(beta.body.left), Not(beta.body.right)):
            self._log(depth + 1, f"branch {to_text(alt)}")
            yield from self._saturate([alt] + rest, depth, frozenset(lits))

    def _expand(self, world: _World, label, path, depth) -> bool:
        boxes: Dict[Index, List[Formula]] = {}
        diamonds = []
        for f in sorted(world.literals, key=self._key):
            box = _box(f)
            if box is not None:
                boxes.setdefault(box[0], []).append(f)
            elif isinstance(f, Not) and _box(f.body) is not None:
                diamonds.append(_box(f.body))

        def carried(index):
            return {g for b in boxes.get(index, []) for g in (b, _box(b)[1])}

        successors = []
        for index, body in diamonds:
            successors.append((index, frozenset({Not(body)} | carried(index))))
        seen = {index for index, _ in diamonds}
        for index in sorted(boxes, key=_index_key):
            # seriality for agents only
            if isinstance(index, str) and index not in seen:
                successors.append((index, frozenset(carried(index))))

        path = path + [(label, world)]
        for index, succ in successors:
            self._tick()
            target = next((w for lab, w in path if lab == succ), None)
            if target is not None:
                self._log(depth + 1, f"blocked successor for {_index_text(index)}")
            else:
                target = self._sat(succ, path, depth + 1)
                if target is None:
                    return False
            world.edges.append((index, target))
        return True


def _index_text(index: Index) -> str:
    return index if isinstance(index, str) else "D[" + ",".join(sorted(index)) + "]"


def _countermodel(
    root: _World, agents: Iterable[str]
) -> Optional["kripke.KripkeModel"]:
    """Read a serial-transitive Kripke model off an open tableau."""
    worlds = [root]
    order = {id(root): 0}
    for world in worlds:
        for index, target in world.edges:
            if not isinstance(index, str):
                return None
            if id(target) not in order:
                order[id(target)] = len(worlds)
                worlds.append(target)
    n = len(worlds)
    names = [f"w{k}" for k in range(n)]
    agents = sorted(set(agents) | {i for w in worlds for i, _ in w.edges})
    relations = {}
    for agent in agents:
        rel = np.zeros((n, n), dtype=bool)
        for k, world in enumerate(worlds):
            for index, target in world.edges:
                if index == agent:
                    rel[k, order[id(target)]] = True
        rel = kripke.transitive_closure(rel)
        idle = ~rel.any(axis=1)
        rel[idle, idle] = True
        relations[agent] = rel
    valuation = {
        name: frozenset(f for f in w.literals if isinstance(f, Pred))
        for name, w in zip(names, worlds)
    }
    return kripke.KripkeModel(names, relations, valuation)


def normalize(phi: Formula, group: FrozenSet[str] = None) -> Formula:
    """Expand derived modalities and reject what the prover cannot handle.

    Common knowledge is rejected, and distributed knowledge unless it is
    that of ``group``.
    """
    if free_variables(phi) or any(isinstance(f, Forall) for f in subformulas(phi)):
        raise KindError(f"Prover input must be ground: {to_text(phi)}")
    phi = expand_derived(phi)
    for f in subformulas(phi):
        if isinstance(f, Common):
            raise UnsupportedModalityError(
                f"Common knowledge is not part of the KD4 language: {to_text(f)}"
            )
        if isinstance(f, Distributed) and f.group != group:
            raise UnsupportedModalityError(
                f"Distributed knowledge is only derivable within its own group: "
                f"{to_text(f)}"
            )
    return phi


## DERIVABILITY ##


def prove(
    premises: Iterable[Formula],
    phi: Formula,
    budget: int = None,
    trace: bool = False,
    group: FrozenSet[str] = None,
    logger=logger,
) -> Derivation:
    """Decide whether phi follows from premises in multi-agent KD4.

    Parameters
    ----------
    premises: iterable of Formula
        Ground premises, used as they are (no self-awareness closure).
    phi: Formula
        Ground query.
    budget: int, optional
        Prover step budget, see :py:class:`Tableau`.
    trace: bool, optional
        Record the tableau expansion in :py:attr:`Derivation.trace`.
    group: frozenset of str, optional
        Group whose distributed knowledge modality may occur in the input.

    Returns
    -------
    Derivation
        Verdict, steps used, and a countermodel when the tableau is open and
        no distributed knowledge modality was involved.
    """
    premises = [normalize(f, group) for f in premises]
    query = normalize(phi, group)
    tableau = Tableau(budget=budget, trace=trace)
    root = tableau.satisfiable(premises + [Not(query)])
    proved = root is None
    countermodel = None
    if not proved:
        agents = set().union(modal_agents(query), *(modal_agents(f) for f in premises))
        countermodel = _countermodel(root, agents)
    logger.debug(
        f"{to_text(phi)} {'derived' if proved else 'not derived'} "
        f"in {tableau.steps} steps"
    )
    return Derivation(proved, tableau.steps, countermodel, tableau.lines or [])


def derive(kb: KnowledgeBase, phi: Formula, budget: int = None, logger=logger) -> bool:
    """Return True if the self-aware closure of kb derives phi in KD4.

    Parameters
    ----------
    kb: KnowledgeBase
        Ground knowledge base without common or distributed knowledge.
    phi: Formula
        Ground query without common or distributed knowledge.
    budget: int, optional
        Prover step budget.

    Returns
    -------
    bool
        True if derivable.
    """
    return prove(kb.closure(), phi, budget=budget, logger=logger).proved


def consistent(kb: KnowledgeBase, budget: int = None, logger=logger) -> bool:
    """Return True if kb does not derive false."""
    return not derive(kb, FALSE, budget=budget, logger=logger)


def group_premises(
    kbs: Sequence[KnowledgeBase],
) -> Tuple[FrozenSet[str], List[Formula]]:
    """Return the group of kbs and the premises of its distributed knowledge.

    Each knowledge base contributes its self-aware closure, and every premise
    is also known to the group's distributed knowledge modality.
    """
    if len(kbs) == 0:
        raise ValueError("A group requires at least one knowledge base.")
    group = frozenset(kb.owner for kb in kbs)
    premises = []
    for kb in kbs:
        premises.extend(kb.closure())
        premises.extend(Distributed(group, f) for f in kb.formulas)
    return group, premises


def derive_group(
    kbs: Sequence[KnowledgeBase], phi: Formula, budget: int = None, logger=logger
) -> bool:
    """Return True if the union of the knowledge bases derives phi.

    The group's own distributed knowledge modality may occur in phi and acts
    as a further K4 modality that knows every premise of the group.

    Parameters
    ----------
    kbs: sequence of KnowledgeBase
        Knowledge bases of the group members.
    phi: Formula
        Ground query.
    budget: int, optional
        Prover step budget.

    Returns
    -------
    bool
        True if derivable.
    """
    if len(kbs) == 0:
        raise ValueError("derive_group requires a non-empty group.")
    group, premises = group_premises(kbs)
    return prove(premises, phi, budget=budget, group=group, logger=logger).proved
