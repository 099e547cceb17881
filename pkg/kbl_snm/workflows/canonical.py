"""Canonical KD4 Kripke models of consistent formulas."""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Tuple

import numpy as np

from ..errors import InconsistentFormulaError, KBLError, ResourceExhaustedError
from ..kripke import KripkeModel, frame_properties, satisfying_states
from .deduction import Tableau, normalize
from .syntax import (
    And,
    Falsum,
    Formula,
    Knows,
    Not,
    Pred,
    expand_derived,
    modal_agents,
    subformulas,
    to_text,
)

__all__ = ["DEFAULT_GUARD", "FormulaClosure", "formula_closure", "canonical_model"]

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 18


@dataclass(frozen=True)
class FormulaClosure:
    """Subformula closure of a formula and its maximal consistent subsets.

    ``truth`` is a boolean table with one row per maximal consistent subset
    and one column per member of ``sub``; a subset holds ``sub[k]`` where
    the row is True and its negation elsewhere.
    """

    base: Formula
    sub: Tuple[Formula, ...]
    truth: np.ndarray

    @property
    def subplus(self) -> Tuple[Formula, ...]:
        return self.sub + tuple(Not(f) for f in self.sub)

    @property
    def con(self) -> List[FrozenSet[Formula]]:
        return [self.theta(k) for k in range(len(self.truth))]

    def theta(self, k: int) -> FrozenSet[Formula]:
        """Return the k-th maximal consistent subset of Sub+."""
        row = self.truth[k]
        return frozenset(f if v else Not(f) for f, v in zip(self.sub, row))


def _modal_assignments(modal: List[Formula], budget: int) -> np.ndarray:
    """Enumerate consistent truth assignments to the knowledge subformulas.

    Assignments are extended depth first and pruned as soon as the chosen
    literals are KD4-inconsistent.
    """
    tableau = Tableau(budget=budget)
    found = []

    def extend(chosen: List[bool]):
        if len(chosen) == len(modal):
            found.append(list(chosen))
            return
        for value in (True, False):
            literals = [g if v else Not(g) for g, v in zip(modal, chosen + [value])]
            if tableau.satisfiable(literals) is not None:
                extend(chosen + [value])

    extend([])
    return np.array(found, dtype=bool).reshape(len(found), len(modal))


def formula_closure(phi: Formula, guard: int = DEFAULT_GUARD, budget: int = None):
    """Compute Sub(phi) and all maximal KD4-consistent subsets of Sub+(phi).

    Atoms are independent of each other and of knowledge literals in KD4, so
    a maximal consistent subset is a choice of atoms together with a
    consistent choice of knowledge literals; negations and conjunctions are
    then fixed by their parts.

    Parameters
    ----------
    phi: Formula
        Quantifier-free ground formula without common or distributed
        knowledge. E and S are expanded first.
    guard: int, optional
        Largest accepted number of subformulas, by default 18.
    budget: int, optional
        Prover step budget for the consistency checks.

    Returns
    -------
    FormulaClosure
        The closure; its rows are in enumeration order.
    """
    base = expand_derived(normalize(phi))
    sub = subformulas(base)
    if len(sub) > guard:
        raise ResourceExhaustedError(
            f"Formula has {len(sub)} subformulas, more than the guard of {guard}; "
            f"its canonical model may have up to 2^{len(sub)} states.",
            estimate=2 ** len(sub),
        )
    atoms = [f for f in sub if isinstance(f, Pred)]
    modal = [f for f in sub if isinstance(f, Knows)]
    assignments = _modal_assignments(modal, budget)
    n_atoms = 2 ** len(atoms)
    n_states = n_atoms * len(assignments)
    codes = np.arange(n_atoms)
    column = {}
    for j, f in enumerate(atoms):
        column[f] = np.tile(((codes >> j) & 1).astype(bool), len(assignments))
    for j, f in enumerate(modal):
        column[f] = np.repeat(assignments[:, j], n_atoms)
    for f in sub:
        if isinstance(f, Falsum):
            column[f] = np.zeros(n_states, dtype=bool)
        elif isinstance(f, Not):
            column[f] = ~column[f.body]
        elif isinstance(f, And):
            column[f] = column[f.left] & column[f.right]
    truth = np.stack([column[f] for f in sub], axis=1).reshape(n_states, len(sub))
    return FormulaClosure(base, tuple(sub), truth)


def canonical_model(
    phi: Formula,
    guard: int = DEFAULT_GUARD,
    agents: Iterable[str] = (),
    budget: int = None,
    logger=logger,
) -> KripkeModel:
    """Build the canonical KD4 Kripke model of a consistent formula.

    States are the maximal consistent subsets of Sub+(phi). State Theta sees
    state Psi for agent i when every chi with K_i chi in Theta has both chi
    and K_i chi in Psi. An atom holds at a state when it belongs to its set.

    Parameters
    ----------
    phi: Formula
        Quantifier-free ground formula.
    guard: int, optional
        Largest accepted number of subformulas, by default 18.
    agents: iterable of str, optional
        Agents that get a relation besides those occurring in phi.
    budget: int, optional
        Prover step budget.

    Returns
    -------
    KripkeModel
        Canonical model with states ``s0, s1, ...`` and their formula sets
        in :py:attr:`KripkeModel.theta`.
    """
    if Tableau(budget=budget).satisfiable([normalize(phi)]) is None:
        raise InconsistentFormulaError(f"Formula is not KD4-consistent: {to_text(phi)}")
    closure = formula_closure(phi, guard=guard, budget=budget)
    sub, truth = closure.sub, closure.truth
    position = {f: k for k, f in enumerate(sub)}
    n_states = len(truth)
    names = [f"s{k}" for k in range(n_states)]
    relations = {}
    for agent in sorted(set(agents) | modal_agents(closure.base)):
        boxes = [f for f in sub if isinstance(f, Knows) and f.agent == agent]
        held = truth[:, [position[f] for f in boxes]].astype(np.int64)
        bodies = truth[:, [position[f.body] for f in boxes]]
        both = (held.astype(bool) & bodies).astype(np.int64)
        # a box held at Theta but not carried with its body to Psi
        missing = held @ (1 - both).T
        relations[agent] = missing == 0
    valuation = {
        s: [f for f, v in zip(sub, truth[k]) if v and isinstance(f, Pred)]
        for k, s in enumerate(names)
    }
    theta = {s: closure.theta(k) for k, s in enumerate(names)}
    model = KripkeModel(names, relations, valuation, theta=theta)
    frames = frame_properties(model)
    if not frames.kd4():
        raise KBLError("Canonical model is not serial and transitive.")
    if not satisfying_states(model, closure.base):
        raise KBLError("Canonical model does not satisfy its formula.")
    logger.info(
        f"Canonical model with {n_states} states for {len(sub)} subformulas "
        f"and {len(relations)} agents."
    )
    return model
