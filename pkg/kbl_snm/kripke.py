"""Relational Kripke models backed by boolean accessibility matrices."""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .workflows.syntax import (
    And,
    Common,
    Distributed,
    EveryoneKnows,
    Falsum,
    Forall,
    Formula,
    Knows,
    Not,
    Pred,
    SomeoneKnows,
    atoms,
    expand_derived,
    modal_agents,
    to_text,
)

__all__ = [
    "KripkeModel",
    "FrameProperties",
    "atom_key",
    "transitive_closure",
    "kripke_sat",
    "satisfying_states",
    "frame_properties",
    "search_countermodel",
]

logger = logging.getLogger(__name__)

AtomKey = Tuple[str, Tuple[str, ...]]


def atom_key(p: Pred) -> AtomKey:
    """Identity of an atom in a valuation: its name and printed arguments."""
    return p.name, tuple(str(a) for a in p.args)


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Return the transitive closure of a square boolean matrix."""
    rel = np.array(rel, dtype=bool)
    for k in range(rel.shape[0]):
        rel |= rel[:, k : k + 1] & rel[k : k + 1, :]
    return rel


class KripkeModel:
    """Kripke model with one accessibility relation per agent.

    Arguments
    ---------
    states: sequence of str
        State names.
    relations: dict
        Per agent either a square boolean array over the states or an iterable
        of ``(state, state)`` pairs.
    valuation: dict
        Per state the ground atoms true at that state. Missing states have an
        empty valuation.
    theta: dict, optional
        Per state the formula set a canonical state was built from.
    characteristic: iterable of Formula, optional
        The characteristic set the model was translated from.
    marked: bool, optional
        Whether ``characteristic`` is the marked characteristic set.
    distinguished: str, optional
        The state satisfying the characteristic set.
    """

    def __init__(
        self,
        states: Sequence[str],
        relations: Mapping[str, Union[np.ndarray, Iterable[Tuple[str, str]]]],
        valuation: Mapping[str, Iterable[Pred]] = None,
        theta: Mapping[str, Iterable[Formula]] = None,
        characteristic: Iterable[Formula] = None,
        marked: bool = False,
        distinguished: str = None,
    ):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("State names must be unique.")
        self._index = {s: k for k, s in enumerate(self.states)}
        n = len(self.states)
        self._relations: Dict[str, np.ndarray] = {}
        for agent, rel in relations.items():
            if isinstance(rel, np.ndarray):
                arr = rel.astype(bool, copy=True)
                if arr.shape != (n, n):
                    raise ValueError(
                        f"Relation of agent '{agent}' has shape {arr.shape}, "
                        f"expected {(n, n)}."
                    )
            else:
                arr = np.zeros((n, n), dtype=bool)
                for s, t in rel:
                    arr[self.index(s), self.index(t)] = True
            arr.setflags(write=False)
            self._relations[agent] = arr
        valuation = valuation or {}
        for s in valuation:
            self.index(s)
        self.valuation: Dict[str, FrozenSet[Pred]] = {
            s: frozenset(valuation.get(s, ())) for s in self.states
        }
        self.theta = None
        if theta is not None:
            self.theta = {s: frozenset(theta[s]) for s in self.states}
        self.characteristic = None
        if characteristic is not None:
            self.characteristic = frozenset(characteristic)
        self.marked = marked
        if distinguished is not None:
            self.index(distinguished)
        self.distinguished = distinguished

    def __repr__(self) -> str:
        return (
            f"KripkeModel(states={len(self.states)}, agents={list(self.agents)}, "
            f"size={self.size})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            self.states == other.states
            and self.agents == other.agents
            and all(self.pairs(a) == other.pairs(a) for a in self.agents)
            and self.valuation == other.valuation
        )

    def index(self, state: str) -> int:
        """Return the position of a state."""
        if state not in self._index:
            raise ValueError(f"Unknown state '{state}'.")
        return self._index[state]

    @property
    def agents(self) -> Tuple[str, ...]:
        return tuple(sorted(self._relations))

    @property
    def n_states(self) -> int:
        return len(self.states)

    def relation(self, agent: str) -> np.ndarray:
        """Return the accessibility matrix of an agent; empty if unknown."""
        if agent not in self._relations:
            return np.zeros((self.n_states, self.n_states), dtype=bool)
        return self._relations[agent]

    def pairs(self, agent: str) -> FrozenSet[Tuple[str, str]]:
        """Return the accessibility relation of an agent as state pairs."""
        rows, cols = np.nonzero(self.relation(agent))
        return frozenset((self.states[r], self.states[c]) for r, c in zip(rows, cols))

    def successors(self, agent: str, state: str) -> Tuple[str, ...]:
        row = self.relation(agent)[self.index(state)]
        return tuple(self.states[k] for k in np.flatnonzero(row))

    @property
    def size(self) -> int:
        """Number of states plus number of accessibility pairs."""
        return self.n_states + int(sum(r.sum() for r in self._relations.values()))

    def truth(self, p: Pred) -> np.ndarray:
        """Return the states at which an atom holds as a boolean vector."""
        key = atom_key(p)
        return np.array(
            [any(atom_key(q) == key for q in self.valuation[s]) for s in self.states],
            dtype=bool,
        )


## SATISFACTION ##


def _box(rel: np.ndarray, sat: np.ndarray) -> np.ndarray:
    # sat has shape (..., n); a state satisfies the box if no successor fails
    return ~np.any(rel & ~sat[..., None, :], axis=-1)


def _evaluate(phi: Formula, rel, val, shape) -> np.ndarray:
    def rec(f):
        if isinstance(f, Pred):
            return val(f)
        if isinstance(f, Falsum):
            return np.zeros(shape, dtype=bool)
        if isinstance(f, Not):
            return ~rec(f.body)
        if isinstance(f, And):
            return rec(f.left) & rec(f.right)
        if isinstance(f, Knows):
            return _box(rel(f.agent), rec(f.body))
        if isinstance(f, EveryoneKnows):
            body = rec(f.body)
            return np.logical_and.reduce([_box(rel(i), body) for i in sorted(f.group)])
        if isinstance(f, SomeoneKnows):
            body = rec(f.body)
            return np.logical_or.reduce([_box(rel(i), body) for i in sorted(f.group)])
        if isinstance(f, Distributed):
            inter = np.logical_and.reduce([rel(i) for i in sorted(f.group)])
            return _box(inter, rec(f.body))
        if isinstance(f, Common):
            union = np.logical_or.reduce([rel(i) for i in sorted(f.group)])
            return _box(transitive_closure(union), rec(f.body))
        if isinstance(f, Forall):
            raise ValueError(f"Kripke formulas must be quantifier-free: {to_text(f)}")
        raise TypeError(f"Not a formula: {f!r}")

    return rec(phi)


def satisfying_states(m: KripkeModel, phi: Formula) -> Tuple[str, ...]:
    """Return the states of m at which phi holds."""
    truth = {}

    def val(p):
        key = atom_key(p)
        if key not in truth:
            truth[key] = m.truth(p)
        return truth[key]

    sat = _evaluate(phi, m.relation, val, (m.n_states,))
    return tuple(s for s, v in zip(m.states, sat) if v)


def kripke_sat(m: KripkeModel, s: str, phi: Formula) -> bool:
    """Return True if phi holds at state s of m.

    Parameters
    ----------
    m: KripkeModel
        Kripke model.
    s: str
        State name.
    phi: Formula
        Quantifier-free ground formula. Group modalities are read as usual:
        E and S through the members' relations, D through their
        intersection and C through the transitive closure of their union.
    """
    k = m.index(s)
    return m.states[k] in satisfying_states(m, phi)


@dataclass(frozen=True)
class FrameProperties:
    """Per-agent frame properties of a Kripke model."""

    serial: Dict[str, bool]
    transitive: Dict[str, bool]

    def kd4(self) -> bool:
        """True if every relation is serial and transitive."""
        return all(self.serial.values()) and all(self.transitive.values())


def frame_properties(m: KripkeModel) -> FrameProperties:
    """Check seriality and transitivity of every accessibility relation."""
    serial, transitive = {}, {}
    for agent in m.agents:
        rel = m.relation(agent)
        serial[agent] = bool(rel.any(axis=1).all())
        two_step = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
        transitive[agent] = not bool((two_step & ~rel).any())
    return FrameProperties(serial, transitive)


## SMALL MODEL SEARCH ##


@lru_cache(maxsize=None)
def _kd4_frames(n: int) -> Tuple[np.ndarray, ...]:
    """All serial and transitive relations on n states."""
    frames = []
    for bits in itertools.product((False, True), repeat=n * n):
        rel = np.array(bits, dtype=bool).reshape(n, n)
        if not rel.any(axis=1).all():
            continue
        if ((rel.astype(np.int64) @ rel.astype(np.int64) > 0) & ~rel).any():
            continue
        rel.setflags(write=False)
        frames.append(rel)
    return tuple(frames)


def search_countermodel(
    formulas: Iterable[Formula],
    max_states: int = None,
    max_atoms: int = 4,
    logger=logger,
) -> Optional[Tuple[KripkeModel, str]]:
    """Search all small serial-transitive models for a state satisfying formulas.

    Frames are enumerated exhaustively up to ``max_states`` states, and for
    each frame every valuation of the atoms occurring in formulas is
    evaluated at once.

    Parameters
    ----------
    formulas: iterable of Formula
        Quantifier-free ground formulas that must hold together.
    max_states: int, optional
        Largest number of states tried. By default 3 for one agent and 2
        for more agents.
    max_atoms: int, optional
        Refuse alphabets larger than this, by default 4.

    Returns
    -------
    tuple of KripkeModel and str, or None
        A model and a state satisfying all formulas, or None if none exists
        within the bounds.
    """
    formulas = [expand_derived(f) for f in formulas]
    alphabet = sorted(
        {p for f in formulas for p in atoms(f)}, key=lambda p: atom_key(p)
    )
    keys = list(dict.fromkeys(atom_key(p) for p in alphabet))
    if len(keys) > max_atoms:
        raise ValueError(f"Alphabet of {len(keys)} atoms exceeds {max_atoms}.")
    agents = sorted(set().union(*(modal_agents(f) for f in formulas)))
    if max_states is None:
        max_states = 3 if len(agents) <= 1 else 2
    representative = {}
    for p in alphabet:
        representative.setdefault(atom_key(p), p)
    n_atoms = len(keys)
    for n in range(1, max_states + 1):
        n_vals = 2 ** (n * n_atoms)
        bits = (np.arange(n_vals)[:, None] >> np.arange(n * n_atoms)) & 1
        bits = bits.astype(bool).reshape(n_vals, n_atoms, n)

        def val(p):
            return bits[:, keys.index(atom_key(p)), :]

        for combo in itertools.product(_kd4_frames(n), repeat=len(agents)):
            rels = dict(zip(agents, combo))

            def rel(agent):
                return rels.get(agent, np.eye(n, dtype=bool))

            sat = np.ones((n_vals, n), dtype=bool)
            for f in formulas:
                sat &= _evaluate(f, rel, val, (n_vals, n))
                if not sat.any():
                    break
            hits = np.argwhere(sat)
            if len(hits) == 0:
                continue
            v, s = hits[0]
            states = [f"s{k}" for k in range(n)]
            valuation = {
                states[w]: [
                    representative[key]
                    for a, key in enumerate(keys)
                    if bits[v, a, w]
                ]
                for w in range(n)
            }
            model = KripkeModel(states, {a: rels[a] for a in agents}, valuation)
            logger.debug(f"Found a model with {n} states for {len(formulas)} formulas.")
            return model, states[s]
    return None
