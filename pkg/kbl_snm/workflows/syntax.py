"""Terms, formulas and vocabularies of the knowledge-based logic.

Formulas are immutable trees. Implication and disjunction only exist as
surface syntax: they are stored as negated conjunctions whose ``Not`` node
remembers the connective it was written with, so that printing and
``size`` see the formula the way it was written.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from ..errors import ConfigurationError, EvaluationError, VocabularyError

__all__ = [
    "Term",
    "Constant",
    "Variable",
    "FuncApp",
    "Value",
    "Formula",
    "Pred",
    "Falsum",
    "FALSE",
    "TRUE",
    "Not",
    "And",
    "Forall",
    "Knows",
    "GroupModality",
    "EveryoneKnows",
    "SomeoneKnows",
    "Common",
    "Distributed",
    "KINDS",
    "RESERVED_PREFIXES",
    "FunctionTable",
    "Vocabulary",
    "implies",
    "disjoin",
    "conjoin",
    "conjuncts",
    "substitute",
    "bind",
    "map_atoms",
    "literalize",
    "ground",
    "size",
    "to_text",
    "formula_key",
    "free_variables",
    "subformulas",
    "atoms",
    "modal_agents",
    "expand_derived",
    "contains",
]

logger = logging.getLogger(__name__)

KINDS = ("regular", "connection", "action")
RESERVED_PREFIXES = ("co_", "ac_")


## TERMS ##


class Term:
    """Base class of terms."""

    def __str__(self) -> str:
        return _term_text(self)


@dataclass(frozen=True)
class Constant(Term):
    name: str


@dataclass(frozen=True)
class Variable(Term):
    name: str
    sort: str


@dataclass(frozen=True)
class FuncApp(Term):
    name: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Value(Term):
    """A domain element; the only term left after grounding."""

    name: str


def _term_text(t: Term) -> str:
    if isinstance(t, FuncApp):
        return f"{t.name}({','.join(_term_text(a) for a in t.args)})"
    return t.name


def _term_size(t: Term) -> int:
    if isinstance(t, FuncApp):
        return 1 + sum(_term_size(a) for a in t.args)
    return 1


## FORMULAS ##


class Formula:
    """Base class of formulas."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: Tuple[Term, ...] = ()
    kind: str = "regular"

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.kind not in KINDS:
            raise ValueError(f"Unknown predicate kind '{self.kind}'.")


@dataclass(frozen=True)
class Falsum(Formula):
    pass


FALSE = Falsum()


@dataclass(frozen=True)
class Not(Formula):
    body: Formula
    # surface connective this node was written as: "->", "||" or None
    sugar: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: str
    body: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    body: Formula


@dataclass(frozen=True)
class GroupModality(Formula):
    group: FrozenSet[str]
    body: Formula

    op = ""

    def __post_init__(self):
        group = frozenset([self.group] if isinstance(self.group, str) else self.group)
        if not group:
            raise ValueError(f"{type(self).__name__} requires a non-empty group.")
        object.__setattr__(self, "group", group)


@dataclass(frozen=True)
class EveryoneKnows(GroupModality):
    op = "E"


@dataclass(frozen=True)
class SomeoneKnows(GroupModality):
    op = "S"


@dataclass(frozen=True)
class Common(GroupModality):
    op = "C"


@dataclass(frozen=True)
class Distributed(GroupModality):
    op = "D"


TRUE = Not(FALSE)


def implies(a: Formula, b: Formula) -> Formula:
    """Return ``a -> b``, stored as ``!(a && !b)``."""
    return Not(And(a, Not(b)), sugar="->")


def disjoin(formulas: Iterable[Formula]) -> Formula:
    """Return the left-nested disjunction of formulas; ``false`` when empty."""
    result = None
    for f in formulas:
        result = f if result is None else Not(And(Not(result), Not(f)), sugar="||")
    return FALSE if result is None else result


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Return the left-nested conjunction of formulas; ``!false`` when empty.

    A single conjunct is returned as is.
    """
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def conjuncts(phi: Formula) -> List[Formula]:
    """Flatten nested conjunctions into a list of conjuncts."""
    if isinstance(phi, And):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


def _rebuild(phi: Formula, rec: Callable[[Formula], Formula]) -> Formula:
    """Rebuild phi with rec applied to its immediate subformulas."""
    if isinstance(phi, Not):
        return Not(rec(phi.body), sugar=phi.sugar)
    if isinstance(phi, And):
        return And(rec(phi.left), rec(phi.right))
    if isinstance(phi, Forall):
        return Forall(phi.var, phi.sort, rec(phi.body))
    if isinstance(phi, Knows):
        return Knows(phi.agent, rec(phi.body))
    if isinstance(phi, GroupModality):
        return type(phi)(phi.group, rec(phi.body))
    return phi


def _children(phi: Formula) -> Tuple[Formula, ...]:
    if isinstance(phi, And):
        return (phi.left, phi.right)
    if isinstance(phi, (Not, Forall, Knows, GroupModality)):
        return (phi.body,)
    return ()


def map_atoms(phi: Formula, fn: Callable[[Pred], Formula]) -> Formula:
    """Replace every predicate p of phi by fn(p)."""

    def rec(f):
        if isinstance(f, Pred):
            return fn(f)
        return _rebuild(f, rec)

    return rec(phi)


def _map_terms(phi: Formula, fn: Callable[[Term], Term], var: str = None) -> Formula:
    """Apply fn to every predicate argument, stopping at binders of var."""

    def rec(f):
        if isinstance(f, Pred):
            return Pred(f.name, tuple(fn(a) for a in f.args), f.kind)
        if isinstance(f, Forall) and var is not None and f.var == var:
            return f
        return _rebuild(f, rec)

    return rec(phi)


## VOCABULARY ##


@dataclass(frozen=True)
class FunctionTable:
    """A total function given as a finite table.

    ``sorts`` are the argument sorts and ``result`` the result sort.
    """

    sorts: Tuple[str, ...]
    result: str
    table: Mapping[Tuple[str, ...], str] = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return len(self.sorts)


@dataclass(frozen=True)
class Vocabulary:
    """Predicate, function and constant symbols over finite sorted domains."""

    predicates: Mapping[str, Tuple[int, str]] = field(default_factory=dict)
    functions: Mapping[str, FunctionTable] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    domains: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def domain(self, sort: str) -> Tuple[str, ...]:
        """Return the elements of a sort."""
        if sort not in self.domains:
            raise ConfigurationError(f"Unknown sort '{sort}'.")
        return tuple(self.domains[sort])

    @property
    def elements(self) -> FrozenSet[str]:
        return frozenset(itertools.chain.from_iterable(self.domains.values()))

    def is_element(self, name: str) -> bool:
        return any(name in elems for elems in self.domains.values())

    def with_domain(self, sort: str, elements: Iterable[str]) -> "Vocabulary":
        """Return a copy with the elements of one sort replaced."""
        domains = dict(self.domains)
        domains[sort] = tuple(elements)
        return Vocabulary(self.predicates, self.functions, self.constants, domains)

    def evaluate(self, t: Term) -> Value:
        """Evaluate a closed term to a domain element."""
        if isinstance(t, Value):
            return t
        if isinstance(t, Variable):
            raise ValueError(f"Cannot evaluate free variable '{t.name}'.")
        if isinstance(t, Constant):
            if t.name in self.constants:
                return Value(self.constants[t.name])
            if self.is_element(t.name):
                return Value(t.name)
            raise VocabularyError(f"Undeclared constant '{t.name}'.")
        if t.name not in self.functions:
            raise VocabularyError(f"Undeclared function '{t.name}'.")
        args = tuple(self.evaluate(a).name for a in t.args)
        table = self.functions[t.name].table
        if args not in table:
            raise EvaluationError(
                f"Function '{t.name}' is not defined for arguments ({','.join(args)})."
            )
        return Value(table[args])

    def resolve(self, phi: Formula) -> Formula:
        """Check phi against the vocabulary and set predicate kinds."""

        def term(t):
            if isinstance(t, Variable):
                self.domain(t.sort)
                return t
            if isinstance(t, FuncApp):
                if t.name not in self.functions:
                    raise VocabularyError(f"Undeclared function '{t.name}'.")
                arity = self.functions[t.name].arity
                if len(t.args) != arity:
                    raise VocabularyError(
                        f"Function '{t.name}' has arity {arity}, got {len(t.args)}."
                    )
                return FuncApp(t.name, tuple(term(a) for a in t.args))
            if t.name not in self.constants and not self.is_element(t.name):
                raise VocabularyError(f"Undeclared symbol '{t.name}'.")
            return t

        def rec(f):
            if isinstance(f, Pred):
                if f.name not in self.predicates:
                    raise VocabularyError(f"Undeclared predicate '{f.name}'.")
                arity, kind = self.predicates[f.name]
                if len(f.args) != arity:
                    raise VocabularyError(
                        f"Predicate '{f.name}' has arity {arity}, got {len(f.args)}."
                    )
                return Pred(f.name, tuple(term(a) for a in f.args), kind)
            if isinstance(f, Forall):
                self.domain(f.sort)
                return Forall(f.var, f.sort, rec(f.body))
            return _rebuild(f, rec)

        return rec(phi)


## OPERATIONS ##


def substitute(
    phi: Formula, var: str, value: str, vocab: Vocabulary = None
) -> Formula:
    """Replace the free occurrences of a variable by a domain element.

    Parameters
    ----------
    phi: Formula
        Formula to substitute into.
    var: str
        Name of the variable.
    value: str
        Domain element replacing the variable.
    vocab: Vocabulary, optional
        If given, the sort of every replaced variable is checked to exist and to
        contain ``value``.

    Returns
    -------
    Formula
        Formula with every free occurrence of ``var`` replaced by ``value``.
    """

    def fn(t):
        if isinstance(t, Variable) and t.name == var:
            if vocab is not None and value not in vocab.domain(t.sort):
                raise ConfigurationError(
                    f"Value '{value}' is not in the domain of sort '{t.sort}'."
                )
            return Value(value)
        if isinstance(t, FuncApp):
            return FuncApp(t.name, tuple(fn(a) for a in t.args))
        return t

    return _map_terms(phi, fn, var=var)


def bind(phi: Formula, var: str, sort: str) -> Formula:
    """Read the constants named ``var`` as variables of ``sort``.

    Occurrences under an inner binder of the same name are left alone.
    """

    def fn(t):
        if isinstance(t, Constant) and t.name == var:
            return Variable(var, sort)
        if isinstance(t, FuncApp):
            return FuncApp(t.name, tuple(fn(a) for a in t.args))
        return t

    return _map_terms(phi, fn, var=var)


def literalize(phi: Formula) -> Formula:
    """Read every constant of phi as the domain element of the same name."""

    def fn(t):
        if isinstance(t, Constant):
            return Value(t.name)
        if isinstance(t, FuncApp):
            return FuncApp(t.name, tuple(fn(a) for a in t.args))
        return t

    return _map_terms(phi, fn)


def ground(phi: Formula, vocab: Vocabulary) -> Formula:
    """Expand quantifiers over their finite domains and evaluate all terms.

    Every ``forall x:s . body`` becomes the conjunction of ``body[v/x]`` for
    all ``v`` in the domain of ``s``; a one-element domain yields the
    conjunct itself. Constants and function applications in predicate
    arguments are replaced by domain elements.

    Parameters
    ----------
    phi: Formula
        Closed formula.
    vocab: Vocabulary
        Vocabulary providing the domains, constants and function tables.

    Returns
    -------
    Formula
        Quantifier-free formula whose predicate arguments are all ``Value``.
    """
    free = free_variables(phi)
    if free:
        names = ", ".join(sorted(v.name for v in free))
        raise ValueError(f"Cannot ground a formula with free variables: {names}.")

    def rec(f):
        if isinstance(f, Forall):
            return conjoin(
                rec(substitute(f.body, f.var, v)) for v in vocab.domain(f.sort)
            )
        if isinstance(f, Pred):
            return Pred(f.name, tuple(vocab.evaluate(a) for a in f.args), f.kind)
        return _rebuild(f, rec)

    return rec(phi)


def size(phi: Formula) -> int:
    """Return the length of a formula.

    Every connective, quantifier and modality counts one, a predicate counts
    one plus one per argument node. An implication or disjunction counts as a
    single connective.

    Argument nodes are counted on purpose, so ``size(p(a)) == 2`` and
    ``size(K[Charlie] loc(Bob,pub,1)) == 5``; the knowledge base sizes that
    bound checking costs are measured in the same unit.
    """
    if isinstance(phi, Pred):
        return 1 + sum(_term_size(a) for a in phi.args)
    if isinstance(phi, Not):
        if phi.sugar == "->" and _is_implication(phi):
            return 1 + size(phi.body.left) + size(phi.body.right.body)
        if phi.sugar == "||" and _is_disjunction(phi):
            return 1 + size(phi.body.left.body) + size(phi.body.right.body)
    return 1 + sum(size(c) for c in _children(phi))


def free_variables(phi: Formula) -> FrozenSet[Variable]:
    """Return the free variables of a formula."""

    def term_vars(t):
        if isinstance(t, Variable):
            return {t}
        if isinstance(t, FuncApp):
            return set().union(*(term_vars(a) for a in t.args))
        return set()

    if isinstance(phi, Pred):
        return frozenset(set().union(*(term_vars(a) for a in phi.args)))
    if isinstance(phi, Forall):
        return frozenset(v for v in free_variables(phi.body) if v.name != phi.var)
    return frozenset().union(*(free_variables(c) for c in _children(phi)))


def subformulas(phi: Formula) -> List[Formula]:
    """Return the distinct subformulas of phi, children before parents."""
    seen: Dict[Formula, None] = {}

    def rec(f):
        for c in _children(f):
            rec(c)
        seen.setdefault(f, None)

    rec(phi)
    return list(seen)


def atoms(phi: Formula) -> FrozenSet[Pred]:
    """Return the predicates occurring in phi."""
    return frozenset(f for f in subformulas(phi) if isinstance(f, Pred))


def modal_agents(phi: Formula) -> FrozenSet[str]:
    """Return the agents indexing a modality anywhere in phi."""
    agents = set()
    for f in subformulas(phi):
        if isinstance(f, Knows):
            agents.add(f.agent)
        elif isinstance(f, GroupModality):
            agents.update(f.group)
    return frozenset(agents)


def contains(phi: Formula, *types: type) -> bool:
    """Return True if a subformula of phi is an instance of one of types."""
    return any(isinstance(f, types) for f in subformulas(phi))


def expand_derived(phi: Formula) -> Formula:
    """Rewrite E and S into knowledge operators and D of one agent into K."""

    def rec(f):
        if isinstance(f, EveryoneKnows):
            body = rec(f.body)
            return conjoin(Knows(i, body) for i in sorted(f.group))
        if isinstance(f, SomeoneKnows):
            body = rec(f.body)
            return disjoin(Knows(i, body) for i in sorted(f.group))
        if isinstance(f, Distributed) and len(f.group) == 1:
            return Knows(next(iter(f.group)), rec(f.body))
        return _rebuild(f, rec)

    return rec(phi)


## PRINTING ##

_PREC_QUANT, _PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = range(6)


def _is_implication(f: Not) -> bool:
    return isinstance(f.body, And) and isinstance(f.body.right, Not)


def _is_disjunction(f: Not) -> bool:
    return (
        isinstance(f.body, And)
        and isinstance(f.body.left, Not)
        and isinstance(f.body.right, Not)
    )


def _render(f: Formula) -> Tuple[str, int]:
    if isinstance(f, Pred):
        if not f.args:
            return f.name, _PREC_ATOM
        return f"{f.name}({','.join(_term_text(a) for a in f.args)})", _PREC_ATOM
    if isinstance(f, Falsum):
        return "false", _PREC_ATOM
    if isinstance(f, Not):
        if f.sugar == "->" and _is_implication(f):
            left = _paren(f.body.left, _PREC_OR)
            right = _paren(f.body.right.body, _PREC_IMPLIES)
            return f"{left} -> {right}", _PREC_IMPLIES
        if f.sugar == "||" and _is_disjunction(f):
            left = _paren(f.body.left.body, _PREC_OR)
            right = _paren(f.body.right.body, _PREC_AND)
            return f"{left} || {right}", _PREC_OR
        return "!" + _paren(f.body, _PREC_UNARY), _PREC_UNARY
    if isinstance(f, And):
        left = _paren(f.left, _PREC_AND)
        right = _paren(f.right, _PREC_UNARY)
        return f"{left} && {right}", _PREC_AND
    if isinstance(f, Forall):
        return f"forall {f.var}:{f.sort} . {_paren(f.body, _PREC_QUANT)}", _PREC_QUANT
    if isinstance(f, Knows):
        return f"K[{f.agent}] {_paren(f.body, _PREC_UNARY)}", _PREC_UNARY
    if isinstance(f, GroupModality):
        group = ",".join(sorted(f.group))
        return f"{f.op}[{group}] {_paren(f.body, _PREC_UNARY)}", _PREC_UNARY
    raise TypeError(f"Not a formula: {f!r}")


def _paren(f: Formula, context: int) -> str:
    text, prec = _render(f)
    return f"({text})" if prec < context else text


def to_text(phi: Formula) -> str:
    """Print a formula in the concrete syntax read by ``parse_formula``."""
    return _render(phi)[0]


def formula_key(phi: Formula) -> Tuple[int, str]:
    """Sort key ordering formulas by size, then by printed form."""
    return size(phi), to_text(phi)
