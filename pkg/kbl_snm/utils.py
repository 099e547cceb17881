"""
kbl_snm utilities functions for reading and writing formulas, social network
models (``.snm``) and Kripke models (``.kripke``).
"""

import logging
import re
from pathlib import Path
from typing import Dict, Iterator, List, Tuple, Union

import pyparsing as pp

from .errors import (
    ConfigurationError,
    InconsistentKnowledgeError,
    ParseError,
    VocabularyError,
)
from .kripke import KripkeModel
from .snm import SocialNetworkModel
from .workflows.syntax import (
    FALSE,
    RESERVED_PREFIXES,
    And,
    Common,
    Constant,
    Distributed,
    EveryoneKnows,
    Forall,
    Formula,
    FuncApp,
    FunctionTable,
    Knows,
    Not,
    Pred,
    SomeoneKnows,
    Vocabulary,
    bind,
    implies,
    literalize,
    to_text,
)

__all__ = [
    "parse_formula",
    "parse_model",
    "print_model",
    "read_model",
    "write_model",
    "parse_kripke",
    "print_kripke",
    "read_kripke",
    "write_kripke",
]

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()


## FORMULAS: K[a] p(b) && forall x:s . q(x) -> false ##

_MODALITIES = {
    "E": EveryoneKnows,
    "S": SomeoneKnows,
    "C": Common,
    "D": Distributed,
}


def _term_action(toks):
    if len(toks) == 1:
        return Constant(toks[0])
    return FuncApp(toks[0], tuple(toks[1]))


def _atom_action(toks):
    args = tuple(toks[1]) if len(toks) > 1 else ()
    return Pred(toks[0], args)


def _modal_action(s, loc, toks):
    op, group, body = toks[0], list(toks[1]), toks[2]
    if op == "K":
        if len(group) != 1:
            raise pp.ParseFatalException(s, loc, "K takes exactly one agent")
        return Knows(group[0], body)
    return _MODALITIES[op](frozenset(group), body)


def _forall_action(toks):
    var, sort, body = toks
    return Forall(var, sort, bind(body, var, sort))


def _fold_and(toks):
    result = toks[0]
    for f in toks[1:]:
        result = And(result, f)
    return result


def _fold_or(toks):
    result = toks[0]
    for f in toks[1:]:
        result = Not(And(Not(result), Not(f)), sugar="||")
    return result


def _implication_action(toks):
    if len(toks) == 1:
        return toks[0]
    return implies(toks[0], toks[1])


def _formula_grammar() -> pp.ParserElement:
    LPAR, RPAR, LBRACK, RBRACK, COMMA, COLON, DOT = map(pp.Suppress, "()[],:.")
    FORALL = pp.Keyword("forall")
    FALSE_KW = pp.Keyword("false")
    ident = ~(FORALL | FALSE_KW) + pp.Word(pp.alphanums + "_")

    term = pp.Forward()
    args = LPAR + pp.Group(pp.Optional(term + pp.ZeroOrMore(COMMA + term))) + RPAR
    term <<= (ident + pp.Optional(args)).set_parse_action(_term_action)

    formula = pp.Forward()
    unary = pp.Forward()
    atom = (ident + pp.Optional(args)).set_parse_action(_atom_action)
    group = LBRACK + pp.Group(ident + pp.ZeroOrMore(COMMA + ident)) + RBRACK
    modal = (pp.Regex(r"[KESCD](?=\[)") + group + unary).set_parse_action(
        _modal_action
    )
    negation = (pp.Suppress("!") + unary).set_parse_action(lambda t: Not(t[0]))
    forall = (
        pp.Suppress(FORALL) + ident + COLON + ident + DOT + formula
    ).set_parse_action(_forall_action)
    falsum = FALSE_KW.copy().set_parse_action(lambda: FALSE)
    unary <<= negation | modal | forall | falsum | atom | (LPAR + formula + RPAR)

    conjunction = (unary + pp.ZeroOrMore(pp.Suppress("&&") + unary)).set_parse_action(
        _fold_and
    )
    disjunction = (
        conjunction + pp.ZeroOrMore(pp.Suppress("||") + conjunction)
    ).set_parse_action(_fold_or)
    implication = pp.Forward()
    implication <<= (
        disjunction + pp.Optional(pp.Suppress("->") + implication)
    ).set_parse_action(_implication_action)
    formula <<= implication
    return formula


_FORMULA = _formula_grammar()


def parse_formula(text: str, vocab: Vocabulary = None) -> Formula:
    """Parse a formula in the concrete syntax printed by ``to_text``.

    Identifiers in argument position are read as constants, except where a
    ``forall`` binds them. Implication is right associative, conjunction and
    disjunction are left associative; ``!``, ``K[a]`` and the group
    modalities bind tighter than ``&&``, which binds tighter than ``||`` and
    ``->``. A quantifier body extends as far as possible.

    Parameters
    ----------
    text: str
        Formula text.
    vocab: Vocabulary, optional
        If given, the formula is checked against it and predicate kinds are
        set.

    Returns
    -------
    Formula
        Parsed formula.

    Raises
    ------
    ParseError
        On a syntax error, with the line and column of the offending token.
    """
    try:
        phi = _FORMULA.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as err:
        raise ParseError(err.msg, err.lineno, err.col) from None
    if vocab is not None:
        phi = vocab.resolve(phi)
    return phi


## SECTIONED TEXT FILES ##

_HEADER = re.compile(r"^([A-Za-z_]+)(?:\s+([^\s:]+))?\s*:(.*)$")

# (line number, column, text) of one content line
Line = Tuple[int, int, str]


def _sections(text: str) -> Iterator[Tuple[str, str, Line, List[Line]]]:
    """Split a sectioned file into headers and their indented content lines.

    Headers start at column 1 as ``name [argument]: [inline content]``;
    content lines are indented. ``#`` starts a comment.
    """
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not line[0].isspace():
            match = _HEADER.match(line)
            if match is None:
                raise ParseError("expected a section header 'name:'", lineno, 1)
            if current is not None:
                yield current
            name, arg, inline = match.groups()
            col = match.start(3) + 1 + len(inline) - len(inline.lstrip())
            current = (name, arg, (lineno, col, inline.strip()), [])
        else:
            if current is None:
                raise ParseError("content before the first section", lineno, 1)
            stripped = line.lstrip()
            current[3].append((lineno, len(line) - len(stripped) + 1, stripped))
    if current is not None:
        yield current


def _formula_at(line: Line, vocab: Vocabulary = None) -> Formula:
    lineno, col, text = line
    try:
        return parse_formula(text, vocab)
    except ParseError as err:
        raise ParseError(
            err.message, lineno, col + err.column - 1
        ) from None
    except (VocabularyError, ConfigurationError) as err:
        raise type(err)(f"line {lineno}: {err}") from None


def _content(inline: Line, lines: List[Line]) -> List[Line]:
    return ([inline] if inline[2] else []) + lines


## SOCIAL NETWORK MODELS: *.snm ##


def _relation_pair(line: Line, name_kind: Dict[str, Tuple[int, str]], kind: str):
    lineno, col, text = line
    p = _formula_at(line)
    if not isinstance(p, Pred) or len(p.args) != 2:
        raise ParseError(f"expected a binary {kind} atom", lineno, col)
    if name_kind.get(p.name, (None, None))[1] != kind:
        raise VocabularyError(f"line {lineno}: '{p.name}' is not declared as a {kind}.")
    return p.name, tuple(a.name for a in p.args)


def parse_model(text: str, validate: bool = True, logger=logger) -> SocialNetworkModel:
    """Parse a social network model from the ``.snm`` text format.

    The file has the sections ``agents``, ``domains`` (``sort = e1 e2``),
    ``constants`` (``c = element``), ``predicates`` (``name/arity [kind]``),
    ``functions`` (``f : s1 * s2 -> s`` and ``f(a,b) = c``), ``connections``
    and ``actions`` (one atom per line), ``kb <agent>`` (one formula per
    line, ``kb e`` is the environment) and ``policies <agent>`` (opaque
    lines). Knowledge base formulas are grounded when the model is built.

    Parameters
    ----------
    text: str
        File contents.
    validate: bool, optional
        Raise on the first diagnostic of :py:meth:`SocialNetworkModel.validate`,
        by default True.

    Returns
    -------
    SocialNetworkModel
        Parsed model.

    Raises
    ------
    ParseError
        Syntax errors, with line and column.
    VocabularyError
        Undeclared symbols, reserved predicate names or other invalid models.
    InconsistentKnowledgeError
        If the knowledge base of an agent is inconsistent.
    """
    agents: List[str] = []
    domains: Dict[str, Tuple[str, ...]] = {}
    constants: Dict[str, str] = {}
    predicates: Dict[str, Tuple[int, str]] = {}
    signatures: Dict[str, Tuple[Tuple[str, ...], str]] = {}
    tables: Dict[str, Dict[Tuple[str, ...], str]] = {}
    relations = {"connection": {}, "action": {}}
    kb_lines: Dict[str, List[Line]] = {}
    relation_lines: List[Tuple[str, Line]] = []
    policies: Dict[str, List[str]] = {}

    for name, arg, inline, lines in _sections(text):
        lineno = inline[0]
        if name in ("kb", "policies"):
            if arg is None:
                raise ParseError(f"section '{name}' needs an agent", lineno, 1)
            if name == "kb":
                kb_lines.setdefault(arg, []).extend(_content(inline, lines))
            else:
                policies.setdefault(arg, []).extend(
                    t for _, _, t in _content(inline, lines)
                )
            continue
        if arg is not None:
            raise ParseError(f"section '{name}' takes no argument", lineno, 1)
        content = _content(inline, lines)
        if name == "agents":
            for _, _, t in content:
                agents.extend(t.split())
        elif name in ("domains", "constants"):
            for n, col, t in content:
                key, sep, value = (x.strip() for x in t.partition("="))
                if not sep or not key:
                    raise ParseError("expected 'name = value'", n, col)
                if name == "domains":
                    domains[key] = tuple(value.split())
                else:
                    constants[key] = value
        elif name == "predicates":
            for n, col, t in content:
                match = re.fullmatch(r"(\w+)\s*/\s*(\d+)(?:\s+(\w+))?", t)
                if match is None:
                    raise ParseError("expected 'name/arity [kind]'", n, col)
                pname, arity, kind = match.group(1), int(match.group(2)), match.group(3)
                if pname.startswith(RESERVED_PREFIXES):
                    raise VocabularyError(
                        f"line {n}: predicate '{pname}' uses a reserved prefix."
                    )
                if kind not in (None, "regular", "connection", "action"):
                    raise ParseError(f"unknown predicate kind '{kind}'", n, col)
                predicates[pname] = (arity, kind or "regular")
        elif name == "functions":
            for n, col, t in content:
                sig = re.fullmatch(r"(\w+)\s*:\s*(.*?)\s*->\s*(\w+)", t)
                entry = re.fullmatch(r"(\w+)\((.*)\)\s*=\s*(\w+)", t)
                if sig is not None:
                    parts = sig.group(2).split("*")
                    sorts = tuple(s.strip() for s in parts if s.strip())
                    signatures[sig.group(1)] = (sorts, sig.group(3))
                elif entry is not None:
                    fargs = tuple(a.strip() for a in entry.group(2).split(","))
                    tables.setdefault(entry.group(1), {})[fargs] = entry.group(3)
                else:
                    raise ParseError(
                        "expected 'f : s1 * s2 -> s' or 'f(a,b) = c'", n, col
                    )
        elif name in ("connections", "actions"):
            relation_lines.extend((name[:-1], line) for line in content)
        else:
            raise ParseError(f"unknown section '{name}'", lineno, 1)

    for kind, line in relation_lines:
        rname, pair = _relation_pair(line, predicates, kind)
        relations[kind].setdefault(rname, set()).add(pair)
    for fname in tables:
        if fname not in signatures:
            raise VocabularyError(f"Function '{fname}' has entries but no signature.")
    functions = {
        fname: FunctionTable(sorts, result, tables.get(fname, {}))
        for fname, (sorts, result) in signatures.items()
    }
    vocab = Vocabulary(predicates, functions, constants, domains)
    vocab = vocab.with_domain("agent", agents)
    kbs = {}
    for owner, lines in kb_lines.items():
        kbs[owner] = [_formula_at(line, vocab) for line in lines]
    snm = SocialNetworkModel(
        agents,
        vocab,
        connections=relations["connection"],
        actions=relations["action"],
        kbs=kbs,
        policies=policies,
        logger=logger,
    )
    diagnostics = snm.validate() if validate else []
    for diagnostic in diagnostics:
        if diagnostic.endswith("inconsistent knowledge base"):
            agent = diagnostic.split("'")[1]
            raise InconsistentKnowledgeError(diagnostic, agent=agent)
    if diagnostics:
        raise VocabularyError(diagnostics[0])
    return snm


def print_model(snm: SocialNetworkModel) -> str:
    """Print a social network model in the ``.snm`` text format."""
    vocab = snm.vocab
    out = [f"agents: {' '.join(snm.agents)}"]
    domains = {k: v for k, v in vocab.domains.items() if k != "agent"}
    if domains:
        out.append("domains:")
        out.extend(f"  {sort} = {' '.join(elems)}" for sort, elems in domains.items())
    if vocab.constants:
        out.append("constants:")
        out.extend(f"  {c} = {v}" for c, v in vocab.constants.items())
    if vocab.predicates:
        out.append("predicates:")
        for name, (arity, kind) in vocab.predicates.items():
            suffix = "" if kind == "regular" else f" {kind}"
            out.append(f"  {name}/{arity}{suffix}")
    if vocab.functions:
        out.append("functions:")
        for name, func in vocab.functions.items():
            out.append(f"  {name} : {' * '.join(func.sorts)} -> {func.result}")
            for args, value in func.table.items():
                out.append(f"  {name}({','.join(args)}) = {value}")
    for section, rels in (("connections", snm.connections), ("actions", snm.actions)):
        pairs = [(name, i, j) for name, ps in rels.items() for i, j in ps]
        if pairs:
            out.append(f"{section}:")
            out.extend(f"  {name}({i},{j})" for name, i, j in sorted(pairs))
    for owner, kb in snm.kbs.items():
        if len(kb):
            out.append(f"kb {owner}:")
            out.extend(f"  {to_text(f)}" for f in kb)
    for owner, lines in snm.policies.items():
        out.append(f"policies {owner}:")
        out.extend(f"  {line}" for line in lines)
    return "\n".join(out) + "\n"


def read_model(
    fn: Union[str, Path], validate: bool = True, logger=logger
) -> SocialNetworkModel:
    """Read a social network model from a ``.snm`` file.

    Parameters
    ----------
    fn: str, Path
        Path to the model file.

    Returns
    -------
    SocialNetworkModel
        Parsed model, see :py:func:`parse_model`.
    """
    with open(fn, "r", encoding="utf-8") as fid:
        snm = parse_model(fid.read(), validate=validate, logger=logger)
    logger.info(f"Read model with {len(snm.agents)} agents from {fn}.")
    return snm


def write_model(fn: Union[str, Path], snm: SocialNetworkModel) -> None:
    """Write a social network model to a ``.snm`` file."""
    with open(fn, "w", encoding="utf-8") as fid:
        fid.write(print_model(snm))


## KRIPKE MODELS: *.kripke ##


def parse_kripke(text: str) -> KripkeModel:
    """Parse a Kripke model from the ``.kripke`` text format.

    The file has the sections ``agents``, ``states``, ``rel <agent>``
    (lines ``state: successor successor``), ``val <state>`` (atoms true at
    the state), and optionally ``characteristic`` (one formula per line),
    ``marked`` (true or false), ``distinguished`` (a state) and
    ``theta <state>`` (one formula per line). Identifiers in formulas are
    read as domain elements.

    Parameters
    ----------
    text: str
        File contents.

    Returns
    -------
    KripkeModel
        Parsed model.
    """
    agents: List[str] = []
    states: List[str] = []
    pairs: Dict[str, List[Tuple[str, str]]] = {}
    valuation: Dict[str, List[Pred]] = {}
    theta: Dict[str, List[Formula]] = {}
    characteristic = None
    marked = False
    distinguished = None

    for name, arg, inline, lines in _sections(text):
        lineno = inline[0]
        if name in ("rel", "val", "theta") and arg is None:
            raise ParseError(f"section '{name}' needs an argument", lineno, 1)
        content = _content(inline, lines)
        if name == "agents":
            agents.extend(a for _, _, t in content for a in t.split())
        elif name == "states":
            states.extend(s for _, _, t in content for s in t.split())
        elif name == "rel":
            rel = pairs.setdefault(arg, [])
            for n, col, t in content:
                src, sep, dsts = t.partition(":")
                if not sep:
                    raise ParseError("expected 'state: successor ...'", n, col)
                rel.extend((src.strip(), dst) for dst in dsts.split())
        elif name == "val":
            for n, col, t in content:
                for match in re.finditer(r"\S+", t):
                    p = literalize(_formula_at((n, col + match.start(), match.group())))
                    if not isinstance(p, Pred):
                        raise ParseError("expected an atom", n, col + match.start())
                    valuation.setdefault(arg, []).append(p)
            valuation.setdefault(arg, [])
        elif name == "theta":
            theta[arg] = [literalize(_formula_at(line)) for line in lines]
        elif name == "characteristic":
            characteristic = [literalize(_formula_at(line)) for line in content]
        elif name == "marked":
            if inline[2] not in ("true", "false"):
                raise ParseError("expected 'true' or 'false'", lineno, inline[1])
            marked = inline[2] == "true"
        elif name == "distinguished":
            distinguished = inline[2]
        else:
            raise ParseError(f"unknown section '{name}'", lineno, 1)

    for agent in pairs:
        if agent not in agents:
            agents.append(agent)
    try:
        return KripkeModel(
            states,
            {a: pairs.get(a, []) for a in agents},
            valuation,
            theta={s: theta.get(s, ()) for s in states} if theta else None,
            characteristic=characteristic,
            marked=marked,
            distinguished=distinguished,
        )
    except ValueError as err:
        raise ParseError(str(err), 1, 1) from None


def print_kripke(m: KripkeModel) -> str:
    """Print a Kripke model in the ``.kripke`` text format."""
    out = [f"agents: {' '.join(m.agents)}", f"states: {' '.join(m.states)}"]
    for agent in m.agents:
        out.append(f"rel {agent}:")
        for s in m.states:
            succ = m.successors(agent, s)
            if succ:
                out.append(f"  {s}: {' '.join(succ)}")
    for s in m.states:
        atoms = sorted(to_text(p) for p in m.valuation[s])
        out.append(f"val {s}: {' '.join(atoms)}".rstrip())
    if m.characteristic is not None:
        out.append(f"marked: {'true' if m.marked else 'false'}")
        out.append("characteristic:")
        out.extend(f"  {t}" for t in sorted(to_text(f) for f in m.characteristic))
    if m.distinguished is not None:
        out.append(f"distinguished: {m.distinguished}")
    if m.theta is not None:
        for s in m.states:
            out.append(f"theta {s}:")
            out.extend(f"  {t}" for t in sorted(to_text(f) for f in m.theta[s]))
    return "\n".join(out) + "\n"


def read_kripke(fn: Union[str, Path]) -> KripkeModel:
    """Read a Kripke model from a ``.kripke`` file.

    Parameters
    ----------
    fn: str, Path
        Path to the model file.

    Returns
    -------
    KripkeModel
        Parsed model, see :py:func:`parse_kripke`.
    """
    with open(fn, "r", encoding="utf-8") as fid:
        m = parse_kripke(fid.read())
    logger.info(f"Read Kripke model with {m.n_states} states from {fn}.")
    return m


def write_kripke(fn: Union[str, Path], m: KripkeModel) -> None:
    """Write a Kripke model to a ``.kripke`` file."""
    with open(fn, "w", encoding="utf-8") as fid:
        fid.write(print_kripke(m))
