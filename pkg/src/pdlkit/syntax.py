"""Formula and program syntax for three propositional dynamic logics.

Dialects:
  PDL      atomic programs, composition, choice, iteration
  IPDL     PDL plus test and intersection
  PRSPDL   atomic programs, the four component programs r1/r2/s1/s2,
           test, composition, parallel composition, iteration (no choice)

Formulas live in a four-constructor core (variable, falsum, implication,
box); the usual abbreviations expand into the core at construction time.
The printer re-sugars exactly negation, verum, and diamond.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union


class Dialect(Enum):
    """The three program languages."""

    PDL = "pdl"
    IPDL = "ipdl"
    PRSPDL = "prspdl"

    @classmethod
    def from_name(cls, name: str) -> "Dialect":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown dialect {name!r}; expected pdl, ipdl, or prspdl") from None


class ParseError(ValueError):
    """Syntax error, carrying the character offset where parsing failed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DialectError(ValueError):
    """A construct outside the dialect's program language."""


class Formula:
    """Base class for formula nodes."""


class Program:
    """Base class for program nodes."""


@dataclass(frozen=True)
class Var(Formula):
    """Propositional variable p<index>, index >= 1."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class Falsum(Formula):
    """The constant false."""


@dataclass(frozen=True)
class Implies(Formula):
    """Material implication."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    """[program] body."""

    program: Program
    body: Formula


@dataclass(frozen=True)
class Atomic(Program):
    """Atomic program a<index>, index >= 1."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"atomic program index must be >= 1, got {self.index}")


SPECIAL_KINDS = ("r1", "r2", "s1", "s2")


@dataclass(frozen=True)
class Special(Program):
    """One of the four store-access programs r1, r2, s1, s2."""

    kind: str

    def __post_init__(self):
        if self.kind not in SPECIAL_KINDS:
            raise ValueError(f"special program must be one of {SPECIAL_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Test(Program):
    """formula? -- identity on states satisfying the formula."""

    __test__ = False  # not a pytest class, despite the name

    formula: Formula


@dataclass(frozen=True)
class Seq(Program):
    """Sequential composition."""

    left: Program
    right: Program


@dataclass(frozen=True)
class Choice(Program):
    """Nondeterministic choice."""

    left: Program
    right: Program


@dataclass(frozen=True)
class Inter(Program):
    """Intersection of programs."""

    left: Program
    right: Program


@dataclass(frozen=True)
class Par(Program):
    """Parallel composition."""

    left: Program
    right: Program


@dataclass(frozen=True)
class Star(Program):
    """Reflexive-transitive iteration."""

    inner: Program


FALSUM = Falsum()
TOP = Implies(FALSUM, FALSUM)


def top() -> Formula:
    """The constant true, as not-false."""
    return TOP


def neg(phi: Formula) -> Formula:
    """Negation as implication into falsum."""
    return Implies(phi, FALSUM)


def conj(left: Formula, right: Formula) -> Formula:
    """Conjunction, expanded to ~(left -> ~right)."""
    return neg(Implies(left, neg(right)))


def disj(left: Formula, right: Formula) -> Formula:
    """Disjunction, expanded to ~left -> right."""
    return Implies(neg(left), right)


def iff(left: Formula, right: Formula) -> Formula:
    """Biconditional as the conjunction of both implications."""
    return conj(Implies(left, right), Implies(right, left))


def diamond(program: Program, body: Formula) -> Formula:
    """Diamond as the dual of box."""
    return neg(Box(program, neg(body)))


# Program constructors admitted by each dialect.
_ALLOWED: dict[Dialect, tuple[type, ...]] = {
    Dialect.PDL: (Atomic, Seq, Choice, Star),
    Dialect.IPDL: (Atomic, Test, Seq, Choice, Inter, Star),
    Dialect.PRSPDL: (Atomic, Special, Test, Seq, Par, Star),
}

_PROGRAM_NAMES = {
    Atomic: "atomic program",
    Special: "store-access program",
    Test: "test '?'",
    Seq: "composition ';'",
    Choice: "choice 'u'",
    Inter: "intersection '&'",
    Par: "parallel composition '||'",
    Star: "iteration '*'",
}


def validate_program(alpha: Program, dialect: Dialect) -> None:
    """Raise DialectError if the program uses a constructor outside the dialect."""
    allowed = _ALLOWED[dialect]
    for node in iter_nodes(alpha):
        if isinstance(node, Program) and not isinstance(node, allowed):
            raise DialectError(
                f"{_PROGRAM_NAMES[type(node)]} is not available under {dialect.value.upper()}"
            )


def validate(phi: Formula, dialect: Dialect) -> None:
    """Raise DialectError if any program in the formula is outside the dialect."""
    allowed = _ALLOWED[dialect]
    for node in iter_nodes(phi):
        if isinstance(node, Program) and not isinstance(node, allowed):
            raise DialectError(
                f"{_PROGRAM_NAMES[type(node)]} is not available under {dialect.value.upper()}"
            )


def iter_nodes(root: Union[Formula, Program]) -> Iterator[Union[Formula, Program]]:
    """Preorder walk over formula and program nodes, in textual order."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        match node:
            case Implies(left, right):
                stack.append(right)
                stack.append(left)
            case Box(program, body):
                stack.append(body)
                stack.append(program)
            case Test(formula):
                stack.append(formula)
            case Seq(left, right) | Choice(left, right) | Inter(left, right) | Par(left, right):
                stack.append(right)
                stack.append(left)
            case Star(inner):
                stack.append(inner)
            case _:
                pass


@dataclass(frozen=True)
class FormulaMetrics:
    """Size and vocabulary summary of a formula."""

    size: int
    variables: frozenset[int]
    atoms: frozenset[int]
    modal_depth: int


def metrics(phi: Formula) -> FormulaMetrics:
    """Node count, variable/atom index sets, and modal nesting depth."""
    size = 0
    variables = set()
    atoms = set()
    for node in iter_nodes(phi):
        size += 1
        if isinstance(node, Var):
            variables.add(node.index)
        elif isinstance(node, Atomic):
            atoms.add(node.index)
    return FormulaMetrics(size, frozenset(variables), frozenset(atoms), _modal_depth(phi))


def _modal_depth(node: Union[Formula, Program]) -> int:
    match node:
        case Var() | Falsum() | Atomic() | Special():
            return 0
        case Implies(left, right):
            return max(_modal_depth(left), _modal_depth(right))
        case Box(program, body):
            return max(_modal_depth(program), 1 + _modal_depth(body))
        case Test(formula):
            return _modal_depth(formula)
        case Seq(left, right) | Choice(left, right) | Inter(left, right) | Par(left, right):
            return max(_modal_depth(left), _modal_depth(right))
        case Star(inner):
            return _modal_depth(inner)
    raise TypeError(f"not a formula or program node: {node!r}")


def substitute(phi: Formula, var_index: int, psi: Formula) -> Formula:
    """Replace every occurrence of p<var_index> by psi, including inside tests."""
    return _subst_formula(phi, var_index, psi)


def _subst_formula(phi: Formula, i: int, psi: Formula) -> Formula:
    match phi:
        case Var(index):
            return psi if index == i else phi
        case Falsum():
            return phi
        case Implies(left, right):
            return Implies(_subst_formula(left, i, psi), _subst_formula(right, i, psi))
        case Box(program, body):
            return Box(_subst_program(program, i, psi), _subst_formula(body, i, psi))
    raise TypeError(f"not a formula: {phi!r}")


def _subst_program(alpha: Program, i: int, psi: Formula) -> Program:
    match alpha:
        case Atomic() | Special():
            return alpha
        case Test(formula):
            return Test(_subst_formula(formula, i, psi))
        case Seq(left, right):
            return Seq(_subst_program(left, i, psi), _subst_program(right, i, psi))
        case Choice(left, right):
            return Choice(_subst_program(left, i, psi), _subst_program(right, i, psi))
        case Inter(left, right):
            return Inter(_subst_program(left, i, psi), _subst_program(right, i, psi))
        case Par(left, right):
            return Par(_subst_program(left, i, psi), _subst_program(right, i, psi))
        case Star(inner):
            return Star(_subst_program(inner, i, psi))
    raise TypeError(f"not a program: {alpha!r}")


def normalize_variables(phi: Formula) -> tuple[Formula, dict[int, int], dict[int, int]]:
    """Rename variables to p1..pn and atomic programs to a1..al.

    Indices are assigned in order of first textual occurrence.  Returns the
    renamed formula together with the old-to-new maps for variables and atoms.
    """
    var_map: dict[int, int] = {}
    atom_map: dict[int, int] = {}
    for node in iter_nodes(phi):
        if isinstance(node, Var) and node.index not in var_map:
            var_map[node.index] = len(var_map) + 1
        elif isinstance(node, Atomic) and node.index not in atom_map:
            atom_map[node.index] = len(atom_map) + 1
    return _rename_formula(phi, var_map, atom_map), var_map, atom_map


def _rename_formula(phi: Formula, vmap: dict[int, int], amap: dict[int, int]) -> Formula:
    match phi:
        case Var(index):
            return Var(vmap[index])
        case Falsum():
            return phi
        case Implies(left, right):
            return Implies(_rename_formula(left, vmap, amap), _rename_formula(right, vmap, amap))
        case Box(program, body):
            return Box(_rename_program(program, vmap, amap), _rename_formula(body, vmap, amap))
    raise TypeError(f"not a formula: {phi!r}")


def _rename_program(alpha: Program, vmap: dict[int, int], amap: dict[int, int]) -> Program:
    match alpha:
        case Atomic(index):
            return Atomic(amap[index])
        case Special():
            return alpha
        case Test(formula):
            return Test(_rename_formula(formula, vmap, amap))
        case Seq(left, right):
            return Seq(_rename_program(left, vmap, amap), _rename_program(right, vmap, amap))
        case Choice(left, right):
            return Choice(_rename_program(left, vmap, amap), _rename_program(right, vmap, amap))
        case Inter(left, right):
            return Inter(_rename_program(left, vmap, amap), _rename_program(right, vmap, amap))
        case Par(left, right):
            return Par(_rename_program(left, vmap, amap), _rename_program(right, vmap, amap))
        case Star(inner):
            return Star(_rename_program(inner, vmap, amap))
    raise TypeError(f"not a program: {alpha!r}")


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<var>p[0-9]+)
    | (?P<atom>a[0-9]+)
    | (?P<special>r1|r2|s1|s2)
    | (?P<true>true)
    | (?P<false>false)
    | (?P<choice>u)
    | (?P<op><->|->|\|\||[~&|;*?()\[\]<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok_text = m.group()
            if kind == "op":
                kind = tok_text
            tokens.append(_Token(kind, tok_text, pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
#
# Formula precedence, loosest first:  <->  ->  |  &  unary.
# '->' and '<->' associate to the right; '|' and '&' to the left.
# Program precedence, loosest first:  ||  u  &  ;  postfix.
# Tests are written <unary formula>?; a parenthesized group followed by '?'
# is a test on the enclosed formula, otherwise it is a grouped program.


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.peek().kind == kind:
            self.i += 1
            return True
        return False

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", tok.pos)
        return self.advance()

    # formulas

    def formula(self) -> Formula:
        left = self.implication()
        if self.accept("<->"):
            return iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = conj(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.advance()
            return neg(self.unary())
        if tok.kind == "[":
            self.advance()
            prog = self.program()
            self.expect("]", "']'")
            return Box(prog, self.unary())
        if tok.kind == "<":
            self.advance()
            prog = self.program()
            self.expect(">", "'>'")
            return diamond(prog, self.unary())
        return self.formula_primary()

    def formula_primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "false":
            self.advance()
            return FALSUM
        if tok.kind == "true":
            self.advance()
            return TOP
        if tok.kind == "var":
            self.advance()
            index = int(tok.text[1:])
            if index < 1:
                raise ParseError("variable index must be >= 1", tok.pos)
            return Var(index)
        if tok.kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")", "')'")
            return inner
        found = tok.text or "end of input"
        raise ParseError(f"expected a formula, found {found!r}", tok.pos)

    # programs

    def program(self) -> Program:
        left = self.par_level()
        while self.accept("||"):
            left = Par(left, self.par_level())
        return left

    def par_level(self) -> Program:
        left = self.choice_level()
        while self.accept("choice"):
            left = Choice(left, self.choice_level())
        return left

    def choice_level(self) -> Program:
        left = self.inter_level()
        while self.accept("&"):
            left = Inter(left, self.inter_level())
        return left

    def inter_level(self) -> Program:
        left = self.postfix()
        while self.accept(";"):
            left = Seq(left, self.postfix())
        return left

    def postfix(self) -> Program:
        prog = self.program_primary()
        while self.accept("*"):
            prog = Star(prog)
        return prog

    def program_primary(self) -> Program:
        tok = self.peek()
        if tok.kind == "atom":
            self.advance()
            index = int(tok.text[1:])
            if index < 1:
                raise ParseError("atomic program index must be >= 1", tok.pos)
            return Atomic(index)
        if tok.kind == "special":
            self.advance()
            return Special(tok.text)
        if tok.kind == "(":
            # A parenthesized group is a program unless a '?' follows the
            # closing parenthesis, in which case the group is a test formula.
            mark = self.i
            self.advance()
            try:
                prog = self.program()
                self.expect(")", "')'")
                if self.peek().kind != "?":
                    return prog
            except ParseError:
                pass
            self.i = mark
            self.advance()
            formula = self.formula()
            self.expect(")", "')'")
            self.expect("?", "'?'")
            return Test(formula)
        if tok.kind in ("var", "true", "false", "~", "[", "<"):
            formula = self.unary()
            self.expect("?", "'?' after test formula")
            return Test(formula)
        found = tok.text or "end of input"
        raise ParseError(f"expected a program, found {found!r}", tok.pos)


def parse_formula(text: str, dialect: Dialect) -> Formula:
    """Parse a formula, expanding abbreviations; rejects constructs outside the dialect."""
    parser = _Parser(_tokenize(text))
    phi = parser.formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
    validate(phi, dialect)
    return phi


def parse_program(text: str, dialect: Dialect) -> Program:
    """Parse a standalone program; rejects constructs outside the dialect."""
    parser = _Parser(_tokenize(text))
    alpha = parser.program()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
    validate_program(alpha, dialect)
    return alpha


def parse_formula_lines(text: str, dialect: Dialect) -> list[Formula]:
    """Parse one formula per line; blank lines and '#' comments are skipped."""
    formulas = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            formulas.append(parse_formula(stripped, dialect))
    return formulas


# ---------------------------------------------------------------------------
# Printer

_F_IMPL, _F_UNARY, _F_ATOM = 1, 2, 3
_P_PAR, _P_CHOICE, _P_INTER, _P_SEQ, _P_POSTFIX, _P_ATOM = 1, 2, 3, 4, 5, 6


def print_formula(phi: Formula) -> str:
    """Render a formula; parse_formula inverts this exactly."""
    text, _ = _render_formula(phi)
    return text


def print_program(alpha: Program) -> str:
    """Render a program; parse_program inverts this exactly."""
    text, _ = _render_program(alpha)
    return text


def _fparen(node: Formula, min_level: int) -> str:
    text, level = _render_formula(node)
    return f"({text})" if level < min_level else text


def _render_formula(phi: Formula) -> tuple[str, int]:
    match phi:
        case Implies(Falsum(), Falsum()):
            return "true", _F_ATOM
        case Implies(Box(program, Implies(body, Falsum())), Falsum()):
            return f"<{print_program(program)}>{_fparen(body, _F_UNARY)}", _F_UNARY
        case Implies(left, Falsum()):
            return f"~{_fparen(left, _F_UNARY)}", _F_UNARY
        case Var(index):
            return f"p{index}", _F_ATOM
        case Falsum():
            return "false", _F_ATOM
        case Implies(left, right):
            return f"{_fparen(left, _F_UNARY)} -> {_fparen(right, _F_IMPL)}", _F_IMPL
        case Box(program, body):
            return f"[{print_program(program)}]{_fparen(body, _F_UNARY)}", _F_UNARY
    raise TypeError(f"not a formula: {phi!r}")


def _pparen(node: Program, min_level: int) -> str:
    text, level = _render_program(node)
    return f"({text})" if level < min_level else text


def _render_program(alpha: Program) -> tuple[str, int]:
    match alpha:
        case Atomic(index):
            return f"a{index}", _P_ATOM
        case Special(kind):
            return kind, _P_ATOM
        case Test(formula):
            return f"{_fparen(formula, _F_UNARY)}?", _P_POSTFIX
        case Star(inner):
            return f"{_pparen(inner, _P_POSTFIX)}*", _P_POSTFIX
        case Seq(left, right):
            return f"{_pparen(left, _P_SEQ)};{_pparen(right, _P_SEQ + 1)}", _P_SEQ
        case Inter(left, right):
            return f"{_pparen(left, _P_INTER)} & {_pparen(right, _P_INTER + 1)}", _P_INTER
        case Choice(left, right):
            return f"{_pparen(left, _P_CHOICE)} u {_pparen(right, _P_CHOICE + 1)}", _P_CHOICE
        case Par(left, right):
            return f"{_pparen(left, _P_PAR)} || {_pparen(right, _P_PAR + 1)}", _P_PAR
    raise TypeError(f"not a program: {alpha!r}")
