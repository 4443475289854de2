"""Text format for qbsfs (``.qbsf``) and a DQDIMACS reader.

Grammar, loosest to tightest binding::

    phi := QUANT IDENT ['/' NAT] phi          quantifier body extends right
         | phi '<->' phi                       left associative
         | phi '->' phi                        right associative
         | phi '|' phi | phi '&' phi           left associative
         | '~' phi
         | '0' | '1' | IDENT | IDENT '(' phi (',' phi)* ')' | '(' phi ')'

``;`` starts a comment that runs to the end of the line.  ``->`` and ``<->``
are lowered while parsing, so printing a parsed formula shows the lowered
connectives.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from .core import (
    TRUE,
    And,
    App,
    Const,
    Formula,
    Not,
    Or,
    Quantifier,
    conj,
    disj,
    iff,
    implies,
    prop,
    quantifier,
)
from .errors import HeaderMismatch, InconsistentArity, ParseError, UndeclaredVariable

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>;[^\n]*)
  | (?P<op><->|->|[&|~(),/])
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

KEYWORDS = ("exists", "forall")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ident" and chunk in KEYWORDS:
            kind = "quant"
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.scopes = []  # stack of [name, arity or None]
        self.free = {}

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def take(self, text=None, kind=None):
        tok = self.tok
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = text if text is not None else kind
            got = tok.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        self.i += 1
        return tok

    def at(self, text):
        return self.tok.kind == "op" and self.tok.text == text

    def parse(self):
        phi = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return phi

    def formula(self):
        left = self.implication()
        while self.at("<->"):
            self.take()
            left = iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.take()
            return implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.at("&"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.tok
        if self.at("~"):
            self.take()
            return Not(self.unary())
        if tok.kind == "quant":
            return self.quantified()
        return self.atom()

    def quantified(self):
        # a run of binders is read in a loop so long prefixes do not recurse
        binders = []
        while self.tok.kind == "quant":
            kind = self.take().text
            name = self.take(kind="ident").text
            entry = [name, None]
            if self.at("/"):
                self.take()
                entry[1] = int(self.take(kind="nat").text)
            self.scopes.append(entry)
            binders.append((kind, entry))
        body = self.formula()
        for kind, entry in reversed(binders):
            self.scopes.pop()
            body = quantifier(kind, entry[0], entry[1] or 0, body)
        return body

    def atom(self):
        tok = self.tok
        if tok.kind == "nat":
            if tok.text not in ("0", "1"):
                raise self.error(f"constant must be 0 or 1, found {tok.text!r}")
            self.take()
            return Const(int(tok.text))
        if tok.kind == "ident":
            self.take()
            args = []
            if self.at("("):
                self.take()
                args.append(self.formula())
                while self.at(","):
                    self.take()
                    args.append(self.formula())
                self.take(")")
            self.note_use(tok, len(args))
            return App(tok.text, tuple(args))
        if self.at("("):
            self.take()
            phi = self.formula()
            self.take(")")
            return phi
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def note_use(self, tok, arity):
        for entry in reversed(self.scopes):
            if entry[0] == tok.text:
                if entry[1] is None:
                    entry[1] = arity
                elif entry[1] != arity:
                    raise InconsistentArity(
                        f"line {tok.line}, column {tok.col}: {tok.text!r} is bound at arity "
                        f"{entry[1]} but applied to {arity} arguments"
                    )
                return
        seen = self.free.setdefault(tok.text, arity)
        if seen != arity:
            raise InconsistentArity(
                f"line {tok.line}, column {tok.col}: free symbol {tok.text!r} used with "
                f"{seen} and {arity} arguments"
            )


def parse_formula(text: str) -> Formula:
    """Parse qbsf text into a formula.

    Raises ParseError (with line and column) or InconsistentArity.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2}


def print_formula(phi: Formula) -> str:
    """Inverse of :func:`parse_formula` with as few parentheses as possible."""
    out: List[str] = []
    _emit(phi, 0, True, out)
    return "".join(out)


def _emit(node, prec, last, out):
    # ``prec``: binding strength the context demands; ``last``: nothing
    # follows this node inside the current group, so a quantifier body may
    # extend to the right without parentheses.
    if isinstance(node, Const):
        out.append(str(node.bit))
    elif isinstance(node, App):
        out.append(node.symbol)
        if node.args:
            out.append("(")
            for i, a in enumerate(node.args):
                if i:
                    out.append(", ")
                _emit(a, 0, True, out)
            out.append(")")
    elif isinstance(node, Not):
        out.append("~")
        _emit(node.body, 3, last, out)
    elif isinstance(node, (And, Or)):
        mine = _PREC[type(node)]
        wrap = prec > mine
        if wrap:
            out.append("(")
            last = True
        _emit(node.left, mine, False, out)
        out.append(" & " if isinstance(node, And) else " | ")
        _emit(node.right, mine + 1, last, out)
        if wrap:
            out.append(")")
    elif isinstance(node, Quantifier):
        wrap = not last
        if wrap:
            out.append("(")
        while isinstance(node, Quantifier):
            out.append(f"{node.kind} {node.symbol}")
            if node.arity:
                out.append(f"/{node.arity}")
            out.append(" ")
            node = node.body
        _emit(node, 0, True, out)
        if wrap:
            out.append(")")
    else:
        raise TypeError(f"not a formula: {node!r}")


# ---------------------------------------------------------------------------
# DQDIMACS


@dataclass(frozen=True)
class DqbfInstance:
    """``forall universals, exists y_i(deps_i) ..., matrix`` with a CNF matrix."""

    universals: Tuple[str, ...]
    existentials: Tuple[Tuple[str, Tuple[str, ...]], ...]
    matrix: Formula

    def __post_init__(self):
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "existentials", tuple((y, tuple(d)) for y, d in self.existentials))
        univ = set(self.universals)
        for y, deps in self.existentials:
            bad = [d for d in deps if d not in univ]
            if bad:
                raise UndeclaredVariable(f"dependencies {bad} of {y!r} are not universal")


def parse_dqdimacs(text: str) -> DqbfInstance:
    """Read the DQDIMACS subset: ``p cnf``, ``a``/``e``/``d`` lines, clauses, ``c`` comments.

    Variable ``k`` becomes ``vk``.  An ``e`` line depends on every universal
    declared before it.
    """
    header = None
    universals: List[int] = []
    existentials = {}
    order: List[int] = []
    clauses: List[List[int]] = []
    current: List[int] = []
    current_line = None

    def check_var(v, lineno):
        if not 1 <= v <= header[0]:
            raise HeaderMismatch(f"variable {v} outside 1..{header[0]} declared in the header", lineno)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise ParseError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("header must read 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("header counts must be non-negative", lineno)
            continue
        if header is None:
            raise ParseError("missing 'p cnf' header before content", lineno)
        if parts[0] in ("a", "e", "d"):
            if clauses or current:
                raise ParseError("quantifier line after the first clause", lineno)
            nums = _ints(parts[1:], lineno)
            if not nums or nums[-1] != 0:
                raise ParseError("quantifier line must end with 0", lineno)
            nums = nums[:-1]
            if any(v <= 0 for v in nums) or 0 in nums:
                raise ParseError("quantifier lines take positive variable numbers", lineno)
            for v in nums:
                check_var(v, lineno)
            if parts[0] == "d":
                if not nums:
                    raise ParseError("'d' line needs a variable", lineno)
                targets, deps = [nums[0]], nums[1:]
                univ = set(universals)
                for d in deps:
                    if d not in univ:
                        raise UndeclaredVariable(f"dependency {d} is not a declared universal", lineno)
            else:
                targets, deps = nums, list(universals)
            for v in targets:
                if v in existentials or v in universals:
                    raise ParseError(f"variable {v} quantified twice", lineno)
                if parts[0] == "a":
                    universals.append(v)
                else:
                    existentials[v] = list(deps)
                    order.append(v)
            continue
        for lit in _ints(parts, lineno):
            if lit == 0:
                clauses.append(current)
                current = []
                continue
            check_var(abs(lit), lineno)
            current.append(lit)
            current_line = lineno
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause is not terminated by 0", current_line)
    if len(clauses) != header[1]:
        raise HeaderMismatch(f"header declares {header[1]} clauses, found {len(clauses)}")
    declared = set(universals) | set(existentials)
    for clause in clauses:
        for lit in clause:
            if abs(lit) not in declared:
                raise UndeclaredVariable(f"variable {abs(lit)} occurs in a clause but is not quantified")

    def name(v):
        return f"v{v}"

    def literal(lit):
        atom = prop(name(abs(lit)))
        return atom if lit > 0 else Not(atom)

    matrix = conj(disj(literal(l) for l in clause) for clause in clauses) if clauses else TRUE
    return DqbfInstance(
        tuple(name(u) for u in universals),
        tuple((name(y), tuple(name(d) for d in existentials[y])) for y in order),
        matrix,
    )


def _ints(parts, lineno):
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"expected integers, found {' '.join(parts)!r}", lineno) from None


def print_dqdimacs(inst: DqbfInstance) -> str:
    """Write an instance whose matrix is a CNF over its declared variables."""
    from .analysis import clauses_of

    names = list(inst.universals) + [y for y, _ in inst.existentials]
    # names read from DQDIMACS (``v<k>``) keep their numbers
    if all(re.fullmatch(r"v[1-9][0-9]*", n) for n in names):
        number = {n: int(n[1:]) for n in names}
    else:
        number = {n: i + 1 for i, n in enumerate(names)}
    cls = clauses_of(inst.matrix)
    if cls is None:
        raise ValueError("matrix is not a CNF")
    lines = [f"p cnf {max(number.values(), default=0)} {len(cls)}"]
    if inst.universals:
        lines.append("a " + " ".join(str(number[u]) for u in inst.universals) + " 0")
    for y, deps in inst.existentials:
        lines.append(" ".join(["d", str(number[y])] + [str(number[d]) for d in deps] + ["0"]))
    for clause in cls:
        lits = []
        for lit in clause:
            neg = isinstance(lit, Not)
            atom = lit.body if neg else lit
            if isinstance(atom, Const):
                raise ValueError("constants cannot be written in DQDIMACS")
            lits.append(("-" if neg else "") + str(number[atom.symbol]))
        lines.append(" ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"
