"""Syntactic classification: normal forms, the uniq property, fragment signatures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

from .core import (
    EXISTS,
    And,
    App,
    Const,
    Formula,
    Not,
    Or,
    children,
    is_quantifier_free,
    split_prefix,
)
from .errors import NotPrenex, NotSplittable

OMEGA = math.inf
SIGMA, PI, NONE = "Sigma", "Pi", "none"


def _chain(node, cls) -> List[Formula]:
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, cls):
            stack.append(cur.right)
            stack.append(cur.left)
        else:
            out.append(cur)
    return out


def is_prenex(phi: Formula) -> bool:
    _, matrix = split_prefix(phi)
    return is_quantifier_free(matrix)


def _simple_arg(a) -> bool:
    # constants are admitted next to propositions: padded and merged atoms carry them
    return isinstance(a, Const) or (isinstance(a, App) and not a.args)


def is_simple(phi: Formula) -> bool:
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, App) and not all(_simple_arg(a) for a in node.args):
            return False
        stack.extend(children(node))
    return True


def is_literal(node: Formula) -> bool:
    if isinstance(node, Not):
        node = node.body
    return isinstance(node, Const) or (isinstance(node, App) and all(_simple_arg(a) for a in node.args))


def clauses_of(matrix: Formula) -> Optional[List[List[Formula]]]:
    """Clauses of a propositional CNF matrix as literal lists, else None."""
    out = []
    for part in _chain(matrix, And):
        lits = _chain(part, Or)
        if not all(is_literal(l) for l in lits):
            return None
        out.append(lits)
    return out


def terms_of(matrix: Formula) -> Optional[List[List[Formula]]]:
    """Terms of a propositional DNF matrix as literal lists, else None."""
    out = []
    for part in _chain(matrix, Or):
        lits = _chain(part, And)
        if not all(is_literal(l) for l in lits):
            return None
        out.append(lits)
    return out


def is_cnf(phi: Formula) -> bool:
    _, matrix = split_prefix(phi)
    return is_quantifier_free(matrix) and clauses_of(matrix) is not None


def is_dnf(phi: Formula) -> bool:
    _, matrix = split_prefix(phi)
    return is_quantifier_free(matrix) and terms_of(matrix) is not None


def is_uniq(phi: Formula) -> bool:
    """Every symbol of arity >= 1 occurs with one fixed argument tuple."""
    seen = {}
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, App) and node.args:
            if seen.setdefault(node.symbol, node.args) != node.args:
                return False
        stack.extend(children(node))
    return True


# ---------------------------------------------------------------------------
# fragment signatures


@dataclass(frozen=True)
class FragmentSignature:
    """Prefix shape: function block then proposition block.

    Counts and alternation counts are ints or :data:`OMEGA`; an alternation
    count is the number of maximal same-quantifier runs.
    """

    so_type: str = NONE
    so_count: float = 0
    so_alt: float = 0
    fo_type: str = NONE
    fo_count: float = 0
    fo_alt: float = 0

    def __post_init__(self):
        for t, c, a in ((self.so_type, self.so_count, self.so_alt), (self.fo_type, self.fo_count, self.fo_alt)):
            if t not in (SIGMA, PI, NONE):
                raise ValueError(f"unknown block type {t!r}")
            if c < 0 or a < 0 or (a > c and not math.isinf(c)):
                raise ValueError("alternations must not exceed the count")
            if (t == NONE) != (c == 0):
                raise ValueError("type is 'none' exactly when the count is 0")

    def __str__(self):
        def part(t, c, a):
            if t == NONE:
                return "-"
            w = "w" if math.isinf(c) else str(int(c))
            k = "w" if math.isinf(a) else str(int(a))
            return f"{t}^{w}_{k}"

        return f"{part(self.so_type, self.so_count, self.so_alt)} {part(self.fo_type, self.fo_count, self.fo_alt)}"

    def to_json(self) -> dict:
        def enc(v):
            return "omega" if math.isinf(v) else int(v)

        return {
            "soType": self.so_type,
            "soCount": enc(self.so_count),
            "soAlt": enc(self.so_alt),
            "foType": self.fo_type,
            "foCount": enc(self.fo_count),
            "foAlt": enc(self.fo_alt),
        }

    @classmethod
    def parse(cls, text: str) -> "FragmentSignature":
        """Read ``"Sigma^1_1 Pi^2_1"``-style text; ``w`` stands for omega, ``-`` for an empty block."""
        parts = text.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"expected two blocks, got {text!r}")
        fields = []
        for p in parts:
            if p == "-":
                fields += [NONE, 0, 0]
                continue
            head, _, rest = p.partition("^")
            count, _, alt = rest.partition("_")
            conv = [OMEGA if s in ("w", "omega") else int(s) for s in (count, alt)]
            fields += [head] + conv
        return cls(*fields)


def _runs(kinds) -> int:
    runs = 0
    prev = None
    for k in kinds:
        if k != prev:
            runs += 1
            prev = k
    return runs


def _block(prefix):
    if not prefix:
        return NONE, 0, 0
    kinds = [k for k, _, _ in prefix]
    return (SIGMA if kinds[0] == EXISTS else PI), len(prefix), _runs(kinds)


def signature_of(phi: Formula) -> FragmentSignature:
    """Minimal signature of a prenex formula.

    The function block ends with the last quantifier of arity >= 1.  A
    proposition quantifier in front of a function quantifier makes the
    prefix unsplittable.
    """
    if not is_prenex(phi):
        raise NotPrenex("signature requires a prenex formula")
    prefix, _ = split_prefix(phi)
    last_fn = max((i for i, q in enumerate(prefix) if q[2] >= 1), default=-1)
    for i in range(last_fn):
        if prefix[i][2] == 0:
            raise NotSplittable(
                f"proposition quantifier {prefix[i][1]!r} precedes function quantifier {prefix[last_fn][1]!r}"
            )
    so, fo = prefix[: last_fn + 1], prefix[last_fn + 1:]
    return FragmentSignature(*_block(so), *_block(fo))


def _fits(block, t, count, alt) -> bool:
    if not block:
        return True
    bt, bc, ba = _block(block)
    return bt == t and bc <= count and ba <= alt


def in_fragment(phi: Formula, sig: FragmentSignature) -> bool:
    """Whether some split of the prefix satisfies ``sig``.

    The function block may hold quantifiers of any arity; the proposition
    block only arity 0.  Empty blocks impose no type constraint.
    """
    if not is_prenex(phi):
        raise NotPrenex("fragment membership requires a prenex formula")
    prefix, _ = split_prefix(phi)
    for s in range(len(prefix), -1, -1):
        fo = prefix[s:]
        if any(a != 0 for _, _, a in fo):
            break
        if _fits(prefix[:s], sig.so_type, sig.so_count, sig.so_alt) and _fits(
            fo, sig.fo_type, sig.fo_count, sig.fo_alt
        ):
            return True
    return False


def classify(phi: Formula) -> dict:
    """Report used by the command line ``classify`` subcommand."""
    report = {
        "prenex": is_prenex(phi),
        "simple": is_simple(phi),
        "cnf": is_cnf(phi) and is_simple(phi),
        "dnf": is_dnf(phi) and is_simple(phi),
        "uniq": is_uniq(phi),
        "signature": None,
    }
    if report["prenex"]:
        try:
            report["signature"] = signature_of(phi).to_json()
        except NotSplittable:
            pass
    return report
