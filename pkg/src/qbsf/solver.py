"""Decision procedure for closed qbsfs.

Quantifiers are expanded from the outside in, one truth table at a time in
lexicographic order, stopping an ``exists`` at the first 1 and a ``forall``
at the first 0.  A trailing run of proposition quantifiers over a clausal
matrix is handed to clause search.  The result carries a witness for the
leading block of same-type quantifiers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import _clausal
from .core import (
    DEFAULT_LIMITS,
    EXISTS,
    And,
    App,
    Const,
    Formula,
    Interpretation,
    Limits,
    Not,
    Or,
    Quantifier,
    TruthTable,
    check_bound_arities,
    evaluate,
    free_symbols,
    index_to_args,
)
from .errors import LimitExceeded, NotClosed

SolveLimits = Limits


@dataclass(frozen=True)
class Verdict:
    """Truth value plus, when it agrees with the leading block's type, the tables chosen there."""

    value: int
    witness: Optional[Interpretation] = None

    def __bool__(self):
        return bool(self.value)


class _Search:
    def __init__(self, limits):
        self.limits = limits
        self.steps = 0
        self.blocks = {}

    def tick(self, n=1):
        self.steps += n
        if self.steps > self.limits.max_steps:
            raise LimitExceeded(f"solver exceeded {self.limits.max_steps} steps")

    def value(self, node, env):
        self.tick()
        if isinstance(node, Const):
            return node.bit
        if isinstance(node, App):
            bits = env[node.symbol]
            idx = 0
            for a in node.args:
                idx = (idx << 1) | self.value(a, env)
            return bits[idx]
        if isinstance(node, Not):
            return 1 - self.value(node.body, env)
        if isinstance(node, And):
            return self.value(node.left, env) and self.value(node.right, env)
        if isinstance(node, Or):
            return self.value(node.left, env) or self.value(node.right, env)
        if isinstance(node, Quantifier):
            return self.quantified(node, env)[0]
        raise TypeError(f"not a formula: {node!r}")

    def block_for(self, node):
        key = id(node)
        if key not in self.blocks:
            names = []
            body = node
            while isinstance(body, Quantifier) and body.kind == node.kind and body.arity == 0:
                names.append(body.symbol)
                body = body.body
            block = None
            if len(set(names)) == len(names) and not isinstance(body, Quantifier):
                block = _clausal.compile_block(node.kind, names, body)
            self.blocks[key] = (node, block)
        return self.blocks[key][1]

    def quantified(self, node, env, want_witness=False):
        """Value of ``node`` plus the witnessing tables of its leading same-type run."""
        if node.arity == 0:
            block = self.block_for(node)
            if block is not None:
                tables = {n: env[n] for n in block.outer}
                value, model, spent = block.decide(tables, self.limits.max_steps - self.steps)
                self.tick(spent)
                witness = None
                if model is not None:
                    witness = [(n, 0, (b,)) for n, b in zip(block.names, model)]
                return value, witness
        stop = 1 if node.kind == EXISTS else 0
        width = 1 << node.arity
        inner = dict(env)
        body = node.body
        same_run = isinstance(body, Quantifier) and body.kind == node.kind
        for rank in range(1 << width):
            bits = index_to_args(rank, width)
            inner[node.symbol] = bits
            if want_witness and same_run:
                value, rest = self.quantified(body, inner, True)
            else:
                value, rest = self.value(body, inner), None
            if value == stop:
                if want_witness:
                    return value, [(node.symbol, node.arity, bits)] + (rest or [])
                return value, None
        return 1 - stop, None


def decide(phi: Formula, limits: Limits = DEFAULT_LIMITS) -> Verdict:
    """Decide a closed formula; raises NotClosed or LimitExceeded."""
    free = free_symbols(phi)
    if free:
        raise NotClosed(f"formula has free symbols {sorted(free)}")
    check_bound_arities(phi)
    _check_arities(phi, limits)
    search = _Search(limits)
    if not isinstance(phi, Quantifier):
        return Verdict(search.value(phi, {}))
    value, witness = search.quantified(phi, {}, want_witness=True)
    if witness is None:
        return Verdict(value)
    return Verdict(value, Interpretation({n: TruthTable(a, bits) for n, a, bits in witness}))


def _check_arities(phi, limits):
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Quantifier):
            if node.arity > limits.max_arity:
                raise LimitExceeded(
                    f"quantified arity {node.arity} of {node.symbol!r} exceeds bound {limits.max_arity}"
                )
            stack.append(node.body)
        elif isinstance(node, App):
            stack.extend(node.args)
        elif isinstance(node, Not):
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            stack.extend((node.left, node.right))


def strip_witness(phi: Formula, witness: Interpretation) -> Formula:
    """Drop the leading binders that ``witness`` covers."""
    while isinstance(phi, Quantifier) and phi.symbol in witness:
        phi = phi.body
    return phi


def decide_against_oracle(phi: Formula, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Whether :func:`decide` agrees with the exhaustive evaluator."""
    return decide(phi, limits).value == evaluate(phi, {}, limits)
