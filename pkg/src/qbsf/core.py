"""Abstract syntax, truth tables, interpretations and exact semantics of qbsfs.

Formulas are immutable trees.  ``->`` and ``<->`` do not exist as nodes; the
helpers :func:`implies` and :func:`iff` lower them to ``~``, ``&`` and ``|``.

Argument tuples index truth tables with the first argument as the most
significant bit: ``(b1, ..., bn)`` maps to ``sum(b_j * 2**(n - j))``.  Every
module relies on this convention.

The evaluator enumerates truth tables exhaustively.  It is vectorised over a
batch of interpretations with numpy: a quantifier ``exists f/n`` multiplies the
batch by the ``2**(2**n)`` candidate tables and reduces with ``any``.
"""
from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ArityMismatch,
    CaptureDetected,
    InconsistentArity,
    InvalidPath,
    LimitExceeded,
    UnboundSymbol,
)

EXISTS = "exists"
FORALL = "forall"


# ---------------------------------------------------------------------------
# syntax


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        from .textio import print_formula

        return print_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {self.bit!r}")


@dataclass(frozen=True)
class App(Formula):
    symbol: str
    args: Tuple[Formula, ...] = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Quantifier(Formula):
    symbol: str
    arity: int
    body: Formula

    kind = ""

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")

    # prefixes of machine encodings run to hundreds of binders, so equality
    # and hashing walk the binder chain in a loop instead of recursing
    def __eq__(self, other):
        a, b = self, other
        while isinstance(a, Quantifier):
            if a.__class__ is not b.__class__ or a.symbol != b.symbol or a.arity != b.arity:
                return False
            a, b = a.body, b.body
        return a == b

    def __hash__(self):
        h = 0
        node = self
        while isinstance(node, Quantifier):
            h = hash((h, node.kind, node.symbol, node.arity))
            node = node.body
        return hash((h, node))


@dataclass(frozen=True, eq=False)
class Exists(Quantifier):
    kind = EXISTS


@dataclass(frozen=True, eq=False)
class Forall(Quantifier):
    kind = FORALL


TRUE = Const(1)
FALSE = Const(0)


def prop(name: str) -> App:
    return App(name, ())


def quantifier(kind: str, symbol: str, arity: int, body: Formula) -> Quantifier:
    if kind == EXISTS:
        return Exists(symbol, arity, body)
    if kind == FORALL:
        return Forall(symbol, arity, body)
    raise ValueError(f"unknown quantifier {kind!r}")


def dual_kind(kind: str) -> str:
    return FORALL if kind == EXISTS else EXISTS


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Or(Not(a), b), Or(Not(b), a))


def _balanced(items: Sequence[Formula], node) -> Formula:
    if len(items) == 1:
        return items[0]
    mid = len(items) // 2
    return node(_balanced(items[:mid], node), _balanced(items[mid:], node))


def conj(items: Iterable[Formula]) -> Formula:
    """Conjunction as a balanced tree; ``1`` when empty."""
    items = list(items)
    return _balanced(items, And) if items else TRUE


def disj(items: Iterable[Formula]) -> Formula:
    """Disjunction as a balanced tree; ``0`` when empty."""
    items = list(items)
    return _balanced(items, Or) if items else FALSE


def with_prefix(prefix: Sequence[Tuple[str, str, int]], matrix: Formula) -> Formula:
    """Wrap ``matrix`` in quantifiers given outermost first as (kind, symbol, arity)."""
    out = matrix
    for kind, symbol, arity in reversed(prefix):
        out = quantifier(kind, symbol, arity, out)
    return out


def split_prefix(phi: Formula) -> Tuple[list, Formula]:
    """Peel the leading quantifiers off ``phi``; returns (prefix, rest)."""
    prefix = []
    while isinstance(phi, Quantifier):
        prefix.append((phi.kind, phi.symbol, phi.arity))
        phi = phi.body
    return prefix, phi


def children(phi: Formula) -> Tuple[Formula, ...]:
    if isinstance(phi, App):
        return phi.args
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, (And, Or)):
        return (phi.left, phi.right)
    if isinstance(phi, Quantifier):
        return (phi.body,)
    return ()


def with_children(phi: Formula, kids: Sequence[Formula]) -> Formula:
    if isinstance(phi, App):
        return App(phi.symbol, tuple(kids))
    if isinstance(phi, Not):
        return Not(kids[0])
    if isinstance(phi, And):
        return And(kids[0], kids[1])
    if isinstance(phi, Or):
        return Or(kids[0], kids[1])
    if isinstance(phi, Quantifier):
        return quantifier(phi.kind, phi.symbol, phi.arity, kids[0])
    return phi


def is_quantifier_free(phi: Formula) -> bool:
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Quantifier):
            return False
        stack.extend(children(node))
    return True


def symbol_names(phi: Formula) -> set:
    """Every symbol name occurring in ``phi``, bound or free."""
    names = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, (App, Quantifier)):
            names.add(node.symbol)
        stack.extend(children(node))
    return names


def fresh_name(base: str, taken) -> str:
    """``base`` itself if unused, else ``base1``, ``base2``, ..."""
    if base not in taken:
        return base
    for k in itertools.count(1):
        cand = f"{base}{k}"
        if cand not in taken:
            return cand


def size(phi: Formula) -> int:
    n = 0
    stack = [phi]
    while stack:
        node = stack.pop()
        n += 1
        stack.extend(children(node))
    return n


# ---------------------------------------------------------------------------
# truth tables and interpretations


def args_to_index(args: Sequence[int]) -> int:
    idx = 0
    for b in args:
        idx = (idx << 1) | int(b)
    return idx


def index_to_args(index: int, arity: int) -> Tuple[int, ...]:
    return tuple((index >> (arity - 1 - j)) & 1 for j in range(arity))


@dataclass(frozen=True)
class TruthTable:
    """An explicit Boolean function ``{0,1}^arity -> {0,1}``."""

    arity: int
    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        object.__setattr__(self, "bits", bits)
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        if len(bits) != 1 << self.arity:
            raise ValueError(f"table of arity {self.arity} needs {1 << self.arity} bits, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("table bits must be 0 or 1")

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ArityMismatch(f"table of arity {self.arity} applied to {len(args)} arguments")
        return self.bits[args_to_index(args)]

    def __str__(self):
        return "".join(map(str, self.bits))

    @property
    def rank(self) -> int:
        """Position in the lexicographic enumeration (all-zeros first)."""
        return args_to_index(self.bits)

    @classmethod
    def from_rank(cls, arity: int, rank: int) -> "TruthTable":
        return cls(arity, index_to_args(rank, 1 << arity))

    @classmethod
    def from_string(cls, text: str) -> "TruthTable":
        n = len(text).bit_length() - 1
        if 1 << n != len(text):
            raise ValueError(f"bit string length {len(text)} is not a power of two")
        return cls(n, tuple(int(c) for c in text))

    @classmethod
    def from_function(cls, arity: int, fn) -> "TruthTable":
        return cls(arity, tuple(int(bool(fn(*index_to_args(i, arity)))) for i in range(1 << arity)))

    @classmethod
    def constant(cls, bit: int, arity: int = 0) -> "TruthTable":
        return cls(arity, (bit,) * (1 << arity))

    @classmethod
    def enumerate(cls, arity: int) -> Iterator["TruthTable"]:
        for rank in range(1 << (1 << arity)):
            yield cls.from_rank(arity, rank)


class Interpretation(Mapping):
    """Immutable map from symbol names to truth tables.

    Plain ints are accepted as arity-0 tables.  Looking up an unbound name
    raises :class:`UnboundSymbol`.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Mapping] = None, **kw):
        data = {}
        for source in (bindings or {}, kw):
            for name, table in source.items():
                if not isinstance(table, TruthTable):
                    table = TruthTable(0, (int(table),))
                data[name] = table
        self._bindings = data

    def __getitem__(self, name):
        try:
            return self._bindings[name]
        except KeyError:
            raise UnboundSymbol(f"symbol {name!r} is not bound") from None

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self):
        return len(self._bindings)

    def __repr__(self):
        inner = ", ".join(f"{k}/{t.arity}={t}" for k, t in sorted(self._bindings.items()))
        return f"Interpretation({inner})"

    def __eq__(self, other):
        return isinstance(other, Interpretation) and self._bindings == other._bindings

    def __hash__(self):
        return hash(frozenset(self._bindings.items()))

    def bind(self, name: str, table: TruthTable) -> "Interpretation":
        out = dict(self._bindings)
        out[name] = table
        return Interpretation(out)


@dataclass(frozen=True)
class Limits:
    """Enumeration bounds for the brute-force semantics."""

    max_arity: int = 4
    max_steps: int = 1 << 24

    def __post_init__(self):
        if self.max_arity < 0 or self.max_steps < 1:
            raise ValueError("limits must be positive")


DEFAULT_LIMITS = Limits()


# ---------------------------------------------------------------------------
# free symbols and well-formedness


def free_symbols(phi: Formula) -> Dict[str, int]:
    """Free symbols of ``phi`` with their arity.

    Raises InconsistentArity if a free symbol is used at two arities.
    """
    out: Dict[str, int] = {}
    _collect_free(phi, frozenset(), out)
    return out


def _collect_free(phi, bound, out):
    # iterative over &/| chains keeps deep conjunctions off the Python stack
    stack = [(phi, bound)]
    while stack:
        node, bound = stack.pop()
        if isinstance(node, App):
            if node.symbol not in bound:
                seen = out.setdefault(node.symbol, len(node.args))
                if seen != len(node.args):
                    raise InconsistentArity(
                        f"free symbol {node.symbol!r} used with {seen} and {len(node.args)} arguments"
                    )
            stack.extend((a, bound) for a in node.args)
        elif isinstance(node, Quantifier):
            stack.append((node.body, bound | {node.symbol}))
        else:
            stack.extend((c, bound) for c in children(node))


def check_bound_arities(phi: Formula) -> None:
    """Raise ArityMismatch if a bound occurrence disagrees with its binder."""
    stack = [(phi, {})]
    while stack:
        node, scope = stack.pop()
        if isinstance(node, App):
            want = scope.get(node.symbol)
            if want is not None and want != len(node.args):
                raise ArityMismatch(
                    f"{node.symbol!r} is bound at arity {want} but applied to {len(node.args)} arguments"
                )
            stack.extend((a, scope) for a in node.args)
        elif isinstance(node, Quantifier):
            inner = dict(scope)
            inner[node.symbol] = node.arity
            stack.append((node.body, inner))
        else:
            stack.extend((c, scope) for c in children(node))


# ---------------------------------------------------------------------------
# batched evaluation

# A run of more than this many same-type proposition quantifiers over a
# clausal matrix is decided by clause search instead of enumeration.
ENUM_BLOCK = 16
_CHUNK_ROWS = 1 << 20


@lru_cache(maxsize=None)
def all_tables(arity: int) -> np.ndarray:
    """Every table of the given arity, one per row, in lexicographic order."""
    width = 1 << arity
    ranks = np.arange(1 << width, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    out = ((ranks[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


class _Static:
    """Per-formula facts that do not depend on the interpretation."""

    def __init__(self, phi):
        check_bound_arities(phi)
        self.phi = phi
        self.free = free_symbols(phi)
        self.free_by_node = {}
        self.blocks = {}


# Recently evaluated formulas keep their analysis; entries hold a reference to
# the formula so the id-based keys of its subformulas stay valid.
_STATIC_CACHE: "OrderedDict[int, _Static]" = OrderedDict()
_STATIC_CACHE_SIZE = 32


def _static_for(phi) -> _Static:
    hit = _STATIC_CACHE.get(id(phi))
    if hit is not None and hit.phi is phi:
        _STATIC_CACHE.move_to_end(id(phi))
        return hit
    info = _Static(phi)
    _STATIC_CACHE[id(phi)] = info
    while len(_STATIC_CACHE) > _STATIC_CACHE_SIZE:
        _STATIC_CACHE.popitem(last=False)
    return info


class _Evaluator:
    def __init__(self, limits: Limits, static: Optional[_Static] = None):
        self.limits = limits
        self.steps = 0
        self._free = static.free_by_node if static else {}
        self._blocks = static.blocks if static else {}

    def tick(self, n):
        self.steps += n
        if self.steps > self.limits.max_steps:
            raise LimitExceeded(f"evaluation exceeded {self.limits.max_steps} steps")

    def free_names(self, node):
        key = id(node)
        hit = self._free.get(key)
        if hit is None:
            hit = (node, frozenset(free_symbols(node)))
            self._free[key] = hit
        return hit[1]

    def run(self, node, env, rows):
        self.tick(rows)
        if isinstance(node, Const):
            return np.full(rows, bool(node.bit))
        if isinstance(node, App):
            table = env[node.symbol]
            n = len(node.args)
            if table.shape[1] != 1 << n:
                raise ArityMismatch(f"{node.symbol!r} applied to {n} arguments")
            if n == 0:
                return table[:, 0].astype(bool)
            idx = np.zeros(rows, dtype=np.int64)
            for a in node.args:
                idx = (idx << 1) | self.run(a, env, rows)
            return table[np.arange(rows), idx].astype(bool)
        if isinstance(node, Not):
            return ~self.run(node.body, env, rows)
        if isinstance(node, And):
            return self.run(node.left, env, rows) & self.run(node.right, env, rows)
        if isinstance(node, Or):
            return self.run(node.left, env, rows) | self.run(node.right, env, rows)
        if isinstance(node, Quantifier):
            return self.quantifier(node, env, rows)
        raise TypeError(f"not a formula: {node!r}")

    def quantifier(self, node, env, rows):
        if node.arity > self.limits.max_arity:
            raise LimitExceeded(
                f"quantified arity {node.arity} of {node.symbol!r} exceeds bound {self.limits.max_arity}"
            )
        if node.arity == 0:
            block = self.clausal_block(node)
            if block is not None:
                return self.search_block(node, block, env, rows)
        tables = all_tables(node.arity)
        k = tables.shape[0]
        keep = self.free_names(node.body) - {node.symbol}
        per_chunk = max(1, _CHUNK_ROWS // k)
        parts = []
        for start in range(0, rows, per_chunk):
            stop = min(rows, start + per_chunk)
            b = stop - start
            sub = {name: np.repeat(env[name][start:stop], k, axis=0) for name in keep}
            sub[node.symbol] = np.tile(tables, (b, 1))
            out = self.run(node.body, sub, b * k).reshape(b, k)
            parts.append(out.any(axis=1) if node.kind == EXISTS else out.all(axis=1))
        return np.concatenate(parts)

    def clausal_block(self, node):
        key = id(node)
        if key in self._blocks:
            return self._blocks[key][1]
        from . import _clausal

        names = []
        body = node
        while isinstance(body, Quantifier) and body.kind == node.kind and body.arity == 0:
            names.append(body.symbol)
            body = body.body
        block = None
        if len(names) > ENUM_BLOCK and len(set(names)) == len(names):
            block = _clausal.compile_block(node.kind, names, body)
        self._blocks[key] = (node, block)
        return block

    def search_block(self, node, block, env, rows):
        out = np.empty(rows, dtype=bool)
        for r in range(rows):
            tables = {name: tuple(int(b) for b in env[name][r]) for name in block.outer}
            value, _, spent = block.decide(tables, self.limits.max_steps - self.steps)
            self.tick(spent)
            out[r] = value
        return out


def _env_for(symbols: Mapping[str, int], interp: Interpretation):
    env = {}
    for name, arity in symbols.items():
        table = interp[name]
        if table.arity != arity:
            raise ArityMismatch(f"{name!r} occurs with arity {arity} but is bound to a table of arity {table.arity}")
        env[name] = np.asarray([table.bits], dtype=np.uint8)
    return env


def evaluate(phi: Formula, interp: Optional[Mapping] = None, limits: Limits = DEFAULT_LIMITS) -> int:
    """Truth value of ``phi`` under ``interp`` by exhaustive table enumeration."""
    if not isinstance(interp, Interpretation):
        interp = Interpretation(interp or {})
    static = _static_for(phi)
    env = _env_for(static.free, interp)
    return int(_Evaluator(limits, static).run(phi, env, 1)[0])


def interpretation_space(signature: Mapping[str, int], limits: Limits = DEFAULT_LIMITS):
    """Every interpretation of ``signature`` as a batch of table arrays.

    Returns ``(names, env, rows)``.  Row ``r`` enumerates tables with the last
    name varying fastest, each in lexicographic order.
    """
    names = sorted(signature)
    for name in names:
        if signature[name] > limits.max_arity:
            raise LimitExceeded(f"free arity {signature[name]} of {name!r} exceeds bound {limits.max_arity}")
    counts = [1 << (1 << signature[n]) for n in names]
    rows = int(np.prod(counts, dtype=np.int64)) if names else 1
    if rows > limits.max_steps:
        raise LimitExceeded(f"{rows} interpretations exceed the step bound")
    env = {}
    if names:
        grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
        for name, grid in zip(names, grids):
            env[name] = all_tables(signature[name])[grid.ravel()]
    return names, env, rows


def _joint_signature(*formulas: Formula) -> Dict[str, int]:
    sig: Dict[str, int] = {}
    for phi in formulas:
        for name, arity in free_symbols(phi).items():
            if sig.setdefault(name, arity) != arity:
                raise InconsistentArity(f"{name!r} is free with arities {sig[name]} and {arity}")
    return sig


def truth_vector(phi: Formula, signature: Optional[Mapping[str, int]] = None,
                 limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Truth value of ``phi`` under every interpretation of ``signature``.

    ``signature`` defaults to the free symbols of ``phi``; it may contain
    extra names, which then range over their tables too.  The ordering is the
    one of :func:`interpretation_space`.
    """
    if signature is None:
        signature = free_symbols(phi)
    for name, arity in free_symbols(phi).items():
        if signature.get(name) != arity:
            raise ArityMismatch(f"signature does not cover free symbol {name}/{arity}")
    check_bound_arities(phi)
    _, env, rows = interpretation_space(signature, limits)
    return _Evaluator(limits).run(phi, env, rows)


def entails(phi: Formula, psi: Formula, limits: Limits = DEFAULT_LIMITS) -> bool:
    sig = _joint_signature(phi, psi)
    a = truth_vector(phi, sig, limits)
    b = truth_vector(psi, sig, limits)
    return bool(np.all(~a | b))


def equivalent(phi: Formula, psi: Formula, limits: Limits = DEFAULT_LIMITS) -> bool:
    sig = _joint_signature(phi, psi)
    return bool(np.array_equal(truth_vector(phi, sig, limits), truth_vector(psi, sig, limits)))


def satisfying_interpretations(phi: Formula, signature: Optional[Mapping[str, int]] = None,
                               limits: Limits = DEFAULT_LIMITS) -> set:
    """The satisfying interpretations, each as a tuple of (name, table) pairs."""
    if signature is None:
        signature = free_symbols(phi)
    names, env, _ = interpretation_space(signature, limits)
    hits = np.flatnonzero(truth_vector(phi, signature, limits))
    out = set()
    for r in hits:
        out.add(tuple((n, TruthTable(signature[n], tuple(int(b) for b in env[n][r]))) for n in names))
    return out


# ---------------------------------------------------------------------------
# positions, substitution, renaming


def subformula(phi: Formula, position: Sequence[int]) -> Formula:
    node = phi
    for step in position:
        kids = children(node)
        if not 0 <= step < len(kids):
            raise InvalidPath(f"position {tuple(position)} does not address a subformula")
        node = kids[step]
    return node


def positions(phi: Formula) -> Iterator[Tuple[int, ...]]:
    """All positions of ``phi`` in preorder; the root is ``()``."""
    stack = [((), phi)]
    while stack:
        pos, node = stack.pop()
        yield pos
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


def binders_above(phi: Formula, position: Sequence[int]) -> Dict[str, int]:
    bound: Dict[str, int] = {}
    node = phi
    for step in position:
        if isinstance(node, Quantifier):
            bound[node.symbol] = node.arity
        kids = children(node)
        if not 0 <= step < len(kids):
            raise InvalidPath(f"position {tuple(position)} does not address a subformula")
        node = kids[step]
    return bound


def substitute(phi: Formula, position: Sequence[int], psi: Formula) -> Formula:
    """Replace the subformula at ``position`` by ``psi``.

    A symbol free in ``psi`` that is bound above ``position`` but not free in
    the replaced subformula would be captured; that raises CaptureDetected.
    """
    position = tuple(position)
    bound = binders_above(phi, position)
    old_free = free_symbols(subformula(phi, position))
    for name, arity in free_symbols(psi).items():
        if name in bound:
            if name not in old_free:
                raise CaptureDetected(f"{name!r} would be captured by a binder above {position}")
            if bound[name] != arity:
                raise ArityMismatch(f"{name!r} is bound at arity {bound[name]}, replacement uses {arity}")
    return _replace(phi, position, psi)


def _replace(node, position, psi):
    if not position:
        return psi
    kids = list(children(node))
    kids[position[0]] = _replace(kids[position[0]], position[1:], psi)
    return with_children(node, kids)


def alpha_rename(phi: Formula, taken: Optional[Iterable[str]] = None) -> Formula:
    """Give every binder a fresh name; free symbols are untouched.

    Names are derived from the original as ``p1``, ``p2``, ... and avoid
    every name occurring in ``phi`` (and in ``taken``).
    """
    used = symbol_names(phi) | set(taken or ())
    return _rename(phi, {}, used)


def _rename(node, mapping, used):
    if isinstance(node, App):
        return App(mapping.get(node.symbol, node.symbol), tuple(_rename(a, mapping, used) for a in node.args))
    if isinstance(node, Quantifier):
        k = 1
        while f"{node.symbol}{k}" in used:
            k += 1
        new = f"{node.symbol}{k}"
        used.add(new)
        inner = dict(mapping)
        inner[node.symbol] = new
        return quantifier(node.kind, new, node.arity, _rename(node.body, inner, used))
    kids = children(node)
    if not kids:
        return node
    return with_children(node, [_rename(c, mapping, used) for c in kids])
