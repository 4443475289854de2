"""Equivalence-preserving rewrites of qbsfs.

None of these functions checks equivalence itself; the test suite does that
with :func:`qbsf.core.equivalent`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .analysis import clauses_of, is_prenex, is_simple, terms_of
from .core import (
    EXISTS,
    FALSE,
    TRUE,
    And,
    App,
    Const,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Quantifier,
    children,
    dual_kind,
    fresh_name,
    iff,
    is_quantifier_free,
    prop,
    quantifier,
    split_prefix,
    symbol_names,
    with_children,
    with_prefix,
)
from .errors import (
    ArityMismatch,
    ArityShrink,
    NotAdjacent,
    NotCNF,
    NotPrenex,
    NotPropositionalPrefix,
    QuantifierTypeMismatch,
    ShapeMismatch,
    WidthTooSmall,
)
from .textio import DqbfInstance

# ---------------------------------------------------------------------------
# flattening and prenexing


def _is_prop_arg(a) -> bool:
    return isinstance(a, Const) or (isinstance(a, App) and not a.args)


def flatten(phi: Formula) -> Formula:
    """Make every function argument a proposition or constant.

    ``f(alpha)`` with a compound ``alpha`` becomes
    ``exists z ((z <-> alpha) & f(z))``, innermost arguments first.
    """
    used = symbol_names(phi)
    return _flatten(phi, used)


def _flatten(node, used):
    if isinstance(node, App):
        args = [_flatten(a, used) for a in node.args]
        defs = []
        for i, a in enumerate(args):
            if not _is_prop_arg(a):
                z = fresh_name("z", used)
                used.add(z)
                defs.append((z, a))
                args[i] = prop(z)
        out: Formula = App(node.symbol, tuple(args))
        for z, a in reversed(defs):
            out = Exists(z, 0, And(iff(prop(z), a), out))
        return out
    kids = children(node)
    if not kids:
        return node
    return with_children(node, [_flatten(c, used) for c in kids])


def to_prenex(phi: Formula) -> Formula:
    """Pull every quantifier to the front; prenex input is returned as is."""
    if is_prenex(phi):
        return phi
    if not is_simple(phi):
        raise ShapeMismatch("prenexing needs a simple formula; flatten it first")
    prefix, matrix = _hoist(_separate_binders(phi))
    return with_prefix(prefix, matrix)


def _separate_binders(phi):
    # like alpha_rename, but a binder keeps its name unless it is free or already bound elsewhere
    from .core import free_symbols

    seen = set(free_symbols(phi))
    used = symbol_names(phi)

    def go(node, mapping):
        if isinstance(node, App):
            return App(mapping.get(node.symbol, node.symbol), tuple(go(a, mapping) for a in node.args))
        if isinstance(node, Quantifier):
            new = node.symbol
            if new in seen:
                new = fresh_name(node.symbol, used)
            seen.add(new)
            used.add(new)
            return quantifier(node.kind, new, node.arity, go(node.body, {**mapping, node.symbol: new}))
        kids = children(node)
        return with_children(node, [go(c, mapping) for c in kids]) if kids else node

    return go(phi, {})


def _hoist(node):
    if isinstance(node, Quantifier):
        prefix, matrix = _hoist(node.body)
        return [(node.kind, node.symbol, node.arity)] + prefix, matrix
    if isinstance(node, Not):
        prefix, matrix = _hoist(node.body)
        return [(dual_kind(k), s, a) for k, s, a in prefix], Not(matrix)
    if isinstance(node, (And, Or)):
        lp, lm = _hoist(node.left)
        rp, rm = _hoist(node.right)
        return lp + rp, type(node)(lm, rm)
    return [], node


def nnf(phi: Formula, negate: bool = False) -> Formula:
    """Negation normal form of a quantifier-free formula (of its negation if ``negate``)."""
    if isinstance(phi, Not):
        return nnf(phi.body, not negate)
    if isinstance(phi, And):
        cls = Or if negate else And
        return cls(nnf(phi.left, negate), nnf(phi.right, negate))
    if isinstance(phi, Or):
        cls = And if negate else Or
        return cls(nnf(phi.left, negate), nnf(phi.right, negate))
    if isinstance(phi, Const):
        return Const(1 - phi.bit) if negate else phi
    if isinstance(phi, App):
        return Not(phi) if negate else phi
    raise ShapeMismatch("negation normal form needs a quantifier-free formula")


def dualize(phi: Formula) -> Formula:
    """Flip every prefix quantifier and replace the matrix by the NNF of its negation.

    The result is false exactly where ``phi`` is true; CNF becomes DNF and back.
    """
    prefix, matrix = split_prefix(phi)
    if not is_quantifier_free(matrix):
        raise NotPrenex("dualize needs a prenex formula")
    return with_prefix([(dual_kind(k), s, a) for k, s, a in prefix], nnf(matrix, negate=True))


# ---------------------------------------------------------------------------
# alternation reduction


@dataclass(frozen=True)
class PartialAssignment:
    """Values for some of the variables ``x1..xk``; undefined entries carry 0."""

    variables: Tuple[str, ...]
    defined: Tuple[int, ...]
    values: Tuple[int, ...]

    @classmethod
    def of(cls, variables: Sequence[str], mapping: Dict[str, int]) -> "PartialAssignment":
        unknown = set(mapping) - set(variables)
        if unknown:
            raise ValueError(f"assignment mentions unknown variables {sorted(unknown)}")
        return cls(
            tuple(variables),
            tuple(int(v in mapping) for v in variables),
            tuple(int(mapping.get(v, 0)) for v in variables),
        )


def encode_assignment(s: PartialAssignment, k: int, m_star: int) -> Tuple[int, ...]:
    """Two bits per variable (defined, value) followed by zero padding."""
    if len(s.variables) != k:
        raise ValueError(f"assignment ranges over {len(s.variables)} variables, expected {k}")
    if m_star < 2 * k:
        raise WidthTooSmall(f"width {m_star} cannot hold {k} variables")
    bits: List[int] = []
    for d, v in zip(s.defined, s.values):
        bits += [d, v if d else 0]
    return tuple(bits) + (0,) * (m_star - 2 * k)


def _prop_part(phi):
    prefix, matrix = split_prefix(phi)
    if not is_quantifier_free(matrix):
        raise NotPrenex("expected a quantifier prefix over a quantifier-free matrix")
    if any(a != 0 for _, _, a in prefix):
        raise NotPropositionalPrefix("prefix quantifies a function symbol")
    return prefix, matrix


def _or(lits):
    out = lits[0]
    for lit in lits[1:]:
        out = Or(out, lit)
    return out


def build_theta(prop_part: Formula, g: str, arity: int = 0) -> Formula:
    """Assignment-tree conditions on ``g`` for a CNF proposition-quantified formula.

    ``prop_part`` is ``Q1 x1 ... Qk xk H`` with ``H`` in CNF; ``arity`` is
    that of the function being reduced, so ``g`` gets ``max(arity, 2k)``
    arguments.  ``exists g theta`` is equivalent to ``prop_part``.
    """
    prefix, matrix = _prop_part(prop_part)
    clauses = clauses_of(matrix)
    if clauses is None:
        raise NotCNF("matrix is not a CNF")
    xs = [s for _, s, _ in prefix]
    k = len(xs)
    m_star = max(arity, 2 * k)

    def code(assigned):
        # assigned: list of formulas for x1..xi
        args: List[Formula] = []
        for val in assigned:
            args += [TRUE, val]
        return App(g, tuple(args) + (FALSE,) * (m_star - len(args)))

    full = code([prop(x) for x in xs])
    parts: List[Formula] = [code([])]
    for lits in clauses:
        parts.append(_or([Not(full)] + lits))
    for i, (kind, _, _) in enumerate(prefix):
        here = code([prop(x) for x in xs[:i]])
        zero = code([prop(x) for x in xs[:i]] + [FALSE])
        one = code([prop(x) for x in xs[:i]] + [TRUE])
        if kind == EXISTS:
            parts.append(_or([Not(here), zero, one]))
        else:
            parts.append(_or([Not(here), one]))
            parts.append(_or([Not(here), zero]))
    body = parts[0]
    for p in parts[1:]:
        body = And(body, p)
    return with_prefix([("forall", x, 0) for x in xs], body)


def _find_binder(phi, name):
    node = phi
    path = []
    stack = [(phi, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Quantifier) and node.symbol == name:
            return path
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((kids[i], path + (i,)))
    return None


def _map_symbol(node, name, fn):
    """Apply ``fn`` to every occurrence of ``name`` that is free in ``node``."""
    if isinstance(node, App):
        args = tuple(_map_symbol(a, name, fn) for a in node.args)
        out = App(node.symbol, args)
        return fn(out) if node.symbol == name else out
    if isinstance(node, Quantifier) and node.symbol == name:
        return node
    kids = children(node)
    if not kids:
        return node
    return with_children(node, [_map_symbol(c, name, fn) for c in kids])


def _at(node, path, fn):
    if not path:
        return fn(node)
    kids = list(children(node))
    kids[path[0]] = _at(kids[path[0]], path[1:], fn)
    return with_children(node, kids)


def _occurrence_arity(node, name):
    arities = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Quantifier) and cur.symbol == name:
            continue
        if isinstance(cur, App) and cur.symbol == name:
            arities.add(len(cur.args))
        stack.extend(children(cur))
    return arities


def pad_arity(phi: Formula, f: str, m_star: int) -> Formula:
    """Append constant-0 arguments to ``f`` up to arity ``m_star``.

    Free occurrences are padded when ``f`` is free; otherwise the outermost
    binder of ``f`` is re-annotated together with its occurrences.
    """
    def pad(app):
        return App(app.symbol, app.args + (FALSE,) * (m_star - len(app.args)))

    free_arity = _occurrence_arity(phi, f)
    if free_arity:
        (m,) = free_arity
        if m > m_star:
            raise ArityShrink(f"cannot pad {f}/{m} down to {m_star}")
        return _map_symbol(phi, f, pad)
    path = _find_binder(phi, f)
    if path is None:
        return phi

    def rebind(q):
        if q.arity > m_star:
            raise ArityShrink(f"cannot pad {f}/{q.arity} down to {m_star}")
        return quantifier(q.kind, f, m_star, _map_symbol(q.body, f, pad))

    return _at(phi, path, rebind)


def pad_table(table, m_star: int):
    """The canonical extension of ``table`` that ignores the padding arguments."""
    from .core import TruthTable

    extra = m_star - table.arity
    if extra < 0:
        raise ArityShrink("cannot pad to a smaller arity")
    return TruthTable(m_star, tuple(table.bits[i >> extra] for i in range(1 << m_star)))


def merge_functions(phi: Formula, f: str, g: str, h: str) -> Formula:
    """Merge adjacent same-type binders of ``f`` and ``g`` into one binder of ``h``.

    ``f(a)`` becomes ``h(0, a)`` and ``g(a)`` becomes ``h(1, a)``.
    """
    path = _find_binder(phi, f)
    if path is None:
        raise NotAdjacent(f"no binder for {f!r}")
    if h in symbol_names(phi) and h not in (f, g):
        raise ShapeMismatch(f"merged name {h!r} already occurs in the formula")

    def merge(qf):
        qg = qf.body
        if not (isinstance(qg, Quantifier) and qg.symbol == g):
            raise NotAdjacent(f"binder of {g!r} does not directly follow that of {f!r}")
        if qf.arity != qg.arity:
            raise ArityMismatch(f"{f}/{qf.arity} and {g}/{qg.arity} differ in arity")
        if qf.kind != qg.kind:
            raise QuantifierTypeMismatch(f"{f!r} and {g!r} are bound by different quantifiers")
        body = _map_symbol(qg.body, g, lambda app: App(h, (TRUE,) + app.args))
        body = _map_symbol(body, f, lambda app: App(h, (FALSE,) + app.args))
        return quantifier(qf.kind, h, qf.arity + 1, body)

    return _at(phi, path, merge)


def alt_reduce(phi: Formula) -> Formula:
    """Trade the proposition quantifier alternations of ``Q f Q1 x1..Qk xk H`` for one function.

    ``H`` must be a CNF when ``Q`` is ``exists`` and a DNF when it is
    ``forall``.  The result is ``Q h Q' x1..Q' xk H'`` with ``Q'`` the dual
    of ``Q``, ``H'`` in the same normal form as ``H`` and ``h`` of arity
    ``max(m, 2k) + 1`` where ``m`` is the arity of ``f``.
    """
    if not isinstance(phi, Quantifier):
        raise ShapeMismatch("expected a leading function quantifier")
    kind, f, m = phi.kind, phi.symbol, phi.arity
    rest = phi.body
    try:
        prefix, matrix = _prop_part(rest)
    except (NotPrenex, NotPropositionalPrefix) as exc:
        raise ShapeMismatch(str(exc)) from None
    k = len(prefix)
    m_star = max(m, 2 * k)
    used = symbol_names(phi)
    g = fresh_name("g", used)
    used.add(g)
    h = fresh_name("h", used)
    if kind == EXISTS:
        if clauses_of(matrix) is None:
            raise ShapeMismatch("existential reduction needs a CNF matrix")
        inner = Exists(g, m_star, build_theta(rest, g, m))
    else:
        if terms_of(matrix) is None:
            raise ShapeMismatch("universal reduction needs a DNF matrix")
        theta = build_theta(dualize(rest), g, m)
        inner = Forall(g, m_star, dualize(theta))
    out = quantifier(kind, f, m, inner)
    out = pad_arity(out, f, m_star)
    return merge_functions(out, f, g, h)


# ---------------------------------------------------------------------------
# DQBF


def dqbf_to_qbsf(d: DqbfInstance) -> Formula:
    """Functional form: each existential becomes a function of its dependencies.

    The function keeps the existential's name, so ``y`` depending on ``x1``
    turns into ``y(x1)`` under ``exists y/1``.
    """
    deps = {y: ds for y, ds in d.existentials}

    def skolem(app):
        return App(app.symbol, tuple(prop(x) for x in deps[app.symbol]))

    matrix = d.matrix
    for y in deps:
        matrix = _map_symbol(matrix, y, skolem)
    prefix = [("exists", y, len(ds)) for y, ds in d.existentials]
    prefix += [("forall", x, 0) for x in d.universals]
    return with_prefix(prefix, matrix)
