"""Clause search for long runs of proposition quantifiers.

``exists x1 ... exists xk H`` with ``H`` in CNF (or ``forall`` over a DNF) is
a satisfiability question once every function symbol and outer proposition
has a fixed table.  Enumerating ``2**k`` assignments is hopeless for the
Cook-style encodings, so both the evaluator and the solver hand such blocks
to the chronological DPLL search below.

Decisions follow the quantifier order and try 0 first, and unit propagation
only derives forced values, so the first model found is the lexicographically
least one.  Function atoms are literals whose value becomes known once all of
their proposition arguments are assigned.
"""
from __future__ import annotations

from .core import EXISTS, And, App, Const, Not, Or
from .errors import LimitExceeded

_CONST0 = -1
_CONST1 = -2


def _flatten(node, cls):
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


def _literal(node, index):
    """Static literal description, or None if ``node`` is not a literal."""
    sign = 1
    if isinstance(node, Not):
        sign, node = 0, node.body
    if isinstance(node, Const):
        return ("c", node.bit == sign)
    if not isinstance(node, App):
        return None
    if not node.args:
        if node.symbol in index:
            return ("v", index[node.symbol], sign)
        return ("o", node.symbol, sign)
    if node.symbol in index:
        return None
    spec = []
    for a in node.args:
        if isinstance(a, Const):
            spec.append(("k", a.bit))
        elif isinstance(a, App) and not a.args:
            spec.append(("v", index[a.symbol]) if a.symbol in index else ("o", a.symbol))
        else:
            return None
    return ("a", node.symbol, tuple(spec), sign)


def compile_block(kind, names, matrix):
    """Return a :class:`Block` for the run ``names`` over ``matrix``, or None."""
    index = {n: i for i, n in enumerate(names)}
    outer_node, inner_node = (And, Or) if kind == EXISTS else (Or, And)
    clauses = []
    for part in _flatten(matrix, outer_node):
        lits = []
        for atom in _flatten(part, inner_node):
            lit = _literal(atom, index)
            if lit is None:
                return None
            if kind != EXISTS:
                # forall over a DNF is the negation of exists over the negated terms
                if lit[0] == "c":
                    lit = ("c", not lit[1])
                else:
                    lit = lit[:-1] + (1 - lit[-1],)
            lits.append(lit)
        clauses.append(lits)
    return Block(kind, names, clauses)


class Block:
    """Clauses of one block, split into a static part and literals that depend on outer tables."""

    def __init__(self, kind, names, clauses):
        self.kind = kind
        self.names = list(names)
        self.var_lits = []   # per clause: [(var, sign)]
        self.dyn_lits = []   # per clause: literals fixed by outer tables alone
        self.app_lits = []   # per clause: function atoms with block variables among their arguments
        outer = set()
        for lits in clauses:
            vs, dyn, apps = [], [], []
            satisfied = False
            for lit in lits:
                tag = lit[0]
                if tag == "c":
                    if lit[1]:
                        satisfied = True
                        break
                elif tag == "v":
                    vs.append((lit[1], lit[2]))
                elif tag == "o":
                    outer.add(lit[1])
                    dyn.append(lit)
                else:
                    outer.add(lit[1])
                    outer.update(s[1] for s in lit[2] if s[0] == "o")
                    (apps if any(s[0] == "v" for s in lit[2]) else dyn).append(lit)
            if satisfied:
                continue
            self.var_lits.append(vs)
            self.dyn_lits.append(dyn)
            self.app_lits.append(apps)
        self.outer = sorted(outer)
        nvars = len(self.names)
        occ = [[] for _ in range(nvars)]
        for cid, (vs, apps) in enumerate(zip(self.var_lits, self.app_lits)):
            seen = set()
            for v, _ in vs:
                seen.add(v)
            for lit in apps:
                seen.update(s[1] for s in lit[2] if s[0] == "v")
            for v in seen:
                occ[v].append(cid)
        self.occ = occ
        self.short = [cid for cid in range(len(self.var_lits))
                      if len(self.var_lits[cid]) + len(self.app_lits[cid]) <= 1]
        self.with_apps = [cid for cid in range(len(self.app_lits)) if self.app_lits[cid]]

    def decide(self, tables, budget):
        """Value of the block under ``tables``: (bit, assignment, steps).

        For ``exists`` the assignment is the least model when the value is
        1; for ``forall`` it is the least falsifying assignment when the
        value is 0.  Otherwise it is None.
        """
        dead = [_any_true(dyn, tables) if dyn else False for dyn in self.dyn_lits]
        ground_apps = {cid: [_ground_app(lit, tables) for lit in self.app_lits[cid]] for cid in self.with_apps}
        model, steps = _search(self, dead, ground_apps, budget)
        if self.kind == EXISTS:
            return (1 if model is not None else 0), model, steps
        return (0 if model is not None else 1), model, steps


def _any_true(lits, tables):
    for lit in lits:
        if lit[0] == "o":
            if tables[lit[1]][0] == lit[2]:
                return True
        else:
            _, fname, spec, sign = lit
            idx = 0
            for s in spec:
                bit = s[1] if s[0] == "k" else tables[s[1]][0]
                idx = (idx << 1) | bit
            if tables[fname][idx] == sign:
                return True
    return False


def _ground_app(lit, tables):
    _, fname, spec, sign = lit
    args = []
    for s in spec:
        if s[0] == "k":
            args.append(_CONST1 if s[1] else _CONST0)
        elif s[0] == "o":
            args.append(_CONST1 if tables[s[1]][0] else _CONST0)
        else:
            args.append(s[1])
    return tables[fname], tuple(args), sign


def _search(block, dead, apps, budget):
    nvars = len(block.names)
    var_lits = block.var_lits
    occ = block.occ
    assign = [-1] * nvars
    steps = 0
    no_apps = ()

    def status(cid):
        # returns (conflict, unit_var, unit_value)
        if dead[cid]:
            return False, None, None
        open_lit = None
        n_open = 0
        for v, sign in var_lits[cid]:
            val = assign[v]
            if val < 0:
                n_open += 1
                open_lit = (v, sign)
            elif val == sign:
                return False, None, None
        opaque = False
        for bits, args, sign in apps.get(cid, no_apps):
            idx = 0
            pending = False
            for a in args:
                if a >= 0:
                    val = assign[a]
                    if val < 0:
                        pending = True
                        break
                else:
                    val = 1 if a == _CONST1 else 0
                idx = (idx << 1) | val
            if pending:
                n_open += 1
                opaque = True
            elif bits[idx] == sign:
                return False, None, None
        if n_open == 0:
            return True, None, None
        if n_open == 1 and not opaque:
            return False, open_lit[0], open_lit[1]
        return False, None, None

    trail = []
    queue = []

    def put(v, val):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise LimitExceeded(f"clause search exceeded {budget} steps")
        assign[v] = val
        trail.append(v)
        queue.append(v)

    def propagate():
        while queue:
            v = queue.pop()
            for cid in occ[v]:
                conflict, uv, uval = status(cid)
                if conflict:
                    queue.clear()
                    return False
                if uv is not None and assign[uv] < 0:
                    put(uv, uval)
        return True

    for cid in block.short:
        conflict, uv, uval = status(cid)
        if conflict:
            return None, steps
        if uv is not None:
            if assign[uv] < 0:
                put(uv, uval)
            elif assign[uv] != uval:
                return None, steps
    decisions = []
    cursor = 0
    ok = True
    while True:
        ok = propagate() if ok else False
        if not ok:
            while decisions:
                mark, v, tried = decisions.pop()
                while len(trail) > mark:
                    assign[trail.pop()] = -1
                if tried == 0:
                    decisions.append((mark, v, 1))
                    put(v, 1)
                    cursor = min(cursor, v)
                    ok = True
                    break
            else:
                return None, steps
            continue
        while cursor < nvars and assign[cursor] >= 0:
            cursor += 1
        if cursor == nvars:
            return list(assign), steps
        decisions.append((len(trail), cursor, 0))
        put(cursor, 0)
