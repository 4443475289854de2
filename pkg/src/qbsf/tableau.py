"""Tableau encodings of alternating machines and the predicates of the indirect simulation.

A configuration is a row of ``2n+2`` cells in which the state symbol sits
directly left of the scanned tape cell.  A pure tableau is ``n+1`` rows
(``n`` steps).  Oracle sets hold binary cell words ``(c, t, p)``.

Predicates are evaluated as branching procedures: every innermost branch asks
at most one membership question, which :class:`QueryAudit` checks.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import ArityMismatch, MachineError, OutOfRange, StateSpaceExceeded, WidthMismatch

EXISTENTIAL, UNIVERSAL = "existential", "universal"
_MOVES = {"L": -1, "R": 1, "S": 0}


def _bits_for(k: int) -> int:
    return max(1, (k - 1).bit_length()) if k > 1 else 1


@dataclass(frozen=True)
class AtmSpec:
    """Single-tape alternating machine normalised to ``phase_count`` phases of ``phase_len`` steps."""

    states: Tuple[str, ...]
    types: Dict[str, str]
    start: str
    accept: FrozenSet[str]
    reject: FrozenSet[str]
    blank: str
    alphabet: Tuple[str, ...]
    transitions: Dict[Tuple[str, str], Tuple[Tuple[str, str, str], ...]]
    phase_len: int
    phase_count: int

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accept", frozenset(self.accept))
        object.__setattr__(self, "reject", frozenset(self.reject))
        if self.blank not in self.alphabet:
            raise MachineError("blank must belong to the alphabet")
        if set(self.states) & set(self.alphabet):
            raise MachineError("state names and tape symbols must be disjoint")
        for q in self.states:
            if self.types.get(q) not in (EXISTENTIAL, UNIVERSAL):
                raise MachineError(f"state {q!r} needs type 'existential' or 'universal'")
        if self.start not in self.states or not (self.accept | self.reject) <= set(self.states):
            raise MachineError("start, accept and reject states must be declared")
        if self.phase_len < 1 or self.phase_count < 1:
            raise MachineError("phase length and count must be positive")
        table = {}
        for (q, a), moves in self.transitions.items():
            if q in self.accept or q in self.reject:
                raise MachineError(f"halting state {q!r} has transitions")
            for q2, b, mv in moves:
                if q2 not in self.states or b not in self.alphabet or a not in self.alphabet or mv not in _MOVES:
                    raise MachineError(f"bad transition {(q, a, q2, b, mv)}")
            table[(q, a)] = tuple(moves)
        object.__setattr__(self, "transitions", table)

    @property
    def n(self) -> int:
        return self.phase_len

    @property
    def m(self) -> int:
        return self.phase_count

    @property
    def width(self) -> int:
        return 2 * self.n + 2

    @cached_property
    def symbols(self) -> Tuple[str, ...]:
        """Symbol codes: blank, the other tape symbols, then the states."""
        tape = (self.blank,) + tuple(a for a in self.alphabet if a != self.blank)
        return tape + self.states

    @cached_property
    def code(self) -> Dict[str, int]:
        return {c: i for i, c in enumerate(self.symbols)}

    @cached_property
    def widths(self) -> Tuple[int, int, int]:
        return _bits_for(len(self.symbols)), _bits_for(self.n + 1), _bits_for(self.width)

    @property
    def h(self) -> int:
        return sum(self.widths)

    def is_state(self, c: str) -> bool:
        return c in self.types

    @classmethod
    def from_json(cls, data) -> "AtmSpec":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            states, types = [], {}
            for s in data["states"]:
                states.append(s["name"])
                types[s["name"]] = s["type"]
            trans: Dict[Tuple[str, str], list] = {}
            for q, a, q2, b, mv in data["transitions"]:
                trans.setdefault((q, a), []).append((q2, b, mv))
            acc = data["accept"]
            rej = data["reject"]
            return cls(
                states=tuple(states),
                types=types,
                start=data["start"],
                accept=frozenset([acc] if isinstance(acc, str) else acc),
                reject=frozenset([rej] if isinstance(rej, str) else rej),
                blank=data["blank"],
                alphabet=tuple(data["alphabet"]),
                transitions={k: tuple(v) for k, v in trans.items()},
                phase_len=int(data["phase_len"]),
                phase_count=int(data["phase_count"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MachineError(f"malformed machine description: {exc}") from None

    def to_json(self) -> dict:
        return {
            "states": [{"name": q, "type": self.types[q]} for q in self.states],
            "start": self.start,
            "accept": sorted(self.accept),
            "reject": sorted(self.reject),
            "blank": self.blank,
            "alphabet": list(self.alphabet),
            "transitions": [
                [q, a, q2, b, mv] for (q, a), moves in sorted(self.transitions.items()) for q2, b, mv in moves
            ],
            "phase_len": self.phase_len,
            "phase_count": self.phase_count,
        }


# ---------------------------------------------------------------------------
# configurations


Row = Tuple[str, ...]


def initial_row(M: AtmSpec, x: str) -> Row:
    n = M.n
    if len(x) > n + 1:
        raise OutOfRange(f"input of length {len(x)} does not fit {n + 1} cells")
    row = [M.blank] * M.width
    row[n] = M.start
    for i, ch in enumerate(x):
        if ch not in M.alphabet:
            raise OutOfRange(f"input symbol {ch!r} not in the alphabet")
        row[n + 1 + i] = ch
    return tuple(row)


def state_of(M: AtmSpec, row: Row) -> Tuple[int, str]:
    for s, c in enumerate(row):
        if M.is_state(c):
            return s, c
    raise ValueError("row holds no state")


def successors(M: AtmSpec, row: Row) -> List[Row]:
    """Rows reachable in one step; moves that would leave the row are unavailable."""
    s, q = state_of(M, row)
    out = []
    if s + 1 >= len(row):
        return out
    a = row[s + 1]
    for q2, b, mv in M.transitions.get((q, a), ()):
        new = list(row)
        if mv == "R":
            if s + 2 >= len(row):
                continue
            new[s], new[s + 1] = b, q2
        elif mv == "L":
            if s == 0:
                continue
            new[s - 1], new[s], new[s + 1] = q2, row[s - 1], b
        else:
            new[s], new[s + 1] = q2, b
        out.append(tuple(new))
    return out


def legal_windows(M: AtmSpec, p: int) -> FrozenSet[Tuple[str, ...]]:
    """Six-cell patterns (row t, then row t+1, cells p-1..p+1) that some step produces.

    A step only touches the state cell and its two neighbours, so it suffices
    to vary the window cells and the cells next to the state.
    """
    cache = M.__dict__.setdefault("_legal_cache", {})
    if p in cache:
        return cache[p]
    L = M.width
    tape = [a for a in M.symbols if not M.is_state(a)]
    window = [p - 1, p, p + 1]
    out = set()
    far = False
    for s in range(0, L - 1):
        if not (p - 2 <= s <= p + 2):
            # far from the window a step leaves it untouched, if some step is enabled there
            if not far:
                row = [M.blank] * L
                for (q, a) in M.transitions:
                    row[s], row[s + 1] = q, a
                    if successors(M, tuple(row)):
                        far = True
                        break
            continue
        free = sorted({j for j in window + [s - 1] if 0 <= j < L and j not in (s, s + 1)})
        for (q, a) in M.transitions:
            for fill in itertools.product(tape, repeat=len(free)):
                row = [M.blank] * L
                for j, c in zip(free, fill):
                    row[j] = c
                row[s], row[s + 1] = q, a
                for nxt in successors(M, tuple(row)):
                    out.add(tuple(row[p - 1: p + 2]) + tuple(nxt[p - 1: p + 2]))
    if far:
        for trip in itertools.product(tape, repeat=3):
            out.add(trip + trip)
    cache[p] = frozenset(out)
    return cache[p]


@dataclass
class TableauNode:
    rows: Tuple[Row, ...]
    depth: int
    children: List["TableauNode"] = field(default_factory=list)

    @property
    def first(self) -> Row:
        return self.rows[0]

    @property
    def last(self) -> Row:
        return self.rows[-1]

    def walk(self) -> Iterable["TableauNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def pure_tableaus(M: AtmSpec, row: Row) -> List[Tuple[Row, ...]]:
    """All pure n-step tableaus starting at ``row``, in transition order."""
    kind = M.types[state_of(M, row)[1]]
    out = []

    def extend(rows):
        if len(rows) == M.n + 1:
            out.append(tuple(rows))
            return
        if len(rows) > 1 and M.types[state_of(M, rows[-1])[1]] != kind:
            return
        for nxt in successors(M, rows[-1]):
            extend(rows + [nxt])

    extend([row])
    return out


def simulate_phases(M: AtmSpec, x: str, max_nodes: int = 100_000) -> List[TableauNode]:
    """Forest of pure tableaus: roots start at the initial configuration, children are successor tableaus."""
    count = 0

    def grow(rows, depth):
        nonlocal count
        count += 1
        if count > max_nodes:
            raise StateSpaceExceeded(f"more than {max_nodes} tableaus")
        node = TableauNode(rows, depth)
        if depth < M.m:
            node.children = [grow(t, depth + 1) for t in pure_tableaus(M, rows[-1])]
        return node

    return [grow(t, 1) for t in pure_tableaus(M, initial_row(M, x))]


def _last_state(M, node):
    return state_of(M, node.last)[1]


def is_alternating(M: AtmSpec, rows: Sequence[Row]) -> bool:
    kinds = [M.types[state_of(M, r)[1]] for r in rows]
    return len(rows) >= 2 and all(k == kinds[0] for k in kinds[:-1]) and kinds[-1] != kinds[0]


def k_accepting(M: AtmSpec, node: TableauNode, k: int) -> bool:
    """Recursive k-acceptance of a pure tableau (children must be grown to depth k-1)."""
    q = _last_state(M, node)
    if k == 1:
        return q in M.accept
    if not is_alternating(M, node.rows):
        return False
    if M.types[q] == EXISTENTIAL:
        return any(k_accepting(M, c, k - 1) for c in node.children)
    return all(k_accepting(M, c, k - 1) for c in node.children)


def direct_accepts(M: AtmSpec, x: str) -> bool:
    """Plain alternating acceptance with time bound m*n, independent of the tableau machinery."""
    n = M.n
    limit = M.m * n
    tape = [M.blank] * (2 * n + 1)
    for i, ch in enumerate(x):
        tape[n + i] = ch
    memo = {}

    def acc(q, head, tape, t):
        key = (q, head, tape, t)
        if key in memo:
            return memo[key]
        if q in M.accept:
            res = True
        elif q in M.reject or t == limit:
            res = False
        else:
            results = []
            for q2, b, mv in M.transitions.get((q, tape[head]), ()):
                h2 = head + _MOVES[mv]
                if not 0 <= h2 < len(tape):
                    continue
                new = tape[:head] + (b,) + tape[head + 1:]
                results.append(acc(q2, h2, new, t + 1))
            res = any(results) if M.types[q] == EXISTENTIAL else all(results)
        memo[key] = res
        return res

    return acc(M.start, n, tuple(tape), 0)


# ---------------------------------------------------------------------------
# cell words


@dataclass(frozen=True)
class TableauEncoding:
    width: int
    words: FrozenSet[int]

    def __contains__(self, w: int) -> bool:
        return w in self.words

    def __len__(self):
        return len(self.words)


def encode_cell(M: AtmSpec, c: str, t: int, p: int) -> int:
    code = M.code.get(c)
    if code is None:
        raise OutOfRange(f"unknown symbol {c!r}")
    if not 0 <= t <= M.n:
        raise OutOfRange(f"timestep {t} outside 0..{M.n}")
    if not 0 <= p < M.width:
        raise OutOfRange(f"position {p} outside 0..{M.width - 1}")
    wc, wt, wp = M.widths
    return (code << (wt + wp)) | (t << wp) | p


def decode_cell(M: AtmSpec, w: int) -> Tuple[str, int, int]:
    wc, wt, wp = M.widths
    if not 0 <= w < (1 << M.h):
        raise OutOfRange(f"word {w} wider than {M.h} bits")
    code, t, p = w >> (wt + wp), (w >> wp) & ((1 << wt) - 1), w & ((1 << wp) - 1)
    if code >= len(M.symbols) or t > M.n or p >= M.width:
        raise OutOfRange(f"word {w:0{M.h}b} is no valid cell")
    return M.symbols[code], t, p


def word_bits(M: AtmSpec, w: int) -> str:
    return format(w, f"0{M.h}b")


def tableau_to_oracle(M: AtmSpec, rows: Sequence[Row]) -> TableauEncoding:
    words = {encode_cell(M, c, t, p) for t, row in enumerate(rows) for p, c in enumerate(row)}
    return TableauEncoding(M.h, frozenset(words))


def empty_encoding(M: AtmSpec) -> TableauEncoding:
    return TableauEncoding(M.h, frozenset())


# ---------------------------------------------------------------------------
# single-query branching evaluation


class QueryAudit:
    """Tracks membership questions per branch of the branching evaluation.

    Every call made by :meth:`Checker.forall`/:meth:`Checker.exists` opens a
    branch; questions asked inside nested branches are charged to those.  A
    branch that asks a second question directly trips an assertion.
    """

    def __init__(self):
        self.queries = 0
        self.branches = 0
        self.max_per_branch = 0
        self._stack = [0]

    def enter(self):
        self.branches += 1
        self._stack.append(0)

    def leave(self):
        self.max_per_branch = max(self.max_per_branch, self._stack.pop())

    def ask(self, A: TableauEncoding, word: int) -> bool:
        self.queries += 1
        self._stack[-1] += 1
        assert self._stack[-1] <= 1, "a branch asked more than one membership question"
        return word in A


class Checker:
    """Predicate checks for one machine; window legality tables are cached."""

    def __init__(self, M: AtmSpec, audit: Optional[QueryAudit] = None):
        self.M = M
        self.audit = audit or QueryAudit()
        self._invalid: Optional[List[int]] = None

    def _branch(self, fn, item):
        audit = self.audit
        audit.branches += 1
        audit._stack.append(0)
        try:
            return fn(item)
        finally:
            c = audit._stack.pop()
            if c > audit.max_per_branch:
                audit.max_per_branch = c

    def forall(self, items, fn) -> bool:
        return all(self._branch(fn, i) for i in items)

    def exists(self, items, fn) -> bool:
        return any(self._branch(fn, i) for i in items)

    def member(self, A, c, t, p) -> bool:
        return self.audit.ask(A, encode_cell(self.M, c, t, p))

    def _check_width(self, *encodings):
        for A in encodings:
            if A.width != self.M.h:
                raise WidthMismatch(f"encoding width {A.width} differs from {self.M.h}")

    # -- Val --------------------------------------------------------------

    def invalid_words(self) -> List[int]:
        if self._invalid is None:
            out = []
            for w in range(1 << self.M.h):
                try:
                    decode_cell(self.M, w)
                except OutOfRange:
                    out.append(w)
            self._invalid = out
        return self._invalid

    def legal_windows(self, p: int) -> FrozenSet[Tuple[str, ...]]:
        return legal_windows(self.M, p)

    def check_val(self, A: TableauEncoding) -> bool:
        """A encodes a pure tableau: the five conditions are checked as parallel branches."""
        self._check_width(A)
        parts = [self._only_valid, self._some_symbol, self._one_symbol, self._windows, self._pure]
        return self.forall(parts, lambda part: part(A))

    def _grid(self):
        return [(t, p) for t in range(self.M.n + 1) for p in range(self.M.width)]

    def _only_valid(self, A):
        return self.forall(self.invalid_words(), lambda w: not self.audit.ask(A, w))

    def _some_symbol(self, A):
        S = self.M.symbols
        return self.forall(self._grid(), lambda tp: self.exists(S, lambda c: self.member(A, c, *tp)))

    def _one_symbol(self, A):
        S = self.M.symbols

        def cell(tp):
            t, p = tp
            return self.forall(
                range(len(S)),
                lambda i: (not self.member(A, S[i], t, p))
                or self.forall(S[i + 1:], lambda c: not self.member(A, c, t, p)),
            )

        return self.forall(self._grid(), cell)

    def _windows(self, A):
        L = self.M.width
        return self.forall(
            [(t, p) for t in range(self.M.n) for p in range(1, L - 1)],
            lambda tp: self._window_ok(A, *tp),
        )

    def _window_ok(self, A, t, p):
        legal = self.legal_windows(p)
        cells = [(t, p - 1), (t, p), (t, p + 1), (t + 1, p - 1), (t + 1, p), (t + 1, p + 1)]
        S = self.M.symbols

        # for every six-tuple of cells: legal, or one of them is absent
        def rec(i, chosen):
            if i == 6:
                return tuple(chosen) in legal
            tt, pp = cells[i]
            return self.forall(S, lambda c: (not self.member(A, c, tt, pp)) or rec(i + 1, chosen + [c]))

        return rec(0, [])

    def _pure(self, A):
        M = self.M
        n, L = M.n, M.width
        cells = [(q, t, p) for t in range(n) for q in M.states for p in range(L)]

        def first(w0):
            q, t, p = w0
            later = [w for w in cells if w[1] > t and M.types[w[0]] != M.types[q]]
            return (not self.member(A, q, t, p)) or self.forall(later, lambda w1: not self.member(A, *w1))

        return self.forall(cells, first)

    # -- Init / Alt ---------------------------------------------------------

    def check_init1(self, A: TableauEncoding, x: str) -> bool:
        self._check_width(A)
        M = self.M
        n = M.n
        if len(x) > n + 1:
            return False
        rest = [p for p in range(M.width) if not n <= p <= n + len(x)]
        parts = [
            lambda: self.forall(range(len(x)), lambda i: self.member(A, x[i], 0, n + 1 + i)),
            lambda: self.member(A, M.start, 0, n),
            lambda: self.forall(rest, lambda p: self.member(A, M.blank, 0, p)),
        ]
        return self.forall(parts, lambda part: part())

    def check_init_succ(self, prev: TableauEncoding, A: TableauEncoding) -> bool:
        """First configuration of ``A`` equals the last one of ``prev``, cell by cell."""
        self._check_width(prev, A)
        M = self.M
        n = M.n

        def implies(src, t_src, dst, t_dst):
            def check(pc):
                p, c = pc
                return self.exists(
                    (0, 1),
                    lambda d: (not self.member(src, c, t_src, p)) if d == 0 else self.member(dst, c, t_dst, p),
                )

            return check

        cells = list(itertools.product(range(M.width), M.symbols))
        return self.forall(
            [implies(A, 0, prev, n), implies(prev, n, A, 0)],
            lambda direction: self.forall(cells, direction),
        )

    def check_alt(self, A: TableauEncoding) -> bool:
        """Some state at step n-1 and some state at step n differ in alternation type."""
        self._check_width(A)
        M = self.M
        n, L = M.n, M.width
        before = [(q, p) for q in M.states for p in range(L)]

        def pair(w0):
            q, p = w0
            after = [(q2, p2) for q2 in M.states if M.types[q2] != M.types[q] for p2 in range(L)]
            return self.member(A, q, n - 1, p) and self.exists(after, lambda w1: self.member(A, w1[0], n, w1[1]))

        return self.exists(before, pair)

    def check_alt_final(self, A: TableauEncoding) -> bool:
        self._check_width(A)
        M = self.M
        return self.exists(
            [(q, p) for q in sorted(M.accept) for p in range(M.width)],
            lambda qp: self.member(A, qp[0], M.n, qp[1]),
        )


# ---------------------------------------------------------------------------
# V1


def level_types(M: AtmSpec) -> List[str]:
    """Quantifier of each oracle level: alternating, starting with the start state's type."""
    first = "exists" if M.types[M.start] == EXISTENTIAL else "forall"
    other = "forall" if first == "exists" else "exists"
    return [first if i % 2 == 0 else other for i in range(M.m)]


class _Predicates:
    """Memoised Val/Init/Alt values for fixed machine and input."""

    def __init__(self, M, x, checker=None):
        self.M, self.x = M, x
        self.checker = checker or Checker(M)
        self.memo = {}

    def _get(self, key, fn):
        if key not in self.memo:
            self.memo[key] = fn()
        return self.memo[key]

    def val(self, A):
        return self._get(("val", A), lambda: self.checker.check_val(A))

    def init(self, i, oracles):
        A = oracles[i - 1]
        if i == 1:
            return self._get(("init1", A), lambda: self.checker.check_init1(A, self.x))
        prev = oracles[i - 2]
        return self._get(("init", prev, A), lambda: self.checker.check_init_succ(prev, A))

    def alt(self, i, A):
        if i == self.M.m:
            return self._get(("altm", A), lambda: self.checker.check_alt_final(A))
        return self._get(("alt", A), lambda: self.checker.check_alt(A))


def _check_count(M, oracles):
    if len(oracles) != M.m:
        raise ArityMismatch(f"expected {M.m} oracles, got {len(oracles)}")


def eval_v1(M: AtmSpec, x: str, oracles: Sequence[TableauEncoding], preds: Optional[_Predicates] = None) -> bool:
    """V1 by its recursive definition."""
    _check_count(M, oracles)
    preds = preds or _Predicates(M, x)
    types = level_types(M)

    def v(i):
        if i > M.m:
            return True
        A = oracles[i - 1]
        if types[i - 1] == "exists":
            return preds.val(A) and preds.init(i, oracles) and preds.alt(i, A) and v(i + 1)
        if not (preds.val(A) and preds.init(i, oracles)):
            return True
        return preds.alt(i, A) and v(i + 1)

    return v(1)


def eval_v1_grouped(
    M: AtmSpec, x: str, oracles: Sequence[TableauEncoding], preds: Optional[_Predicates] = None
) -> bool:
    """V1 as 'some (i, d) with all of T_i and F^d_i true, at a universal level or past the last one'."""
    _check_count(M, oracles)
    preds = preds or _Predicates(M, x)
    types = level_types(M)
    m = M.m

    def group(i, d):
        checks = []
        for j in range(1, i):
            A = oracles[j - 1]
            checks += [lambda A=A: preds.val(A), lambda j=j: preds.init(j, oracles), lambda j=j, A=A: preds.alt(j, A)]
        if i <= m:
            A = oracles[i - 1]
            checks.append((lambda A=A: not preds.val(A)) if d == 0 else (lambda i=i: not preds.init(i, oracles)))
        return all(c() for c in checks)

    return any(
        group(i, d)
        for i in range(1, m + 2)
        for d in (0, 1)
        if i > m or types[i - 1] == "forall"
    )


@dataclass
class SimulationReport:
    agree: bool
    quantified: bool
    k_accepting: bool
    direct: bool
    grouped_mismatches: int
    tuples_checked: int
    pool_size: int
    counterexample: Optional[Tuple[TableauEncoding, ...]] = None
    max_queries_per_branch: int = 0

    def __bool__(self):
        return self.agree


def oracle_pool(M: AtmSpec, forest: Sequence[TableauNode]) -> List[TableauEncoding]:
    """Encodings of every tableau in the forest plus the empty set, without repeats."""
    pool, seen = [], set()
    for A in [empty_encoding(M)] + [tableau_to_oracle(M, node.rows) for root in forest for node in root.walk()]:
        if A not in seen:
            seen.add(A)
            pool.append(A)
    return pool


def verify_simulation(M: AtmSpec, x: str, max_nodes: int = 100_000) -> SimulationReport:
    """Compare the oracle-quantified V1, k-acceptance and direct alternating acceptance."""
    forest = simulate_phases(M, x, max_nodes)
    pool = oracle_pool(M, forest)
    checker = Checker(M)
    preds = _Predicates(M, x, checker)
    types = level_types(M)
    mismatches = 0
    checked = 0
    bad_tuple = None

    def quantify(i, chosen):
        nonlocal mismatches, checked, bad_tuple
        if i == M.m:
            checked += 1
            v = eval_v1(M, x, chosen, preds)
            if eval_v1_grouped(M, x, chosen, preds) != v:
                mismatches += 1
                bad_tuple = bad_tuple or tuple(chosen)
            return v
        # evaluate every candidate so the grouping comparison sees each tuple
        vals = [quantify(i + 1, chosen + [A]) for A in pool]
        return any(vals) if types[i] == "exists" else all(vals)

    quantified = quantify(0, [])
    if M.types[M.start] == EXISTENTIAL:
        kacc = any(k_accepting(M, r, M.m) for r in forest)
    else:
        kacc = all(k_accepting(M, r, M.m) for r in forest)
    direct = direct_accepts(M, x)
    agree = quantified == kacc == direct and mismatches == 0
    counter = bad_tuple
    if not agree and counter is None:
        counter = _witness_tuple(M, x, pool, preds, types)
    return SimulationReport(
        agree, quantified, kacc, direct, mismatches, checked, len(pool), counter, checker.audit.max_per_branch
    )


def _witness_tuple(M, x, pool, preds, types):
    # some tuple on which V1 holds (or fails) for display
    for combo in itertools.product(pool, repeat=M.m):
        if eval_v1(M, x, combo, preds):
            return combo
    return tuple(pool[0] for _ in range(M.m))


def tableau_universe(M: AtmSpec, x: str, max_nodes: int = 100_000) -> FrozenSet[TableauEncoding]:
    forest = simulate_phases(M, x, max_nodes)
    return frozenset(tableau_to_oracle(M, node.rows) for root in forest for node in root.walk())


def decode_grid(M: AtmSpec, A: TableauEncoding) -> Optional[List[Row]]:
    """Rows of ``A`` when every cell holds exactly one symbol and no word is invalid, else None."""
    grid: Dict[Tuple[int, int], List[str]] = {}
    for w in A.words:
        try:
            c, t, p = decode_cell(M, w)
        except OutOfRange:
            return None
        grid.setdefault((t, p), []).append(c)
    rows = []
    for t in range(M.n + 1):
        row = []
        for p in range(M.width):
            cs = grid.get((t, p), [])
            if len(cs) != 1:
                return None
            row.append(cs[0])
        rows.append(tuple(row))
    return rows


def is_pure_tableau(M: AtmSpec, A: TableauEncoding) -> bool:
    """Independent label: decoded rows are one-state configurations linked by steps, pure before the end."""
    rows = decode_grid(M, A)
    if rows is None:
        return False
    for row in rows:
        if sum(M.is_state(c) for c in row) != 1 or M.is_state(row[-1]):
            return False
    for r0, r1 in zip(rows, rows[1:]):
        if r1 not in successors(M, r0):
            return False
    kinds = [M.types[state_of(M, r)[1]] for r in rows[:-1]]
    return all(k == kinds[0] for k in kinds)
