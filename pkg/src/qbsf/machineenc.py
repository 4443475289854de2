"""Deterministic oracle machines and their compilation into prefixed CNF/DNF qbsfs.

A machine has one tape.  A fixed window of cells holds the oracle index
(``index_bits`` cells, most significant first) followed by the query word
(``query_bits`` cells).  Entering the query state ``q?`` takes one ordinary
step; the step after that moves to ``q+`` or ``q-`` according to the oracle,
leaving head and tape untouched.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .core import (
    FALSE,
    TRUE,
    App,
    Formula,
    Not,
    conj,
    disj,
    prop,
    with_prefix,
)
from .errors import InvalidIndex, MachineError, Timeout, WindowOverflow
from .transforms import nnf

MOVES = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class OracleMachine:
    states: Tuple[str, ...]
    start: str
    accept: str
    reject: str
    query: str
    answer_pos: str
    answer_neg: str
    blank: str
    alphabet: Tuple[str, ...]
    transitions: Dict[Tuple[str, str], Tuple[str, str, str]]
    window_offset: int
    index_bits: int
    query_bits: int
    time_bound: int
    num_oracles: int

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        for s in (self.start, self.accept, self.reject, self.query, self.answer_pos, self.answer_neg):
            if s not in states:
                raise MachineError(f"state {s!r} is not declared")
        if not {"0", "1", self.blank} <= set(self.alphabet):
            raise MachineError("alphabet must contain '0', '1' and the blank")
        if self.query in (self.accept, self.reject, self.answer_pos, self.answer_neg):
            raise MachineError("the query state must differ from halting and answer states")
        if self.num_oracles and self.index_bits < math.ceil(math.log2(self.num_oracles + 1)):
            raise MachineError(f"{self.index_bits} index bits cannot address {self.num_oracles} oracles")
        if min(self.window_offset, self.index_bits, self.query_bits, self.time_bound, self.num_oracles) < 0:
            raise MachineError("window and bounds must be non-negative")
        table = {}
        for (q, a), (q2, b, mv) in dict(self.transitions).items():
            if q not in states or q2 not in states:
                raise MachineError(f"transition mentions unknown state in {(q, a, q2)}")
            if a not in self.alphabet or b not in self.alphabet:
                raise MachineError(f"transition mentions unknown symbol in {(q, a, b)}")
            if mv not in MOVES:
                raise MachineError(f"unknown move {mv!r}")
            if q in self.halting or q == self.query:
                raise MachineError(f"state {q!r} may not have outgoing transitions")
            table[(q, a)] = (q2, b, mv)
        # missing transitions reject without moving
        for q in states:
            if q in self.halting or q == self.query:
                continue
            for a in self.alphabet:
                table.setdefault((q, a), (self.reject, a, "S"))
        object.__setattr__(self, "transitions", table)

    @property
    def halting(self) -> FrozenSet[str]:
        return frozenset((self.accept, self.reject))

    @property
    def window(self) -> range:
        return range(self.window_offset, self.window_offset + self.index_bits + self.query_bits)

    def tape_length(self, x: str) -> int:
        return max(self.time_bound + 1, len(x), self.window.stop)

    def initial_tape(self, x: str) -> List[str]:
        tape = [self.blank] * self.tape_length(x)
        for p in self.window:
            tape[p] = "0"
        for p, ch in enumerate(x):
            if ch not in "01":
                raise MachineError(f"input must be a bit string, got {x!r}")
            tape[p] = ch
        return tape

    # --- JSON -----------------------------------------------------------

    @classmethod
    def from_json(cls, data) -> "OracleMachine":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            w = data["window"]
            return cls(
                states=tuple(data["states"]),
                start=data["start"],
                accept=data["accept"],
                reject=data["reject"],
                query=data["query"],
                answer_pos=data["answer_pos"],
                answer_neg=data["answer_neg"],
                blank=data["blank"],
                alphabet=tuple(data["alphabet"]),
                transitions={(q, a): (q2, b, mv) for q, a, q2, b, mv in data["transitions"]},
                window_offset=int(w["offset"]),
                index_bits=int(w["index_bits"]),
                query_bits=int(w["query_bits"]),
                time_bound=int(data["time_bound"]),
                num_oracles=int(data["num_oracles"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MachineError(f"malformed machine description: {exc}") from None

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "start": self.start,
            "accept": self.accept,
            "reject": self.reject,
            "query": self.query,
            "answer_pos": self.answer_pos,
            "answer_neg": self.answer_neg,
            "blank": self.blank,
            "alphabet": list(self.alphabet),
            "transitions": [[q, a, q2, b, mv] for (q, a), (q2, b, mv) in sorted(self.transitions.items())],
            "window": {"offset": self.window_offset, "index_bits": self.index_bits, "query_bits": self.query_bits},
            "time_bound": self.time_bound,
            "num_oracles": self.num_oracles,
        }


@dataclass(frozen=True)
class OracleFamily:
    """Oracle sets as collections of bit strings (or bit tuples) of one width."""

    sets: Tuple[FrozenSet[Tuple[int, ...]], ...]
    width: int

    @classmethod
    def of(cls, sets: Sequence, width: int) -> "OracleFamily":
        norm = []
        for s in sets:
            words = set()
            for w in s:
                bits = tuple(int(c) for c in w) if isinstance(w, str) else tuple(int(b) for b in w)
                if len(bits) != width:
                    raise ValueError(f"oracle word {w!r} does not have width {width}")
                words.add(bits)
            norm.append(frozenset(words))
        return cls(tuple(norm), width)

    def tables(self, names: Sequence[str]) -> dict:
        """Characteristic truth tables keyed by ``names``."""
        from .core import TruthTable, args_to_index

        out = {}
        for name, s in zip(names, self.sets):
            bits = [0] * (1 << self.width)
            for w in s:
                bits[args_to_index(w)] = 1
            out[name] = TruthTable(self.width, tuple(bits))
        return out


@dataclass(frozen=True)
class Config:
    state: str
    head: int
    tape: Tuple[str, ...]


@dataclass
class Run:
    accept: bool
    trace: List[Config] = field(default_factory=list)

    def __iter__(self):
        return iter((self.accept, self.trace))


def _read_index(M, tape):
    bits = tape[M.window_offset: M.window_offset + M.index_bits]
    return int("".join(bits), 2) if bits else 0


def _read_query(M, tape):
    start = M.window_offset + M.index_bits
    return tuple(int(c) for c in tape[start: start + M.query_bits])


def _step(M, cfg, answer):
    """Successor configuration; ``answer`` supplies the oracle bit when in ``q?``."""
    tape = list(cfg.tape)
    if cfg.state == M.query:
        i = _read_index(M, tape)
        if not 1 <= i <= M.num_oracles:
            raise InvalidIndex(f"oracle index {i} outside 1..{M.num_oracles}")
        hit = answer(i, _read_query(M, tape))
        return Config(M.answer_pos if hit else M.answer_neg, cfg.head, cfg.tape)
    q2, b, mv = M.transitions[(cfg.state, tape[cfg.head])]
    if cfg.head in M.window and b not in "01":
        raise WindowOverflow(f"symbol {b!r} written into oracle window cell {cfg.head}")
    tape[cfg.head] = b
    head = min(max(cfg.head + MOVES[mv], 0), len(tape) - 1)
    return Config(q2, head, tuple(tape))


def run_machine(M: OracleMachine, x: str, oracles: OracleFamily) -> Run:
    """Simulate ``M`` on ``x`` with the given oracle sets for at most ``time_bound`` steps."""
    if M.num_oracles and len(oracles.sets) != M.num_oracles:
        raise MachineError(f"machine expects {M.num_oracles} oracles, got {len(oracles.sets)}")

    def answer(i, word):
        return word in oracles.sets[i - 1]

    cfg = Config(M.start, 0, tuple(M.initial_tape(x)))
    trace = [cfg]
    for _ in range(M.time_bound):
        if cfg.state in M.halting:
            break
        cfg = _step(M, cfg, answer)
        trace.append(cfg)
    if cfg.state not in M.halting:
        raise Timeout(f"machine did not halt within {M.time_bound} steps")
    return Run(cfg.state == M.accept, trace)


def complement(M: OracleMachine) -> OracleMachine:
    """The same machine with accepting and rejecting states swapped."""
    # transitions still name the old states; only the halting verdicts change roles
    return replace(M, accept=M.reject, reject=M.accept)


# ---------------------------------------------------------------------------
# encoding


def oracle_names(M: OracleMachine) -> List[str]:
    return [f"c{i}" for i in range(1, M.num_oracles + 1)]


def _reachable(M, x):
    """Steps the run can take under some choice of oracle answers.

    Returns the set of ``(t, head, state, symbol)`` for ordinary steps and the
    set of timesteps at which the machine sits in ``q?``.  Raises
    WindowOverflow if a reachable step writes a non-bit into the window.
    """
    steps, qtimes = set(), set()
    frontier = {Config(M.start, 0, tuple(M.initial_tape(x)))}
    for t in range(M.time_bound):
        nxt = set()
        for cfg in frontier:
            if cfg.state in M.halting:
                continue
            if cfg.state == M.query:
                qtimes.add(t)
                i = _read_index(M, cfg.tape)
                if 1 <= i <= M.num_oracles:
                    nxt.update(_step(M, cfg, lambda *_, b=b: b) for b in (0, 1))
            else:
                steps.add((t, cfg.head, cfg.state, cfg.tape[cfg.head]))
                nxt.add(_step(M, cfg, None))
        frontier = nxt
    return steps, qtimes


class _Vars:
    def __init__(self, M, L):
        self.M = M
        self.L = L
        self.window = set(M.window)
        self.names: List[str] = []

    def state(self, t, q):
        return prop(f"st_{t}_{self.M.states.index(q)}")

    def head(self, t, p):
        return prop(f"hd_{t}_{p}")

    def cell(self, t, p):
        return prop(f"z_{t}_{p}")

    def sym(self, t, p, a):
        """Literal for 'cell p holds a at time t'."""
        if p in self.window:
            if a == "1":
                return self.cell(t, p)
            if a == "0":
                return Not(self.cell(t, p))
            return FALSE
        return prop(f"tp_{t}_{p}_{self.M.alphabet.index(a)}")

    def declare(self, T):
        M = self.M
        for t in range(T + 1):
            self.names += [f"st_{t}_{i}" for i in range(len(M.states))]
            self.names += [f"hd_{t}_{p}" for p in range(self.L)]
            for p in range(self.L):
                if p in self.window:
                    self.names.append(f"z_{t}_{p}")
                else:
                    self.names += [f"tp_{t}_{p}_{a}" for a in range(len(M.alphabet))]


def _neg(lit):
    if isinstance(lit, Not):
        return lit.body
    if lit == TRUE:
        return FALSE
    if lit == FALSE:
        return TRUE
    return Not(lit)


def _exactly_one(lits):
    out = [list(lits)]
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            out.append([_neg(lits[i]), _neg(lits[j])])
    return out


def _index_is(v, t, M, V):
    """Literals whose conjunction says the index cells spell ``v`` at time t."""
    r = M.index_bits
    lits = []
    for j in range(r):
        bit = (v >> (r - 1 - j)) & 1
        c = V.cell(t, M.window_offset + j)
        lits.append(c if bit else Not(c))
    return lits


def run_clauses(M: OracleMachine, x: str) -> Tuple[List[str], List[List[Formula]]]:
    """Cook-style variables (time-major order) and clauses of the accepting-run condition.

    Transition clauses are emitted for the steps reachable under some oracle
    answers; the initial clauses force the encoded run onto those steps, so
    the others could never fire.
    """
    reach, qtimes = _reachable(M, x)
    T = M.time_bound
    tape0 = M.initial_tape(x)
    L = len(tape0)
    V = _Vars(M, L)
    V.declare(T)
    cls: List[List[Formula]] = []
    # initial configuration
    cls.append([V.state(0, M.start)])
    cls.append([V.head(0, 0)])
    for p, a in enumerate(tape0):
        cls.append([V.sym(0, p, a)])
    for t in range(T + 1):
        cls += _exactly_one([V.state(t, q) for q in M.states])
        cls += _exactly_one([V.head(t, p) for p in range(L)])
        for p in range(L):
            if p not in V.window:
                cls += _exactly_one([V.sym(t, p, a) for a in M.alphabet])
    names = oracle_names(M)
    qstart = M.window_offset + M.index_bits
    for t in range(T):
        for p in range(L):
            hd = Not(V.head(t, p))
            # cells away from the head keep their symbol
            for a in M.alphabet:
                s = V.sym(t, p, a)
                if s == FALSE:
                    continue
                cls.append([V.head(t, p), _neg(s), V.sym(t + 1, p, a)])
            for q in M.states:
                st = Not(V.state(t, q))
                if q in M.halting or q == M.query:
                    # halting and query steps leave head and tape alone
                    cls.append([st, hd, V.head(t + 1, p)])
                    for a in M.alphabet:
                        s = V.sym(t, p, a)
                        if s != FALSE:
                            cls.append([st, hd, _neg(s), V.sym(t + 1, p, a)])
                    if q in M.halting:
                        cls.append([st, V.state(t + 1, q)])
                    continue
                for a in M.alphabet:
                    s = V.sym(t, p, a)
                    if s == FALSE or (t, p, q, a) not in reach:
                        continue
                    q2, b, mv = M.transitions[(q, a)]
                    guard = [st, hd, _neg(s)]
                    p2 = min(max(p + MOVES[mv], 0), L - 1)
                    cls.append(guard + [V.state(t + 1, q2)])
                    cls.append(guard + [V.sym(t + 1, p, b)])
                    cls.append(guard + [V.head(t + 1, p2)])
        if t in qtimes:
            st = Not(V.state(t, M.query))
            word = tuple(V.cell(t, qstart + j) for j in range(M.query_bits))
            for i, c in enumerate(names, start=1):
                idx = [_neg(l) for l in _index_is(i, t, M, V)]
                atom = App(c, word)
                cls.append([st] + idx + [Not(atom), V.state(t + 1, M.answer_pos)])
                cls.append([st] + idx + [atom, V.state(t + 1, M.answer_neg)])
            for v in range(1 << M.index_bits):
                if not 1 <= v <= M.num_oracles:
                    cls.append([st] + [_neg(l) for l in _index_is(v, t, M, V)])
        else:
            # the query state is unreachable here
            cls.append([Not(V.state(t, M.query))])
    cls.append([V.state(T, M.accept)])
    cleaned = []
    for c in cls:
        if any(l == TRUE for l in c):
            continue
        c = [l for l in c if l != FALSE]
        cleaned.append(c if c else [FALSE])
    return V.names, cleaned


def _cnf(clauses):
    return conj([disj(c) for c in clauses])


def _oracle_prefix(M, first):
    kinds = ["exists", "forall"]
    k0 = kinds.index(first)
    return [(kinds[(k0 + i) % 2], c, M.query_bits) for i, c in enumerate(oracle_names(M))]


def encode_run(M: OracleMachine, x: str, first: str = "exists") -> Formula:
    """``G1 c1 ... Gl cl exists z (CNF)``, true iff the alternating oracle condition accepts."""
    if first not in ("exists", "forall"):
        raise ValueError("first oracle quantifier must be 'exists' or 'forall'")
    names, clauses = run_clauses(M, x)
    prefix = _oracle_prefix(M, first) + [("exists", n, 0) for n in names]
    return with_prefix(prefix, _cnf(clauses))


def encode_run_dnf(M: OracleMachine, x: str, first: str = "exists") -> Formula:
    """Same truth condition with a universal proposition block over a DNF.

    Built from the complement machine: its accepting runs are exactly the
    ones the DNF rules out.
    """
    if first not in ("exists", "forall"):
        raise ValueError("first oracle quantifier must be 'exists' or 'forall'")
    names, clauses = run_clauses(complement(M), x)
    prefix = _oracle_prefix(M, first) + [("forall", n, 0) for n in names]
    return with_prefix(prefix, nnf(_cnf(clauses), negate=True))


def strip_oracles(phi: Formula, M: OracleMachine) -> Formula:
    """Drop the oracle quantifiers, leaving ``exists z phi_x`` (or its DNF dual)."""
    for _ in range(M.num_oracles):
        phi = phi.body
    return phi


def alternating_acceptance(M: OracleMachine, x: str, first: str = "exists") -> int:
    """Explicit enumeration ``G1 O1 G2 O2 ... : run_machine accepts`` over all oracle families."""
    words = [tuple((v >> (M.query_bits - 1 - j)) & 1 for j in range(M.query_bits)) for v in range(1 << M.query_bits)]
    subsets = []
    for mask in range(1 << len(words)):
        subsets.append(frozenset(w for j, w in enumerate(words) if (mask >> (len(words) - 1 - j)) & 1))
    kinds = [k for k, _, _ in _oracle_prefix(M, first)]

    def rec(i, chosen):
        if i == M.num_oracles:
            fam = OracleFamily(tuple(chosen), M.query_bits)
            return int(run_machine(M, x, fam).accept)
        vals = (rec(i + 1, chosen + [s]) for s in subsets)
        return int(any(vals)) if kinds[i] == "exists" else int(all(vals))

    return rec(0, [])
