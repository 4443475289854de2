"""Small machines used by the tests, the acceptance suite and the notebooks."""
from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from .machineenc import OracleMachine
from .tableau import EXISTENTIAL, UNIVERSAL, AtmSpec

BITS = ("0", "1")


def _om(name_states, transitions, **kw) -> OracleMachine:
    base = dict(
        start="start",
        accept="acc",
        reject="rej",
        query="ask",
        answer_pos="yes",
        answer_neg="no",
        blank="_",
        alphabet=("_", "0", "1"),
    )
    base.update(kw)
    states = list(dict.fromkeys(list(name_states) + [base[k] for k in
                  ("start", "accept", "reject", "query", "answer_pos", "answer_neg")]))
    return OracleMachine(states=tuple(states), transitions=transitions, **base)


def mq() -> OracleMachine:
    """Copies the input bit into the query cell, asks oracle 1, accepts on a positive answer."""
    t = {("start", "_"): ("rej", "_", "S")}
    for b in BITS:
        t[("start", b)] = (f"a{b}", b, "R")
        for c in BITS:
            t[(f"a{b}", c)] = (f"b{b}", "1", "R")
            t[(f"b{b}", c)] = ("ask", b, "S")
    return _om(["a0", "a1", "b0", "b1"], t, answer_pos="acc", answer_neg="rej",
               window_offset=1, index_bits=1, query_bits=1, time_bound=4, num_oracles=1)


def immediate_accept() -> OracleMachine:
    t = {("start", a): ("acc", a, "S") for a in ("_", "0", "1")}
    return _om([], t, window_offset=0, index_bits=0, query_bits=1, time_bound=1, num_oracles=0)


def negated_query() -> OracleMachine:
    """Asks whether (x0, 1) is in oracle 1 and accepts on a negative answer."""
    t = {("start", "_"): ("rej", "_", "S")}
    for b in BITS:
        t[("start", b)] = (f"a{b}", b, "R")
        for c in BITS:
            t[(f"a{b}", c)] = (f"b{b}", "1", "R")
            t[(f"b{b}", c)] = (f"c{b}", b, "R")
            t[(f"c{b}", c)] = ("ask", "1", "S")
    return _om(["a0", "a1", "b0", "b1", "c0", "c1"], t, answer_pos="rej", answer_neg="acc",
               window_offset=1, index_bits=1, query_bits=2, time_bound=5, num_oracles=1)


def select_two_wide() -> OracleMachine:
    """Asks oracle 1+x0 about the word x0 x1 (two oracles of width 2)."""
    t = {}
    states = []
    for b0 in BITS:
        t[("start", b0)] = (f"r{b0}", b0, "R")
        for b1 in BITS:
            t[(f"r{b0}", b1)] = (f"i{b0}{b1}", b1, "R")
            hi, lo = ("0", "1") if b0 == "0" else ("1", "0")
            for c in BITS:
                t[(f"i{b0}{b1}", c)] = (f"j{b0}{b1}", hi, "R")
                t[(f"j{b0}{b1}", c)] = (f"k{b0}{b1}", lo, "R")
                t[(f"k{b0}{b1}", c)] = (f"l{b0}{b1}", b0, "R")
                t[(f"l{b0}{b1}", c)] = ("ask", b1, "S")
            states += [f"i{b0}{b1}", f"j{b0}{b1}", f"k{b0}{b1}", f"l{b0}{b1}"]
        states.append(f"r{b0}")
    return _om(states, t, answer_pos="acc", answer_neg="rej",
               window_offset=2, index_bits=2, query_bits=2, time_bound=7, num_oracles=2)


def select_two_narrow() -> OracleMachine:
    """Asks oracle 1+x1 about the single bit x0."""
    t = {}
    states = []
    for b0 in BITS:
        t[("start", b0)] = (f"r{b0}", b0, "R")
        states.append(f"r{b0}")
        for b1 in BITS:
            t[(f"r{b0}", b1)] = (f"i{b0}{b1}", b1, "R")
            hi, lo = ("1", "0") if b1 == "1" else ("0", "1")
            for c in BITS:
                t[(f"i{b0}{b1}", c)] = (f"j{b0}{b1}", hi, "R")
                t[(f"j{b0}{b1}", c)] = (f"k{b0}{b1}", lo, "R")
                t[(f"k{b0}{b1}", c)] = ("ask", b0, "S")
            states += [f"i{b0}{b1}", f"j{b0}{b1}", f"k{b0}{b1}"]
    return _om(states, t, answer_pos="acc", answer_neg="rej",
               window_offset=2, index_bits=2, query_bits=1, time_bound=6, num_oracles=2)


def two_queries() -> OracleMachine:
    """Accepts iff x0 is in oracle 1 and 0 is not: two questions at different times."""
    t = {("start", "_"): ("rej", "_", "S")}
    for b in BITS:
        t[("start", b)] = (f"a{b}", b, "R")
        for c in BITS:
            t[(f"a{b}", c)] = (f"b{b}", "1", "R")
            t[(f"b{b}", c)] = ("ask", b, "S")
        # first answer: head on the query cell, which holds a bit
        t[("yes", b)] = ("ask", "0", "R")
        t[("no", b)] = ("rej", b, "S")
    # second answer: head one cell further, on a blank
    t[("yes", "_")] = ("rej", "_", "S")
    t[("no", "_")] = ("acc", "_", "S")
    return _om(["a0", "a1", "b0", "b1"], t,
               window_offset=1, index_bits=1, query_bits=1, time_bound=7, num_oracles=1)


def oracle_machines() -> Dict[str, OracleMachine]:
    return {
        "mq": mq(),
        "immediate": immediate_accept(),
        "negated": negated_query(),
        "select_wide": select_two_wide(),
        "select_narrow": select_two_narrow(),
        "two_queries": two_queries(),
    }


SINGLE_QUERY = ("mq", "negated", "select_wide", "select_narrow")


# ---------------------------------------------------------------------------
# alternating machines


Step = Callable[[int, int, int, str], Sequence[Tuple[int, str, str]]]


def phased_atm(
    n: int,
    m: int,
    first: str,
    step: Step,
    accepts: Callable[[int], bool],
    mems: Iterable[int] = (0,),
    alphabet: Sequence[str] = ("_", "0", "1"),
) -> AtmSpec:
    """Machine whose phase i (1..m) runs through states ``p{i}s{j}m{mem}`` for j = 0..n-1.

    ``step(i, j, mem, read)`` lists the options ``(mem', write, move)``.  The
    last step of the last phase enters ``acc`` or ``rej`` by ``accepts(mem')``.
    """
    mems = list(mems)
    other = UNIVERSAL if first == EXISTENTIAL else EXISTENTIAL

    def name(i, j, mem):
        return f"p{i}s{j}m{mem}"

    trans: Dict[Tuple[str, str], List[Tuple[str, str, str]]] = {}
    types = {"acc": other if m % 2 else first, "rej": other if m % 2 else first}
    for i in range(1, m + 1):
        for j in range(n):
            for mem in mems:
                q = name(i, j, mem)
                types[q] = first if i % 2 else other
                for a in alphabet:
                    opts = []
                    for mem2, b, mv in step(i, j, mem, a):
                        if j < n - 1:
                            target = name(i, j + 1, mem2)
                        elif i < m:
                            target = name(i + 1, 0, mem2)
                        else:
                            target = "acc" if accepts(mem2) else "rej"
                        opts.append((target, b, mv))
                    if opts:
                        trans[(q, a)] = opts
    start = name(1, 0, mems[0])
    # keep states reachable in the state graph
    seen, todo = {start}, [start]
    while todo:
        q = todo.pop()
        for (src, _), opts in trans.items():
            if src != q:
                continue
            for target, _, _ in opts:
                if target not in seen:
                    seen.add(target)
                    todo.append(target)
    seen |= {"acc", "rej"}
    states = [q for q in types if q in seen]
    states = [q for q in states if q not in ("acc", "rej")] + ["acc", "rej"]
    return AtmSpec(
        states=tuple(states),
        types={q: types[q] for q in states},
        start=start,
        accept=frozenset({"acc"}),
        reject=frozenset({"rej"}),
        blank=alphabet[0],
        alphabet=tuple(alphabet),
        transitions={k: tuple(v) for k, v in trans.items() if k[0] in seen},
        phase_len=n,
        phase_count=m,
    )


def atm_one_bit_halt(accept: bool) -> AtmSpec:
    """One existential step straight into a halting state (six symbols in total)."""
    target = "acc" if accept else "rej"
    return AtmSpec(
        states=("s", "acc", "rej"),
        types={"s": EXISTENTIAL, "acc": UNIVERSAL, "rej": UNIVERSAL},
        start="s",
        accept=frozenset({"acc"}),
        reject=frozenset({"rej"}),
        blank="_",
        alphabet=("_", "0", "1"),
        transitions={("s", a): ((target, a, "S"),) for a in ("_", "0", "1")},
        phase_len=1,
        phase_count=1,
    )


def atm_has_one() -> AtmSpec:
    """Deterministic scan of two cells; accepts iff one of them holds a 1."""

    def step(i, j, mem, a):
        seen = mem | (a == "1")
        return [(int(seen), a, "R" if j == 0 else "S")]

    return phased_atm(2, 1, EXISTENTIAL, step, lambda mem: mem == 1, mems=(0, 1))


def atm_exists_forall() -> AtmSpec:
    """Guess g, then branch on u; accepts iff g = 1 and (u = 0 or x0 = 1).  True iff x0 = 1."""

    # mem bits: 1 = g, 2 = u, 4 = x0 is 1
    def step(i, j, mem, a):
        if i == 1 and j == 0:
            x = 4 if a == "1" else 0
            return [(x, a, "S"), (x | 1, a, "S")]
        if i == 2 and j == 0:
            return [(mem, a, "S"), (mem | 2, a, "S")]
        return [(mem, a, "S")]

    def accepts(mem):
        return bool(mem & 1) and (not mem & 2 or bool(mem & 4))

    return phased_atm(2, 2, EXISTENTIAL, step, accepts, mems=range(8))


def atm_forall_exists() -> AtmSpec:
    """Branch on u, then guess g; accepts iff g = u and (u = 1 or x ends in 1)."""

    # mem bits: 1 = u, 2 = g, 4 = last input cell read holds 1
    def step(i, j, mem, a):
        if i == 1 and j == 0:
            return [(0, a, "R"), (1, a, "R")]
        if i == 1 and j == 1:
            return [((mem & 3) | (4 if a == "1" else 0), a, "L")]
        if i == 2 and j == 0:
            return [(mem, a, "S"), (mem | 2, a, "S")]
        return [(mem, a, "S")]

    def accepts(mem):
        u, g, last = mem & 1, (mem >> 1) & 1, (mem >> 2) & 1
        return g == u and (u == 1 or last == 1)

    return phased_atm(2, 2, UNIVERSAL, step, accepts, mems=range(8))


def atm_three_phases() -> AtmSpec:
    """Guess a, branch on b, guess c (three phases of three steps); accepts iff a, x0 = 1 and (b or c)."""

    # mem bits: 1 = a and x0 is 1, 2 = b or c
    def step(i, j, mem, a):
        if j == 0:
            if i == 1:
                return [(0, a, "R"), (1 if a == "1" else 0, a, "R")]
            return [(mem, a, "R"), (mem | 2, a, "R")]
        if j == 1:
            return [(mem, a, "L")]
        return [(mem, a, "S")]

    return phased_atm(3, 3, EXISTENTIAL, step, lambda mem: mem == 3, mems=range(4))


def atm_universal_path() -> AtmSpec:
    """Deterministic universal machine: accepts iff x0 = 1 and x1 != 1 (moves R, L, S)."""

    # mem bits: 1 = x0 is 1, 2 = x1 is 1
    def step(i, j, mem, a):
        if j == 0:
            return [(1 if a == "1" else 0, a, "R")]
        if j == 1:
            return [(mem | (2 if a == "1" else 0), a, "L")]
        return [(mem, a, "S")]

    return phased_atm(3, 1, UNIVERSAL, step, lambda mem: mem == 1, mems=range(4))


def alternating_machines() -> Dict[str, AtmSpec]:
    return {
        "accept_now": atm_one_bit_halt(True),
        "reject_all": atm_one_bit_halt(False),
        "has_one": atm_has_one(),
        "exists_forall": atm_exists_forall(),
        "forall_exists": atm_forall_exists(),
        "three_phases": atm_three_phases(),
        "universal_path": atm_universal_path(),
    }


def inputs_up_to(length: int, alphabet: Sequence[str] = BITS) -> List[str]:
    out = [""]
    frontier = [""]
    for _ in range(length):
        frontier = [w + a for w in frontier for a in alphabet]
        out += frontier
    return out
