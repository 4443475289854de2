import dataclasses
import itertools
import json
from pathlib import Path

import pytest

from qbsf import toys
from qbsf.analysis import is_cnf, is_dnf, is_uniq
from qbsf.core import TruthTable, evaluate, split_prefix
from qbsf.errors import InvalidIndex, MachineError, Timeout, WindowOverflow
from qbsf.machineenc import (
    OracleFamily,
    OracleMachine,
    alternating_acceptance,
    complement,
    encode_run,
    encode_run_dnf,
    oracle_names,
    run_clauses,
    run_machine,
    strip_oracles,
)
from qbsf.solver import decide

DATA = Path(__file__).parent / "data"
NONE1 = OracleFamily.of([[]], 1)
ONE1 = OracleFamily.of([["1"]], 1)


def test_mq_hand_trace():
    M = toys.mq()
    run = run_machine(M, "1", ONE1)
    assert run.accept
    states = [c.state for c in run.trace]
    assert states == ["start", "a1", "b1", "ask", "acc"]
    # the oracle window reads index 1 then the query bit 1
    ask = run.trace[3]
    assert ask.tape[1:3] == ("1", "1")
    assert not run_machine(M, "1", NONE1).accept


def test_immediate_accept_takes_one_step():
    run = run_machine(toys.immediate_accept(), "", OracleFamily((), 1))
    assert run.accept
    assert len(run.trace) - 1 == 1


def test_complement():
    M = toys.mq()
    assert not run_machine(complement(M), "1", ONE1).accept
    assert complement(complement(M)) == M
    assert not run_machine(complement(toys.immediate_accept()), "", OracleFamily((), 1)).accept
    for fam in (NONE1, ONE1):
        for x in ("0", "1"):
            assert run_machine(complement(M), x, fam).accept != run_machine(M, x, fam).accept


def test_errors():
    M = toys.mq()
    with pytest.raises(Timeout):
        run_machine(dataclasses.replace(M, time_bound=2), "1", ONE1)
    # index 0 is out of range: the machine writes 0 into the index cell
    t = dict(M.transitions)
    for b in "01":
        for c in "01":
            t[(f"a{b}", c)] = (f"b{b}", "0", "R")
    with pytest.raises(InvalidIndex):
        run_machine(dataclasses.replace(M, transitions=t), "1", ONE1)
    t = dict(M.transitions)
    t[("a1", "0")] = ("b1", "_", "R")
    bad = dataclasses.replace(M, transitions=t)
    with pytest.raises(WindowOverflow):
        run_machine(bad, "1", ONE1)
    with pytest.raises(WindowOverflow):
        encode_run(bad, "1")
    with pytest.raises(MachineError):
        run_machine(M, "1", OracleFamily.of([[], []], 1))


def test_machine_validation():
    M = toys.mq()
    with pytest.raises(MachineError):
        dataclasses.replace(M, num_oracles=2)  # one index bit cannot address two oracles
    with pytest.raises(MachineError):
        dataclasses.replace(M, transitions={("acc", "0"): ("rej", "0", "S")})
    with pytest.raises(MachineError):
        dataclasses.replace(M, transitions={("start", "0"): ("nowhere", "0", "S")})


def test_json_round_trip():
    M = toys.mq()
    data = M.to_json()
    assert set(data) == {
        "states", "start", "accept", "reject", "query", "answer_pos", "answer_neg", "blank",
        "alphabet", "transitions", "window", "time_bound", "num_oracles",
    }
    assert data["window"] == {"offset": 1, "index_bits": 1, "query_bits": 1}
    assert OracleMachine.from_json(json.dumps(data)) == M
    assert OracleMachine.from_json((DATA / "mq.om.json").read_text()) == M
    with pytest.raises(MachineError):
        OracleMachine.from_json({"states": []})


def test_encoding_examples():
    M = toys.mq()
    phi = encode_run(M, "1", "exists")
    v = decide(phi)
    assert v.value == 1
    # only the word 1 is asked, so the lexicographically first witness is 01
    assert v.witness["c1"] == TruthTable(1, (0, 1))
    assert evaluate(strip_oracles(phi, M), {"c1": TruthTable.constant(1, 1)}) == 1
    assert decide(encode_run(M, "1", "forall")).value == 0
    assert decide(encode_run_dnf(M, "1", "exists")).value == 1
    assert decide(encode_run_dnf(M, "1", "forall")).value == 0
    assert is_uniq(phi)
    assert is_cnf(phi) and is_dnf(encode_run_dnf(M, "1"))


def test_oracle_prefix_shape():
    M = toys.select_two_wide()
    prefix, _ = split_prefix(encode_run(M, "10", "forall"))
    assert prefix[:2] == [("forall", "c1", 2), ("exists", "c2", 2)]
    assert all(q == "exists" and a == 0 for q, _, a in prefix[2:])
    prefix, _ = split_prefix(encode_run_dnf(M, "10", "exists"))
    assert prefix[:2] == [("exists", "c1", 2), ("forall", "c2", 2)]
    assert all(q == "forall" and a == 0 for q, _, a in prefix[2:])


def test_immediate_accept_encodings_true():
    M = toys.immediate_accept()
    for first in ("exists", "forall"):
        assert decide(encode_run(M, "", first)).value == 1
        assert decide(encode_run_dnf(M, "", first)).value == 1


def test_clauses_use_expected_variables():
    names, clauses = run_clauses(toys.mq(), "1")
    # states are numbered by their position in M.states
    assert "st_0_0" in names and "hd_0_0" in names
    assert any(n.startswith("tp_") for n in names) and any(n.startswith("z_") for n in names)
    assert all(clauses)


def _families(M):
    words = list(itertools.product((0, 1), repeat=M.query_bits))
    subsets = [[w for j, w in enumerate(words) if mask >> j & 1] for mask in range(1 << len(words))]
    for combo in itertools.product(subsets, repeat=M.num_oracles):
        yield OracleFamily.of(combo, M.query_bits)


@pytest.mark.parametrize("name", sorted(toys.oracle_machines()))
def test_encoding_matches_runs(name):
    M = toys.oracle_machines()[name]
    for x in ("", "0", "1", "01", "10"):
        inner = strip_oracles(encode_run(M, x), M)
        inner_dnf = strip_oracles(encode_run_dnf(M, x), M)
        for fam in _families(M):
            tables = fam.tables(oracle_names(M))
            want = int(run_machine(M, x, fam).accept)
            assert evaluate(inner, tables) == want
            assert evaluate(inner_dnf, tables) == want
        for first in ("exists", "forall"):
            assert decide(encode_run(M, x, first)).value == alternating_acceptance(M, x, first)


def test_single_query_machines_are_uniq():
    for name in toys.SINGLE_QUERY:
        M = toys.oracle_machines()[name]
        assert is_uniq(encode_run(M, "10"))
    # asking twice with different words breaks uniqueness
    assert not is_uniq(encode_run(toys.two_queries(), "1"))
