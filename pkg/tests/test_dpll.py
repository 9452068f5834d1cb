import io
import random

import numpy as np
import pytest

from conftest import models_mask, truth_table
from vdw.dpll import (
    Assignment,
    DPLLSolver,
    ResourceBudget,
    Status,
    enumerate_models,
    solve_complete,
)
from vdw.encoder import CnfTheory, SymmetryMode, encode_cnf
from vdw.model import Params


def random_3cnf(rng, n, c):
    clauses = []
    for _ in range(c):
        vs = rng.sample(range(1, n + 1), min(3, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfTheory(n, clauses)


@pytest.mark.parametrize("k,l,m,expected", [
    (2, 3, 8, Status.SAT), (2, 3, 9, Status.UNSAT),
    (1, 2, 2, Status.UNSAT), (1, 2, 1, Status.SAT),
])
def test_vdw_verdicts(k, l, m, expected):
    theory = encode_cnf(Params(k, l, m))
    result = solve_complete(theory)
    assert result.status is expected
    if result.is_sat:
        assert result.assignment.satisfies(theory)


def test_empty_and_trivial_theories():
    assert solve_complete(CnfTheory(0, [])).is_sat
    assert solve_complete(CnfTheory(2, [])).assignment.num_vars == 2
    assert solve_complete(CnfTheory(1, [(1,), (-1,)])).status is Status.UNSAT
    assert solve_complete(CnfTheory(1, [()], check=False)).status is Status.UNSAT
    with pytest.raises(ValueError):
        CnfTheory(1, [()])


def test_verdicts_match_truth_table():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(3, 16)
        theory = random_3cnf(rng, n, rng.randint(1, int(5 * n)))
        expected = bool(models_mask(theory.clauses, truth_table(n)).any())
        result = solve_complete(theory)
        assert result.is_sat == expected
        if expected:
            assert result.assignment.satisfies(theory)


def test_enumeration_matches_truth_table():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(1, 10)
        theory = random_3cnf(rng, n, rng.randint(0, 3 * n))
        table = truth_table(n)
        expected = {tuple(row) for row in table[models_mask(theory.clauses, table)].tolist()}
        got = enumerate_models(theory, limit=2**n + 1)
        assert not got.truncated
        values = [m.values() for m in got.models]
        assert len(values) == len(set(values))
        assert set(values) == expected


def test_enumerate_examples():
    one = enumerate_models(CnfTheory(1, [(1,)]), limit=5)
    assert one.models == [Assignment([True])] and not one.truncated
    assert enumerate_models(encode_cnf(Params(2, 3, 9)), limit=10).models == []


def test_enumerate_model_count_2_3_8_is_even():
    theory = encode_cnf(Params(2, 3, 8), SymmetryMode.NONE)
    table = truth_table(16)
    oracle = int(models_mask(theory.clauses, table).sum())
    assert oracle % 2 == 0 and oracle > 0
    got = enumerate_models(theory, limit=10_000)
    assert len(got.models) == oracle


def test_enumerate_limit_truncates():
    theory = CnfTheory(3, [])
    got = enumerate_models(theory, limit=3)
    assert len(got.models) == 3 and got.truncated and got.reason == "limit"
    with pytest.raises(ValueError):
        enumerate_models(theory, limit=0)


def test_enumerate_budget_truncates():
    got = enumerate_models(CnfTheory(12, []), limit=10_000, budget=ResourceBudget(max_decisions=20))
    assert got.truncated and got.reason == "decision limit"
    assert 0 < len(got.models) < 4096


def test_enumeration_order_is_deterministic():
    theory = encode_cnf(Params(2, 3, 6), SymmetryMode.FIX_FIRST)
    a = enumerate_models(theory, limit=1000).models
    b = enumerate_models(theory, limit=1000).models
    assert a == b


def test_budget_exhaustion_is_unknown():
    theory = encode_cnf(Params(2, 4, 35))
    result = solve_complete(theory, ResourceBudget(max_decisions=50))
    assert result.status is Status.UNKNOWN
    assert result.reason == "decision limit"
    assert result.assignment is None
    timed = solve_complete(encode_cnf(Params(3, 3, 26)), ResourceBudget(seconds=0.0))
    assert timed.status is Status.UNKNOWN and timed.reason == "time limit"


def test_determinism_of_result_and_stats():
    theory = encode_cnf(Params(2, 4, 30), SymmetryMode.LEX)
    a, b = solve_complete(theory), solve_complete(theory)
    assert a.status is b.status is Status.SAT
    assert a.assignment == b.assignment
    assert a.stats == b.stats


def test_diagnostics_line():
    buf = io.StringIO()
    solve_complete(encode_cnf(Params(2, 3, 9)), diagnostics=buf)
    assert buf.getvalue().startswith("# dpll decisions=")


def test_propagation_reaches_fixpoint():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(4, 14)
        solver = DPLLSolver(random_3cnf(rng, n, rng.randint(n, 4 * n)))
        # random decisions, propagating after each one
        head = 0
        for v in rng.sample(range(1, n + 1), rng.randint(1, n)):
            if solver.value[v] != 0:
                continue
            solver.assign(v if rng.random() < 0.5 else -v)
            head, conflict = solver.propagate(head)
            if conflict:
                break
            assert solver.check_fixpoint()


def test_branching_heuristic():
    # variable 3 appears most often in the shortest clauses
    solver = DPLLSolver(CnfTheory(4, [(1, 3), (2, 3), (-3, 4), (1, 2, 4)]))
    assert solver.pick_branch() == 3
    tie = DPLLSolver(CnfTheory(3, [(2, 3), (1, 2, 3)]))
    assert tie.pick_branch() == 2


def test_false_first():
    result = solve_complete(CnfTheory(3, [(1, 2, 3)]))
    assert result.assignment.values() == (False, False, True)


def test_assignment_helpers():
    a = Assignment.from_literals(3, [1, -2, 3])
    assert a.true_vars() == [1, 3]
    assert a.literals() == [1, -2, 3]
    assert a[1] and not a[2]
    assert a.restrict(2) == Assignment([True, False])
    assert Assignment.from_true_vars(3, [1, 3]) == a
    with pytest.raises(ValueError):
        Assignment.from_true_vars(2, [3])
    assert np.array(a.values()).sum() == 2
