import random

import pytest

from harness import brute_force_ilp, random_ilp
from htnfpt.errors import BudgetExceeded
from htnfpt.ilp import GE, LE, IlpInstance, feasible


def test_single_variable():
    ilp = IlpInstance(1, [1], [5])
    ilp.add([2], LE, 6)
    x = feasible(ilp)
    assert x is not None and x[0] in (1, 2, 3)


def test_sum_out_of_reach():
    ilp = IlpInstance(2, [0, 0], [3, 3])
    ilp.add([1, 1], GE, 7)
    assert feasible(ilp) is None


def test_count_window_with_cycle_multiplicity():
    # 1 <= 0 + x <= 2 with x >= 1
    ilp = IlpInstance(1, [1], [None])
    ilp.add([1], GE, 1)
    ilp.add([1], LE, 2)
    assert feasible(ilp)[0] in (1, 2)


def test_bound_derived_by_propagation():
    ilp = IlpInstance(2, [0, 1], [None, None])
    ilp.add([1, 2], LE, 7)
    ilp.add([1, 1], GE, 6)
    x = feasible(ilp)
    assert x is not None and ilp.satisfied(x)


def test_negative_coefficient_needs_propagated_bound():
    # y - x <= 1 and x <= 3 bound y at 4 even though the rhs is 1
    ilp = IlpInstance(2, [0, 0], [None, None])
    ilp.add([1, 0], LE, 3)
    ilp.add([-1, 1], LE, 1)
    ilp.add([0, 1], GE, 4)
    assert feasible(ilp) == [3, 4]


def test_unbounded_variable_rejected():
    ilp = IlpInstance(1, [0], [None])
    ilp.add([1], GE, 2)
    with pytest.raises(ValueError):
        feasible(ilp)


def test_malformed_programs_rejected():
    with pytest.raises(ValueError):
        IlpInstance(2, [0], [1])
    with pytest.raises(ValueError):
        IlpInstance(1, [2], [1])
    ilp = IlpInstance(1, [0], [1])
    with pytest.raises(ValueError):
        ilp.add([1, 1], LE, 0)
    with pytest.raises(ValueError):
        ilp.add([1], "==", 0)


def test_budget_is_reported():
    ilp = IlpInstance(6, [0] * 6, [9] * 6)
    # parity makes this infeasible, which bound propagation cannot see
    ilp.add([2] * 6, GE, 7)
    ilp.add([2] * 6, LE, 7)
    with pytest.raises(BudgetExceeded):
        feasible(ilp, budget=3)


def test_dump_lists_bounds_and_rows():
    ilp = IlpInstance(2, [1, 0], [None, 4], names=["x", "y"])
    ilp.add([1, -1], LE, 2)
    text = ilp.dump()
    assert "1 <= x <= inf" in text and "1*x + -1*y <= 2" in text


def test_agrees_with_enumeration():
    rng = random.Random(4)
    for _ in range(300):
        ilp = random_ilp(rng)
        got = feasible(ilp)
        points = brute_force_ilp(ilp)
        assert (got is not None) == bool(points)
        if got is not None:
            assert ilp.satisfied(got)
