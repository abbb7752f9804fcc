import math

import pytest

from harness import random_compound_instances
from htnfpt.errors import BudgetExceeded, InfiniteDepth, MethodMismatch, NotCompound
from htnfpt.fixtures import diamond, diamond_domain, diamond_network
from htnfpt.generators import ColoredGraph, gen_clique
from htnfpt.hierarchy import (
    canonical_form,
    decompose_step,
    enumerate_decompositions,
    iter_decompositions,
    decomposition_bound,
    measure_hierarchy,
    solve_compound,
)
from htnfpt.model import Domain, Exists, Instance, MethodDef, TaskNetwork, transitive_closure
from htnfpt.oracle import oracle_compound

ACTIONS = {"a": ((), (), ()), "b": ((), (), ())}


def domain(methods, compounds=None):
    return Domain.build([], ACTIONS, compounds or list(methods), methods)


def K3():
    return ColoredGraph({"v1": 1, "v2": 2, "v3": 3}, [("v1", "v2"), ("v2", "v3"), ("v1", "v3")], 3)


def P3():
    return ColoredGraph({"v1": 1, "v2": 2, "v3": 3}, [("v1", "v2"), ("v2", "v3")], 3)


def test_measures_primitive(dia):
    h = measure_hierarchy(dia.network, dia.domain)
    assert (h.c_num, h.c_depth) == (0, 0)


def test_measures_wrapped_clique():
    inst = gen_clique(K3(), "cs")
    h = measure_hierarchy(inst.network, inst.domain)
    assert (h.c_choices, h.c_depth, h.c_num) == (2, 2, 1)


def test_measures_self_cycle():
    d = domain({"c": [TaskNetwork.build([("x", "c")])]})
    h = measure_hierarchy(TaskNetwork.build([("t", "c")]), d)
    assert math.isinf(h.c_depth) and not h.finite
    with pytest.raises(InfiniteDepth):
        list(enumerate_decompositions(TaskNetwork.build([("t", "c")]), d))


def test_decompose_single_task():
    d = domain({"c": [TaskNetwork.build([("u", "a")])]})
    out = decompose_step(TaskNetwork.build([("t", "c")]), "t", d.methods["c"][0], d)
    assert out.labels == ("a",) and out.is_primitive(d)


def test_decompose_inside_chain():
    d = domain({"c": [TaskNetwork.build([("u", "a"), ("v", "b")], [("u", "v")])]})
    tn = TaskNetwork.build([("x", "a"), ("t", "c"), ("y", "b")], [("x", "t"), ("t", "y")])
    out = decompose_step(tn, "t", d.methods["c"][0])
    assert out.arcs() == {("x", "t/u"), ("t/u", "t/v"), ("t/v", "y")}


def test_decompose_empty_method_keeps_order():
    d = domain({"c": [TaskNetwork.build([])]})
    tn = TaskNetwork.build([("x", "a"), ("t", "c"), ("y", "b")], [("x", "t"), ("t", "y")])
    out = decompose_step(tn, "t", d.methods["c"][0])
    assert out.tasks == ("x", "y") and out.arcs() == {("x", "y")}


def test_decompose_errors():
    d = domain({"c": [TaskNetwork.build([("u", "a")])], "e": [TaskNetwork.build([])]})
    tn = TaskNetwork.build([("x", "a"), ("t", "c")])
    with pytest.raises(NotCompound):
        decompose_step(tn, "x", d.methods["c"][0], d)
    with pytest.raises(NotCompound):
        decompose_step(tn, "nope", d.methods["c"][0], d)
    with pytest.raises(MethodMismatch):
        decompose_step(tn, "t", d.methods["e"][0], d)


def test_fresh_ids_avoid_collisions():
    d = domain({"c": [TaskNetwork.build([("u", "a")])]})
    tn = TaskNetwork.build([("t/u", "a"), ("t", "c")])
    out = decompose_step(tn, "t", d.methods["c"][0])
    assert set(out.tasks) == {"t/u", "t/u'"}


def test_decompose_preserves_outer_order():
    for inst in random_compound_instances(150, seed=3):
        tn, d = inst.network, inst.domain
        for i in tn.compound_tasks(d):
            t = tn.tasks[i]
            before = {(x, y) for x, y in transitive_closure(tn) if t not in (x, y)}
            for m in d.methods.get(tn.labels[i], ()):
                after = decompose_step(tn, t, m, d)
                kept = set(tn.tasks) - {t}
                assert {(x, y) for x, y in transitive_closure(after) if x in kept and y in kept} == before


def test_enumerate_primitive_is_identity(dia):
    assert list(enumerate_decompositions(dia.network, dia.domain)) == [dia.network]


def test_enumerate_two_methods():
    d = domain({"c": [TaskNetwork.build([("u", "a")]), TaskNetwork.build([("u", "b")])]})
    tn = TaskNetwork.build([("t", "c")])
    nets = list(enumerate_decompositions(tn, d, dedup=True))
    assert len(nets) == 2
    assert len(nets) <= decomposition_bound(measure_hierarchy(tn, d))[0] == 2


def test_enumeration_cap():
    d = domain({"c": [TaskNetwork.build([("u", "a")]), TaskNetwork.build([("u", "b")])]})
    tn = TaskNetwork.build([(f"t{i}", "c") for i in range(6)])
    with pytest.raises(BudgetExceeded):
        list(enumerate_decompositions(tn, d, cap=20))


def test_dedup_removes_isomorphic_copies():
    d = domain({"c": [TaskNetwork.build([("u", "a")]), TaskNetwork.build([("u", "a"), ("v", "a")])]})
    tn = TaskNetwork.build([("t", "c"), ("s", "c")])
    assert len(list(enumerate_decompositions(tn, d))) == 4
    assert len(list(enumerate_decompositions(tn, d, dedup=True))) == 3


def test_canonical_form_is_invariant_under_renaming():
    a = TaskNetwork.build([("x", "a"), ("y", "b"), ("z", "a")], [("x", "y")])
    b = TaskNetwork.build([("p", "a"), ("q", "a"), ("r", "b")], [("q", "r")])
    c = TaskNetwork.build([("p", "a"), ("q", "a"), ("r", "b")], [("r", "q")])
    assert canonical_form(a) == canonical_form(b) != canonical_form(c)


def test_clique_bounds():
    for g in (K3(), P3()):
        inst = gen_clique(g, "cnum")
        h = measure_hierarchy(inst.network, inst.domain)
        count, extra = decomposition_bound(h)
        assert count == 2 ** (3 + len(g.edges))
        nets = list(enumerate_decompositions(inst.network, inst.domain, dedup=True))
        assert len(nets) <= count
        assert all(len(n.tasks) <= len(inst.network.tasks) + extra for n in nets)


def test_decomposition_lowers_depth():
    inst = gen_clique(K3(), "cd")
    d = inst.domain
    h0 = measure_hierarchy(inst.network, d)
    c = inst.network.labels[0]
    nxt = decompose_step(inst.network, inst.network.tasks[0], d.methods[c][0])
    assert measure_hierarchy(nxt, d).c_depth == h0.c_depth - 1


def test_solve_compound_examples():
    assert solve_compound(gen_clique(K3(), "cnum"))
    assert not solve_compound(gen_clique(P3(), "cnum"))
    base = diamond(Exists())
    d0 = diamond_domain()
    d = Domain(d0.propositions, d0.actions, frozenset({"ROOT"}), {"ROOT": (MethodDef("ROOT", diamond_network()),)})
    v = solve_compound(Instance(d, TaskNetwork.build([("r", "ROOT")]), base.s0, Exists()))
    assert v and v.decomposition == (("r", 0),) and len(v.witness) == 4


def test_solve_compound_matches_oracle():
    for inst in random_compound_instances(200, seed=17):
        assert solve_compound(inst).answer == oracle_compound(inst).answer, inst.network


def test_iter_decompositions_reports_choices():
    d = domain({"c": [TaskNetwork.build([("u", "a")]), TaskNetwork.build([("u", "b")])]})
    got = [(n.labels, ch) for n, ch in iter_decompositions(TaskNetwork.build([("t", "c")]), d)]
    assert got == [(("a",), (("t", 0),)), (("b",), (("t", 1),))]
