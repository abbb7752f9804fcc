import random

import pytest

from harness import random_instances
from htnfpt.errors import StateSpaceExceeded
from htnfpt.fixtures import diamond, diamond_domain
from htnfpt.generators import Profile, gen_random
from htnfpt.model import Domain, Executable, Instance, TaskNetwork
from htnfpt.oracle import oracle_primitive
from htnfpt.stategraph import (
    BOTTOM,
    action_equivalence_classes,
    admissible_interval,
    augmented_graph,
    build_state_graph,
    r0_violations,
    reduce_R0,
    reduce_R1,
    strong_classes,
    to_dot,
)


def test_diamond_graph_has_four_states():
    d = diamond_domain()
    g = build_state_graph(d, 0)
    assert set(g.states) == {0, d.state(["1"]), d.state(["2"]), d.state(["1", "2"])}
    assert g.states[0] == 0
    for i, j, a in g.arcs:
        assert d.actions[a].apply(g.states[i]) == g.states[j]


def test_state_graph_is_closed_under_execution():
    d = diamond_domain()
    g = build_state_graph(d, 0)
    for s in g.states:
        for a in d.actions.values():
            if a.executable(s):
                assert a.apply(s) in g.index


def test_nothing_executable_gives_single_state():
    d = Domain.build(["p"], {"x": (("p",), (), ())})
    g = build_state_graph(d, 0)
    assert g.k == 1 and g.arcs == ()


def test_state_cap_is_enforced():
    props = [f"p{i}" for i in range(6)]
    d = Domain.build(props, {f"set{i}": ((), (), (p,)) for i, p in enumerate(props)})
    with pytest.raises(StateSpaceExceeded):
        build_state_graph(d, 0, cap=10)


def test_equivalence_classes():
    d = diamond_domain()
    classes = action_equivalence_classes(build_state_graph(d, 0))
    assert sorted(c.members for c in classes) == [("a1",), ("a2",), ("a3",)]
    twin = Domain.build(["p"], {"x": ((), (), ("p",)), "y": ((), (), ("p",))})
    classes = action_equivalence_classes(build_state_graph(twin, 0))
    assert [c.members for c in classes] == [("x", "y")]


def test_class_count_bound_for_two_states():
    rng = random.Random(5)
    for _ in range(50):
        acts = {}
        for i in range(12):
            acts[f"a{i}"] = (["p"] if rng.random() < 0.5 else [], ["p"] if rng.random() < 0.5 else [], ["p"] if rng.random() < 0.5 else [])
        g = build_state_graph(Domain.build(["p"], acts), 0)
        if g.k == 2:
            assert len(action_equivalence_classes(g)) <= 9
        sigs = [c.signature for c in action_equivalence_classes(g)]
        assert len(sigs) == len(set(sigs))


def _exec(labels, demand, order=()):
    tn = TaskNetwork.build(labels, order)
    return Instance(diamond_domain(), tn, 0, Executable(demand))


def test_r0_examples():
    assert reduce_R0(_exec({"t": "a1"}, ["a1", "a1"])).reason.startswith("R0")
    assert reduce_R0(_exec({"t": "a1"}, [])) is None
    assert reduce_R0(_exec({"t": "a1", "u": "a1"}, ["a1"])) is None
    assert r0_violations(TaskNetwork.build({"t": "a1"}), {"a2": 1}) == ["a2"]


def test_r1_merges_identical_actions_on_antichain():
    d = Domain.build(["p"], {"a": ((), (), ("p",)), "b": ((), (), ("p",))})
    inst = Instance(d, TaskNetwork.build({"t1": "a", "t2": "b"}), 0, Executable(["a", "b"]))
    out, merged = reduce_R1(inst)
    assert set(out.network.labels) == {"a"}
    assert out.query.counts == {"a": 2}
    assert merged == {"b": "a"}


def test_r1_respects_neighbourhoods():
    d = Domain.build(["p"], {"a": ((), (), ("p",)), "b": ((), (), ("p",)), "c": ((), (), ())})
    tn = TaskNetwork.build({"t1": "a", "t2": "b", "x": "c"}, [("x", "t1")])
    out, merged = reduce_R1(Instance(d, tn, 0, Executable(["a"])))
    assert merged == {} and out.network.labels == tn.labels


def test_r1_fixpoint_bounds_actions():
    for inst in random_instances("executable", 200, seed=11):
        if inst.network.cover:
            continue
        g = build_state_graph(inst.domain, inst.s0, actions=set(inst.network.labels))
        out, _ = reduce_R1(inst, g)
        assert len(set(out.network.labels)) <= (g.k + 1) ** g.k
        # on an antichain every pair of equivalent actions merges
        sigs = [g.signatures[a] for a in set(out.network.labels)]
        assert len(sigs) == len(set(sigs))


def test_r1_preserves_oracle_verdict():
    checked = 0
    rng = random.Random(2)
    for s in range(400):
        prof = Profile(num_tasks=rng.randint(0, 7), num_props=rng.randint(1, 3), num_actions=rng.randint(1, 5),
                       shape=rng.choice(["antichain", "chains", "random_dag"]), query="executable")
        inst = gen_random(9000 + s, prof)
        if reduce_R0(inst) is not None:
            continue
        out, _ = reduce_R1(inst)
        assert oracle_primitive(out).answer == oracle_primitive(inst).answer
        checked += 1
    assert checked > 200


def test_admissible_interval_examples():
    names = [f"v{i}" for i in range(1, 6)] + ["t", "free"]
    order = [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v5"), ("v2", "t"), ("t", "v5")]
    tn = TaskNetwork.build({n: "a1" for n in names}, order)
    vc = [tn.index[f"v{i}"] for i in range(1, 6)]
    assert admissible_interval(tn, tn.index["t"], vc) == (2, 4)
    assert admissible_interval(tn, tn.index["free"], vc) == (0, 5)


def test_strong_classes_split_on_interval():
    tn = TaskNetwork.build({"v": "a1", "x": "a1", "y": "a1"}, [("x", "v")])
    g = build_state_graph(diamond_domain(), 0)
    classes = strong_classes(tn, g, ["v"])
    assert sorted((c.interval, c.members) for c in classes) == [((0, 0), ("x",)), ((0, 1), ("y",))]
    members = sorted(t for c in classes for t in c.members)
    assert members == ["x", "y"]


def test_augmented_graph_examples():
    g = build_state_graph(diamond_domain(), 0)
    inst = diamond()
    assert augmented_graph(g, strong_classes(inst.network, g, list(inst.network.tasks))).arcs == ()
    one = Domain.build(["1"], {"a1": ((), (), ("1",))})
    g1 = build_state_graph(one, 0)
    tn = TaskNetwork.build({"t": "a1"})
    aug = augmented_graph(g1, strong_classes(tn, g1, []))
    assert (0, 1, 0) in aug.arcs
    # every task outside an empty cover: arcs mirror the action signatures
    classes = strong_classes(inst.network, g, [])
    aug = augmented_graph(g, classes)
    by_sig = {c.signature for c in classes}
    assert by_sig == {g.signatures[a] for a in ("a1", "a2", "a3")}
    expected = sorted((i, j, cid) for cid, c in enumerate(classes) for i, j in enumerate(c.signature) if j != BOTTOM)
    assert list(aug.arcs) == expected


def test_dot_export():
    g = build_state_graph(diamond_domain(), 0)
    text = to_dot(g, diamond_domain())
    assert text.startswith("digraph stg {") and text.count("[label=\"{") == 4
