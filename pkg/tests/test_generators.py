import itertools
import random

import pytest

from harness import random_colored_graph
from htnfpt.errors import ImproperColoring
from htnfpt.fileformat import dumps
from htnfpt.generators import (
    ColoredGraph,
    Profile,
    ShuffleInput,
    gen_clique,
    gen_random,
    gen_shuffle_state,
    gen_shuffle_verification,
    has_multicolored_clique,
    is_shuffle,
)
from htnfpt.hierarchy import measure_hierarchy, solve_compound
from htnfpt.oracle import oracle_compound, oracle_primitive
from htnfpt.ordergraph import gpow, vertex_cover_mask
from htnfpt.stategraph import build_state_graph


def words(max_len):
    for n in range(max_len + 1):
        for w in itertools.product("ab", repeat=n):
            yield "".join(w)


@pytest.mark.parametrize("u,parts,expected", [("ab", ["a", "b"], True), ("ba", ["ab"], False), ("aabb", ["ab", "ab"], True)])
def test_shuffle_examples(u, parts, expected):
    inst = gen_shuffle_verification(ShuffleInput(u, parts))
    assert oracle_primitive(inst).answer is expected is is_shuffle(u, parts)


def test_shuffle_rejects_other_letters():
    with pytest.raises(ValueError):
        ShuffleInput("abc", ["abc"])


def test_shuffle_state_action_table():
    inst = gen_shuffle_state(ShuffleInput("ab", ["a", "b"]))
    d = inst.domain
    a = d.actions["aL_a"]
    assert (d.names(a.pre), d.names(a.delete), d.names(a.add)) == (["LEFT"], ["LEFT"], ["a"])
    assert len(d.actions) <= 5
    assert oracle_primitive(inst)


def test_shuffle_state_faithful_small():
    rng = random.Random(4)
    for _ in range(120):
        parts = [w for w in (rng.choice(list(words(3))) for _ in range(rng.randint(1, 3))) if w] or ["a"]
        u = rng.choice(list(words(5)))
        inp = ShuffleInput(u, parts)
        for variant in ("reach", "exists"):
            inst = gen_shuffle_state(inp, variant)
            assert oracle_primitive(inst, cap=16).answer == is_shuffle(u, parts)
            assert build_state_graph(inst.domain, inst.s0).k <= 4
            assert gpow(inst.network) <= len(parts) + 1
            assert len(inst.domain.actions) <= 5


def test_shuffle_verification_width():
    inst = gen_shuffle_verification(ShuffleInput("abab", ["ab", "a", "b"]))
    assert gpow(inst.network) <= 3


def K3():
    return ColoredGraph({"v1": 1, "v2": 2, "v3": 3}, [("v1", "v2"), ("v2", "v3"), ("v1", "v3")], 3)


def test_clique_examples():
    assert solve_compound(gen_clique(K3(), "cnum"))
    p3 = ColoredGraph({"v1": 1, "v2": 2, "v3": 3}, [("v1", "v2"), ("v2", "v3")], 3)
    assert not solve_compound(gen_clique(p3, "cnum"))
    assert not has_multicolored_clique(p3) and has_multicolored_clique(K3())


def test_clique_measure_triples():
    expected = {"cnum": (1, 1, 2), "cs": (2, 7, 2), "cd": (6, 2, 2)}
    for variant, (depth, size, choices) in expected.items():
        inst = gen_clique(K3(), variant)
        h = measure_hierarchy(inst.network, inst.domain)
        assert (h.c_depth, h.c_size, h.c_choices) == (depth, size, choices), variant
        assert h.c_num == (6 if variant == "cnum" else 1)


def test_improper_coloring():
    with pytest.raises(ImproperColoring):
        ColoredGraph({"v1": 1, "v2": 1}, [("v1", "v2")], 1)
    with pytest.raises(ImproperColoring):
        ColoredGraph({"v1": 1}, [], 2)


def test_clique_faithful_small():
    rng = random.Random(2)
    for _ in range(15):
        g = random_colored_graph(rng, max_vertices=4, max_items=6)
        for variant in ("cnum", "cs", "cd"):
            for query in ("exists", "executable", "reach"):
                assert solve_compound(gen_clique(g, variant, query)).answer == has_multicolored_clique(g)


def test_clique_oracle_on_p3():
    p3 = ColoredGraph({"v1": 1, "v2": 2, "v3": 3}, [("v1", "v2"), ("v2", "v3")], 3)
    assert not oracle_compound(gen_clique(p3, "cnum"))


def test_random_shapes():
    for seed in range(40):
        anti = gen_random(seed, Profile(num_tasks=6, shape="antichain"))
        assert not anti.network.cover
        chains = gen_random(seed, Profile(num_tasks=9, shape="chains", width=3))
        assert gpow(chains.network) <= 3
        star = gen_random(seed, Profile(num_tasks=9, shape="star_forest", centers=2))
        assert bin(vertex_cover_mask(star.network)).count("1") <= 2


def test_random_is_deterministic():
    prof = Profile(num_tasks=7, num_compounds=2, query="verify")
    assert dumps(gen_random(11, prof)) == dumps(gen_random(11, prof))
    assert dumps(gen_random(11, prof)) != dumps(gen_random(12, prof))


def test_random_compound_depth_is_finite():
    for seed in range(50):
        inst = gen_random(seed, Profile(num_tasks=4, num_compounds=3, max_depth=2))
        assert measure_hierarchy(inst.network, inst.domain).finite


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(shape="ring")
    with pytest.raises(ValueError):
        Profile(num_actions=0)
