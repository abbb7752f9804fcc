"""Shared helpers for the test suite: witness checks, samplers, brute-force references."""

from __future__ import annotations

import itertools
import random
from collections import Counter

from hypothesis import strategies as st

from htnfpt.generators import SHAPES, ColoredGraph, Profile, gen_random
from htnfpt.ilp import GE, LE, IlpInstance
from htnfpt.model import Executable, Exists, Reach, TaskNetwork, Verify, execute_plan, is_solution
from htnfpt.ordergraph import min_chain_decomposition, min_vertex_cover
from htnfpt.solvers import (
    exec_antichain,
    reach_antichain,
    reach_exec_gpow,
    reach_exec_vcn,
    verify_gpow,
    verify_vcn,
)
from htnfpt.ordergraph import VertexCover


def assert_witness(inst, v):
    """The witness of a yes verdict must be a solution meeting the query's own condition."""
    tn, q = inst.network, inst.query
    assert v.witness is not None
    sol = tn.restrict(v.witness)
    full = isinstance(q, (Verify, Exists))
    assert is_solution(sol, list(v.witness), inst.domain, tn, inst.s0, full)
    labels = [tn.label_of(t) for t in v.witness]
    if isinstance(q, Verify):
        assert tuple(labels) == q.plan
    elif isinstance(q, Executable):
        assert not Counter(q.counts) - Counter(labels)
    elif isinstance(q, Reach):
        assert q.goal & ~execute_plan(inst.s0, labels, inst.domain) == 0


def random_profile(rng: random.Random, query: str, max_tasks: int = 8) -> Profile:
    return Profile(
        num_tasks=rng.randint(0, max_tasks),
        num_props=rng.randint(1, 4),
        num_actions=rng.randint(1, 5),
        shape=rng.choice(SHAPES),
        width=rng.randint(1, 3),
        centers=rng.randint(1, 3),
        density=rng.choice([0.15, 0.3, 0.5]),
        query=query,
    )


def random_instances(query: str, count: int, seed: int = 0, max_tasks: int = 8):
    rng = random.Random(seed)
    for s in range(count):
        yield gen_random(seed * 100_003 + s, random_profile(rng, query, max_tasks))


def applicable_solvers(inst):
    """Every specialized solver that accepts the instance, keyed by name.

    Plan Existence instances are posed as Executable with the full label multiset.
    """
    if isinstance(inst.query, Exists):
        inst = inst.with_query(Executable(inst.network.labels))
    tn, q = inst.network, inst.query
    out = {}
    cd = min_chain_decomposition(tn)
    vc = min_vertex_cover(tn)
    if isinstance(q, Verify):
        out["gpow"] = lambda: verify_gpow(inst, cd)
        out["vcn"] = lambda: verify_vcn(inst, vc)
        if not tn.cover:
            out["antichain"] = lambda: verify_vcn(inst, VertexCover(frozenset()))
    else:
        out["gpow"] = lambda: reach_exec_gpow(inst, cd)
        out["vcn"] = lambda: reach_exec_vcn(inst, vc)
        if not tn.cover:
            out["antichain"] = (lambda: reach_antichain(inst)) if isinstance(q, Reach) else (lambda: exec_antichain(inst))
    return inst, out


def brute_force_ilp(ilp: IlpInstance):
    """All integer points in the box that satisfy the program (box must be finite)."""
    ranges = [range(lo, hi + 1) for lo, hi in zip(ilp.lower, ilp.upper)]
    return [list(x) for x in itertools.product(*ranges) if ilp.satisfied(x)]


def random_ilp(rng: random.Random) -> IlpInstance:
    """Programs shaped like the solver programs: count bounds per class, cycle multiplicities."""
    n = rng.randint(1, 4)
    lower = [rng.randint(0, 2) for _ in range(n)]
    upper = [lo + rng.randint(0, 5) for lo in lower]
    ilp = IlpInstance(n, lower, upper)
    for _ in range(rng.randint(1, 5)):
        coeffs = [rng.choice([0, 0, 1, 1, 2, 3]) if rng.random() < 0.8 else -rng.randint(1, 2) for _ in range(n)]
        rhs = rng.randint(-2, 12)
        ilp.add(coeffs, rng.choice([LE, GE]), rhs)
    return ilp


def random_colored_graph(rng: random.Random, max_vertices: int = 6, max_items: int = 9) -> ColoredGraph:
    n = rng.randint(1, max_vertices)
    k = rng.randint(1, min(3, n))
    cols = list(range(1, k + 1)) + [rng.randint(1, k) for _ in range(n - k)]
    rng.shuffle(cols)
    colors = {f"v{i}": c for i, c in enumerate(cols, 1)}
    cand = [(a, b) for a, b in itertools.combinations(colors, 2) if colors[a] != colors[b]]
    m = rng.randint(0, max(0, min(len(cand), max_items - n)))
    return ColoredGraph(colors, rng.sample(cand, m), k)


@st.composite
def networks(draw, max_tasks=7):
    n = draw(st.integers(0, max_tasks))
    names = [f"t{i}" for i in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    arcs = [(names[perm[a]], names[perm[b]]) for a, b in chosen]
    return TaskNetwork.build({t: "a1" for t in names}, arcs)


def random_compound_instances(count: int, seed: int = 0, queries=("verify", "exists", "executable", "reach")):
    """Hierarchies with at most 3 compounds, 2 methods each and depth at most 2."""
    rng = random.Random(seed)
    for s in range(count):
        prof = Profile(
            num_tasks=rng.randint(1, 4),
            num_props=rng.randint(1, 3),
            num_actions=rng.randint(1, 4),
            shape=rng.choice(SHAPES),
            density=0.3,
            query=rng.choice(queries),
            num_compounds=rng.randint(1, 3),
            methods_per_compound=rng.randint(1, 2),
            method_size=rng.randint(1, 2),
            max_depth=2,
        )
        yield gen_random(seed * 100_003 + s, prof)


def brute_width(tn, keep):
    best = 0
    for r in range(len(keep), 0, -1):
        for sub in itertools.combinations(keep, r):
            if all(not tn.precedes(a, b) and not tn.precedes(b, a) for a, b in itertools.combinations(sub, 2)):
                return r
    return best


def brute_vc_size(tn):
    arcs = list(tn.cover)
    n = len(tn.tasks)
    for r in range(n + 1):
        for sub in itertools.combinations(range(n), r):
            s = set(sub)
            if all(a in s or b in s for a, b in arcs):
                return r
    return n
