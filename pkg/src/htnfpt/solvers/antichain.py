"""Reachability and action executability on primitive antichains."""

from __future__ import annotations

from collections import Counter

from htnfpt.ilp import GE, LE, IlpInstance, feasible
from htnfpt.model import Executable, Instance, Reach
from htnfpt.solvers.common import (
    DEFAULT,
    SolverConfig,
    all_marked,
    instance_graph,
    path_vertices,
    simple_cycles,
    simple_paths,
    splice,
    subsets_within,
)
from htnfpt.stategraph import reduce_R0, reduce_R1
from htnfpt.verdict import Budget, Verdict


def reach_antichain(inst: Instance, cfg: SolverConfig = DEFAULT) -> Verdict:
    tn = inst.network
    assert isinstance(inst.query, Reach)
    if tn.cover:
        raise ValueError("reach_antichain needs a network without order arcs")
    goal = inst.query.goal
    budget = Budget(cfg.budget, "antichain reachability")
    supply = Counter(tn.labels)
    g = instance_graph(inst, cfg)
    k = g.k
    # keep at most k parallel arcs per ordered state pair
    out = [[] for _ in range(k)]
    per_pair = Counter()
    for i, j, a in g.arcs:
        if i == j or per_pair[i, j] >= k:
            continue
        per_pair[i, j] += 1
        out[i].append((a, j))
    paths = 0
    for path, used in simple_paths(
        out,
        0,
        lambda u: goal & ~g.states[u] == 0,
        lambda a, used: used[a] < supply[a],
    ):
        budget.tick()
        paths += 1
        pools = {a: [t for t, lab in zip(tn.tasks, tn.labels) if lab == a] for a in used}
        nxt = Counter()
        witness = []
        for _, a, _ in path:
            witness.append(pools[a][nxt[a]])
            nxt[a] += 1
        return Verdict(True, tuple(witness), "reach_antichain", stats={"paths": paths, "states": k})
    return Verdict(False, route="reach_antichain", reason="no simple path to a goal state", stats={"paths": paths, "states": k})


def exec_antichain(inst: Instance, cfg: SolverConfig = DEFAULT) -> Verdict:
    assert isinstance(inst.query, Executable)
    if inst.network.cover:
        raise ValueError("exec_antichain needs a network without order arcs")
    no = reduce_R0(inst)
    if no is not None:
        return no
    budget = Budget(cfg.budget, "antichain executability")
    g = instance_graph(inst, cfg)
    reduced, merged = reduce_R1(inst, g)
    tn = reduced.network
    maxc = Counter(tn.labels)
    minc = Counter(reduced.query.counts)
    acts = sorted(maxc)
    out = [[] for _ in range(g.k)]
    for i, j, a in g.arcs:
        if a in maxc:
            out[i].append((a, j))
    cycles = simple_cycles(out, dict(maxc))
    stats = {"states": g.k, "actions": len(acts), "merged": len(merged), "cycles": len(cycles), "branches": 0, "ilp_calls": 0}

    for path, used in simple_paths(out, 0, lambda u: True, lambda a, used: used[a] < maxc[a]):
        budget.tick()
        remaining = {a: maxc[a] - used[a] for a in acts}
        start_mask = path_vertices(0, path)
        for chosen in subsets_within(cycles, remaining, budget.tick):
            stats["branches"] += 1
            if not all_marked(start_mask, chosen):
                continue
            ilp = IlpInstance(len(chosen), [1] * len(chosen), [None] * len(chosen))
            for a in acts:
                coeffs = [c.count_map.get(a, 0) for c in chosen]
                ilp.add(coeffs, GE, minc.get(a, 0) - used[a])
                ilp.add(coeffs, LE, maxc[a] - used[a])
            stats["ilp_calls"] += 1
            x = feasible(ilp, cfg.budget)
            if x is None:
                continue
            walk = splice(0, path, list(zip(chosen, x)))
            witness = _assign(inst, tn, walk)
            return Verdict(True, witness, "exec_antichain", stats=stats)
    return Verdict(False, route="exec_antichain", reason="no path/cycle combination satisfies the counts", stats=stats)


def _assign(orig: Instance, reduced_tn, walk) -> tuple[str, ...]:
    """Map a walk over merged actions back to concrete tasks covering the original demand."""
    demand = Counter(orig.query.counts)
    steps = Counter(a for _, a, _ in walk)
    chosen: dict[str, list[int]] = {}
    for a, n in steps.items():
        pool = [i for i, lab in enumerate(reduced_tn.labels) if lab == a]
        first = []
        need = Counter()
        for i in pool:
            o = orig.network.labels[i]
            if need[o] < demand.get(o, 0):
                need[o] += 1
                first.append(i)
        rest = [i for i in pool if i not in set(first)]
        chosen[a] = (first + rest)[:n]
    nxt = Counter()
    out = []
    for _, a, _ in walk:
        out.append(reduced_tn.tasks[chosen[a][nxt[a]]])
        nxt[a] += 1
    return tuple(out)
