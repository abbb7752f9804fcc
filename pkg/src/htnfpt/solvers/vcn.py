"""Algorithms parameterized by the vertex cover number of the cover graph."""

from __future__ import annotations

import heapq
from collections import Counter

from htnfpt.errors import PreconditionUnsatisfied
from htnfpt.ilp import GE, LE, IlpInstance, feasible
from htnfpt.model import Executable, Instance, Reach, TaskNetwork, Verify, execute_plan
from htnfpt.ordergraph import VertexCover, min_vertex_cover
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
from htnfpt.stategraph import BOTTOM, augmented_graph, reduce_R0, strong_classes
from htnfpt.verdict import Budget, Verdict


def _orderings(tn: TaskNetwork, members: list[int], tick):
    """Linear extensions of ≺⁺ restricted to ``members``, built one position at a time."""
    mask = sum(1 << v for v in members)
    order: list[int] = []

    def rec(done: int):
        tick()
        if len(order) == len(members):
            yield list(order)
            return
        for v in members:
            if done >> v & 1:
                continue
            if tn.pred[v] & mask & ~done:
                continue
            order.append(v)
            yield from rec(done | 1 << v)
            order.pop()

    yield from rec(0)


def _cover(tn: TaskNetwork, vc: VertexCover | None) -> list[int]:
    if vc is None:
        vc = min_vertex_cover(tn)
    return sorted(tn.index[v] for v in vc.cover_set)


def verify_vcn(inst: Instance, vc: VertexCover | None = None, cfg: SolverConfig = DEFAULT) -> Verdict:
    assert isinstance(inst.query, Verify)
    tn = inst.network
    plan = inst.query.plan
    n = len(tn.tasks)
    if len(plan) != n:
        return Verdict(False, route="verify_vcn", reason="plan length differs from the number of tasks")
    if Counter(plan) != Counter(tn.labels):
        return Verdict(False, route="verify_vcn", reason="plan and network use different action multisets")
    try:
        execute_plan(inst.s0, plan, inst.domain)
    except PreconditionUnsatisfied as exc:
        return Verdict(False, route="verify_vcn", reason=f"plan not executable at index {exc.index}")
    V = _cover(tn, vc)
    budget = Budget(cfg.budget, "vcn verification")
    orderings = 0
    for order in _orderings(tn, V, budget.tick):
        orderings += 1
        witness = _greedy(tn, plan, order, budget)
        if witness is not None:
            return Verdict(True, witness, "verify_vcn", stats={"orderings": orderings, "vcn": len(V)})
    return Verdict(False, route="verify_vcn", reason="no ordering of the cover admits an assignment", stats={"orderings": orderings, "vcn": len(V)})


def _greedy(tn: TaskNetwork, plan, order: list[int], budget: Budget) -> tuple[str, ...] | None:
    n = len(tn.tasks)
    pos = {v: i for i, v in enumerate(order)}
    psi = [0.0] * n
    for t in range(n):
        if t in pos:
            psi[t] = pos[t] + 0.5
        else:
            later = [pos[v] for v in pos if tn.succ[t] >> v & 1]
            psi[t] = min(later) if later else float("inf")
    # the ordering itself acts as extra precedence between consecutive cover tasks
    waiting = [bin(tn.cover_pred[t]).count("1") for t in range(n)]
    for v in order[1:]:
        waiting[v] += 1
    ready: dict[str, list] = {}

    def release(t):
        heapq.heappush(ready.setdefault(tn.labels[t], []), (psi[t], t))

    for t in range(n):
        if not waiting[t]:
            release(t)
    out = []
    for a in plan:
        budget.tick()
        heap = ready.get(a)
        if not heap:
            return None
        _, t = heapq.heappop(heap)
        out.append(tn.tasks[t])
        followers = list(_bits(tn.cover_succ[t]))
        if t in pos and pos[t] + 1 < len(order):
            followers.append(order[pos[t] + 1])
        for u in followers:
            waiting[u] -= 1
            if not waiting[u]:
                release(u)
    return tuple(out)


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _downward_closed_subsets(tn: TaskNetwork, V: list[int], tick):
    vmask = sum(1 << v for v in V)
    for r in range(1 << len(V)):
        tick()
        sub = sum(1 << V[i] for i in range(len(V)) if r >> i & 1)
        if all(tn.pred[v] & vmask & ~sub == 0 for v in _bits(sub)):
            yield sub


def reach_exec_vcn(inst: Instance, vc: VertexCover | None = None, cfg: SolverConfig = DEFAULT) -> Verdict:
    q = inst.query
    assert isinstance(q, (Reach, Executable))
    route = "reach_vcn" if isinstance(q, Reach) else "exec_vcn"
    if isinstance(q, Executable):
        no = reduce_R0(inst)
        if no is not None:
            return no
    tn = inst.network
    n = len(tn.tasks)
    V = _cover(tn, vc)
    g = instance_graph(inst, cfg)
    budget = Budget(cfg.budget, f"{route} search")
    stats = {"vcn": len(V), "states": g.k, "branches": 0, "ilp_calls": 0}
    demand = q.counts if isinstance(q, Executable) else {}
    search = _SegmentSearch(inst, g, budget, stats, cfg)
    vmask = sum(1 << v for v in V)
    for sub in _downward_closed_subsets(tn, V, budget.tick):
        blocked = vmask & ~sub
        # tasks outside V whose ≺⁺-predecessor is an unused cover task can never run
        pool = [t for t in range(n) if not vmask >> t & 1 and not tn.pred[t] & blocked]
        members = list(_bits(sub))
        for order in _orderings(tn, members, budget.tick):
            if demand:
                in_cover = Counter(tn.labels[v] for v in order)
                need = {a: m - in_cover[a] for a, m in demand.items() if m > in_cover[a]}
                if any(need[a] > sum(tn.labels[t] == a for t in pool) for a in need):
                    continue
            else:
                need = {}
            witness = search.run(order, pool, need)
            if witness is not None:
                return Verdict(True, witness, route, stats=stats)
    return Verdict(False, route=route, reason="no branch admits a feasible program", stats=stats)


class _SegmentSearch:
    """Branching over segment paths and cycle sets for one ordered cover subset."""

    def __init__(self, inst: Instance, g, budget: Budget, stats: dict, cfg: SolverConfig):
        self.inst = inst
        self.tn = inst.network
        self.g = g
        self.budget = budget
        self.stats = stats
        self.cfg = cfg
        self.reach = isinstance(inst.query, Reach)

    def run(self, order: list[int], pool: list[int], need: dict[str, int]):
        tn, g = self.tn, self.g
        m = len(order)
        names = [tn.tasks[v] for v in order]
        classes = strong_classes(tn, g, names, [tn.tasks[t] for t in pool])
        aug = augmented_graph(g, classes)
        self.classes = classes
        self.members = [[tn.index[t] for t in c.members] for c in classes]
        self.size = [len(c.members) for c in classes]
        self.mandatory = [c.interval[1] < m for c in classes]
        self.order = order
        self.need = need
        # a class whose interval is empty can never be placed; mandatory ones kill the branch
        if any(self.mandatory[c] and cls.interval[0] > cls.interval[1] for c, cls in enumerate(classes)):
            return None
        self.out = []
        self.cycles = []
        supply = dict(enumerate(self.size))
        for i in range(m + 1):
            allowed = {c for c, cls in enumerate(classes) if cls.interval[0] <= i <= cls.interval[1]}
            out = [[] for _ in range(g.k)]
            for u, v, c in aug.arcs:
                if c in allowed:
                    out[u].append((c, v))
            self.out.append(out)
            self.cycles.append(simple_cycles(out, {c: supply[c] for c in allowed}))
        self.paths: list = []
        self.chosen: list = []
        self.starts: list = []
        return self._segment(0, 0, dict(supply))

    def _accept(self, i: int):
        g = self.g
        if i < len(self.order):
            sig = g.signatures[self.tn.labels[self.order[i]]]
            return lambda u: sig[u] != BOTTOM
        if self.reach:
            goal = self.inst.query.goal
            return lambda u: goal & ~g.states[u] == 0
        return lambda u: True

    def _segment(self, i: int, start: int, left: dict):
        self.budget.tick()
        m = len(self.order)
        accept = self._accept(i)
        for path, used in simple_paths(self.out[i], start, accept, lambda c, used: used[c] < left[c]):
            self.budget.tick()
            left2 = {c: left[c] - used[c] for c in left}
            marks = path_vertices(start, path)
            end = path[-1][2] if path else start
            for chosen in subsets_within(self.cycles[i], left2, self.budget.tick):
                self.stats["branches"] += 1
                if not all_marked(marks, chosen):
                    continue
                left3 = dict(left2)
                for cyc in chosen:
                    for c, k in cyc.counts:
                        left3[c] -= k
                self.paths.append(path)
                self.chosen.append(chosen)
                self.starts.append(start)
                if i < m:
                    nxt = self.g.signatures[self.tn.labels[self.order[i]]][end]
                    found = self._segment(i + 1, nxt, left3)
                else:
                    found = self._leaf()
                self.paths.pop()
                self.chosen.pop()
                self.starts.pop()
                if found is not None:
                    return found
        return None

    def _leaf(self):
        nC = len(self.classes)
        cyc_index: dict = {}
        mult: list[int] = []
        for chosen in self.chosen:
            for c in chosen:
                if c not in cyc_index:
                    cyc_index[c] = len(mult)
                    mult.append(0)
                mult[cyc_index[c]] += 1
        cycles = list(cyc_index)
        nx = len(cycles)
        path_use = Counter(c for p in self.paths for _, c, _ in p)
        labels_in = [Counter(self.tn.labels[t] for t in ms) for ms in self.members]
        ys = [(e, a) for e in range(nC) for a in sorted(labels_in[e]) if a in self.need]
        nv = nx + len(ys)
        lower = mult + [0] * len(ys)
        upper: list = [None] * nx + [labels_in[e][a] for e, a in ys]
        names = [f"x{j}" for j in range(nx)] + [f"y{e}_{a}" for e, a in ys]
        ilp = IlpInstance(nv, lower, upper, names=names)
        for e in range(nC):
            coeffs = [c.count_map.get(e, 0) for c in cycles] + [0] * len(ys)
            ilp.add(coeffs, LE, self.size[e] - path_use[e])
            if self.mandatory[e]:
                ilp.add(coeffs, GE, self.size[e] - path_use[e])
            if any(y[0] == e for y in ys):
                row = [-v for v in coeffs[:nx]] + [1 if y[0] == e else 0 for y in ys]
                ilp.add(row, LE, path_use[e])
        for a, d in self.need.items():
            ilp.add([0] * nx + [1 if y[1] == a else 0 for y in ys], GE, d)
        self.stats["ilp_calls"] += 1
        self.last_ilp = ilp
        x = feasible(ilp, self.cfg.budget)
        if x is None:
            return None
        return self._witness(cycles, mult, x[:nx], dict(zip(ys, x[nx:])))

    def _witness(self, cycles, mult, x, y):
        extra = {c: x[j] - mult[j] for j, c in enumerate(cycles)}
        walks = []
        for i, (start, path, chosen) in enumerate(zip(self.starts, self.paths, self.chosen)):
            reps = []
            for c in chosen:
                reps.append((c, 1 + extra[c]))
                extra[c] = 0
            walks.append(splice(start, path, reps))
        usage = Counter(c for w in walks for _, c, _ in w)
        picks = []
        for e, ms in enumerate(self.members):
            first = []
            want = Counter({a: k for (e2, a), k in y.items() if e2 == e})
            for t in ms:
                a = self.tn.labels[t]
                if want[a] > 0:
                    want[a] -= 1
                    first.append(t)
            taken = set(first)
            picks.append(first + [t for t in ms if t not in taken])
            assert usage[e] <= len(ms)
        nxt = Counter()
        out = []
        for i, w in enumerate(walks):
            for _, c, _ in w:
                out.append(self.tn.tasks[picks[c][nxt[c]]])
                nxt[c] += 1
            if i < len(self.order):
                out.append(self.tn.tasks[self.order[i]])
        return tuple(out)
