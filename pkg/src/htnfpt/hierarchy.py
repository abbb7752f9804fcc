"""Compound networks: hierarchy measures, decomposition, and the enumerate-and-solve loop."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from htnfpt.errors import BudgetExceeded, InfiniteDepth, MethodMismatch, NotCompound
from htnfpt.model import Domain, Instance, MethodDef, TaskNetwork, iter_bits
from htnfpt.verdict import Verdict


@dataclass(frozen=True)
class HierarchyMeasures:
    c_num: int
    c_size: int
    c_depth: float
    c_choices: int

    @property
    def finite(self) -> bool:
        return not math.isinf(self.c_depth)


def compound_depths(d: Domain) -> dict[str, float]:
    """Depth of every compound name; ``inf`` when a cycle is reachable from it."""
    depth: dict[str, float] = {}
    on_stack: set[str] = set()

    def visit(c: str) -> float:
        if c in depth:
            return depth[c]
        if c in on_stack:
            return math.inf
        on_stack.add(c)
        best = 0.0
        for m in d.methods.get(c, ()):
            for lab in m.network.labels:
                if lab in d.compounds:
                    best = max(best, visit(lab))
        on_stack.discard(c)
        depth[c] = 1 + best
        return depth[c]

    for c in sorted(d.compounds):
        visit(c)
    return depth


def measure_hierarchy(tn: TaskNetwork, d: Domain) -> HierarchyMeasures:
    comps = [lab for lab in tn.labels if lab in d.compounds]
    sizes = [len(m.network.tasks) for ms in d.methods.values() for m in ms]
    choices = [len(d.methods.get(c, ())) for c in d.compounds]
    if comps:
        depths = compound_depths(d)
        c_depth = max(depths[c] for c in comps)
    else:
        c_depth = 0
    return HierarchyMeasures(
        c_num=len(comps),
        c_size=max(sizes, default=0),
        c_depth=c_depth if math.isinf(c_depth) else int(c_depth),
        c_choices=max(choices, default=0),
    )


def _fresh(existing: set[str], parent: str, child: str) -> str:
    name = f"{parent}/{child}"
    while name in existing:
        name += "'"
    return name


def decompose_step(tn: TaskNetwork, t: str, m: MethodDef, d: Domain | None = None) -> TaskNetwork:
    """Replace ``t`` by a fresh copy of ``m``'s network, inheriting t's external order."""
    if t not in tn.index:
        raise NotCompound(f"{t!r} is not a task of the network")
    i = tn.index[t]
    label = tn.labels[i]
    if d is not None and label not in d.compounds:
        raise NotCompound(f"{t!r} is labelled by the action {label!r}")
    if m.compound != label:
        raise MethodMismatch(f"method decomposes {m.compound!r}, task {t!r} is {label!r}")
    sub = m.network
    others = set(tn.tasks) - {t}
    fresh = []
    for c in sub.tasks:
        name = _fresh(others, t, c)
        others.add(name)
        fresh.append(name)
    tasks = list(tn.tasks[:i]) + fresh + list(tn.tasks[i + 1 :])
    labels = list(tn.labels[:i]) + list(sub.labels) + list(tn.labels[i + 1 :])
    before = [tn.tasks[x] for x in iter_bits(tn.pred[i])]
    after = [tn.tasks[y] for y in iter_bits(tn.succ[i])]
    arcs = []
    for a, mask in enumerate(tn.succ):
        if a == i:
            continue
        for b in iter_bits(mask):
            if b != i:
                arcs.append((tn.tasks[a], tn.tasks[b]))
    for a, b in sub.arcs():
        arcs.append((fresh[sub.index[a]], fresh[sub.index[b]]))
    for u in fresh:
        arcs.extend((x, u) for x in before)
        arcs.extend((u, y) for y in after)
    return TaskNetwork.build(list(zip(tasks, labels)), arcs)


def _walk(tn: TaskNetwork, d: Domain, counter: list, cap: int, choices: tuple) -> Iterator[tuple[TaskNetwork, tuple]]:
    counter[0] += 1
    if counter[0] > cap:
        raise BudgetExceeded(f"decomposition enumeration exceeded {cap} nodes")
    comp = tn.compound_tasks(d)
    if not comp:
        yield tn, choices
        return
    i = comp[0]
    t = tn.tasks[i]
    for k, m in enumerate(d.methods.get(tn.labels[i], ())):
        yield from _walk(decompose_step(tn, t, m), d, counter, cap, choices + ((t, k),))


def iter_decompositions(
    tn: TaskNetwork, d: Domain, dedup: bool = False, cap: int = 10**5
) -> Iterator[tuple[TaskNetwork, tuple]]:
    """Primitive networks paired with the (task, method index) choices that produced them."""
    if math.isinf(measure_hierarchy(tn, d).c_depth):
        raise InfiniteDepth("the decomposition hierarchy is cyclic")
    seen: set = set()
    for net, choices in _walk(tn, d, [0], cap, ()):
        if dedup:
            key = canonical_form(net)
            if key in seen:
                continue
            seen.add(key)
        yield net, choices


def enumerate_decompositions(tn: TaskNetwork, d: Domain, dedup: bool = False, cap: int = 10**5) -> Iterator[TaskNetwork]:
    for net, _ in iter_decompositions(tn, d, dedup, cap):
        yield net


def _refine(tn: TaskNetwork) -> list[int]:
    """Colour refinement on the labelled cover graph; returns one rank per task."""
    n = len(tn.tasks)
    cs = [list(iter_bits(m)) for m in tn.cover_succ]
    cp = [list(iter_bits(m)) for m in tn.cover_pred]
    keys = [(tn.labels[v], len(cp[v]), len(cs[v])) for v in range(n)]
    ranks = _rank(keys)
    while True:
        keys = [(ranks[v], tuple(sorted(ranks[u] for u in cs[v])), tuple(sorted(ranks[u] for u in cp[v]))) for v in range(n)]
        new = _rank(keys)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _rank(keys: list) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


PERMUTATION_LIMIT = 720


def canonical_form(tn: TaskNetwork) -> tuple:
    """Isomorphism-invariant key for a labelled network.

    Exact whenever the refinement leaves few ties; otherwise the key also
    depends on task identifiers, which can only keep isomorphic copies apart.
    """
    n = len(tn.tasks)
    ranks = _refine(tn)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(ranks[v], []).append(v)
    classes = [sorted(groups[r], key=lambda v: tn.tasks[v]) for r in sorted(groups)]
    total = math.prod(math.factorial(len(c)) for c in classes)

    def encode(order: list[int]) -> tuple:
        pos = {v: p for p, v in enumerate(order)}
        labels = tuple(tn.labels[v] for v in order)
        arcs = tuple(sorted((pos[a], pos[b]) for a, b in tn.cover))
        return labels, arcs

    if total > PERMUTATION_LIMIT:
        return ("raw",) + encode([v for c in classes for v in c]) + (tuple(tn.tasks[v] for c in classes for v in c),)
    best = None
    for perm in itertools.product(*(itertools.permutations(c) for c in classes)):
        key = encode([v for c in perm for v in c])
        if best is None or key < best:
            best = key
    return ("exact",) + best


def decomposition_bound(h: HierarchyMeasures) -> tuple[int, int]:
    """(maximum number of non-isomorphic primitive networks, extra tasks allowed over |T|)."""
    if not h.finite:
        raise InfiniteDepth("bounds need finite depth")
    cd = int(h.c_depth)
    exponent = sum(h.c_num * h.c_size**i for i in range(cd))
    return h.c_choices**exponent, h.c_num * (h.c_size**cd - 1)


def solve_compound(inst: Instance, cfg=None, solver=None, dedup: bool = False) -> Verdict:
    """First primitive decomposition on which ``solver`` says yes."""
    from htnfpt.solvers.common import DEFAULT
    from htnfpt.solvers.dispatch import dispatch

    cfg = cfg or DEFAULT
    solver = solver or (lambda i: dispatch(i, cfg))
    if inst.primitive:
        return solver(inst)
    tried = 0
    for net, choices in iter_decompositions(inst.network, inst.domain, dedup, cfg.enum_cap):
        tried += 1
        v = solver(inst.with_network(net))
        if v:
            v.decomposition = choices
            v.stats["decompositions"] = tried
            v.stats["network"] = net
            return v
    return Verdict(False, route="compound", reason="no primitive decomposition is a yes-instance", stats={"decompositions": tried})
