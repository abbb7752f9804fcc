"""Structural analysis of the cover graph of a task network."""

from __future__ import annotations

import math
from dataclasses import dataclass

from htnfpt.errors import BudgetExceeded
from htnfpt.model import Domain, TaskNetwork, iter_bits


@dataclass(frozen=True)
class ChainDecomposition:
    chains: tuple[tuple[str, ...], ...]
    isolated: frozenset[str]
    covered: frozenset[str]

    @property
    def width(self) -> int:
        return len(self.chains)


@dataclass(frozen=True)
class VertexCover:
    cover_set: frozenset[str]

    def __len__(self) -> int:
        return len(self.cover_set)


def isolated_mask(tn: TaskNetwork) -> int:
    m = 0
    for i in range(len(tn.tasks)):
        if not (tn.cover_succ[i] or tn.cover_pred[i]):
            m |= 1 << i
    return m


def isolated_tasks(tn: TaskNetwork) -> set[str]:
    return {tn.tasks[i] for i in iter_bits(isolated_mask(tn))}


def _hopcroft_karp(adj: list[list[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching; returns match of each left vertex (-1 if free)."""
    n = len(adj)
    match_l = [-1] * n
    match_r = [-1] * n_right
    while True:
        dist = [-1] * n
        queue = [u for u in range(n) if match_l[u] == -1]
        for u in queue:
            dist[u] = 0
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            return match_l

        def augment(u):
            for v in adj[u]:
                w = match_r[v]
                if w == -1 or (dist[w] == dist[u] + 1 and augment(w)):
                    match_l[u] = v
                    match_r[v] = u
                    return True
            dist[u] = -2
            return False

        for u in range(n):
            if match_l[u] == -1:
                augment(u)


def chain_indices(tn: TaskNetwork) -> tuple[list[list[int]], int]:
    """Minimum chain partition of the non-isolated tasks (index form) and the isolated mask.

    Dilworth via matching on the comparability relation: every matched pair
    (a, b) glues b directly after a in some chain.
    """
    iso = isolated_mask(tn)
    covered = [i for i in range(len(tn.tasks)) if not iso >> i & 1]
    pos = {t: k for k, t in enumerate(covered)}
    adj = [[pos[b] for b in iter_bits(tn.succ[a])] for a in covered]
    match = _hopcroft_karp(adj, len(covered))
    has_pred = [False] * len(covered)
    for v in match:
        if v != -1:
            has_pred[v] = True
    chains = []
    for k in range(len(covered)):
        if has_pred[k]:
            continue
        chain = [covered[k]]
        while match[k] != -1:
            k = match[k]
            chain.append(covered[k])
        chains.append(chain)
    return chains, iso


def min_chain_decomposition(tn: TaskNetwork) -> ChainDecomposition:
    chains, iso = chain_indices(tn)
    names = tn.tasks
    return ChainDecomposition(
        chains=tuple(tuple(names[i] for i in c) for c in chains),
        isolated=frozenset(names[i] for i in iter_bits(iso)),
        covered=frozenset(names[i] for c in chains for i in c),
    )


def gpow(tn: TaskNetwork) -> int:
    """Width of the order after deleting isolated tasks (equals the minimum chain count)."""
    return len(chain_indices(tn)[0])


def _undirected(tn: TaskNetwork) -> dict[int, int]:
    g: dict[int, int] = {}
    for a, b in tn.cover:
        g[a] = g.get(a, 0) | 1 << b
        g[b] = g.get(b, 0) | 1 << a
    return g


def _remove(g: dict[int, int], v: int) -> dict[int, int]:
    out = {}
    bit = 1 << v
    for u, m in g.items():
        if u == v:
            continue
        m &= ~bit
        if m:
            out[u] = m
    return out


def _matching_bound(g: dict[int, int]) -> int:
    used = 0
    size = 0
    for u in sorted(g):
        if used >> u & 1:
            continue
        free = g[u] & ~used
        if free:
            v = (free & -free).bit_length() - 1
            used |= 1 << u | 1 << v
            size += 1
    return size


def vertex_cover_mask(tn: TaskNetwork, budget: int = 10**6) -> int:
    """Exact minimum vertex cover of the undirected cover graph, as a task bitmask."""
    graph = _undirected(tn)
    best = [sum(1 << v for v in graph), len(graph)]
    nodes = [0]

    def solve(g: dict[int, int], chosen: int, size: int) -> None:
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded("vertex cover search exceeded its node budget")
        while True:
            leaf = next((v for v in sorted(g) if g[v] & (g[v] - 1) == 0), None)
            if leaf is None:
                break
            u = g[leaf].bit_length() - 1
            g = _remove(g, u)
            chosen |= 1 << u
            size += 1
        if not g:
            if size < best[1]:
                best[:] = [chosen, size]
            return
        if size + _matching_bound(g) >= best[1]:
            return
        v = max(sorted(g), key=lambda x: bin(g[x]).count("1"))
        solve(_remove(g, v), chosen | 1 << v, size + 1)
        nbrs = g[v]
        h = g
        for u in iter_bits(nbrs):
            h = _remove(h, u)
        solve(h, chosen | nbrs, size + bin(nbrs).count("1"))

    solve(graph, 0, 0)
    return best[0]


def min_vertex_cover(tn: TaskNetwork, budget: int = 10**6) -> VertexCover:
    return VertexCover(frozenset(tn.tasks[i] for i in iter_bits(vertex_cover_mask(tn, budget))))


@dataclass(frozen=True)
class Measures:
    tasks: int
    propositions: int
    primitive: bool
    isolated: int
    gpow: int
    vcn: int
    c_num: int
    c_size: int
    c_depth: float
    c_choices: int

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        if math.isinf(self.c_depth):
            d["c_depth"] = "inf"
        else:
            d["c_depth"] = int(self.c_depth)
        return d


def measures(tn: TaskNetwork, d: Domain) -> Measures:
    from htnfpt.hierarchy import measure_hierarchy

    h = measure_hierarchy(tn, d)
    return Measures(
        tasks=len(tn.tasks),
        propositions=len(d.propositions),
        primitive=tn.is_primitive(d),
        isolated=bin(isolated_mask(tn)).count("1"),
        gpow=gpow(tn),
        vcn=bin(vertex_cover_mask(tn)).count("1"),
        c_num=h.c_num,
        c_size=h.c_size,
        c_depth=h.c_depth,
        c_choices=h.c_choices,
    )
