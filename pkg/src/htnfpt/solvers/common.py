"""Configuration and graph-walk helpers shared by the solvers."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterator, Sequence

from htnfpt.model import Instance
from htnfpt.stategraph import DEFAULT_STATE_CAP, StateTransitionGraph, build_state_graph

Arc = tuple[int, Hashable, int]


@dataclass(frozen=True)
class SolverConfig:
    budget: int = 10**7
    gpow_threshold: int = 4
    vcn_threshold: int = 8
    state_cap: int = DEFAULT_STATE_CAP
    oracle_cap: int = 12
    enum_cap: int = 10**5


DEFAULT = SolverConfig()


def instance_graph(inst: Instance, cfg: SolverConfig = DEFAULT) -> StateTransitionGraph:
    """State graph over the actions that label some task of the network."""
    return _cached_graph(inst.domain, inst.s0, cfg.state_cap, frozenset(inst.network.labels))


# decomposition loops solve many networks over one domain and initial state
@lru_cache(maxsize=256)
def _cached_graph(domain, s0: int, cap: int, actions: frozenset) -> StateTransitionGraph:
    return build_state_graph(domain, s0, cap, actions)


def simple_paths(
    out_arcs: Sequence[Sequence[tuple[Hashable, int]]],
    start: int,
    accept: Callable[[int], bool],
    room: Callable[[Hashable, Counter], bool],
) -> Iterator[tuple[list[Arc], Counter]]:
    """Vertex-simple labelled paths from ``start`` ending in an accepted vertex.

    ``room(label, used)`` decides whether one more arc with ``label`` fits
    the remaining supply given the labels ``used`` so far on the path.
    """
    path: list[Arc] = []
    used: Counter = Counter()

    def dfs(u: int, seen: int):
        if accept(u):
            yield list(path), Counter(used)
        for lab, v in out_arcs[u]:
            if seen >> v & 1 or not room(lab, used):
                continue
            path.append((u, lab, v))
            used[lab] += 1
            yield from dfs(v, seen | 1 << v)
            path.pop()
            used[lab] -= 1
            if not used[lab]:
                del used[lab]

    yield from dfs(start, 1 << start)


@dataclass(frozen=True)
class Cycle:
    arcs: tuple[Arc, ...]
    counts: tuple[tuple[Hashable, int], ...]
    vertices: int

    @property
    def count_map(self) -> dict:
        return dict(self.counts)


def simple_cycles(
    out_arcs: Sequence[Sequence[tuple[Hashable, int]]],
    supply: dict,
) -> list[Cycle]:
    """All vertex-simple labelled cycles (rooted at their smallest vertex) that fit ``supply``."""
    cycles = []
    n = len(out_arcs)
    for s in range(n):
        path: list[Arc] = []
        used: Counter = Counter()

        def dfs(u: int, seen: int):
            for lab, v in out_arcs[u]:
                if v < s or used[lab] + 1 > supply.get(lab, 0):
                    continue
                if v == s:
                    arcs = tuple(path) + ((u, lab, v),)
                    cnt = Counter(used)
                    cnt[lab] += 1
                    cycles.append(Cycle(arcs, tuple(sorted(cnt.items(), key=repr)), seen))
                elif not seen >> v & 1:
                    path.append((u, lab, v))
                    used[lab] += 1
                    dfs(v, seen | 1 << v)
                    path.pop()
                    used[lab] -= 1

        dfs(s, 1 << s)
    return cycles


def path_vertices(start: int, path: Sequence[Arc]) -> int:
    m = 1 << start
    for _, _, v in path:
        m |= 1 << v
    return m


def all_marked(start_mask: int, cycles: Sequence[Cycle]) -> bool:
    """Marking procedure: every cycle must be linked to the path through shared vertices."""
    reached = start_mask
    pending = list(cycles)
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for c in pending:
            if c.vertices & reached:
                reached |= c.vertices
                progress = True
            else:
                rest.append(c)
        pending = rest
    return not pending


def splice(start: int, path: Sequence[Arc], cycles: Sequence[tuple[Cycle, int]]) -> list[Arc]:
    """Insert each cycle ``reps`` times at the first walk position visiting one of its vertices."""
    walk = list(path)
    pending = [(c, r) for c, r in cycles if r > 0]
    while pending:
        rest = []
        for c, reps in pending:
            visits = [start] + [v for _, _, v in walk]
            pos = next((p for p, u in enumerate(visits) if c.vertices >> u & 1), None)
            if pos is None:
                rest.append((c, reps))
                continue
            u = visits[pos]
            k = next(i for i, arc in enumerate(c.arcs) if arc[0] == u)
            rotated = list(c.arcs[k:] + c.arcs[:k])
            walk[pos:pos] = rotated * reps
        if len(rest) == len(pending):
            raise AssertionError("cycles not connected to the walk")
        pending = rest
    return walk


def subsets_within(
    cycles: Sequence[Cycle], remaining: dict, budget_tick: Callable[[], None]
) -> Iterator[list[Cycle]]:
    """Cycle subsets whose single traversals fit ``remaining`` supply."""
    chosen: list[Cycle] = []
    left = dict(remaining)

    def rec(i: int):
        budget_tick()
        if i == len(cycles):
            yield list(chosen)
            return
        yield from rec(i + 1)
        c = cycles[i]
        if all(left.get(lab, 0) >= cnt for lab, cnt in c.counts):
            for lab, cnt in c.counts:
                left[lab] -= cnt
            chosen.append(c)
            yield from rec(i + 1)
            chosen.pop()
            for lab, cnt in c.counts:
                left[lab] += cnt

    yield from rec(0)
