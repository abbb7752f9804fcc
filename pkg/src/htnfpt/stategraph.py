"""State transition graphs, action equivalence, and the reduction rules."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from htnfpt.errors import StateSpaceExceeded
from htnfpt.model import Domain, Executable, Instance, State, TaskNetwork
from htnfpt.verdict import Verdict

BOTTOM = -1
DEFAULT_STATE_CAP = 4096


@dataclass(frozen=True)
class StateTransitionGraph:
    states: tuple[State, ...]
    arcs: tuple[tuple[int, int, str], ...]
    actions: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def signatures(self) -> dict[str, tuple[int, ...]]:
        """Per action, target state index from every state (BOTTOM if not executable)."""
        sig = {a: [BOTTOM] * self.k for a in self.actions}
        for i, j, a in self.arcs:
            sig[a][i] = j
        return {a: tuple(v) for a, v in sig.items()}


def build_state_graph(
    d: Domain, s0: State, cap: int = DEFAULT_STATE_CAP, actions: Iterable[str] | None = None
) -> StateTransitionGraph:
    names = sorted(d.actions if actions is None else set(actions))
    defs = [d.actions[a] for a in names]
    states = [s0]
    index = {s0: 0}
    arcs = []
    head = 0
    while head < len(states):
        s = states[head]
        for a in defs:
            if a.pre & ~s:
                continue
            t = (s & ~a.delete) | a.add
            j = index.get(t)
            if j is None:
                if len(states) >= cap:
                    raise StateSpaceExceeded(f"more than {cap} reachable states")
                j = index[t] = len(states)
                states.append(t)
            arcs.append((head, j, a.name))
        head += 1
    return StateTransitionGraph(tuple(states), tuple(arcs), tuple(names))


@dataclass(frozen=True)
class EquivalenceClass:
    signature: tuple[int, ...]
    members: tuple[str, ...]


def action_equivalence_classes(
    g: StateTransitionGraph, d: Domain | None = None, actions: Iterable[str] | None = None
) -> list[EquivalenceClass]:
    names = g.actions if actions is None else [a for a in g.actions if a in set(actions)]
    groups: dict[tuple[int, ...], list[str]] = {}
    for a in names:
        groups.setdefault(g.signatures[a], []).append(a)
    return [EquivalenceClass(sig, tuple(ms)) for sig, ms in groups.items()]


def r0_violations(network: TaskNetwork, demand: dict[str, int]) -> list[str]:
    supply = Counter(network.labels)
    return sorted(a for a, c in demand.items() if c > supply.get(a, 0))


def reduce_R0(inst: Instance) -> Verdict | None:
    """Returns a no-verdict when some demanded action has fewer tasks than demanded."""
    assert isinstance(inst.query, Executable)
    bad = r0_violations(inst.network, inst.query.counts)
    if bad:
        return Verdict(False, route="R0", reason=f"R0: min > max for {', '.join(bad)}")
    return None


def reduce_R1(
    inst: Instance, g: StateTransitionGraph | None = None, state_cap: int = DEFAULT_STATE_CAP
) -> tuple[Instance, dict[str, str]]:
    """Merge equivalent actions whose tasks share ≺⁺-neighbourhoods, to a fixpoint.

    Returns the rewritten instance and a map from every merged-away action
    to the action that now labels its tasks.
    """
    assert isinstance(inst.query, Executable)
    tn = inst.network
    if g is None:
        g = build_state_graph(inst.domain, inst.s0, state_cap, set(tn.labels))
    labels = list(tn.labels)
    demand = Counter(inst.query.counts)
    merged: dict[str, str] = {}
    while True:
        acts = sorted(set(labels))
        hoods: dict[str, set] = {a: set() for a in acts}
        for i, a in enumerate(labels):
            hoods[a].add((tn.pred[i], tn.succ[i]))
        done = True
        for x, a1 in enumerate(acts):
            for a2 in acts[x + 1 :]:
                if g.signatures[a1] != g.signatures[a2]:
                    continue
                if len(hoods[a1] | hoods[a2]) > 1:
                    continue
                labels = [a1 if lab == a2 else lab for lab in labels]
                if a2 in demand:
                    demand[a1] += demand.pop(a2)
                for k, v in merged.items():
                    if v == a2:
                        merged[k] = a1
                merged[a2] = a1
                done = False
                break
            if not done:
                break
        if done:
            break
    new_tn = TaskNetwork(tn.tasks, tuple(labels), tn.cover)
    return Instance(inst.domain, new_tn, inst.s0, Executable(demand)), merged


@dataclass(frozen=True)
class StrongEquivalenceClass:
    signature: tuple[int, ...]
    interval: tuple[int, int]
    members: tuple[str, ...]


def admissible_interval(tn: TaskNetwork, t: int, vc_order: Sequence[int]) -> tuple[int, int]:
    lo, hi = 0, len(vc_order)
    for pos, v in enumerate(vc_order, start=1):
        if tn.succ[v] >> t & 1:
            lo = max(lo, pos)
        if tn.succ[t] >> v & 1:
            hi = min(hi, pos - 1)
    return lo, hi


def strong_classes(
    tn: TaskNetwork,
    g: StateTransitionGraph,
    vc_order: Sequence[str],
    tasks: Iterable[str] | None = None,
) -> list[StrongEquivalenceClass]:
    """Group tasks outside ``vc_order`` by action signature and admissible interval."""
    order = [tn.index[v] for v in vc_order]
    chosen = set(order)
    pool = [i for i in range(len(tn.tasks)) if i not in chosen] if tasks is None else [tn.index[t] for t in tasks]
    groups: dict[tuple, list[str]] = {}
    for i in pool:
        key = (g.signatures[tn.labels[i]], admissible_interval(tn, i, order))
        groups.setdefault(key, []).append(tn.tasks[i])
    return [StrongEquivalenceClass(sig, iv, tuple(ms)) for (sig, iv), ms in groups.items()]


@dataclass(frozen=True)
class AugmentedStateGraph:
    states: tuple[State, ...]
    arcs: tuple[tuple[int, int, int], ...]


def augmented_graph(g: StateTransitionGraph, classes: Sequence[StrongEquivalenceClass]) -> AugmentedStateGraph:
    arcs = []
    for cid, cls in enumerate(classes):
        for i, j in enumerate(cls.signature):
            if j != BOTTOM:
                arcs.append((i, j, cid))
    arcs.sort()
    return AugmentedStateGraph(g.states, tuple(arcs))


def _state_label(d: Domain, s: State) -> str:
    return "{" + ",".join(d.names(s)) + "}"


def to_dot(graph: StateTransitionGraph | AugmentedStateGraph, d: Domain, name: str = "stg") -> str:
    lines = [f"digraph {name} {{"]
    for i, s in enumerate(graph.states):
        lines.append(f'  s{i} [label="{_state_label(d, s)}"];')
    for i, j, lab in graph.arcs:
        text = lab if isinstance(lab, str) else f"e{lab}"
        lines.append(f'  s{i} -> s{j} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
