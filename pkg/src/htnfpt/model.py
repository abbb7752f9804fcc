"""Domains, task networks, states, and execution semantics.

States are plain ``int`` bitmasks over the domain's proposition list; bit
``i`` is set iff proposition ``i`` holds.  Task networks keep their cover
relation over dense task indices and derive the strict order lazily.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from htnfpt.errors import CycleDetected, PreconditionUnsatisfied

State = int


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def closure_masks(n: int, arcs: Iterable[tuple[int, int]]) -> tuple[list[int], list[int]]:
    """Strict successor masks and a topological order for the digraph on range(n)."""
    out = [0] * n
    indeg = [0] * n
    for a, b in arcs:
        if a == b:
            raise CycleDetected(f"self-loop on task index {a}")
        if not out[a] >> b & 1:
            out[a] |= 1 << b
            indeg[b] += 1
    order = [i for i in range(n) if indeg[i] == 0]
    head = 0
    while head < len(order):
        a = order[head]
        head += 1
        for b in iter_bits(out[a]):
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
    if len(order) != n:
        raise CycleDetected("order relation contains a cycle")
    succ = [0] * n
    for a in reversed(order):
        m = out[a]
        for b in iter_bits(out[a]):
            m |= succ[b]
        succ[a] = m
    return succ, order


def _cover_masks(succ: Sequence[int]) -> list[int]:
    cover = []
    for a, s in enumerate(succ):
        reach2 = 0
        for c in iter_bits(s):
            reach2 |= succ[c]
        cover.append(s & ~reach2)
    return cover


def cover_of(order: Iterable[tuple[Hashable, Hashable]]) -> set[tuple[Hashable, Hashable]]:
    """Minimal arc set whose transitive closure equals that of ``order``."""
    pairs = list(order)
    nodes: dict[Hashable, int] = {}
    for a, b in pairs:
        nodes.setdefault(a, len(nodes))
        nodes.setdefault(b, len(nodes))
    names = list(nodes)
    succ, _ = closure_masks(len(names), [(nodes[a], nodes[b]) for a, b in pairs])
    return {(names[a], names[b]) for a, m in enumerate(_cover_masks(succ)) for b in iter_bits(m)}


@dataclass(frozen=True)
class ActionDef:
    name: str
    pre: int = 0
    delete: int = 0
    add: int = 0

    def executable(self, state: State) -> bool:
        return self.pre & ~state == 0

    def apply(self, state: State) -> State:
        return (state & ~self.delete) | self.add


def execute_action(state: State, action: ActionDef) -> State:
    missing = action.pre & ~state
    if missing:
        raise PreconditionUnsatisfied(action.name, iter_bits(missing))
    return (state & ~action.delete) | action.add


def execute_plan(s0: State, plan: Sequence[str], domain: Domain) -> State:
    state = s0
    for i, name in enumerate(plan):
        action = domain.actions[name]
        missing = action.pre & ~state
        if missing:
            raise PreconditionUnsatisfied(name, iter_bits(missing), index=i)
        state = (state & ~action.delete) | action.add
    return state


@dataclass(frozen=True)
class TaskNetwork:
    """Tasks ``tasks[i]`` labelled ``labels[i]``; ``cover`` holds index pairs of the cover relation."""

    tasks: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()
    cover: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        n = len(self.tasks)
        if len(self.labels) != n:
            raise ValueError("every task needs exactly one label")
        if len(set(self.tasks)) != n:
            raise ValueError("duplicate task identifiers")
        for a, b in self.cover:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"arc ({a}, {b}) references an unknown task")
        succ, _ = closure_masks(n, self.cover)
        cov = _cover_masks(succ)
        for a, b in self.cover:
            if not cov[a] >> b & 1:
                raise ValueError(f"arc {self.tasks[a]}->{self.tasks[b]} is transitive; pass the order through build()")

    @classmethod
    def build(cls, labels, order: Iterable[tuple[str, str]] = ()) -> TaskNetwork:
        """Build from ``{task: label}`` and arcs given either as a cover or as the full order."""
        items = list(labels.items()) if isinstance(labels, Mapping) else list(labels)
        tasks = tuple(t for t, _ in items)
        index = {t: i for i, t in enumerate(tasks)}
        arcs = []
        for a, b in order:
            if a not in index or b not in index:
                raise ValueError(f"arc ({a}, {b}) references an unknown task")
            arcs.append((index[a], index[b]))
        succ, _ = closure_masks(len(tasks), arcs)
        cover = frozenset((a, b) for a, m in enumerate(_cover_masks(succ)) for b in iter_bits(m))
        return cls(tasks, tuple(lab for _, lab in items), cover)

    @classmethod
    def from_masks(cls, tasks, labels, succ_masks) -> TaskNetwork:
        cover = frozenset((a, b) for a, m in enumerate(_cover_masks(succ_masks)) for b in iter_bits(m))
        return cls(tuple(tasks), tuple(labels), cover)

    def __len__(self) -> int:
        return len(self.tasks)

    @cached_property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tasks)}

    @cached_property
    def _closure(self) -> tuple[list[int], list[int]]:
        return closure_masks(len(self.tasks), self.cover)

    @property
    def succ(self) -> list[int]:
        """Strict ≺⁺-successor bitmask of every task."""
        return self._closure[0]

    @cached_property
    def pred(self) -> list[int]:
        pred = [0] * len(self.tasks)
        for a, m in enumerate(self.succ):
            for b in iter_bits(m):
                pred[b] |= 1 << a
        return pred

    @property
    def topological(self) -> list[int]:
        return self._closure[1]

    @cached_property
    def cover_succ(self) -> list[int]:
        out = [0] * len(self.tasks)
        for a, b in self.cover:
            out[a] |= 1 << b
        return out

    @cached_property
    def cover_pred(self) -> list[int]:
        out = [0] * len(self.tasks)
        for a, b in self.cover:
            out[b] |= 1 << a
        return out

    def precedes(self, a: int, b: int) -> bool:
        return bool(self.succ[a] >> b & 1)

    def label_of(self, task: str) -> str:
        return self.labels[self.index[task]]

    def arcs(self) -> set[tuple[str, str]]:
        return {(self.tasks[a], self.tasks[b]) for a, b in self.cover}

    def is_primitive(self, domain: Domain) -> bool:
        return all(lab in domain.actions for lab in self.labels)

    def compound_tasks(self, domain: Domain) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab in domain.compounds]

    def action_counts(self) -> Counter:
        return Counter(self.labels)

    def restrict(self, keep: Iterable[str]) -> TaskNetwork:
        """Sub-network induced on ``keep`` with the induced strict order."""
        keep_set = set(keep)
        idx = [i for i, t in enumerate(self.tasks) if t in keep_set]
        if len(idx) != len(keep_set):
            raise ValueError("restrict() got tasks not in the network")
        pos = {old: new for new, old in enumerate(idx)}
        mask = sum(1 << i for i in idx)
        succ = []
        for old in idx:
            m = 0
            for b in iter_bits(self.succ[old] & mask):
                m |= 1 << pos[b]
            succ.append(m)
        return TaskNetwork.from_masks([self.tasks[i] for i in idx], [self.labels[i] for i in idx], succ)


def transitive_closure(tn: TaskNetwork) -> set[tuple[str, str]]:
    return {(tn.tasks[a], tn.tasks[b]) for a, m in enumerate(tn.succ) for b in iter_bits(m)}


def is_linearization(tn: TaskNetwork, seq: Sequence[str]) -> bool:
    if len(seq) != len(tn.tasks) or set(seq) != set(tn.tasks):
        return False
    done = 0
    for name in seq:
        i = tn.index[name]
        if tn.pred[i] & ~done:
            return False
        done |= 1 << i
    return True


@dataclass(frozen=True)
class MethodDef:
    compound: str
    network: TaskNetwork


@dataclass(frozen=True, eq=False)
class Domain:
    propositions: tuple[str, ...]
    actions: Mapping[str, ActionDef]
    compounds: frozenset[str] = frozenset()
    methods: Mapping[str, tuple[MethodDef, ...]] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.actions) & set(self.compounds)
        if overlap:
            raise ValueError(f"names used both as action and compound: {sorted(overlap)}")
        if len(set(self.propositions)) != len(self.propositions):
            raise ValueError("duplicate proposition names")
        full = (1 << len(self.propositions)) - 1
        for a in self.actions.values():
            if (a.pre | a.delete | a.add) & ~full:
                raise ValueError(f"action {a.name!r} references an unknown proposition")
        for c, ms in self.methods.items():
            if c not in self.compounds:
                raise ValueError(f"method for undeclared compound {c!r}")
            for m in ms:
                if m.compound != c:
                    raise ValueError(f"method filed under {c!r} decomposes {m.compound!r}")
                for lab in m.network.labels:
                    if lab not in self.actions and lab not in self.compounds:
                        raise ValueError(f"method of {c!r} uses unknown name {lab!r}")

    @classmethod
    def build(cls, propositions, actions, compounds=(), methods=None) -> Domain:
        """``actions`` maps name -> (pre, del, add) proposition-name collections;
        ``methods`` maps compound -> list of TaskNetwork."""
        props = tuple(propositions)
        pidx = {p: i for i, p in enumerate(props)}

        def mask(names):
            m = 0
            for p in names:
                if p not in pidx:
                    raise ValueError(f"unknown proposition {p!r}")
                m |= 1 << pidx[p]
            return m

        acts = {}
        for name, spec in actions.items():
            if isinstance(spec, ActionDef):
                acts[name] = spec
            else:
                pre, dele, add = spec
                acts[name] = ActionDef(name, mask(pre), mask(dele), mask(add))
        meths = {c: tuple(MethodDef(c, tn) for tn in nets) for c, nets in (methods or {}).items()}
        return cls(props, acts, frozenset(compounds), meths)

    @cached_property
    def prop_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.propositions)}

    def state(self, names: Iterable[str] = ()) -> State:
        m = 0
        for p in names:
            m |= 1 << self.prop_index[p]
        return m

    def names(self, state: State) -> list[str]:
        return [self.propositions[i] for i in iter_bits(state)]

    def restrict(self, action_names: Iterable[str]) -> Domain:
        """Same propositions, only the listed actions, no hierarchy."""
        keep = set(action_names)
        return Domain(self.propositions, {a: d for a, d in self.actions.items() if a in keep})


@dataclass(frozen=True)
class Verify:
    plan: tuple[str, ...]

    def __init__(self, plan: Iterable[str]):
        object.__setattr__(self, "plan", tuple(plan))


@dataclass(frozen=True)
class Exists:
    pass


@dataclass(frozen=True)
class Executable:
    """Multiset of actions, stored as sorted (name, count) pairs."""

    demand: tuple[tuple[str, int], ...]

    def __init__(self, actions: Iterable[str] | Mapping[str, int] = ()):
        counts = Counter(actions) if not isinstance(actions, Mapping) else Counter(dict(actions))
        object.__setattr__(self, "demand", tuple(sorted((a, c) for a, c in counts.items() if c > 0)))

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.demand)

    def __len__(self) -> int:
        return sum(c for _, c in self.demand)


@dataclass(frozen=True)
class Reach:
    goal: State


Query = Verify | Exists | Executable | Reach


@dataclass(frozen=True, eq=False)
class Instance:
    domain: Domain
    network: TaskNetwork
    s0: State
    query: Query

    def with_network(self, network: TaskNetwork) -> Instance:
        return Instance(self.domain, network, self.s0, self.query)

    def with_query(self, query: Query) -> Instance:
        return Instance(self.domain, self.network, self.s0, query)

    @property
    def primitive(self) -> bool:
        return self.network.is_primitive(self.domain)


def is_solution(
    solution: TaskNetwork,
    lin: Sequence[str],
    domain: Domain,
    network: TaskNetwork,
    s0: State,
    full: bool,
) -> bool:
    """Check the solution clauses: executability of ``lin`` plus containment in some decomposition."""
    if not solution.is_primitive(domain) or not is_linearization(solution, lin):
        return False
    try:
        execute_plan(s0, [solution.label_of(t) for t in lin], domain)
    except PreconditionUnsatisfied:
        return False
    if network.is_primitive(domain):
        candidates: Iterable[TaskNetwork] = (network,)
    else:
        from htnfpt.hierarchy import enumerate_decompositions

        candidates = enumerate_decompositions(network, domain)
    return any(_contained(solution, star, full) for star in candidates)


def _contained(sol: TaskNetwork, star: TaskNetwork, full: bool) -> bool:
    if not set(sol.tasks) <= set(star.tasks):
        return False
    if full and len(sol.tasks) != len(star.tasks):
        return False
    for t in sol.tasks:
        i = star.index[t]
        if star.labels[i] != sol.label_of(t):
            return False
        j = sol.index[t]
        for p in iter_bits(star.pred[i]):
            name = star.tasks[p]
            if name not in sol.index or not sol.precedes(sol.index[name], j):
                return False
    return True
