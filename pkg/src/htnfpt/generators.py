"""Instance generators: hardness reductions and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from htnfpt.errors import ImproperColoring
from htnfpt.model import Domain, Executable, Exists, Instance, Reach, TaskNetwork, Verify


@dataclass(frozen=True)
class ShuffleInput:
    u: str
    parts: tuple[str, ...]

    def __init__(self, u: str, parts):
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "parts", tuple(parts))
        for word in (u, *self.parts):
            if set(word) - {"a", "b"}:
                raise ValueError(f"word {word!r} uses letters outside {{a, b}}")

    @property
    def balanced(self) -> bool:
        return sum(map(len, self.parts)) == len(self.u)


def _chains(parts, prefix: str, label) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    tasks, arcs = [], []
    for i, word in enumerate(parts, start=1):
        names = [f"{prefix}{i}_{j}" for j in range(1, len(word) + 1)]
        tasks += [(n, label(ch)) for n, ch in zip(names, word)]
        arcs += list(zip(names, names[1:]))
    return tasks, arcs


def gen_shuffle_verification(inp: ShuffleInput) -> Instance:
    """Chains spelling the parts, effect-free letter actions, and the plan ``u``."""
    d = Domain.build([], {"a": ((), (), ()), "b": ((), (), ())})
    tasks, arcs = _chains(inp.parts, "c", lambda ch: ch)
    return Instance(d, TaskNetwork.build(tasks, arcs), 0, Verify(list(inp.u)))


SHUFFLE_ACTIONS = {
    "aL_a": (("LEFT",), ("LEFT",), ("a",)),
    "aL_b": (("LEFT",), ("LEFT",), ("b",)),
    "aR_a": (("a",), ("a",), ("LEFT",)),
    "aR_b": (("b",), ("b",), ("LEFT",)),
    # consuming LEFT keeps GOAL out of every other state, so the graph has four states
    "a_g": (("LEFT",), ("LEFT",), ("GOAL",)),
}


def gen_shuffle_state(inp: ShuffleInput, variant: str = "reach") -> Instance:
    """Left chains for the parts, a right chain for ``u`` closed by the goal task.

    When the part lengths do not add up to ``|u|`` the goal action gets the
    unreachable precondition GOAL, so the instance is a no-instance like the
    shuffle question itself.
    """
    actions = dict(SHUFFLE_ACTIONS)
    if not inp.balanced:
        actions["a_g"] = (("GOAL",), (), ("GOAL",))
    d = Domain.build(["LEFT", "a", "b", "GOAL"], actions)
    left, arcs = _chains(inp.parts, "c", lambda ch: f"aL_{ch}")
    right, rarcs = _chains([inp.u], "u", lambda ch: f"aR_{ch}")
    tasks = left + right + [("t_g", "a_g")]
    arcs += rarcs
    if right:
        arcs.append((right[-1][0], "t_g"))
    tn = TaskNetwork.build(tasks, arcs)
    if variant == "reach":
        q = Reach(d.state(["GOAL"]))
    elif variant == "exists":
        q = Exists()
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return Instance(d, tn, d.state(["LEFT"]), q)


def is_shuffle(u: str, parts) -> bool:
    """Direct check whether ``u`` interleaves all ``parts`` letter for letter."""
    parts = tuple(parts)
    if sum(map(len, parts)) != len(u):
        return False
    seen = set()
    stack = [tuple(0 for _ in parts)]
    while stack:
        pos = stack.pop()
        i = sum(pos)
        if i == len(u):
            return True
        for j, w in enumerate(parts):
            if pos[j] < len(w) and w[pos[j]] == u[i]:
                nxt = pos[:j] + (pos[j] + 1,) + pos[j + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return False


@dataclass(frozen=True)
class ColoredGraph:
    colors: dict
    edges: tuple[tuple[str, str], ...]
    k: int

    def __init__(self, colors, edges, k: int):
        object.__setattr__(self, "colors", dict(colors))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in edges))
        object.__setattr__(self, "k", k)
        if set(self.colors.values()) != set(range(1, k + 1)):
            raise ImproperColoring("every colour 1..k must be used and no other")
        for v, w in self.edges:
            if v not in self.colors or w not in self.colors:
                raise ImproperColoring(f"edge ({v}, {w}) has an unknown endpoint")
            if self.colors[v] == self.colors[w]:
                raise ImproperColoring(f"edge ({v}, {w}) joins two vertices of colour {self.colors[v]}")

    @property
    def vertices(self) -> list[str]:
        return list(self.colors)


def has_multicolored_clique(g: ColoredGraph) -> bool:
    by_color = [[v for v, c in g.colors.items() if c == j] for j in range(1, g.k + 1)]
    adj = {frozenset(e) for e in g.edges}

    def rec(j: int, chosen: list[str]) -> bool:
        if j == g.k:
            return True
        return any(
            all(frozenset((v, w)) in adj for w in chosen) and rec(j + 1, chosen + [v]) for v in by_color[j]
        )

    return rec(0, [])


def _edge_prop(g: ColoredGraph, v: str, w: str) -> str:
    j, j2 = sorted((g.colors[v], g.colors[w]))
    return f"EDGE_{j}_{j2}"


def gen_clique(g: ColoredGraph, variant: str = "cnum", query: str = "exists") -> Instance:
    """Totally ordered choose-or-skip hierarchy whose goal task needs one edge per colour pair."""
    k = g.k
    verts = g.vertices
    color_props = [f"COLOR_{j}" for j in range(1, k + 1)]
    edge_props = [f"EDGE_{j}_{j2}" for j in range(1, k + 1) for j2 in range(j + 1, k + 1)]
    props = color_props + verts + edge_props + ["GOAL"]
    actions = {"noop": ((), (), ())}
    for v in verts:
        actions[f"choose_{v}"] = ((f"COLOR_{g.colors[v]}",), (f"COLOR_{g.colors[v]}",), (v,))
    for i, (v, w) in enumerate(g.edges, start=1):
        actions[f"edge_{i}"] = ((v, w), (), (_edge_prop(g, v, w),))
    actions["a_g"] = (tuple(edge_props), (), ("GOAL",))

    comps = [f"V_{v}" for v in verts] + [f"E_{i}" for i in range(1, len(g.edges) + 1)]
    picks = [f"choose_{v}" for v in verts] + [f"edge_{i}" for i in range(1, len(g.edges) + 1)]
    methods: dict[str, list[TaskNetwork]] = {}
    if variant in ("cnum", "cs"):
        for c, a in zip(comps, picks):
            methods[c] = [TaskNetwork.build([("t", a)]), TaskNetwork.build([("t", "noop")])]
        order = comps + ["t_g"]
        flat = TaskNetwork.build([(c, c) for c in comps] + [("t_g", "a_g")], list(zip(order, order[1:])))
        if variant == "cnum":
            tn = flat
            compounds = comps
        else:
            methods["ROOT"] = [flat]
            tn = TaskNetwork.build([("root", "ROOT")])
            compounds = comps + ["ROOT"]
    elif variant == "cd":
        nxt = comps[1:] + ["a_g"]
        for c, a, follow in zip(comps, picks, nxt):
            methods[c] = [
                TaskNetwork.build([("t", a), ("next", follow)], [("t", "next")]),
                TaskNetwork.build([("t", "noop"), ("next", follow)], [("t", "next")]),
            ]
        tn = TaskNetwork.build([(comps[0], comps[0])])
        compounds = comps
    else:
        raise ValueError(f"unknown variant {variant!r}")
    d = Domain.build(props, actions, compounds, methods)
    if query == "exists":
        q = Exists()
    elif query == "executable":
        q = Executable(["a_g"])
    elif query == "reach":
        q = Reach(d.state(["GOAL"]))
    else:
        raise ValueError(f"unknown query {query!r}")
    return Instance(d, tn, d.state(color_props), q)


SHAPES = ("antichain", "chains", "star_forest", "random_dag")
QUERIES = ("verify", "exists", "executable", "reach")


@dataclass(frozen=True)
class Profile:
    num_tasks: int = 6
    num_props: int = 3
    num_actions: int = 4
    shape: str = "random_dag"
    width: int = 2
    centers: int = 2
    density: float = 0.3
    query: str = "exists"
    num_compounds: int = 0
    methods_per_compound: int = 2
    method_size: int = 2
    max_depth: int = 2
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.num_tasks < 0 or self.num_props < 0 or self.num_actions < 1:
            raise ValueError("profile sizes must be positive")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.query not in QUERIES:
            raise ValueError(f"unknown query {self.query!r}")


def _subset(rng: random.Random, items, p: float) -> list:
    return [x for x in items if rng.random() < p]


def _order(rng: random.Random, n: int, prof: Profile) -> list[tuple[int, int]]:
    if prof.shape == "antichain" or n < 2:
        return []
    if prof.shape == "chains":
        ids = list(range(n))
        rng.shuffle(ids)
        chains = [[] for _ in range(max(1, prof.width))]
        for t in ids:
            chains[rng.randrange(len(chains))].append(t)
        arcs = [(c[i], c[i + 1]) for c in chains for i in range(len(c) - 1)]
        long = [c for c in chains if len(c) > 1]
        # arcs between non-singleton chains keep every task covered and the width at most w
        for _ in range(rng.randrange(3)):
            if len(long) > 1:
                c1, c2 = rng.sample(long, 2)
                i, j = rng.randrange(len(c1)), rng.randrange(len(c2))
                arcs.append((c1[i], c2[j]))
        return _acyclic(n, arcs)
    if prof.shape == "star_forest":
        k = min(max(1, prof.centers), n)
        centers = rng.sample(range(n), k)
        arcs = []
        for t in range(n):
            if t in centers or rng.random() < 0.15:
                continue
            c = rng.choice(centers)
            arcs.append((c, t) if rng.random() < 0.5 else (t, c))
        return arcs
    perm = list(range(n))
    rng.shuffle(perm)
    return [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < prof.density]


def _acyclic(n: int, arcs):
    """Drop arcs that would close a cycle, keeping earlier ones."""
    reach = [1 << i for i in range(n)]
    kept = []
    for a, b in arcs:
        if reach[b] >> a & 1:
            continue
        kept.append((a, b))
        for x in range(n):
            if reach[x] >> a & 1:
                reach[x] |= reach[b]
    return kept


def _random_linearization(rng: random.Random, tn: TaskNetwork) -> list[int]:
    done = 0
    out = []
    n = len(tn.tasks)
    while len(out) < n:
        ready = [t for t in range(n) if not done >> t & 1 and not tn.pred[t] & ~done]
        t = rng.choice(ready)
        out.append(t)
        done |= 1 << t
    return out


def gen_random(seed: int, prof: Profile = Profile()) -> Instance:
    rng = random.Random(seed)
    props = [f"p{i}" for i in range(prof.num_props)]
    actions = {}
    for i in range(prof.num_actions):
        actions[f"a{i}"] = (_subset(rng, props, 0.3), _subset(rng, props, 0.3), _subset(rng, props, 0.35))
    names = sorted(actions)
    n = prof.num_tasks
    tasks = [f"t{i}" for i in range(n)]
    labels = [rng.choice(names) for _ in range(n)]
    arcs = _order(rng, n, prof)
    compounds: list[str] = []
    methods: dict[str, list[TaskNetwork]] = {}
    if prof.num_compounds:
        compounds = [f"c{i}" for i in range(prof.num_compounds)]
        level = {c: rng.randrange(max(1, prof.max_depth)) for c in compounds}
        for c in compounds:
            deeper = [x for x in compounds if level[x] < level[c]]
            nets = []
            for _ in range(max(1, prof.methods_per_compound)):
                size = rng.randrange(prof.method_size + 1)
                labs = [rng.choice(deeper) if deeper and rng.random() < 0.4 else rng.choice(names) for _ in range(size)]
                mt = [f"m{j}" for j in range(size)]
                perm = list(range(size))
                rng.shuffle(perm)
                marcs = [(mt[perm[i]], mt[perm[j]]) for i in range(size) for j in range(i + 1, size) if rng.random() < 0.4]
                nets.append(TaskNetwork.build(list(zip(mt, labs)), marcs))
            methods[c] = nets
        for i in rng.sample(range(n), min(n, prof.num_compounds)):
            labels[i] = rng.choice(compounds)
    d = Domain.build(props, actions, compounds, methods)
    tn = TaskNetwork.build(list(zip(tasks, labels)), [(tasks[a], tasks[b]) for a, b in arcs])
    s0 = d.state(_subset(rng, props, 0.5))
    q = _random_query(rng, prof.query, d, tn, names)
    return Instance(d, tn, s0, q)


def _random_query(rng: random.Random, kind: str, d: Domain, tn: TaskNetwork, names: list[str]):
    if kind == "exists":
        return Exists()
    if kind == "reach":
        return Reach(d.state(_subset(rng, d.propositions, 0.4)))
    prim = [lab for lab in tn.labels if lab in d.actions]
    if kind == "executable":
        demand = _subset(rng, prim, 0.5)
        if rng.random() < 0.15:
            demand.append(rng.choice(names))
        return Executable(demand)
    roll = rng.random()
    if roll < 0.6 and len(prim) == len(tn.labels):
        plan = [tn.labels[t] for t in _random_linearization(rng, tn)]
    elif roll < 0.85:
        plan = list(prim)
        rng.shuffle(plan)
    else:
        plan = [rng.choice(names) for _ in range(max(0, len(tn.tasks) + rng.choice((-1, 0, 0, 1))))]
    return Verify(plan)


def gen_chains(num_tasks: int, width: int, seed: int, query: str = "verify") -> Instance:
    """``width`` disjoint chains of effect-free tasks; the plan follows a random merge."""
    if width < 1 or num_tasks < 2 * width:
        raise ValueError("need at least two tasks per chain")
    rng = random.Random(seed)
    d = Domain.build([], {"a": ((), (), ()), "b": ((), (), ())})
    sizes = [num_tasks // width + (i < num_tasks % width) for i in range(width)]
    tasks, arcs = [], []
    chains = []
    for i, size in enumerate(sizes):
        names = [f"c{i}_{j}" for j in range(size)]
        tasks += [(n, rng.choice("ab")) for n in names]
        arcs += list(zip(names, names[1:]))
        chains.append(names)
    tn = TaskNetwork.build(tasks, arcs)
    if query == "verify":
        pos = [0] * width
        plan = []
        for _ in range(num_tasks):
            j = rng.choice([j for j in range(width) if pos[j] < sizes[j]])
            plan.append(tn.label_of(chains[j][pos[j]]))
            pos[j] += 1
        q = Verify(plan)
    elif query == "exists":
        q = Exists()
    else:
        raise ValueError(f"unknown query {query!r}")
    return Instance(d, tn, 0, q)
