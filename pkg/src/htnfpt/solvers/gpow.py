"""Dynamic programs over chain prefixes for networks of bounded generalized width."""

from __future__ import annotations

from collections import Counter, deque

from htnfpt.errors import PreconditionUnsatisfied
from htnfpt.model import Executable, Instance, Reach, Verify, execute_plan, iter_bits
from htnfpt.ordergraph import ChainDecomposition, chain_indices
from htnfpt.solvers.common import DEFAULT, SolverConfig, instance_graph
from htnfpt.stategraph import BOTTOM, reduce_R0
from htnfpt.verdict import Budget, Verdict


def _chains(tn, cd: ChainDecomposition | None) -> tuple[list[list[int]], list[int]]:
    if cd is None:
        chains, iso = chain_indices(tn)
        return chains, list(iter_bits(iso))
    chains = [[tn.index[t] for t in c] for c in cd.chains]
    return chains, sorted(tn.index[t] for t in cd.isolated)


def _needs(tn, chains) -> list[tuple[int, ...]]:
    """For every task, how long a prefix of each chain must be executed before it."""
    masks = [sum(1 << t for t in c) for c in chains]
    return [tuple(bin(tn.pred[t] & m).count("1") for m in masks) for t in range(len(tn.tasks))]


def _prefix_counts(tn, chains, actions) -> dict[str, list[list[int]]]:
    out = {}
    for a in actions:
        per_chain = []
        for c in chains:
            row = [0]
            for t in c:
                row.append(row[-1] + (tn.labels[t] == a))
            per_chain.append(row)
        out[a] = per_chain
    return out


def verify_gpow(inst: Instance, cd: ChainDecomposition | None = None, cfg: SolverConfig = DEFAULT) -> Verdict:
    assert isinstance(inst.query, Verify)
    tn = inst.network
    plan = inst.query.plan
    n = len(tn.tasks)
    if len(plan) != n:
        return Verdict(False, route="verify_gpow", reason="plan length differs from the number of tasks")
    try:
        execute_plan(inst.s0, plan, inst.domain)
    except PreconditionUnsatisfied as exc:
        return Verdict(False, route="verify_gpow", reason=f"plan not executable at index {exc.index}")
    chains, isolated = _chains(tn, cd)
    w = len(chains)
    need = _needs(tn, chains)
    iso_count = Counter(tn.labels[t] for t in isolated)
    pref = _prefix_counts(tn, chains, set(plan))
    budget = Budget(cfg.budget, "gpow verification DP")

    layers: list[dict[tuple, tuple]] = [{(0,) * w: None}]
    seen = Counter()
    for i, a in enumerate(plan):
        o = seen[a]
        seen[a] += 1
        nxt: dict[tuple, tuple] = {}
        rows = pref[a]
        for h in layers[-1]:
            budget.tick()
            in_chains = sum(rows[j][h[j]] for j in range(w))
            if iso_count[a] > o - in_chains and h not in nxt:
                nxt[h] = (h, -1)
            for j in range(w):
                if h[j] == len(chains[j]):
                    continue
                t = chains[j][h[j]]
                if tn.labels[t] != a:
                    continue
                nt = need[t]
                if all(nt[x] <= h[x] for x in range(w)):
                    h2 = h[:j] + (h[j] + 1,) + h[j + 1 :]
                    if h2 not in nxt:
                        nxt[h2] = (h, j)
        if not nxt:
            return Verdict(False, route="verify_gpow", reason=f"no assignment for plan index {i}", stats={"variables": budget.used, "width": w})
        layers.append(nxt)

    h = next(iter(layers[-1]))
    steps = []
    for i in range(n, 0, -1):
        prev, j = layers[i][h]
        steps.append(j)
        h = prev
    steps.reverse()
    pools = {a: [t for t in isolated if tn.labels[t] == a] for a in iso_count}
    taken = Counter()
    hpos = [0] * w
    witness = []
    for i, j in enumerate(steps):
        if j == -1:
            a = plan[i]
            witness.append(tn.tasks[pools[a][taken[a]]])
            taken[a] += 1
        else:
            witness.append(tn.tasks[chains[j][hpos[j]]])
            hpos[j] += 1
    return Verdict(True, tuple(witness), "verify_gpow", stats={"variables": budget.used, "width": w})


def reach_exec_gpow(inst: Instance, cd: ChainDecomposition | None = None, cfg: SolverConfig = DEFAULT) -> Verdict:
    q = inst.query
    assert isinstance(q, (Reach, Executable))
    route = "reach_gpow" if isinstance(q, Reach) else "exec_gpow"
    if isinstance(q, Executable):
        no = reduce_R0(inst)
        if no is not None:
            return no
    tn = inst.network
    chains, isolated = _chains(tn, cd)
    w = len(chains)
    need = _needs(tn, chains)
    g = instance_graph(inst, cfg)
    sig = g.signatures

    class_of: dict[tuple, int] = {}
    members: list[list[int]] = []
    for t in isolated:
        s = sig[tn.labels[t]]
        if s not in class_of:
            class_of[s] = len(members)
            members.append([])
        members[class_of[s]].append(t)
    class_sig = list(class_of)
    sizes = [len(m) for m in members]
    nE = len(members)

    demand = q.counts if isinstance(q, Executable) else {}
    pref = _prefix_counts(tn, chains, demand)
    iso_by_action = Counter(tn.labels[t] for t in isolated)
    action_class = {tn.labels[t]: class_of[sig[tn.labels[t]]] for t in isolated}

    def accepting(s: int, h: tuple, r: tuple) -> bool:
        if isinstance(q, Reach):
            return q.goal & ~g.states[s] == 0
        per_class = [0] * nE
        for a, m in demand.items():
            short = m - sum(pref[a][j][h[j]] for j in range(w))
            if short <= 0:
                continue
            if short > iso_by_action[a]:
                return False
            per_class[action_class[a]] += short
        return all(per_class[i] <= r[i] for i in range(nE))

    budget = Budget(cfg.budget, "gpow reachability DP")
    start = (0, (0,) * w, (0,) * nE)
    back = {start: None}
    queue = deque([start])
    found = None
    while queue:
        var = queue.popleft()
        budget.tick()
        s, h, r = var
        if accepting(s, h, r):
            found = var
            break
        for j in range(w):
            if h[j] == len(chains[j]):
                continue
            t = chains[j][h[j]]
            nt = need[t]
            if any(nt[x] > h[x] for x in range(w)):
                continue
            s2 = sig[tn.labels[t]][s]
            if s2 == BOTTOM:
                continue
            v2 = (s2, h[:j] + (h[j] + 1,) + h[j + 1 :], r)
            if v2 not in back:
                back[v2] = (var, j)
                queue.append(v2)
        for i in range(nE):
            if r[i] >= sizes[i]:
                continue
            s2 = class_sig[i][s]
            if s2 == BOTTOM:
                continue
            v2 = (s2, h, r[:i] + (r[i] + 1,) + r[i + 1 :])
            if v2 not in back:
                back[v2] = (var, w + i)
                queue.append(v2)
    stats = {"variables": len(back), "width": w, "classes": nE, "states": g.k}
    if found is None:
        return Verdict(False, route=route, reason="no reachable accepting variable", stats=stats)

    steps = []
    var = found
    while back[var] is not None:
        var, step = back[var]
        steps.append(step)
    steps.reverse()
    r_final = found[2]
    picks = []
    for i in range(nE):
        short = Counter()
        for a, m in demand.items():
            if iso_by_action[a] and action_class[a] == i:
                short[a] = max(0, m - sum(pref[a][j][found[1][j]] for j in range(w)))
        first = []
        for t in members[i]:
            a = tn.labels[t]
            if short[a] > 0:
                short[a] -= 1
                first.append(t)
        rest = [t for t in members[i] if t not in set(first)]
        picks.append((first + rest)[: r_final[i]])
    hpos = [0] * w
    rpos = [0] * nE
    witness = []
    for step in steps:
        if step < w:
            witness.append(tn.tasks[chains[step][hpos[step]]])
            hpos[step] += 1
        else:
            i = step - w
            witness.append(tn.tasks[picks[i][rpos[i]]])
            rpos[i] += 1
    return Verdict(True, tuple(witness), route, stats=stats)
