"""Exhaustive reference solvers used as ground truth."""

from __future__ import annotations

from functools import lru_cache

from htnfpt.errors import InstanceTooLarge
from htnfpt.model import Executable, Exists, Instance, Reach, Verify
from htnfpt.verdict import Verdict

DEFAULT_CAP = 12


def _tables(inst: Instance):
    tn = inst.network
    acts = [inst.domain.actions[a] for a in tn.labels]
    return tn, acts, len(tn.tasks)


def oracle_primitive(inst: Instance, cap: int = DEFAULT_CAP) -> Verdict:
    tn, acts, n = _tables(inst)
    if n > cap:
        raise InstanceTooLarge(f"{n} tasks exceed the oracle cap of {cap}")
    if not inst.primitive:
        raise ValueError("oracle_primitive needs a primitive network")
    q = inst.query
    full = (1 << n) - 1
    pred = tn.pred
    dead: set = set()
    seq: list[int] = []

    if isinstance(q, Verify):
        plan = q.plan
        if len(plan) != n:
            return Verdict(False, route="oracle", reason="plan length differs from the number of tasks")

        def ok(used, state):
            return used == full

        def moves(used, state):
            a = plan[bin(used).count("1")]
            return [t for t in range(n) if tn.labels[t] == a]

    elif isinstance(q, (Exists, Reach, Executable)):
        if isinstance(q, Exists):
            def ok(used, state):
                return used == full
        elif isinstance(q, Reach):
            def ok(used, state):
                return q.goal & ~state == 0
        else:
            demand = q.counts

            def ok(used, state):
                got: dict[str, int] = {}
                for t in range(n):
                    if used >> t & 1:
                        got[tn.labels[t]] = got.get(tn.labels[t], 0) + 1
                return all(got.get(a, 0) >= c for a, c in demand.items())

        def moves(used, state):
            return range(n)
    else:
        raise TypeError(f"unknown query {q!r}")

    def dfs(used: int, state: int) -> bool:
        if ok(used, state):
            return True
        if used == full or (used, state) in dead:
            return False
        for t in moves(used, state):
            if used >> t & 1 or pred[t] & ~used:
                continue
            act = acts[t]
            if act.pre & ~state:
                continue
            seq.append(t)
            if dfs(used | 1 << t, (state & ~act.delete) | act.add):
                return True
            seq.pop()
        dead.add((used, state))
        return False

    if dfs(0, inst.s0):
        return Verdict(True, tuple(tn.tasks[t] for t in seq), "oracle", stats={"memo": len(dead)})
    return Verdict(False, route="oracle", reason="exhaustive search found no solution", stats={"memo": len(dead)})


def oracle_compound(inst: Instance, cap: int = DEFAULT_CAP, enum_cap: int = 10**5) -> Verdict:
    """Try every primitive decomposition in turn; no deduplication."""
    if inst.primitive:
        return oracle_primitive(inst, cap)
    from htnfpt.hierarchy import iter_decompositions

    tried = 0
    for tn, choices in iter_decompositions(inst.network, inst.domain, cap=enum_cap):
        tried += 1
        v = oracle_primitive(inst.with_network(tn), cap)
        if v:
            v.decomposition = choices
            v.stats["decompositions"] = tried
            v.stats["network"] = tn
            return v
    return Verdict(False, route="oracle", reason="no decomposition admits a solution", stats={"decompositions": tried})


def count_full_witnesses(inst: Instance, cap: int = 10) -> int:
    tn, acts, n = _tables(inst)
    if n > cap:
        raise InstanceTooLarge(f"{n} tasks exceed the counting cap of {cap}")
    full = (1 << n) - 1
    pred = tn.pred

    @lru_cache(maxsize=None)
    def count(used: int, state: int) -> int:
        if used == full:
            return 1
        total = 0
        for t in range(n):
            if used >> t & 1 or pred[t] & ~used or acts[t].pre & ~state:
                continue
            total += count(used | 1 << t, acts[t].apply(state))
        return total

    return count(0, inst.s0)


def full_witnesses(inst: Instance, cap: int = 10) -> list[tuple[str, ...]]:
    """Every executable full linearization, in lexicographic task-index order."""
    tn, acts, n = _tables(inst)
    if n > cap:
        raise InstanceTooLarge(f"{n} tasks exceed the counting cap of {cap}")
    full = (1 << n) - 1
    out = []
    seq: list[int] = []

    def rec(used: int, state: int):
        if used == full:
            out.append(tuple(tn.tasks[t] for t in seq))
            return
        for t in range(n):
            if used >> t & 1 or tn.pred[t] & ~used or acts[t].pre & ~state:
                continue
            seq.append(t)
            rec(used | 1 << t, acts[t].apply(state))
            seq.pop()

    rec(0, inst.s0)
    return out
