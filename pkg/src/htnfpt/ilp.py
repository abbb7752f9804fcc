"""Bounded integer feasibility by depth-first search with bound propagation.

The programs built by the solvers have a handful of variables whose values
never exceed the number of tasks, so exhaustive search over the propagated
box is complete and fast enough.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from htnfpt.errors import BudgetExceeded

log = logging.getLogger(__name__)

LE = "<="
GE = ">="


@dataclass
class IlpInstance:
    num_vars: int
    lower: list[int]
    upper: list[int | None]
    constraints: list[tuple[tuple[int, ...], str, int]] = field(default_factory=list)
    names: list[str] | None = None

    def __post_init__(self):
        if len(self.lower) != self.num_vars or len(self.upper) != self.num_vars:
            raise ValueError("bounds must have one entry per variable")
        for coeffs, rel, _ in self.constraints:
            if len(coeffs) != self.num_vars:
                raise ValueError("coefficient vector length differs from num_vars")
            if rel not in (LE, GE):
                raise ValueError(f"unknown relation {rel!r}")
        for lo, hi in zip(self.lower, self.upper):
            if hi is not None and hi < lo:
                raise ValueError("upper bound below lower bound")

    def add(self, coeffs, rel: str, rhs: int) -> None:
        coeffs = tuple(coeffs)
        if len(coeffs) != self.num_vars or rel not in (LE, GE):
            raise ValueError("malformed constraint")
        self.constraints.append((coeffs, rel, rhs))

    def satisfied(self, x) -> bool:
        if any(v < lo or (hi is not None and v > hi) for v, lo, hi in zip(x, self.lower, self.upper)):
            return False
        for coeffs, rel, rhs in self.constraints:
            lhs = sum(c * v for c, v in zip(coeffs, x))
            if (rel == LE and lhs > rhs) or (rel == GE and lhs < rhs):
                return False
        return True

    def dump(self) -> str:
        names = self.names or [f"x{j}" for j in range(self.num_vars)]
        out = []
        for j in range(self.num_vars):
            hi = "inf" if self.upper[j] is None else self.upper[j]
            out.append(f"{self.lower[j]} <= {names[j]} <= {hi}")
        for coeffs, rel, rhs in self.constraints:
            terms = " + ".join(f"{c}*{names[j]}" for j, c in enumerate(coeffs) if c) or "0"
            out.append(f"{terms} {rel} {rhs}")
        return "\n".join(out)


def _normalized(ilp: IlpInstance) -> list[tuple[list[tuple[int, int]], int]]:
    rows = []
    for coeffs, rel, rhs in ilp.constraints:
        sign = 1 if rel == LE else -1
        rows.append(([(j, sign * c) for j, c in enumerate(coeffs) if c], sign * rhs))
    return rows


def _propagate(rows, lo: list, hi: list) -> bool:
    changed = True
    while changed:
        changed = False
        for terms, rhs in rows:
            minact = 0
            inf_terms = 0
            for j, a in terms:
                m = a * lo[j] if a > 0 else a * hi[j]
                if math.isinf(m):
                    inf_terms += 1
                else:
                    minact += m
            if inf_terms == 0 and minact > rhs:
                return False
            for j, a in terms:
                own = a * lo[j] if a > 0 else a * hi[j]
                if math.isinf(own):
                    if inf_terms > 1:
                        continue
                    rest = minact
                elif inf_terms:
                    continue
                else:
                    rest = minact - own
                slack = rhs - rest
                if a > 0:
                    bound = slack // a
                    if bound < hi[j]:
                        hi[j] = bound
                        changed = True
                else:
                    bound = -(slack // -a)
                    if bound > lo[j]:
                        lo[j] = bound
                        changed = True
                if lo[j] > hi[j]:
                    return False
    return True


def feasible(ilp: IlpInstance, budget: int = 10**7) -> list[int] | None:
    """Some integer point satisfying every constraint, or None if there is none.

    Raises ``ValueError`` when a variable stays unbounded after propagation
    and ``BudgetExceeded`` once more than ``budget`` search nodes are used.
    """
    if log.isEnabledFor(logging.DEBUG):
        log.debug("feasibility program:\n%s", ilp.dump())
    rows = _normalized(ilp)
    lo: list = list(ilp.lower)
    hi: list = [math.inf if u is None else u for u in ilp.upper]
    if not _propagate(rows, lo, hi):
        return None
    if any(math.isinf(h) for h in hi):
        raise ValueError("ILP variable has no derivable upper bound")
    nodes = 0
    stack = [(lo, hi)]
    while stack:
        lo, hi = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"ILP search exceeded {budget} nodes")
        free = [j for j in range(ilp.num_vars) if lo[j] < hi[j]]
        if not free:
            if ilp.satisfied(lo):
                return [int(v) for v in lo]
            continue
        j = min(free, key=lambda v: (hi[v] - lo[v], v))
        children = []
        for val in range(int(lo[j]), int(hi[j]) + 1):
            clo, chi = list(lo), list(hi)
            clo[j] = chi[j] = val
            if _propagate(rows, clo, chi):
                children.append((clo, chi))
        stack.extend(reversed(children))
    return None


__all__ = ["IlpInstance", "feasible", "LE", "GE", "BudgetExceeded"]
