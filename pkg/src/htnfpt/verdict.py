"""Solver results and node budgets."""

from __future__ import annotations

from dataclasses import dataclass, field

from htnfpt.errors import BudgetExceeded


@dataclass
class Verdict:
    answer: bool
    witness: tuple[str, ...] | None = None
    route: str = ""
    reason: str = ""
    stats: dict = field(default_factory=dict)
    decomposition: tuple | None = None

    def __bool__(self) -> bool:
        return self.answer


class Budget:
    """Counts search nodes and raises once the limit is passed."""

    def __init__(self, limit: int = 10**7, what: str = "search"):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what} exceeded its budget of {self.limit} nodes")
