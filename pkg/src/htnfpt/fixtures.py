"""Small hand-built instances used by the tests, the CLI examples and the docs."""

from __future__ import annotations

from htnfpt.model import Domain, Exists, Instance, TaskNetwork

DIAMOND_ACTIONS = {
    "a1": ((), (), ("1",)),
    "a2": ((), (), ("2",)),
    "a3": (("2",), ("1",), ()),
}


def diamond_domain() -> Domain:
    return Domain.build(["1", "2"], DIAMOND_ACTIONS)


def diamond_network() -> TaskNetwork:
    """t1 before t2 and t3, both before t4; only two linearizations execute."""
    return TaskNetwork.build(
        {"t1": "a2", "t2": "a1", "t3": "a3", "t4": "a1"},
        [("t1", "t2"), ("t1", "t3"), ("t2", "t4"), ("t3", "t4")],
    )


def diamond(query=None) -> Instance:
    return Instance(diamond_domain(), diamond_network(), 0, query or Exists())
