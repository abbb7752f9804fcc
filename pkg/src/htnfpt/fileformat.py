"""JSON instance files.

A file is one JSON object::

    {"format": "htnfpt", "version": 1,
     "domain": {"propositions": [...],
                "actions": {"name": {"pre": [...], "del": [...], "add": [...]}},
                "compounds": [...],
                "methods": [{"compound": "c", "network": NETWORK}]},
     "network": NETWORK,
     "s0": [...],
     "query": {"exists": true} | {"verify": [...]} |
              {"executable": {"a": 2}} | {"reach": [...]}}

where NETWORK is ``{"tasks": [[id, label], ...], "order": [[a, b], ...],
"order_kind": "cover" | "closure"}``.
"""

from __future__ import annotations

import json
from typing import Any

from htnfpt.errors import CycleDetected, InstanceFormatError
from htnfpt.model import Domain, Executable, Exists, Instance, Reach, TaskNetwork, Verify, iter_bits

FORMAT = "htnfpt"
VERSION = 1


def _fail(path: str, msg: str):
    raise InstanceFormatError(f"{path}: {msg}")


def _obj(v, path: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(v, dict):
        _fail(path, "expected an object")
    extra = set(v) - required - set(optional)
    if extra:
        _fail(path, f"unknown field(s) {sorted(extra)}")
    missing = required - set(v)
    if missing:
        _fail(path, f"missing field(s) {sorted(missing)}")
    return v


def _names(v, path: str) -> list[str]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        _fail(path, "expected a list of strings")
    return v


def _network(v, path: str) -> TaskNetwork:
    o = _obj(v, path, {"tasks"}, {"order", "order_kind"})
    tasks = o["tasks"]
    if not isinstance(tasks, list):
        _fail(f"{path}.tasks", "expected a list of [id, label] pairs")
    pairs = []
    for i, p in enumerate(tasks):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            _fail(f"{path}.tasks[{i}]", "expected [id, label]")
        pairs.append((p[0], p[1]))
    order = o.get("order", [])
    if not isinstance(order, list):
        _fail(f"{path}.order", "expected a list of [before, after] pairs")
    arcs = []
    for i, p in enumerate(order):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            _fail(f"{path}.order[{i}]", "expected [before, after]")
        arcs.append((p[0], p[1]))
    kind = o.get("order_kind", "cover")
    if kind not in ("cover", "closure"):
        _fail(f"{path}.order_kind", "must be 'cover' or 'closure'")
    try:
        tn = TaskNetwork.build(pairs, arcs)
    except CycleDetected as exc:
        _fail(f"{path}.order", f"cyclic order ({exc})")
    except ValueError as exc:
        _fail(path, str(exc))
    if kind == "closure":
        given = set(arcs)
        closure = {(tn.tasks[a], tn.tasks[b]) for a, m in enumerate(tn.succ) for b in iter_bits(m)}
        if given != closure:
            _fail(f"{path}.order", "order_kind is 'closure' but the arcs are not transitively closed")
    return tn


def _domain(v, path: str) -> Domain:
    o = _obj(v, path, {"propositions", "actions"}, {"compounds", "methods"})
    props = _names(o["propositions"], f"{path}.propositions")
    acts = o["actions"]
    if not isinstance(acts, dict):
        _fail(f"{path}.actions", "expected an object")
    actions = {}
    for name, spec in acts.items():
        p = f"{path}.actions.{name}"
        a = _obj(spec, p, set(), {"pre", "del", "add"})
        actions[name] = tuple(_names(a.get(k, []), f"{p}.{k}") for k in ("pre", "del", "add"))
    compounds = _names(o.get("compounds", []), f"{path}.compounds")
    methods: dict[str, list[TaskNetwork]] = {}
    raw = o.get("methods", [])
    if not isinstance(raw, list):
        _fail(f"{path}.methods", "expected a list")
    for i, m in enumerate(raw):
        p = f"{path}.methods[{i}]"
        m = _obj(m, p, {"compound", "network"})
        if not isinstance(m["compound"], str):
            _fail(f"{p}.compound", "expected a string")
        methods.setdefault(m["compound"], []).append(_network(m["network"], f"{p}.network"))
    try:
        return Domain.build(props, actions, compounds, methods)
    except ValueError as exc:
        _fail(path, str(exc))


def _query(v, path: str, d: Domain):
    if not isinstance(v, dict) or len(v) != 1:
        _fail(path, "expected exactly one of exists, verify, executable, reach")
    (kind, body), = v.items()
    if kind == "exists":
        if body is not True:
            _fail(f"{path}.exists", "expected true")
        return Exists()
    if kind == "verify":
        plan = _names(body, f"{path}.verify")
        for a in plan:
            if a not in d.actions:
                _fail(f"{path}.verify", f"unknown action {a!r}")
        return Verify(plan)
    if kind == "executable":
        if isinstance(body, list):
            counts: dict[str, int] = {}
            for a in _names(body, f"{path}.executable"):
                counts[a] = counts.get(a, 0) + 1
        elif isinstance(body, dict):
            counts = body
            if not all(isinstance(c, int) and not isinstance(c, bool) and c >= 0 for c in counts.values()):
                _fail(f"{path}.executable", "counts must be non-negative integers")
        else:
            _fail(f"{path}.executable", "expected a list of actions or an object of counts")
        for a in counts:
            if a not in d.actions:
                _fail(f"{path}.executable", f"unknown action {a!r}")
        return Executable(counts)
    if kind == "reach":
        return Reach(_state(body, f"{path}.reach", d))
    _fail(path, f"unknown query kind {kind!r}")


def _state(v, path: str, d: Domain) -> int:
    names = _names(v, path)
    for p in names:
        if p not in d.prop_index:
            _fail(path, f"unknown proposition {p!r}")
    return d.state(names)


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    o = _obj(doc, "$", {"format", "version", "domain", "network", "s0", "query"})
    if o["format"] != FORMAT:
        _fail("$.format", f"expected {FORMAT!r}")
    if o["version"] != VERSION:
        _fail("$.version", f"unsupported version {o['version']!r}")
    d = _domain(o["domain"], "$.domain")
    tn = _network(o["network"], "$.network")
    for t, lab in zip(tn.tasks, tn.labels):
        if lab not in d.actions and lab not in d.compounds:
            _fail("$.network.tasks", f"task {t!r} has unknown label {lab!r}")
    return Instance(d, tn, _state(o["s0"], "$.s0", d), _query(o["query"], "$.query", d))


def load(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _network_doc(tn: TaskNetwork) -> dict:
    doc: dict[str, Any] = {"tasks": [[t, lab] for t, lab in zip(tn.tasks, tn.labels)]}
    doc["order"] = [[tn.tasks[a], tn.tasks[b]] for a, b in sorted(tn.cover)]
    doc["order_kind"] = "cover"
    return doc


def to_doc(inst: Instance) -> dict:
    d = inst.domain
    actions = {
        name: {"pre": d.names(a.pre), "del": d.names(a.delete), "add": d.names(a.add)} for name, a in d.actions.items()
    }
    methods = [
        {"compound": c, "network": _network_doc(m.network)} for c in d.methods for m in d.methods[c]
    ]
    q = inst.query
    if isinstance(q, Exists):
        query: dict[str, Any] = {"exists": True}
    elif isinstance(q, Verify):
        query = {"verify": list(q.plan)}
    elif isinstance(q, Executable):
        query = {"executable": q.counts}
    else:
        query = {"reach": d.names(q.goal)}
    return {
        "format": FORMAT,
        "version": VERSION,
        "domain": {
            "propositions": list(d.propositions),
            "actions": actions,
            "compounds": sorted(d.compounds),
            "methods": methods,
        },
        "network": _network_doc(inst.network),
        "s0": d.names(inst.s0),
        "query": query,
    }


def dumps(inst: Instance) -> str:
    return json.dumps(to_doc(inst), indent=1) + "\n"


def same_instance(a: Instance, b: Instance) -> bool:
    """Structural equality; domains compare by content rather than identity."""
    return to_doc(a) == to_doc(b) and a.network == b.network
