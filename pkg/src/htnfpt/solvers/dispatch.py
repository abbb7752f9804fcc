"""Route an instance to the cheapest applicable algorithm."""

from __future__ import annotations

from htnfpt.errors import InstanceTooLarge
from htnfpt.model import Executable, Exists, Instance, Reach, Verify
from htnfpt.ordergraph import VertexCover, gpow, min_chain_decomposition, min_vertex_cover
from htnfpt.solvers.antichain import exec_antichain, reach_antichain
from htnfpt.solvers.common import DEFAULT, SolverConfig
from htnfpt.solvers.gpow import reach_exec_gpow, verify_gpow
from htnfpt.solvers.vcn import reach_exec_vcn, verify_vcn
from htnfpt.verdict import Verdict


def plan_existence(inst: Instance, cfg: SolverConfig = DEFAULT) -> Verdict:
    """Full solution exists iff every task's action can be executed as often as it occurs."""
    assert isinstance(inst.query, Exists)
    v = dispatch(inst.with_query(Executable(inst.network.labels)), cfg)
    v.route = v.stats["route"] = f"exists->{v.route}"
    return v


def dispatch(inst: Instance, cfg: SolverConfig = DEFAULT) -> Verdict:
    if not inst.primitive:
        raise ValueError("dispatch handles primitive networks; use hierarchy.solve_compound")
    q = inst.query
    tn = inst.network
    if isinstance(q, Exists):
        return plan_existence(inst, cfg)
    if not tn.cover:
        if isinstance(q, Reach):
            v = reach_antichain(inst, cfg)
        elif isinstance(q, Executable):
            v = exec_antichain(inst, cfg)
        else:
            v = verify_vcn(inst, VertexCover(frozenset()), cfg)
        return _tag(v, "antichain")
    w = gpow(tn)
    if w <= cfg.gpow_threshold:
        cd = min_chain_decomposition(tn)
        v = verify_gpow(inst, cd, cfg) if isinstance(q, Verify) else reach_exec_gpow(inst, cd, cfg)
        return _tag(v, "gpow")
    vc = min_vertex_cover(tn, cfg.budget)
    if len(vc) <= cfg.vcn_threshold:
        v = verify_vcn(inst, vc, cfg) if isinstance(q, Verify) else reach_exec_vcn(inst, vc, cfg)
        return _tag(v, "vcn")
    if len(tn.tasks) <= cfg.oracle_cap:
        from htnfpt.oracle import oracle_primitive

        return _tag(oracle_primitive(inst, cfg.oracle_cap), "oracle")
    raise InstanceTooLarge(
        f"gpow {w} > {cfg.gpow_threshold}, vcn {len(vc)} > {cfg.vcn_threshold} and {len(tn.tasks)} tasks > oracle cap {cfg.oracle_cap}"
    )


def _tag(v: Verdict, family: str) -> Verdict:
    v.stats.setdefault("route", v.route or family)
    v.stats["family"] = family
    return v
