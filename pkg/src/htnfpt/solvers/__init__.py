from htnfpt.solvers.antichain import exec_antichain, reach_antichain
from htnfpt.solvers.common import DEFAULT, SolverConfig
from htnfpt.solvers.dispatch import dispatch, plan_existence
from htnfpt.solvers.gpow import reach_exec_gpow, verify_gpow
from htnfpt.solvers.vcn import reach_exec_vcn, verify_vcn

__all__ = [
    "SolverConfig",
    "DEFAULT",
    "dispatch",
    "plan_existence",
    "reach_antichain",
    "exec_antichain",
    "verify_gpow",
    "reach_exec_gpow",
    "verify_vcn",
    "reach_exec_vcn",
]
