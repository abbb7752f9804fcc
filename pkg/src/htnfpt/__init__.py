"""Decision procedures for hierarchical task networks.

Plan verification, plan existence, action executability and state
reachability on primitive and compound task networks, parameterized by
generalized partial order width and vertex cover number.
"""

from htnfpt.errors import (
    BudgetExceeded,
    CycleDetected,
    HtnError,
    ImproperColoring,
    InfiniteDepth,
    InstanceFormatError,
    InstanceTooLarge,
    MethodMismatch,
    NotCompound,
    PreconditionUnsatisfied,
    StateSpaceExceeded,
)
from htnfpt.model import (
    ActionDef,
    Domain,
    Executable,
    Exists,
    Instance,
    MethodDef,
    Reach,
    TaskNetwork,
    Verify,
    cover_of,
    execute_action,
    execute_plan,
    is_linearization,
    is_solution,
    transitive_closure,
)

__version__ = "0.1.0"
