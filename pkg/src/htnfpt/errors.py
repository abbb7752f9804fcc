"""Exception hierarchy shared by all modules."""


class HtnError(Exception):
    """Base class for every error raised by the package."""


class CycleDetected(HtnError):
    pass


class PreconditionUnsatisfied(HtnError):
    """An action was applied in a state missing some of its preconditions.

    ``missing`` holds proposition indices; ``index`` is the plan position
    when raised from plan execution.
    """

    def __init__(self, action, missing, index=None):
        self.action = action
        self.missing = frozenset(missing)
        self.index = index
        where = "" if index is None else f" at plan index {index}"
        super().__init__(f"action {action!r} not executable{where}: missing {sorted(self.missing)}")


class StateSpaceExceeded(HtnError):
    pass


class BudgetExceeded(HtnError):
    pass


class InstanceTooLarge(HtnError):
    pass


class InfiniteDepth(HtnError):
    pass


class NotCompound(HtnError):
    pass


class MethodMismatch(HtnError):
    pass


class ImproperColoring(HtnError):
    pass


class InstanceFormatError(HtnError):
    pass
