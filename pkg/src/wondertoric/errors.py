"""Exception types shared across the package."""


class WonderError(Exception):
    """Base class for all validation and computation failures."""


class NotContained(WonderError):
    pass


class NotSaturated(WonderError):
    pass


class MalformedFan(WonderError):
    pass


class NotCompatible(WonderError):
    pass


class RayNotInterior(WonderError):
    pass


class NotSplit(WonderError):
    pass


class NotLast(WonderError):
    pass


class CycleDetected(WonderError):
    pass


class NotValidated(WonderError):
    pass


class NoBasis(WonderError):
    pass


class NotGood(WonderError):
    pass


class NotBuilding(WonderError):
    pass


class BadOrder(WonderError):
    pass


class NotNested(WonderError):
    pass


class DegreeMismatch(WonderError):
    pass


class BudgetExhausted(WonderError):
    pass


class SchemaError(WonderError):
    """Malformed job document or command input; distinct from a mathematical
    validation failure so the command line can exit 2 instead of 1."""

