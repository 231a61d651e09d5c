"""Error types raised across the QuasiLat modules."""

from typing import Any, Optional, Tuple


class QuasiLatError(Exception):
    """Base class of every error the library raises on purpose."""


class NotAPoset(QuasiLatError, ValueError):
    def __init__(self, x: str, y: str):
        self.pair = (x, y)
        super().__init__(f"Order is not antisymmetric: {x} <= {y} and {y} <= {x}")


class NotALattice(QuasiLatError, ValueError):
    def __init__(self, x: str, y: str, operation: str):
        self.pair = (x, y)
        self.operation = operation
        super().__init__(f"Not a lattice: {x} and {y} have no unique {operation}")


class NotBounded(QuasiLatError, ValueError):
    def __init__(self, missing: str):
        self.missing = missing
        super().__init__(f"Poset has no {missing} element")


class IndexOutOfRange(QuasiLatError, IndexError):
    pass


class UnknownBuiltin(QuasiLatError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown builtin lattice: '{name}'")

    def __str__(self) -> str:
        return self.args[0]


class FactorNotIdeal(QuasiLatError, ValueError):
    def __init__(self, position: int, reason: str):
        self.position = position
        super().__init__(f"Factor {position} is not an ideal: {reason}")


class CarrierTooLarge(QuasiLatError, ValueError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"Carrier of {size} vectors exceeds the cap of {cap}")


class NotInCarrier(QuasiLatError, ValueError):
    def __init__(self, vector: Any):
        self.vector = vector
        super().__init__(f"Vector {vector!r} is not in the carrier")


class FactorNotPrincipal(QuasiLatError, ValueError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"Factor {position} is not a principal ideal [0,q]")


class EnumerationBudgetExceeded(QuasiLatError, RuntimeError):
    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(
            f"Enumeration of {what} exceeded the budget of {budget}; "
            f"raise it with --budget or limits.enumeration_budget in config.json"
        )


class NotSubquasimodule(QuasiLatError, ValueError):
    def __init__(self, violation: Any):
        self.violation = violation
        super().__init__(f"Set is not a subquasimodule: {violation}")


class NotZeroDistributive(QuasiLatError, ValueError):
    def __init__(self, position: int, witness: Optional[Tuple[int, int, int]] = None):
        self.position = position
        self.witness = witness
        super().__init__(
            f"Factor {position} is not 0-distributive (witness {witness}); "
            f"use `verify --search --drop 0-distributive` to study such instances"
        )


class NotClosedInput(QuasiLatError, ValueError):
    pass


class NotClosed(QuasiLatError, ValueError):
    pass


class FactorizationFailed(QuasiLatError, AssertionError):
    pass


class UnknownInstance(QuasiLatError, KeyError):
    def __init__(self, name: str, known: Tuple[str, ...]):
        self.name = name
        super().__init__(f"Unknown instance '{name}'; known instances: {', '.join(known)}")

    def __str__(self) -> str:
        return self.args[0]


class ParseError(QuasiLatError, ValueError):
    def __init__(self, source: str, line_no: int, message: str):
        self.source = source
        self.line_no = line_no
        super().__init__(f"{source}:{line_no}: {message}")


class DuplicateLabel(QuasiLatError, ValueError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"Element label '{label}' is used more than once")
