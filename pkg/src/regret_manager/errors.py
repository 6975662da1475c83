"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class InvalidInputError(EngineError):
    """The caller supplied an argument that violates an operation's contract."""


class AssumptionViolationError(EngineError):
    """The game definition itself is broken (e.g. a utility left its box)."""


class EnumerationLimitError(EngineError):
    """A joint-action or sequence enumeration would exceed the guard limit."""


class SimulationError(EngineError):
    """A run aborted; carries the round index where it happened."""

    def __init__(self, round_index: int, message: str):
        self.round_index = round_index
        super().__init__(f"round {round_index}: {message}")


class ScenarioError(EngineError):
    """A scenario document failed schema validation.

    ``path`` locates the offending field, e.g. ``manager.theta[0]``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ProtocolError(EngineError):
    """An interactive session request arrived in the wrong phase or shape."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)
