"""Exception hierarchy shared by the package."""


class AqdError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(AqdError, ValueError):
    """A construction or game parameter is out of range."""


class TreeError(AqdError):
    pass


class TreeParseError(TreeError):
    """Serialized tree data could not be decoded."""


class TreeStructureError(TreeError):
    """Decoded data does not describe a valid rooted tree."""


class NotIsomorphicError(TreeError):
    pass


class FormulaError(AqdError):
    pass


class UnboundVariableError(FormulaError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class GameError(AqdError):
    pass


class GameOverError(GameError):
    pass


class IllegalMoveError(GameError):
    def __init__(self, rule, detail=""):
        super().__init__(f"{rule}: {detail}" if detail else rule)
        self.rule = rule


class BudgetExceededError(GameError):
    """The instance is too large for exact solving or exhaustive sweeping."""


class DesyncError(GameError):
    """A wrapped strategy produced a move that is illegal in its virtual game."""


class StrategyViolatedError(GameError):
    """No case of the Duplicator case analysis applies to a Spoiler move."""


class NoFreeChildError(StrategyViolatedError):
    pass
