"""Exception hierarchy shared by every module."""


class ModelError(Exception):
    """Malformed or inconsistent input model (CLI exit status 2)."""


class ArenaError(ModelError):
    pass


class UndefinedTransition(ArenaError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownPerspective(ArenaError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(ModelError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CoSafetyError(ModelError):
    """Formula leaves the syntactically co-safe fragment."""


class DfaError(ModelError):
    pass


class AlphabetMismatch(ModelError):
    pass


class NetworkError(ModelError):
    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class PreconditionViolated(NetworkError):
    pass


class CapExceeded(Exception):
    """A state-space cap was hit (CLI exit status 3)."""
