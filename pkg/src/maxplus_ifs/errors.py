"""Exception hierarchy.

Each error carries the CLI exit code it maps to: 2 for configuration
problems, 3 for numerical failures and 4 for an exhausted oracle budget.
"""


class MaxPlusIFSError(Exception):
    exit_code = 3


class ConfigError(MaxPlusIFSError):
    """Invalid run configuration. ``path`` names the offending field."""

    exit_code = 2

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvalidTruncation(ConfigError):
    def __init__(self, message, path="system.n"):
        super().__init__(path, message)


class UnknownFamily(ConfigError):
    def __init__(self, message, path="system.family"):
        super().__init__(path, message)


class InvalidScale(ConfigError):
    def __init__(self, message, path="higuchi.k_max"):
        super().__init__(path, message)


class EmptySupport(MaxPlusIFSError):
    pass


class NotContractive(MaxPlusIFSError):
    pass


class OutOfDomain(MaxPlusIFSError):
    pass


class ShapeMismatch(MaxPlusIFSError):
    pass


class DegenerateFit(MaxPlusIFSError):
    pass


class NonFiniteInput(MaxPlusIFSError):
    pass


class OracleBudgetExceeded(MaxPlusIFSError):
    exit_code = 4
