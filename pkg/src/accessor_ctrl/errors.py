"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands live on incompatible spaces (qubit count or level count)."""


class ContractViolationError(RuntimeError):
    """An engine precondition or internal consistency assertion failed."""


class ConfigError(ValueError):
    """A configuration document could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)
