# core/errors.py
from typing import Optional


class LcaError(Exception):
    """Base class for every failure raised by the toolkit."""


class DimensionError(LcaError):
    """A rank or matrix shape does not match what the operation expects."""


class DegreeError(LcaError):
    """A cochain degree or a lambda variable is out of the supported range."""


class ConstructionError(LcaError):
    """A construction precondition does not hold for the given data."""


class ExprSyntaxError(LcaError):
    """Expression text does not match the grammar."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at byte {offset}")


class SchemaError(LcaError):
    """A bundle document violates the schema; ``path`` locates the offending key."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path or "$"
        super().__init__(f"{self.path}: {message}")
