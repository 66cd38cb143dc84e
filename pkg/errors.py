"""
errors.py

Exception hierarchy shared by every package.

Responsibilities:
- Give each failure family a distinct type
- Carry source positions for model syntax errors

This module MUST:
- Not import from any other package of this repository
"""


class MsaError(Exception):
    """Base class for every error raised by the analysis stack."""


class NetworkError(MsaError):
    pass


class KineticsError(MsaError):
    pass


class ModelSyntaxError(MsaError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class ModelValidationError(MsaError):
    pass


class WitnessError(MsaError):
    pass


class ConfigError(MsaError):
    pass
