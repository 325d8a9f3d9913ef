"""Exception hierarchy shared by all shocklab modules.

Every exception carries an ``exit_code`` used by the command-line front end:
2 for configuration problems, 3 for numerical failures, 4 for quadrature.
"""

from __future__ import annotations


class ShocklabError(Exception):
    exit_code = 1


class ConfigError(ShocklabError):
    exit_code = 2


class ParseError(ConfigError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownKey(ConfigError):
    def __init__(self, key: str, section: str = "") -> None:
        self.key = key
        where = f" in section [{section}]" if section else ""
        super().__init__(f"unknown key {key!r}{where}")


class ConfigTypeError(ConfigError):
    pass


class UsageError(ConfigError):
    pass


class InvalidData(ConfigError):
    pass


class WrongKind(ConfigError):
    pass


class NumericalError(ShocklabError):
    exit_code = 3


class NoConvergence(NumericalError):
    pass


class OutOfLifespan(NumericalError):
    pass


class Blowup(NumericalError):
    pass


class MuVanished(NumericalError):
    pass


class HyperbolicityLost(NumericalError):
    pass


class NotDifferentiable(NumericalError):
    pass


class DegenerateSound(NumericalError):
    pass


class QuadratureFailure(ShocklabError):
    exit_code = 4
