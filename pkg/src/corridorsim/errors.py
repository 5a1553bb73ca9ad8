"""Exception types shared across the simulator."""


class InvalidParamsError(ValueError):
    """A model parameter is outside its admissible range."""


class InsufficientRooftopsError(RuntimeError):
    """The requested number of base stations exceeds the number of buildings."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""


class SchemaError(ValueError):
    """A delimited input file is missing required columns."""
