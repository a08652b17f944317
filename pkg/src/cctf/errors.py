"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A parameter is outside its allowed range."""


class ConfigError(ValueError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class EmptyAccumulator(ValueError):
    """finalize() was called before any tick was recorded."""


class UndefinedCorrelation(ValueError):
    """Pearson R is undefined because a sequence has zero variance."""


class UnknownColumn(KeyError):
    pass


class RunFailed(RuntimeError):
    """A sweep run raised; carries the run's position in the grid."""

    def __init__(self, config_index, trial, cause):
        self.config_index = config_index
        self.trial = trial
        self.cause = cause
        super().__init__(f"run (config_index={config_index}, trial={trial}) failed: {cause!r}")
