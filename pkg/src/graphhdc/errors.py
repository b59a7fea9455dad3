"""Exception hierarchy.

Each error carries the process exit code the command-line front end uses
when the error escapes a command.
"""


class GraphHDCError(Exception):
    exit_code = 1


class ConfigError(GraphHDCError, ValueError):
    exit_code = 2


class DataError(GraphHDCError, ValueError):
    exit_code = 3


class NumericalError(GraphHDCError, ArithmeticError):
    exit_code = 4


class DimensionError(GraphHDCError, ValueError):
    exit_code = 4


class EmptyAggregateError(GraphHDCError, ValueError):
    exit_code = 4


class GraphSpecError(ConfigError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class EmptyClassError(DataError):
    def __init__(self, class_index, class_name=None):
        self.class_index = class_index
        self.class_name = class_name
        label = class_name if class_name is not None else class_index
        super().__init__(f"class {label!r} has no training rows")
