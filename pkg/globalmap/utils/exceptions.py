class GlobalMapError(Exception):
    """Base error; exit_code is what the CLI returns when it surfaces"""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UsageError(GlobalMapError, ValueError):
    """A library precondition was violated by the caller"""

    exit_code = 2


class MapValidationError(GlobalMapError):
    """An input file breaks its schema or a domain invariant"""

    exit_code = 3


class InitialMapError(GlobalMapError):
    """The map a cross-scene run should inherit cannot be read"""

    exit_code = 1


class ScenarioError(GlobalMapError):
    """A scenario run failed for a reason other than bad input"""

    exit_code = 1
