class LeakageError(Exception):
    """
    Base class for every error raised by the leakage simulator
    """


class DomainError(LeakageError, ValueError):
    """
    An argument lies outside the domain of the operation, e.g. a negative
    distance or a splitting ratio outside [0, 1]
    """


class PowerConstraintError(LeakageError, ValueError):
    """
    A relay control asks for more power than the eavesdropper has
    """


class BracketError(LeakageError, RuntimeError):
    """
    A root was requested from an interval that does not bracket a sign change.
    Raised only when a closed form is wrong, never by valid input
    """


class ScenarioFileError(DomainError):
    def __init__(self, path, message, field=None, line=None):
        """
        Constructor for ScenarioFileError class

        Args:
            path (str): The file that failed to parse
            message (str): What went wrong
            field (str): The offending field, if known
            line (int): The 1-based line number, if known
        """
        self.path = path
        self.field = field
        self.line = line

        location = path
        if line is not None:
            location += f":{line}"
        if field is not None:
            location += f" [{field}]"

        super(ScenarioFileError, self).__init__(f"{location}: {message}")
