"""Exception types raised across the package."""


class QMeasError(Exception):
    """Base class for all errors raised by qmeas."""


class GridMismatch(QMeasError):
    """Two objects live on incompatible grids."""


class OutOfDomain(QMeasError):
    """A point lies outside the ambient rectangle."""


class NotConnected(QMeasError):
    """An operation that needs a connected region got several components."""


class DomainMismatch(QMeasError):
    """A function's range is not contained in a generator's domain."""


class DegenerateConfig(QMeasError):
    """Marked points collide or fall outside the grid at this resolution."""


class NotEnoughValues(QMeasError):
    """The topological measure takes at most two values."""


class NotAProductTM(QMeasError):
    """Neither the outer measure is linear nor the inner one almost simple."""


class NotApplicable(QMeasError):
    """The requested construction does not apply to these measures."""


class InconsistentIntegral(QMeasError):
    """The two integration routes disagree beyond tolerance."""


class UnknownScenario(QMeasError):
    pass


class ConfigInvalid(QMeasError):
    """A lab config document failed validation.

    ``path`` is the JSON path to the offending key, e.g. ``grid.n``.
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path
