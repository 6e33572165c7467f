"""Exception hierarchy shared by all modules."""


class ZonePartError(Exception):
    """Base class for package errors."""


class ParameterError(ZonePartError, ValueError):
    pass


class TopologyError(ZonePartError, ValueError):
    pass


class ShapeError(ZonePartError, ValueError):
    pass


class DisturbanceError(ZonePartError, ValueError):
    """Malformed or incomplete disturbance data."""


class UnknownZoneError(ZonePartError, KeyError):
    pass


class ModelInfeasibleError(ZonePartError):
    pass


class SolverLimitError(ZonePartError):
    pass
