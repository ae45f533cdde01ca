"""Exception types shared across the toolkit.

Every error raised by routewalk derives from :class:`RouteWalkError`, so
callers (notably the CLI) can separate tool failures from genuine bugs.
"""


class RouteWalkError(Exception):
    """Base class for all routewalk errors."""


class TopologyError(RouteWalkError):
    """Invalid topology: bad builder arguments, malformed file, failed invariant."""


class TrafficError(RouteWalkError):
    """Invalid traffic pattern or flow parameters."""


class InfeasiblePairError(RouteWalkError):
    """A source-destination pair has no admissible route."""


class ConfigurationError(RouteWalkError):
    """A routing configuration does not fit its route table."""


class SpaceSizeError(RouteWalkError):
    """The configuration space exceeds the enumeration cap."""


class SimulationError(RouteWalkError):
    """The packet simulation cannot run or produced no usable measurements."""


class DegenerateResultError(SimulationError):
    """No packet was delivered inside the measurement window."""


class EstimatorError(RouteWalkError):
    """A landscape statistic is undefined for the given samples (e.g. zero variance)."""


class ScenarioError(RouteWalkError):
    """Scenario file failed to parse or cross-validate."""
