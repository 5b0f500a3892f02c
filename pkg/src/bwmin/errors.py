"""Exception types shared across the package."""


class BwminError(Exception):
    """Base class for all bwmin errors."""


class InvalidProfile(BwminError):
    """A flow profile or reshaping plan violates its invariants."""


class EqualDeadlines(BwminError):
    """Two flows share a deadline; the analysis requires a strict ordering.

    Perturb one deadline by a small epsilon on the caller side if the flows
    really must coexist.
    """


class InsufficientBandwidth(BwminError):
    """The link bandwidth is below what the operation requires."""


class InfeasibleReshaping(BwminError):
    """A reshaping plan consumes a flow's entire delay budget."""


class TooManyFlows(BwminError):
    """The flow count exceeds an enumeration guard."""


class GridTooCoarse(BwminError):
    """The simulation step is too large relative to the smallest deadline."""
