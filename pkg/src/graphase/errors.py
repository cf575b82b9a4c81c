class GraphaseError(Exception):
    """Base class for all errors raised by graphase."""


class DimensionError(GraphaseError, ValueError):
    pass


class GraphError(GraphaseError, ValueError):
    pass


class EigensolverError(GraphaseError):
    pass


class IdentifiabilityError(GraphaseError):
    """Frequencies collide, so intensity data cannot separate mode pairs."""


class IllConditionedError(GraphaseError):
    """The trigonometric design matrix is too ill-conditioned to invert."""


class CounterexampleError(GraphaseError, ValueError):
    pass
