""" Exceptions raised by the pruning routines and drivers.

    Every class carries the process exit code that bin/autoprune.py
    returns when the error reaches the top level.
"""


class PruneError(Exception):
    """ Base class of every error raised by the package
    """
    exit_code = 2


class ConfigError(PruneError):
    """ A configuration value, or a combination of values, is not allowed
    """


class DimensionError(PruneError):
    """ Array extents do not agree
    """


class ValidationError(PruneError):
    """ Content read from a file fails validation
    """


class RangeError(PruneError):
    """ A query lies outside the measured range of a table
    """


class EmptyPoolError(PruneError):
    """ A mean was requested over zero tokens
    """


class EmptyAttentionError(EmptyPoolError):
    """ Every key of an attention row is masked
    """


class DegenerateWeightsError(PruneError):
    """ Aggregation weights sum to zero
    """


class ContractError(PruneError):
    """ A routine was called in a way it does not support
    """


class UndefinedSimilarityError(PruneError):
    """ Similarity of a feature set with zero variance
    """


class DigestError(PruneError):
    """ Weight file does not belong to the given configuration
    """


class InfeasibleBudgetError(PruneError):
    """ No pruning plan meets the latency budget.

        The smallest reachable latency is kept on the error so the
        caller can report it.
    """
    exit_code = 3

    def __init__(self, message, min_latency):
        super().__init__(message)
        self.min_latency = min_latency


class DivergenceError(PruneError):
    """ Training produced a non-finite loss; `state` is the last good state
    """
    exit_code = 4

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state
