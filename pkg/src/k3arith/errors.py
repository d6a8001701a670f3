"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes: UsageError -> 2, everything else
that reaches the top level -> 1 (mathematical verification failure).
"""


class K3ArithError(Exception):
    """Base class for all toolkit errors."""


class UsageError(K3ArithError):
    """Caller passed arguments outside an operation's contract."""


class DomainError(K3ArithError):
    """Input is syntactically fine but mathematically inadmissible
    (zero inversion, non-positive-definite form, trivial character...)."""


class UnsupportedError(K3ArithError):
    """Operation not available for these parameters (e.g. even q for a
    quadratic character, q != 1 mod 4 for the quartic-character fast path)."""


class DataError(K3ArithError):
    """Computed or supplied data violates a hard invariant
    (Weil bound, non-integral Newton output, no functional-equation sign)."""


class InconsistencyError(DataError):
    """A configuration contradicts a claimed invariant (negative MW rank)."""


class MultiplicityError(DataError):
    """A claimed factor does not divide to the claimed multiplicity."""


class IncompletenessError(K3ArithError):
    """Not enough data to finish; `needed` says how many more items."""

    def __init__(self, message, needed=1):
        super().__init__(message)
        self.needed = needed


class PrecisionError(K3ArithError):
    """A requested tolerance cannot be met within the configured limits."""


class IntegrityError(K3ArithError):
    """Persistent store holds conflicting records for one key."""
