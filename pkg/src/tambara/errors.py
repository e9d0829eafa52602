"""Exception types shared across the toolkit.

Exit-code mapping for the CLI lives in cli.py; library code raises these
and never calls sys.exit.
"""


class TambaraError(Exception):
    """Base class for all toolkit errors."""


class DefinitionError(TambaraError):
    """Malformed input: bad table, bad JSON block, violated invariant."""


class GroupMismatch(TambaraError):
    """Operands live over different groups (or norm flags disagree)."""


class UnsupportedGroup(TambaraError):
    """Construction not available at this group order / lattice shape."""


class SizeLimitExceeded(TambaraError):
    """A construction would exceed a configured size cap."""


class ZeroRing(TambaraError):
    """Operation undefined on the zero ring."""


class ZeroFunctor(TambaraError):
    """Operation undefined on the zero Tambara functor."""


class NotIdempotent(TambaraError):
    """Element passed as idempotent fails d*d == d."""


class NoNorms(TambaraError):
    """Operation requires norm maps but the functor is Green-only."""


class NotComplete(TambaraError):
    """Idempotent family does not sum to 1."""


class NotOrthogonal(TambaraError):
    """Idempotent family has a nonzero pairwise product."""


class NotFixed(TambaraError):
    """Idempotent is not fixed by the group action."""


class SearchTimeout(TambaraError):
    """Backtracking search exceeded its node budget (distinct from 'no')."""


class VerificationFailed(TambaraError):
    """A constructed witness failed its own verification; signals a bug or
    an axiom violation in the input, never a normal negative answer."""


class TargetNotClarified(TambaraError):
    """Factorization target is not Lambda-clarified."""


class FactorizationFailed(TambaraError):
    """No well-defined factorization exists (inputs violate axioms)."""


class NotAutomorphism(TambaraError):
    """Morphism passed as automorphism is not a levelwise bijection."""


class CrossTermFound(TambaraError):
    """Automorphism mixes distinct factors of a decomposition."""
