"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class FockPhaseError(Exception):
    code = "fockphase-error"


class DomainError(FockPhaseError, ValueError):
    code = "domain"


class DegenerateLatticeError(FockPhaseError, ValueError):
    code = "degenerate-lattice"


class InsufficientCoverageError(FockPhaseError, ValueError):
    code = "insufficient-coverage"


class TooFewPointsError(FockPhaseError, ValueError):
    code = "too-few-points"


class TruncationTooShortError(FockPhaseError, ValueError):
    code = "truncation-too-short"


class NonConvergenceError(FockPhaseError, ArithmeticError):
    code = "nonconvergence"


class DegreeMismatchError(FockPhaseError, ValueError):
    code = "degree-mismatch"


class ConditioningError(FockPhaseError, ValueError):
    code = "conditioning"


class ConjugateClosureError(FockPhaseError, ValueError):
    code = "conjugate-closure-violation"


class NoConsistentAssignmentError(FockPhaseError, ValueError):
    code = "no-consistent-assignment"


class DegreeOverflowError(FockPhaseError, ValueError):
    code = "degree-overflow"


class DensityHypothesisError(FockPhaseError, ValueError):
    code = "density-hypothesis"


class SchemaError(FockPhaseError, ValueError):
    code = "schema"
