"""Exception hierarchy for the solver.

Two families matter to callers: "unlucky" conditions (bad prime, bad
coordinates, bad lifting point), which the orchestration layer handles by
restarting with fresh randomness, and structural errors (input not a reduced
regular sequence, budgets exceeded), which no restart can fix.
"""


class KroneckerError(Exception):
    pass


class ParseError(KroneckerError):
    """Syntax or validation error in the input system text."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class SingularMatrixError(KroneckerError):
    pass


class NotInvertibleError(KroneckerError):
    pass


class CharacteristicTooSmallError(KroneckerError):
    pass


class DuplicateNodeError(KroneckerError):
    pass


class ModuliNotCoprimeError(KroneckerError):
    pass


class NoReconstructionError(KroneckerError):
    pass


class NoPrimeFoundError(KroneckerError):
    pass


class SizeGuardError(KroneckerError):
    pass


class UnluckyError(KroneckerError):
    """A restartable failure: the prime, coordinates or point were unlucky."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"unlucky data at stage {stage}: {cause}")


class DegreeDropError(UnluckyError):
    def __init__(self, stage=1, cause="leading coefficient vanished"):
        super().__init__(stage, cause)


class JacobianNotInvertibleError(UnluckyError):
    def __init__(self, stage, cause="jacobian not invertible"):
        super().__init__(stage, cause)


class NodeExhaustionError(UnluckyError):
    def __init__(self, stage, cause="ran out of usable interpolation nodes"):
        super().__init__(stage, cause)


class NonlinearGcdError(UnluckyError):
    def __init__(self, stage, cause="primitive element failed to separate"):
        super().__init__(stage, cause)


class ZeroResultantError(UnluckyError):
    def __init__(self, stage, cause="resultant vanished at every node"):
        super().__init__(stage, cause)


class PrecisionStallError(KroneckerError):
    pass


class ResidualNonzeroError(KroneckerError):
    pass


class BudgetExceededError(KroneckerError):
    """A stage degree exceeded its Bezout budget; the input cannot be a
    reduced regular sequence."""

    def __init__(self, stage, degree, budget):
        self.stage = stage
        self.degree = degree
        self.budget = budget
        super().__init__(
            f"stage {stage} degree {degree} exceeds Bezout budget {budget}"
        )


class EmptyIntersectionError(KroneckerError):
    pass


class RetryExhaustedError(KroneckerError):
    def __init__(self, attempts, causes):
        self.attempts = attempts
        self.causes = causes
        super().__init__(
            f"no successful solve after {attempts} attempts: {causes}"
        )


class InputNotRegularError(KroneckerError):
    def __init__(self, attempts, causes):
        self.attempts = attempts
        self.causes = causes
        super().__init__(
            "input does not look like a reduced regular sequence: "
            f"{causes}"
        )
