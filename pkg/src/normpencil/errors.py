"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class NormPencilError(Exception):
    code = "ERROR"


class NonPrimeModulus(NormPencilError, ValueError):
    code = "NON_PRIME_MODULUS"


class NonCoprimeModuli(NormPencilError, ValueError):
    code = "NON_COPRIME_MODULI"

    def __init__(self, first, second):
        super().__init__(f"moduli {first} and {second} are not coprime")
        self.pair = (first, second)


class NotSquarefree(NormPencilError, ValueError):
    code = "NOT_SQUAREFREE"


class DegenerateExtension(NormPencilError, ValueError):
    code = "DEGENERATE_EXTENSION"


class InvalidCharacter(NormPencilError, ValueError):
    code = "INVALID_CHARACTER"


class ZeroArgument(NormPencilError, ValueError):
    code = "ZERO_ARGUMENT"


class ProportionalForms(NormPencilError, ValueError):
    code = "PROPORTIONAL_FORMS"


class LocalObstruction(NormPencilError):
    """No local point at ``place``. ``undecided`` marks a bounded search that gave up."""

    code = "LOCAL_OBSTRUCTION"

    def __init__(self, place, detail="", undecided=False):
        msg = f"local obstruction at {place}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.place = place
        self.undecided = undecided


class RealObstruction(LocalObstruction):
    code = "REAL_OBSTRUCTION"

    def __init__(self, detail=""):
        super().__init__("inf", detail)


class SearchExhausted(NormPencilError):
    code = "SEARCH_EXHAUSTED"

    def __init__(self, max_radius, found=0):
        super().__init__(f"search exhausted at max_radius={max_radius} ({found} hits)")
        self.max_radius = max_radius
        self.found = found


class TargetDegenerate(NormPencilError, ValueError):
    code = "TARGET_DEGENERATE"


class DegenerateTarget(TargetDegenerate):
    code = "DEGENERATE_TARGET"


class DegenerateCandidate(NormPencilError, ValueError):
    code = "DEGENERATE_CANDIDATE"


class InsufficientCone(NormPencilError):
    code = "INSUFFICIENT_CONE"


class DenominatorOutsideS(NormPencilError, ValueError):
    code = "DENOMINATOR_OUTSIDE_S"


class RamifiedOutsideS(NormPencilError, ValueError):
    code = "RAMIFIED_OUTSIDE_S"


class FactorizationLimit(NormPencilError):
    code = "FACTORIZATION_LIMIT"

    def __init__(self, n, bound):
        super().__init__(f"could not factor {n} with trial bound {bound}")
        self.n = n
        self.bound = bound


class UnsupportedDegree(NormPencilError):
    code = "UNSUPPORTED_DEGREE"


class VerticalConditionFailed(LocalObstruction):
    """The local points cannot be chosen so that, for every factor with several
    distinct roots, each linear factor has vanishing invariant sum over S and
    the real place."""

    code = "VERTICAL_CONDITION"

    def __init__(self, detail="", undecided=False):
        super().__init__("S", detail, undecided)


class InternalInconsistency(NormPencilError):
    code = "INTERNAL_INCONSISTENCY"
