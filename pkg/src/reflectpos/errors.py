"""Exception hierarchy shared by all modules."""


class ReflectionError(ValueError):
    """Base class for every domain error raised by :mod:`reflectpos`."""


class DimensionMismatch(ReflectionError):
    pass


class SingularMetric(ReflectionError):
    pass


class NotHermitian(ReflectionError):
    pass


class NotPsd(ReflectionError):
    pass


class OutsideDisk(ReflectionError):
    pass


class IllConditionedBasis(ReflectionError):
    pass


class NotReflectionSymmetric(ReflectionError):
    pass


class NotReflectionPositive(ReflectionError):
    pass


class IncompatibleRealizations(ReflectionError):
    pass


class NotPositive(ReflectionError):
    pass


class DegenerateProjection(ReflectionError):
    pass


class NotContractive(ReflectionError):
    pass


class NotDissipative(ReflectionError):
    pass


class NotClassifiable(ReflectionError):
    pass


class TruncationOverflow(ReflectionError):
    pass


class TruncationUnderresolved(ReflectionError):
    pass


class ParameterOutOfRange(ReflectionError):
    pass


class QuadratureUnderresolved(ReflectionError):
    pass


class BoundaryAtom(ReflectionError):
    pass


class DuplicateNodes(ReflectionError):
    pass


class NotAKernel(ReflectionError):
    pass

