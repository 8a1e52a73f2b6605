"""Exception types shared across the package."""


class SemihochError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfRange(SemihochError, IndexError):
    pass


class NonAssociative(SemihochError):
    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"associativity fails at ({i}, {j}, {k})")
        self.triple = (i, j, k)


class BoundExceeded(SemihochError):
    pass


class InvalidDiagram(SemihochError):
    """A diagram, decomposition or homomorphism violates one of its invariants."""


class NotAGroup(SemihochError):
    def __init__(self, element):
        super().__init__(f"component over {element!r} is not a group")
        self.element = element


class NotRectangular(SemihochError):
    pass


class DimensionMismatch(SemihochError, ValueError):
    pass


class ResourceBound(SemihochError):
    pass


class HypothesisFailure(SemihochError):
    """A precondition of a homotopy combinator does not hold."""


class FibreSolveFailure(SemihochError):
    def __init__(self, degree: int, basis_tuple):
        super().__init__(f"free-case homotopy solve inconsistent in degree {degree} at {basis_tuple}")
        self.degree = degree
        self.basis_tuple = basis_tuple


class SchemaError(SemihochError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(SemihochError):
    pass
