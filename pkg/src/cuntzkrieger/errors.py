"""Exception hierarchy shared by all modules."""


class CKError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CKError, ValueError):
    pass


class ZeroRowOrColumn(CKError, ValueError):
    def __init__(self, kind: str, index: int):
        self.kind = kind
        self.index = index
        super().__init__(f"{kind} {index} has no nonzero entry")


class TooSmall(CKError, ValueError):
    pass


class IndexOutOfRange(CKError, IndexError):
    pass


class MatrixMismatch(CKError, ValueError):
    pass


class MixedDegree(CKError, ValueError):
    pass


class LevelTooSmall(CKError, ValueError):
    pass


class NotAnEndomorphism(CKError, ValueError):
    def __init__(self, relation: str):
        self.relation = relation
        super().__init__(f"relation fails: {relation}")


class OrderViolation(CKError, ValueError):
    def __init__(self, generator: int):
        self.generator = generator
        super().__init__(f"generator {generator} violates its declared order")


class NonCommuting(CKError, ValueError):
    def __init__(self, t: int, t2: int):
        self.pair = (t, t2)
        super().__init__(f"generators {t} and {t2} do not commute")


class NotCommuting(CKError, ValueError):
    pass


class NotFiniteOrder(CKError, ValueError):
    pass


class ZeroInput(CKError, ValueError):
    pass


class NotInCommutant(CKError, ValueError):
    pass


class NotAperiodic(CKError, ValueError):
    pass


class ZeroCorner(CKError, ValueError):
    pass


class ProbeExceeded(CKError, RuntimeError):
    pass


class IdentityFailed(CKError, AssertionError):
    def __init__(self, identity: str, indices: tuple = ()):
        self.identity = identity
        self.indices = indices
        super().__init__(f"{identity} failed at {indices}")


class ModelInvariantViolated(CKError, ValueError):
    pass


class NotUnitary(CKError, ValueError):
    pass


class DepthTooSmall(CKError, ValueError):
    pass


class DimensionMismatch(CKError, ValueError):
    pass
