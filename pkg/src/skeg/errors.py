"""Exception hierarchy shared by the library and the CLI."""


class SkegError(Exception):
    """Base class for all errors raised by this package."""


class PolygonError(SkegError, ValueError):
    """The vertex list does not describe a valid simple polygon."""


class TooFewVertices(PolygonError):
    pass


class DegenerateVertex(PolygonError):
    pass


class SelfIntersecting(PolygonError):
    pass


class TriangulationError(SkegError, RuntimeError):
    pass


class NoBalancedDiagonal(SkegError, RuntimeError):
    pass


class PointOutsidePolygon(SkegError, ValueError):
    def __init__(self, point, message=None):
        self.point = tuple(point)
        super().__init__(message or f"point {self.point} is outside the polygon")


class SiteOutsidePolygon(PointOutsidePolygon):
    def __init__(self, point, index=None):
        self.index = index
        label = f"site {index} " if index is not None else "site "
        super().__init__(point, f"{label}{tuple(point)} is outside the polygon")


class KTooLarge(SkegError, ValueError):
    def __init__(self, k, n):
        self.k = k
        self.n = n
        super().__init__(f"k={k} is out of range for {n} sites")


class EmptyGrid(SkegError, ValueError):
    pass


class DuplicateSites(SkegError, ValueError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"sites {i} and {j} coincide")
