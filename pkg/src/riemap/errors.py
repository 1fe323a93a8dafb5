"""Exception hierarchy shared by every riemap module."""


class RiemapError(Exception):
    """Base class for all library errors."""


# mesh
class MeshError(RiemapError):
    pass


class NonDiskTopology(MeshError):
    pass


class DegenerateFace(MeshError):
    pass


class DuplicateVertex(MeshError):
    pass


class SelfIntersectingPolygon(MeshError):
    pass


class ClockwiseInput(MeshError):
    pass


class FlipNonConvergence(MeshError):
    pass


class DepthTooLarge(MeshError):
    pass


class MeshFormatError(MeshError):
    pass


# fem
class DimensionMismatch(RiemapError):
    pass


# boundary
class BoundaryError(RiemapError):
    pass


class CollinearCorners(BoundaryError):
    pass


class ClockwiseCorners(BoundaryError):
    pass


class NotOnBoundary(BoundaryError):
    pass


class NotDistinct(BoundaryError):
    pass


class WrongOrder(BoundaryError):
    pass


# solve
class SolverError(RiemapError):
    pass


class NotPositiveDefinite(SolverError):
    pass


class IterativeNonConvergence(SolverError):
    pass


class TooLarge(SolverError):
    pass


class SingularKKT(SolverError):
    pass


# conformal
class ConformalError(RiemapError):
    pass


class OutsideDomain(ConformalError):
    pass


class OutsideImage(ConformalError):
    pass


class NotBijective(ConformalError):
    pass


class TargetMismatch(ConformalError):
    pass


class PointOnCurve(ConformalError):
    pass
