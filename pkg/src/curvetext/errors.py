"""Exception types shared across the toolkit."""


class CurveTextError(Exception):
    """Base class for all toolkit errors."""


class NonSimpleInput(CurveTextError):
    """A polygon with intersecting sides was passed where a simple one is required."""


class DegenerateInput(CurveTextError):
    """Geometry too small or collapsed for the requested operation."""


class FormatError(CurveTextError):
    """A text line does not match any supported annotation/detection layout."""


class BoundsError(CurveTextError):
    """Parsed coordinates violate the declared bounding rectangle."""


class ScoreRangeError(CurveTextError):
    """Detection confidence outside [0, 1]."""


class DegenerateQuad(CurveTextError):
    """Quadrilateral with a near-zero side or intersecting sides."""


class DegenerateProposal(CurveTextError):
    """Proposal rectangle narrower than one pixel in some dimension."""


class KeyMismatch(CurveTextError):
    """Detections reference an image that has no ground-truth entry."""


class InvalidThreshold(CurveTextError):
    """IoU threshold outside the open interval (0, 1)."""


class ShapeMismatch(CurveTextError):
    """Tensor arguments with inconsistent shapes."""


class EmptyPositives(CurveTextError):
    """Offset predictions supplied although the positive-proposal count is zero."""


class NonFinite(CurveTextError):
    """A computation produced NaN or infinity."""
