"""Exception hierarchy shared across the package.

Every error raised by the public API derives from :class:`CfxError`, so
callers (and the CLI) can distinguish our failures from genuine bugs.
"""


class CfxError(Exception):
    """Base class for all package errors."""


class StructuralRefusal(CfxError):
    """The requested object does not exist for this system (no compact
    attractor, no expanding set map, no planar extension, ...)."""


# --- branch / system construction ----------------------------------------

class ZeroDeterminant(CfxError):
    """Coefficient matrix has ad - bc = 0 and defines no homography."""


class PoleInDomain(CfxError):
    """The pole -d/c of a branch lies inside its domain interval."""


class OutOfDomain(CfxError):
    """Point lies outside the branch domain (or the system interval)."""


class OutOfRange(CfxError):
    """Point lies outside the branch image, so it has no preimage there."""


class NoBranch(CfxError):
    """No branch domain contains the point."""


class NotExpanding(StructuralRefusal):
    """Some branch contracts on a subinterval of positive length."""


class UnboundedShift(StructuralRefusal):
    """The fiber shift terms |c(cx+d)| grow without bound over the family."""


class BadParameter(CfxError):
    """Constructor parameter outside its admissible range."""


# --- planar extension ------------------------------------------------------

class Singular(CfxError):
    """Conjugacy denominator 1 - xy vanishes (or nearly so)."""


class PoleInDual(CfxError):
    """Dual step denominator a - bv vanishes at the given point."""


class StraddlesBranchBoundary(CfxError):
    """Finite-difference stencil crosses a branch boundary."""


class ZeroInput(CfxError):
    """Complex step undefined at z = 0."""


# --- fiber sets and the set-map engine ------------------------------------

class EmptySet(CfxError):
    """Operation undefined on an empty interval union."""


class GridMismatch(CfxError):
    """Two fiber grids differ in cell count or base interval."""


class NoTailBound(CfxError):
    """Branch family declares no truncation tail bound."""


class EmptyFiber(CfxError):
    """A target cell receives no branch image (cover/image defect)."""


class NoConvergence(CfxError):
    """Set-map iteration failed to meet its stopping rule within max_iter."""


# --- orbits and measures ----------------------------------------------------

class OrbitEscapes(CfxError):
    """Iterate left the system interval (or hit an undefined point)."""


class ZeroMass(CfxError):
    """Fiber-length profile has zero total mass; no density to normalize."""


# --- serialization / CLI -----------------------------------------------------

class BadInput(CfxError):
    """Malformed value where a finite number or well-formed JSON is required."""


class BadCSV(CfxError):
    """CSV input lacks the required header or has malformed rows."""
