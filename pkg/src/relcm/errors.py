"""Exception hierarchy shared by all relcm modules."""

from __future__ import annotations


class RelcmError(Exception):
    """Base class for every error raised by relcm."""


# -- quadrature -------------------------------------------------------------
class NonConvergence(RelcmError):
    """A quadrature failed to reach the requested tolerance."""


class InvalidDecay(RelcmError):
    """A non-positive or non-finite decay rate was supplied."""


class ContourThroughSingularity(RelcmError):
    """A contour integrand produced a non-finite value on the contour."""


# -- hyperbolic gamma -------------------------------------------------------
class AtPole(RelcmError):
    """Evaluation point lies (numerically) on a pole or zero of G."""

    def __init__(self, z: complex, k: int, l: int, kind: str = "pole"):
        self.z, self.k, self.l, self.kind = z, k, l, kind
        super().__init__(f"G evaluated at {kind} z={z!r} (k={k}, l={l})")


class LadderOverflow(RelcmError):
    """The shift ladder would need more steps than allowed."""


# -- repulsive / attractive -------------------------------------------------
class IntegralDivergence(RelcmError):
    """The coupling lies outside the window where the integral converges."""


class NearPole(RelcmError):
    """The requested point is too close to a pole of the integral."""


class DivisionNearZero(RelcmError):
    """A denominator is numerically zero."""


# -- special coupling ---------------------------------------------------------
class DegenerateParameters(RelcmError):
    """Scale parameters hit a resonance where the construction breaks down."""


class UnsupportedN(RelcmError):
    """Requested order is outside the supported range."""


class OutOfWindow(RelcmError):
    """Parameters lie outside the window required by the requested quantity."""


# -- transforms / scattering ---------------------------------------------------
class RealPole(RelcmError):
    """A weight function has a pole on the real axis."""


class IntervalMismatch(RelcmError):
    """A prediction was requested for parameters outside its interval."""


class NonUnitaryKernel(RelcmError):
    """A scattering computation needs a unitary kernel."""


class ConfigError(RelcmError):
    """Invalid run configuration (mapped to CLI exit code 2)."""
