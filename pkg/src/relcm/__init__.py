"""Numerics for the relativistic Calogero-Moser two-particle eigenfunctions.

Modules
-------
numerics     quadrature and residue primitives
hypgamma     the hyperbolic gamma function G(a+, a-; z)
repulsive    the renormalised conical function and its difference operators
attractive   the attractive eigenfunction, amplitudes t, r, u
special_n    elementary closed forms at b = (N+1) a+
transforms   eigenfunction transforms, Gram defects and their predictions
scattering   wave-operator limits and S-matrix symmetry checks
suites       the verification suites driven by the command line
"""

from .errors import RelcmError
from .hypgamma import HypGammaEvaluator, ScaleParams, hyp_gamma, log_hyp_gamma

__version__ = "0.1.0"

__all__ = [
    "HypGammaEvaluator",
    "RelcmError",
    "ScaleParams",
    "hyp_gamma",
    "log_hyp_gamma",
    "__version__",
]
