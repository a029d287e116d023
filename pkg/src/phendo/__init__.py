"""Numerical experiments with partially hyperbolic endomorphisms of the 2-torus.

Submodules
----------
geometry       linearisations, eigen-projections, cover/torus helpers
models         Moebius circle map, perturbed linear and incoherent models, cones
incoherent     series solutions, invariant bundles and the branching certificate
semiconjugacy  truncated Franks semiconjugacy H and its projections
foliation      backward-iterated centre leaves, unstable leaves, diagnostics
conjugacy      leaf conjugacy by averaging along centre leaves
svg            dependency-free SVG figures
cli            command line front end
"""
from .errors import PhendoError
from .geometry import LinearisationData, ProjectionPair, classify_linearisation, projections
from .models import (ConeFamily, IncoherentModel, LinearModel, MobiusCircleMap,
                     PerturbedLinearModel, cone_invariance_check)
from .semiconjugacy import SemiconjugacyApprox

__version__ = "0.1.0"

__all__ = [
    "PhendoError", "LinearisationData", "ProjectionPair", "classify_linearisation", "projections",
    "ConeFamily", "IncoherentModel", "LinearModel", "MobiusCircleMap", "PerturbedLinearModel",
    "cone_invariance_check", "SemiconjugacyApprox", "__version__",
]
