"""Phase retrieval for Bargmann transforms of exponential type from sampled magnitudes.

Submodules:

- ``fock_core``: Hermite / monomial representations, Gabor magnitudes, closed-form entire functions
- ``lattice_geometry``: shifted lattices, structured sampling sets, density and separation
- ``factorization``: polynomial roots, primary factors, Hadamard products, zero multisets
- ``retrieval``: reconstruction up to a global phase, counterexamples, growth diagnostics
- ``cli``: batch command line front end
"""

from fockphase.errors import FockPhaseError
from fockphase.fock_core import (
    ExpQuadratic,
    FockPolynomial,
    HermiteExpansion,
    ScaledSine,
    ShiftedSine,
    TimeFreqPoint,
    eval_log_magnitude,
    eval_poly,
    fock_to_hermite,
    gabor_magnitude,
    hermite_to_fock,
)
from fockphase.lattice_geometry import PointSet, ShiftedLattice, StructuredSet
from fockphase.factorization import ZeroMultiset
from fockphase.retrieval import MagnitudeSamples, forward_sample, phase_equivalent, reconstruct

__version__ = "0.1.0"

__all__ = [
    "ExpQuadratic",
    "FockPhaseError",
    "FockPolynomial",
    "HermiteExpansion",
    "MagnitudeSamples",
    "PointSet",
    "ScaledSine",
    "ShiftedLattice",
    "ShiftedSine",
    "StructuredSet",
    "TimeFreqPoint",
    "ZeroMultiset",
    "eval_log_magnitude",
    "eval_poly",
    "fock_to_hermite",
    "forward_sample",
    "gabor_magnitude",
    "hermite_to_fock",
    "phase_equivalent",
    "reconstruct",
]
