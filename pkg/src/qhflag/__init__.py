"""Exact small quantum cohomology of full flag manifolds GL_n/B.

The pipeline generates the quantum Toda relations, builds a left Groebner
basis for the quantised operator ideal, extracts the flat connection of the
quotient module, factors it by quadrature, and reads off quantum products,
3-point genus-zero Gromov-Witten invariants and quantum Schubert polynomials,
all in exact rational arithmetic.
"""

from .poly import Poly, parse_poly
from .matrix import PolyMatrix
from .ore import LeftIdealBasis, OreOp, left_buchberger, left_normal_form
from .grobner import GroebnerBasis, buchberger
from .pipeline import Pipeline
from .golden import verify_golden

__all__ = [
    "GroebnerBasis",
    "LeftIdealBasis",
    "OreOp",
    "Pipeline",
    "Poly",
    "PolyMatrix",
    "buchberger",
    "left_buchberger",
    "left_normal_form",
    "parse_poly",
    "verify_golden",
]

__version__ = "0.1.0"
