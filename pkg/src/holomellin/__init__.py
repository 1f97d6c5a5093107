"""Mellin transforms of holonomic functions and their inverses, exactly.

Forward: a linear ODE with polynomial coefficients for ``f(x)`` becomes a
linear recurrence for ``M[f](n) = int_0^1 x^n f(x) dx``.  Inverse: a
recurrence for ``M[f](n)`` becomes an ODE for ``f(x)``.
"""

from .algebra import Poly, RationalFunction, falling_factorial, poly_gcd, rational_roots
from .errors import HolomellinError
from .forward import mellin_of_term, ode_to_mellin_rec
from .inverse import MixedRelation, eliminate_boundary, rec_to_ode, reduction_pass
from .operators import (
    BoundarySymbol,
    DerivAtOne,
    DiffOp,
    MellinMoment,
    RecOp,
    apply_recop,
    normalize_diffop,
    normalize_recop,
)
from .oracle import (
    expand,
    numeric_boundary,
    numeric_mellin,
    numeric_regularized_mellin,
    ode_to_coeff_rec,
    quad_mellin,
)
from .parsing import from_json, parse_operator, to_json
from .solvers import hyper_solutions, rational_ode_solutions, verify_certificate

__version__ = "0.1.0"
