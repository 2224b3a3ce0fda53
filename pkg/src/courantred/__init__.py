"""Exact symbolic engine for Courant algebroids as degree-2 symplectic
graded manifolds, with coisotropic and hamiltonian reduction."""

__version__ = "0.1.0"

from .errors import DataError, InternalError, ReductionError, SamplingError  # noqa: E402
from .graded_algebra import Chart, GradedPoly  # noqa: E402
from .parsing import parse_expr  # noqa: E402
from .poisson import BracketData, poisson  # noqa: E402
from .courant import CourantScenario, standard_theta, twisted_theta  # noqa: E402

__all__ = [
    "__version__",
    "Chart",
    "GradedPoly",
    "parse_expr",
    "BracketData",
    "poisson",
    "CourantScenario",
    "standard_theta",
    "twisted_theta",
    "DataError",
    "SamplingError",
    "ReductionError",
    "InternalError",
]
