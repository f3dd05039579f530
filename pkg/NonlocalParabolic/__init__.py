from .expression import parse, evaluate, Expression, ExpressionError
from .spectral import DomainGeometry, Grid
from .problem import ProblemSpec, make_problem, ConfigurationError, RadiiConfig
from .constants import compute_constants
from .solver import picard_solve, multi_start
from .report import load_problem, dump_problem, __version__
