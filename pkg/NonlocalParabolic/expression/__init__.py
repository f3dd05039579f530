from .tokenizer import ExpressionError, ExpressionSyntaxError, UnknownIdentifierError, ArityError, tokenize
from .functions import ExpressionDomainError, FUNCTIONS, CONSTANTS, VARIABLES
from .parser import Expression, Constant, Variable, Unary, Binary, Call, parse, evaluate, to_source
from .validate import box_grid, sample, check_nonnegative, check_between, constant_value
