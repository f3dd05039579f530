# Whitelisted functions of the expression language
import numpy as np
from dataclasses import dataclass
from typing import Callable
from .tokenizer import ExpressionError


class ExpressionDomainError(ExpressionError):
    def __init__(self, message, index=None):
        """
        @message: str, description of the undefined operation
        @index: tuple or None, position of the first offending element when evaluating on arrays
        """
        if index is not None:
            message = f'{message} at array index {index}'
        super().__init__(message)
        self.index = index


def first_index(mask):
    """index tuple of the first True entry of mask, None for scalars"""
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return None
    return tuple(int(i) for i in np.argwhere(mask)[0])


def _check(mask, message):
    if np.any(mask):
        raise ExpressionDomainError(message, first_index(mask))


def _log(a):
    _check(a <= 0, 'log of a non-positive number')
    return np.log(a)


def _sqrt(a):
    _check(a < 0, 'sqrt of a negative number')
    return np.sqrt(a)


@dataclass(frozen=True)
class Function:
    name: str
    arity: int
    apply: Callable


FUNCTIONS = {
    'sin': Function('sin', 1, np.sin),
    'cos': Function('cos', 1, np.cos),
    'exp': Function('exp', 1, np.exp),
    'log': Function('log', 1, _log),
    'sqrt': Function('sqrt', 1, _sqrt),
    'abs': Function('abs', 1, np.abs),
    'tanh': Function('tanh', 1, np.tanh),
    'min': Function('min', 2, np.minimum),
    'max': Function('max', 2, np.maximum),
}

CONSTANTS = {
    'pi': float(np.pi),
}

VARIABLES = ('t', 'x', 'u', 'v')


def divide(a, b):
    _check(b == 0, 'division by zero')
    return a / b


def power(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check((a < 0) & (b != np.floor(b)), 'negative base with non-integer exponent')
    _check((a == 0) & (b < 0), 'zero raised to a negative power')
    return np.power(a, b)
