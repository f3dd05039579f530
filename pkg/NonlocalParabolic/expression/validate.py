# Sample-based checks on parsed expressions
import numpy as np
from .parser import parse, evaluate, Expression
from .tokenizer import ExpressionError


def box_grid(box: dict, density: int = 9):
    """
    Tensor sample grid over a box.
    @box: dict, variable name -> (low, high); variables not in box are bound to 0
    @density: int, points per axis (>= 2)
    @return: dict of broadcastable arrays keyed by t, x, u, v
    """
    assert density >= 2, density
    names = ('t', 'x', 'u', 'v')
    axes = []
    for name in names:
        if name in box:
            low, high = box[name]
            axes.append(np.linspace(low, high, density) if high > low else np.array([float(low)]))
        else:
            axes.append(np.array([0.0]))
    mesh = np.meshgrid(*axes, indexing='ij')
    return dict(zip(names, mesh))


def sample(e: Expression, box: dict, density: int = 9):
    """evaluate e on box_grid(box, density); returns (values, points)"""
    points = box_grid(box, density)
    values = np.broadcast_to(evaluate(e, **points), points['t'].shape)
    return values, points


def describe_point(points, index):
    return ', '.join(f'{name}={float(points[name][index]):.6g}' for name in ('t', 'x', 'u', 'v'))


def check_nonnegative(e: Expression, box: dict, density: int = 9, label: str = 'expression') -> list:
    """
    Sample-check e >= 0 on a box.
    @return: list of error messages, empty when the check passes
    """
    try:
        values, points = sample(e, box, density)
    except ExpressionError as error:
        return [f'{label} = "{e}": {error}']
    negative = values < 0
    if not np.any(negative):
        return []
    index = np.unravel_index(np.argmin(values), values.shape)
    return [f'{label} = "{e}" is negative ({float(values[index]):.6g}) at {describe_point(points, index)}']


def check_between(e: Expression, lower, upper, box: dict, density: int = 9, label: str = 'expression',
                  variable: str = 'u', tol: float = 1e-12) -> list:
    """
    Sample-check lower * w <= e <= upper * w on a box, w being the named variable.
    """
    try:
        values, points = sample(e, box, density)
    except ExpressionError as error:
        return [f'{label} = "{e}": {error}']
    w = np.broadcast_to(points[variable], values.shape)
    errors = []
    low = values < lower * w - tol * (1 + np.abs(w))
    if np.any(low):
        index = np.unravel_index(np.argmax(lower * w - values), values.shape)
        errors.append(f'{label} = "{e}" is below {lower:g}*{variable} at {describe_point(points, index)}')
    high = values > upper * w + tol * (1 + np.abs(w))
    if np.any(high):
        index = np.unravel_index(np.argmax(values - upper * w), values.shape)
        errors.append(f'{label} = "{e}" is above {upper:g}*{variable} at {describe_point(points, index)}')
    return errors


def constant_value(source: str) -> float:
    """
    Value of a constant expression such as 'pi/4' or '1e-8'.
    @raise ExpressionError: on syntax errors or when the text references t, x, u or v
    """
    e = parse(str(source))
    if e.variables:
        raise ExpressionError(f'"{source}" must be a constant, found variable(s) {sorted(e.variables)}')
    return evaluate(e)
