# Nonlocal initial conditions u(0) = alpha(u, v), v(0) = beta(u, v)
import abc
import numpy as np
from dataclasses import dataclass, field
from typing import Tuple
from scipy.integrate import trapezoid
from ..expression import Expression, parse, evaluate, check_between, ExpressionError
from ..constants import ConditionBounds


class NonlocalCondition(metaclass=abc.ABCMeta):
    """
    Base class of the nonlocal maps. `component` names the variable the condition initializes, 'u' or 'v'.
    """
    kind = None

    @abc.abstractmethod
    def apply(self, u, v):
        """
        @u, v: SpaceTimeField
        @return: space grid function, the initial value
        """

    def validate(self, geometry, box, density=9) -> list:
        return []

    def snap_report(self, grid) -> list:
        """snapped evaluation times, empty for conditions that read the whole trajectory"""
        return []

    @abc.abstractmethod
    def to_config(self) -> dict:
        """key/value pairs of the [nonlocal.*] section"""


def _zero_ends(row):
    row = np.array(row, dtype=float)
    row[0] = 0.0
    row[-1] = 0.0
    return row


@dataclass(frozen=True, eq=False)
class IntegralCondition(NonlocalCondition):
    """
    outer(integral_0^tmax inner(u(t), v(t)) dt), the time integral by the composite trapezoid rule.
    inner is written in u, v; outer in u, which receives the integral.
    """
    component: str = 'u'
    inner: Expression = None
    outer: Expression = None
    bounds: ConditionBounds = field(default_factory=ConditionBounds)
    box: Tuple[float, float] = None  # (U, V) of the bound check, default the problem box
    kind = 'integral'

    def __post_init__(self):
        assert self.component in ('u', 'v'), self.component
        if self.inner is None:
            object.__setattr__(self, 'inner', parse(self.component))
        if self.outer is None:
            object.__setattr__(self, 'outer', parse('u'))

    def __eq__(self, other):
        return (isinstance(other, IntegralCondition) and self.component == other.component
                and self.inner == other.inner and self.outer == other.outer
                and self.bounds == other.bounds and self.box == other.box)

    def time_integral(self, u, v):
        grid = u.grid
        t, x = np.meshgrid(grid.t, grid.x, indexing='ij')
        inner = evaluate(self.inner, t=t, x=x, u=np.maximum(u.values, 0.0), v=np.maximum(v.values, 0.0))
        return trapezoid(inner, grid.t, axis=0)

    def apply(self, u, v):
        integral = self.time_integral(u, v)
        return _zero_ends(evaluate(self.outer, t=0.0, x=u.grid.x, u=integral, v=0.0))

    def validate(self, geometry, box, density=9):
        """
        Sample-check p w <= inner <= q w (w the condition's variable), P w <= outer(w) <= Q w
        and inner(0, 0) = outer(0) = 0.
        """
        U, V = self.box if self.box is not None else box
        b = self.bounds
        sample_box = {'u': (0.0, U), 'v': (0.0, V)}
        errors = check_between(self.inner, b.p, b.q, sample_box, density, 'inner', self.component)
        w_max = b.q * (U if self.component == 'u' else V) * geometry.tmax
        errors.extend(check_between(self.outer, b.P, b.Q, {'u': (0.0, w_max)}, density, 'outer', 'u'))
        try:
            if abs(evaluate(self.inner)) > 1e-12 or abs(evaluate(self.outer)) > 1e-12:
                errors.append('inner(0, 0) and outer(0) must vanish')
        except ExpressionError as error:
            errors.append(str(error))
        return errors

    def to_config(self):
        config = {
            'kind': 'integral', 'inner': str(self.inner), 'outer': str(self.outer),
            'p': repr(self.bounds.p), 'q': repr(self.bounds.q),
            'P': repr(self.bounds.P), 'Q': repr(self.bounds.Q),
        }
        if self.box is not None:
            config['box'] = f'{self.box[0]!r}, {self.box[1]!r}'
        return config


@dataclass(frozen=True, eq=False)
class MultipointCondition(NonlocalCondition):
    """
    sum_s weights[s] * w(times[s]) with w the condition's variable, each time snapped to the nearest grid row.
    No points means the zero map.
    """
    component: str = 'u'
    weights: Tuple[float, ...] = ()
    times: Tuple[float, ...] = ()
    kind = 'multipoint'

    def __post_init__(self):
        assert self.component in ('u', 'v'), self.component
        object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))
        object.__setattr__(self, 'times', tuple(float(t) for t in self.times))

    def __eq__(self, other):
        return (isinstance(other, MultipointCondition) and self.component == other.component
                and self.weights == other.weights and self.times == other.times)

    def snapped(self, grid):
        """list of (row index, snap distance)"""
        return [grid.time_index(t) for t in self.times]

    def snap_report(self, grid):
        """
        @return: list of {time, snapped_time, distance}, one per point
        """
        report = []
        for time, (n, distance) in zip(self.times, self.snapped(grid)):
            report.append({'time': time, 'snapped_time': float(grid.t[n]), 'distance': float(distance)})
        return report

    def apply(self, u, v):
        w = u if self.component == 'u' else v
        row = np.zeros(w.grid.nx + 1)
        for weight, (n, _) in zip(self.weights, self.snapped(w.grid)):
            row += weight * w.values[n]
        return _zero_ends(row)

    def validate(self, geometry, box, density=9):
        errors = []
        if len(self.weights) != len(self.times):
            errors.append(f'{len(self.weights)} weights but {len(self.times)} times')
        errors.extend(f'weight {w} must be positive' for w in self.weights if not w > 0)
        errors.extend(f'time {t} must lie in (0, tmax = {geometry.tmax}]' for t in self.times
                      if not (0 < t <= geometry.tmax))
        return errors

    def to_config(self):
        return {
            'kind': 'multipoint',
            'weights': ', '.join(repr(w) for w in self.weights),
            'times': ', '.join(repr(t) for t in self.times),
        }
