# Space-time grid fields, the norm |.|, the functional floor(.) and the cone / Harnack checks
import numpy as np
from dataclasses import dataclass
from ..spectral import Grid, analyze_rows, synthesize_rows, eigenvalues

DEFAULT_CONE_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """
    Grid function u[n][j] = u(t_n, x_j) on grid.shape; boundary columns are zero.
    """
    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        assert values.shape == self.grid.shape, (values.shape, self.grid.shape)
        values[:, 0] = 0.0
        values[:, -1] = 0.0
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(np.zeros(grid.shape), grid)

    @classmethod
    def from_function(cls, grid: Grid, function):
        """@function: callable (t, x) -> array, broadcast over the (t, x) grid"""
        t, x = np.meshgrid(grid.t, grid.x, indexing='ij')
        return cls(np.broadcast_to(function(t, x), grid.shape), grid)

    @classmethod
    def constant_in_time(cls, grid: Grid, row):
        return cls(np.broadcast_to(np.asarray(row, dtype=float), grid.shape), grid)

    @property
    def initial(self):
        """u(0) as a space grid function"""
        return self.values[0]

    def row(self, n):
        return self.values[n]

    def clamped(self):
        return SpaceTimeField(np.maximum(self.values, 0.0), self.grid)

    def __add__(self, other):
        return SpaceTimeField(self.values + other.values, self.grid)

    def __sub__(self, other):
        return SpaceTimeField(self.values - other.values, self.grid)

    def __mul__(self, scalar):
        return SpaceTimeField(self.values * float(scalar), self.grid)

    __rmul__ = __mul__

    def __repr__(self):
        return f'SpaceTimeField(shape={self.values.shape}, sup={sup_norm(self):.6g})'

    def to_csv(self, path):
        """rows (t, x, value), row-major by time"""
        t, x = np.meshgrid(self.grid.t, self.grid.x, indexing='ij')
        data = np.column_stack([t.ravel(), x.ravel(), self.values.ravel()])
        np.savetxt(path, data, delimiter=',', header='t,x,value', comments='', fmt='%.17g')


def write_pair_csv(path, u: SpaceTimeField, v: SpaceTimeField):
    """solution rows (t, x, u, v), row-major by time"""
    t, x = np.meshgrid(u.grid.t, u.grid.x, indexing='ij')
    data = np.column_stack([t.ravel(), x.ravel(), u.values.ravel(), v.values.ravel()])
    np.savetxt(path, data, delimiter=',', header='t,x,u,v', comments='', fmt='%.17g')


def plateau(grid: Grid):
    """
    psi: 1 on the snapped D, linear ramps to 0 at both ends of Omega
    """
    d_lo, d_hi = grid.snapped_d
    length = grid.geometry.length
    psi = np.interp(grid.x, [0.0, d_lo, d_hi, length], [0.0, 1.0, 1.0, 0.0])
    psi[grid.d_slice] = 1.0
    return psi


def sup_norm(u: SpaceTimeField) -> float:
    return float(np.max(np.abs(u.values)))


def floor_functional(u: SpaceTimeField) -> float:
    """min over the grid points of D of |u(0, x_j)|"""
    return float(np.min(np.abs(u.initial[u.grid.d_slice])))


@dataclass
class CheckOutcome:
    holds: bool
    worst_violation: float
    applicable: bool = True
    location: tuple = None  # (t, x) of the worst violation

    def to_dict(self):
        return {
            'holds': bool(self.holds),
            'worst_violation': float(self.worst_violation),
            'applicable': bool(self.applicable),
            'location': None if self.location is None else [float(c) for c in self.location],
        }


def evolve_initial(u: SpaceTimeField, K=None):
    """
    rows S(t_n) u(0), with u(0) expanded in the first K discrete sine modes (default nx - 1)
    """
    grid = u.grid
    K = grid.nx - 1 if K is None else K
    coeffs = analyze_rows(u.initial, K)
    lam = eigenvalues(K, grid.geometry.length)
    decay = np.exp(-np.outer(grid.t, lam)) * coeffs
    return synthesize_rows(decay, grid.nx)


def _worst(excess, grid, rows=None, cols=None):
    index = np.unravel_index(np.argmax(excess), excess.shape)
    n = index[0] if rows is None else rows[index[0]]
    j = index[1] if cols is None else cols[index[1]]
    return float(excess[index]), (float(grid.t[n]), float(grid.x[j]))


def in_cone(u: SpaceTimeField, tol=DEFAULT_CONE_TOL) -> CheckOutcome:
    """
    u >= -tol everywhere and u(t_n) >= S(t_n) u(0) - tol on every grid point.
    """
    assert tol >= 0, tol
    excess = np.maximum(-u.values, evolve_initial(u) - u.values)
    worst, location = _worst(excess, u.grid)
    worst = max(worst, 0.0)
    return CheckOutcome(worst <= tol, worst, True, location if worst > 0 else None)


def harnack_check(u: SpaceTimeField, m: float, tol=1e-4, cone_tol=DEFAULT_CONE_TOL) -> CheckOutcome:
    """
    u >= m * floor(u) - tol on [t0, t1] x D. Not applicable to fields outside the cone.
    """
    cone = in_cone(u, cone_tol)
    if not cone.holds:
        return CheckOutcome(False, cone.worst_violation, False, cone.location)
    grid = u.grid
    rows = np.flatnonzero(grid.time_window())
    cols = np.arange(grid.nx + 1)[grid.d_slice]
    window = u.values[np.ix_(rows, cols)]
    excess = m * floor_functional(u) - window
    worst, location = _worst(excess, grid, rows, cols)
    worst = max(worst, 0.0)
    return CheckOutcome(worst <= tol, worst, True, location if worst > 0 else None)
