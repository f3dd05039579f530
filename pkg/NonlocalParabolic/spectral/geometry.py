# Domain geometry and the collocation grid
import logging
import numpy as np
from dataclasses import dataclass, replace


class GeometryError(ValueError):
    """Invalid interval, sub-interval D, time window or grid"""


@dataclass(frozen=True)
class DomainGeometry:
    """
    Omega = [0, length] with the interior sub-interval D = [d_lo, d_hi] and the times t0 < t1 <= tmax.
    """
    length: float = float(np.pi)
    d_lo: float = float(np.pi / 4)
    d_hi: float = float(3 * np.pi / 4)
    t0: float = 0.0
    t1: float = 1.0
    tmax: float = 1.0

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise GeometryError('; '.join(errors))

    def validate(self) -> list:
        errors = []
        values = (self.length, self.d_lo, self.d_hi, self.t0, self.t1, self.tmax)
        if not all(np.isfinite(value) for value in values):
            return ['geometry values must be finite']
        if self.length <= 0:
            errors.append(f'length must be positive, got {self.length}')
        if not (0 < self.d_lo < self.d_hi < self.length):
            errors.append(f'D = [{self.d_lo}, {self.d_hi}] must satisfy 0 < d_lo < d_hi < length = {self.length}')
        if not (0 <= self.t0 < self.t1 <= self.tmax):
            errors.append(f'times must satisfy 0 <= t0 < t1 <= tmax, got t0={self.t0}, t1={self.t1}, tmax={self.tmax}')
        return errors

    @property
    def d_length(self):
        return self.d_hi - self.d_lo

    def with_d(self, d_lo, d_hi):
        return replace(self, d_lo=float(d_lo), d_hi=float(d_hi))

    def to_dict(self):
        return {
            'length': self.length, 'd_lo': self.d_lo, 'd_hi': self.d_hi,
            't0': self.t0, 't1': self.t1, 'tmax': self.tmax,
        }


@dataclass(frozen=True)
class Grid:
    """
    Uniform collocation grid x_j = j*L/nx (j = 0..nx) and t_n = n*tmax/nt (n = 0..nt).
    D is snapped to the nearest grid points; every check and constant uses the snapped D.
    """
    geometry: DomainGeometry
    nx: int = 128
    nt: int = 200

    def __post_init__(self):
        if self.nx < 4:
            raise GeometryError(f'nx must be at least 4, got {self.nx}')
        if self.nt < 1:
            raise GeometryError(f'nt must be at least 1, got {self.nt}')
        j_lo, j_hi = self.d_indices
        if not (0 < j_lo < j_hi < self.nx):
            raise GeometryError(f'D = [{self.geometry.d_lo}, {self.geometry.d_hi}] collapses on a grid with nx={self.nx}')

    @property
    def x(self):
        return np.linspace(0.0, self.geometry.length, self.nx + 1)

    @property
    def t(self):
        return np.linspace(0.0, self.geometry.tmax, self.nt + 1)

    @property
    def dx(self):
        return self.geometry.length / self.nx

    @property
    def dt(self):
        return self.geometry.tmax / self.nt

    @property
    def shape(self):
        return (self.nt + 1, self.nx + 1)

    @property
    def d_indices(self):
        geom = self.geometry
        j_lo = int(np.rint(geom.d_lo * self.nx / geom.length))
        j_hi = int(np.rint(geom.d_hi * self.nx / geom.length))
        return j_lo, j_hi

    @property
    def d_slice(self):
        j_lo, j_hi = self.d_indices
        return slice(j_lo, j_hi + 1)

    @property
    def d_mask(self):
        mask = np.zeros(self.nx + 1, dtype=bool)
        mask[self.d_slice] = True
        return mask

    @property
    def snapped_d(self):
        j_lo, j_hi = self.d_indices
        return j_lo * self.dx, j_hi * self.dx

    def snapped_geometry(self) -> DomainGeometry:
        d_lo, d_hi = self.snapped_d
        if (d_lo, d_hi) != (self.geometry.d_lo, self.geometry.d_hi):
            logging.debug(f'D snapped from [{self.geometry.d_lo}, {self.geometry.d_hi}] to [{d_lo}, {d_hi}]')
        return self.geometry.with_d(d_lo, d_hi)

    def time_window(self, t0=None, t1=None):
        """boolean mask of the time rows with t0 <= t_n <= t1 (defaults to the geometry window)"""
        t0 = self.geometry.t0 if t0 is None else t0
        t1 = self.geometry.t1 if t1 is None else t1
        eps = 1e-12 * max(self.geometry.tmax, 1.0)
        t = self.t
        return (t >= t0 - eps) & (t <= t1 + eps)

    def time_index(self, time):
        """
        Nearest time row.
        @return: (index, snap distance)
        """
        if time < 0 or time > self.geometry.tmax * (1 + 1e-12):
            raise GeometryError(f'time {time} outside [0, {self.geometry.tmax}]')
        index = int(np.rint(time / self.dt))
        index = min(max(index, 0), self.nt)
        return index, abs(index * self.dt - time)
