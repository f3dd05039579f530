# Optimality scan of the sub-interval D = [b, L - b]
import logging
import numpy as np
from dataclasses import dataclass, replace
from ..spectral import DomainGeometry, Grid
from .harnack import compute_m, compute_c1_c2, DEFAULT_T_GIBBS


@dataclass
class ScanRow:
    b: float
    b_snapped: float
    m: float
    c1: float
    c2: float
    ratio: float  # (1 - c1) / (c2 m)

    def to_dict(self):
        return {k: float(v) for k, v in self.__dict__.items()}


def scan_b(geometry: DomainGeometry, b_values=None, steps=17, nx=128, K=None, convention='exact',
           t_gibbs=DEFAULT_T_GIBBS):
    """
    Scan symmetric sub-intervals D = [b, L - b] and the ratio (1 - c1) / (c2 m).
    @b_values: iterable or None, defaults to `steps` points of [0.05 L, 0.45 L]
    @return: (rows, index of the minimizing row)
    """
    length = geometry.length
    if b_values is None:
        b_values = np.linspace(0.05 * length, 0.45 * length, steps)
    rows = []
    for b in b_values:
        geom = replace(geometry, d_lo=float(b), d_hi=float(length - b))
        snapped = Grid(geom, nx, 1).snapped_geometry()
        m = compute_m(snapped, K=K, nx=nx, t_gibbs=t_gibbs).value
        c1, c2 = compute_c1_c2(snapped, K, convention, nx)
        ratio = (1 - c1) / (c2 * m)
        logging.debug(f'scan b={b:.6g}: m={m:.6g} c1={c1:.6g} c2={c2:.6g} ratio={ratio:.6g}')
        rows.append(ScanRow(float(b), snapped.d_lo, m, c1, c2, ratio))
    best = int(np.argmin([row.ratio for row in rows]))
    logging.info(f'scan minimum at b={rows[best].b:.6g} (ratio {rows[best].ratio:.6g})')
    return rows, best


def write_scan_csv(path, rows):
    data = np.array([[row.b, row.m, row.c1, row.c2, row.ratio] for row in rows])
    np.savetxt(path, data, delimiter=',', header='b,m,c1,c2,ratio', comments='', fmt='%.17g')
