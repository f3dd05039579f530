# Harnack-type constants m, c1, c2, C1, C2 and the thresholds derived from them
import logging
import numpy as np
from dataclasses import dataclass, field, asdict
from scipy.optimize import minimize_scalar
from ..spectral import (
    DomainGeometry, Grid, SineSeries, project_indicator, apply_semigroup, integrate_semigroup,
    double_integrate_semigroup, evaluate_series, evaluate_semigroup_table, default_modes, tail_bound,
    smoothing_modes,
)
from ..utils import report_scalar

DEFAULT_T_GIBBS = 0.01
C_OMEGA_POINTS = 513


class ConstantsError(ValueError):
    """A constant could not be resolved to the requested accuracy"""


@dataclass(frozen=True)
class ConditionBounds:
    """
    Bounds p u <= g(u, v) <= q u and P w <= G(w) <= Q w of one integral nonlocal condition.
    """
    p: float = 1.0
    q: float = 1.0
    P: float = 1.0
    Q: float = 1.0

    def __post_init__(self):
        for name in ('p', 'q', 'P', 'Q'):
            if not getattr(self, name) > 0:
                raise ValueError(f'{name} must be positive, got {getattr(self, name)}')

    @property
    def pP(self):
        return self.p * self.P

    @property
    def qQ(self):
        return self.q * self.Q


@dataclass
class MResult:
    value: float
    minimizer: tuple  # (t, x)
    flagged: bool
    levels: int
    modes: int
    est_error: float


@dataclass
class Thresholds:
    sup_threshold: float
    inf_threshold: float
    sup_feasible: bool  # qQ C1 < 1
    inf_vacuous: bool  # pP c1 > 1, the lower-bound condition holds for any f


@dataclass
class ConstantsBundle:
    # @m, c1, c2, C1, C2: the constants, c2/C2 in the active double integral convention
    # @c2_exact, C2_exact: the double integrals in closed form, whatever the convention
    # @e_bar, e_under: non-existence constants per component
    m: float
    c1: float
    c2: float
    C1: float
    C2: float
    c2_exact: float
    C2_exact: float
    e_bar: tuple = None
    e_under: tuple = None
    thresholds: tuple = None
    K_used: int = None
    m_modes: int = None
    grid_used: dict = None
    est_error: dict = field(default_factory=dict)
    m_flagged: bool = False
    m_minimizer: tuple = None
    convention: str = 'exact'
    geometry: DomainGeometry = None

    def to_dict(self):
        result = {
            'm': report_scalar(self.m), 'c1': report_scalar(self.c1), 'c2': report_scalar(self.c2),
            'C1': report_scalar(self.C1), 'C2': report_scalar(self.C2),
            'c2_exact': report_scalar(self.c2_exact), 'C2_exact': report_scalar(self.C2_exact),
            'e_bar': [report_scalar(e, 3) for e in self.e_bar] if self.e_bar else None,
            'e_under': [report_scalar(e, 3) for e in self.e_under] if self.e_under else None,
            'thresholds': [
                {
                    'sup_threshold': report_scalar(t.sup_threshold),
                    'inf_threshold': report_scalar(t.inf_threshold),
                    'sup_feasible': t.sup_feasible,
                    'inf_vacuous': t.inf_vacuous,
                } for t in self.thresholds
            ] if self.thresholds else None,
            'K_used': self.K_used,
            'm_modes': self.m_modes,
            'grid_used': self.grid_used,
            'est_error': {k: float(v) for k, v in self.est_error.items()},
            'm_flagged': self.m_flagged,
            'm_minimizer': None if self.m_minimizer is None else [float(c) for c in self.m_minimizer],
            'convention': self.convention,
            'geometry': None if self.geometry is None else self.geometry.to_dict(),
        }
        return result

    @classmethod
    def from_dict(cls, data):
        """inverse of to_dict, used by the constants cache"""
        value = lambda key: None if data[key] is None else float(data[key]['value'])
        thresholds = None
        if data.get('thresholds'):
            thresholds = tuple(
                Thresholds(float(t['sup_threshold']['value']), float(t['inf_threshold']['value']),
                           t['sup_feasible'], t['inf_vacuous'])
                for t in data['thresholds']
            )
        return cls(
            m=value('m'), c1=value('c1'), c2=value('c2'), C1=value('C1'), C2=value('C2'),
            c2_exact=value('c2_exact'), C2_exact=value('C2_exact'),
            e_bar=tuple(float(e['value']) for e in data['e_bar']) if data.get('e_bar') else None,
            e_under=tuple(float(e['value']) for e in data['e_under']) if data.get('e_under') else None,
            thresholds=thresholds,
            K_used=data['K_used'], m_modes=data['m_modes'], grid_used=data['grid_used'],
            est_error=dict(data['est_error']), m_flagged=data['m_flagged'],
            m_minimizer=tuple(data['m_minimizer']) if data['m_minimizer'] else None,
            convention=data['convention'],
            geometry=DomainGeometry(**data['geometry']) if data.get('geometry') else None,
        )


def _d_points(geometry, nx):
    grid = Grid(geometry, nx, 1)
    return grid.snapped_geometry(), grid.x[grid.d_slice]


def _polish(func, points, values, lower, upper, sign=1.0):
    """
    Refine the extremum of func near the best sample with a bounded golden-section search.
    sign = 1 minimizes, sign = -1 maximizes. Returns (value, location).
    """
    index = int(np.argmin(sign * values))
    best, where = float(values[index]), float(points[index])
    if len(points) < 2:
        return best, where
    a = float(points[max(index - 1, 0)])
    b = float(points[min(index + 1, len(points) - 1)])
    a, b = max(a, lower), min(b, upper)
    if b <= a:
        return best, where
    result = minimize_scalar(lambda s: sign * func(s), bounds=(a, b), method='bounded', options={'xatol': 1e-10})
    polished = sign * float(result.fun)
    if sign * polished < sign * best:
        return polished, float(result.x)
    return best, where


def _series_min_on_d(series: SineSeries, geometry, x_points):
    values = evaluate_series(series, x_points)
    return _polish(lambda s: evaluate_series(series, s), x_points, values, geometry.d_lo, geometry.d_hi)


def _series_max_on_omega(series: SineSeries, geometry, n_points=C_OMEGA_POINTS):
    x_points = np.linspace(0.0, geometry.length, n_points)
    values = np.abs(evaluate_series(series, x_points))
    return _polish(lambda s: abs(evaluate_series(series, s)), x_points, values, 0.0, geometry.length, sign=-1.0)


def _row_min(chi, t, x_points, K):
    series = chi.truncate(min(K, smoothing_modes(chi.length, t)))
    return float(np.min(evaluate_series(apply_semigroup(series, t), x_points)))


def compute_m(geometry: DomainGeometry, K=None, nx=128, t_gibbs=DEFAULT_T_GIBBS, rel_tol=1e-3,
              max_levels=8, n_times=17) -> MResult:
    """
    m(t0, t1) = min over [t0, t1] x D of S(t) chi_D.
    The time axis starts at max(t0, t_gibbs) and is refined by doubling until two levels agree to rel_tol;
    the best cell is then polished in t and in x. For t0 < t_gibbs the minimum is compared against the rows
    at t_gibbs and t_gibbs / 2, and flagged when either is smaller.
    @raise ConstantsError: refinement did not settle within max_levels
    """
    geometry, x_points = _d_points(geometry, nx)
    K = default_modes(geometry) if K is None else K
    t_lo = max(geometry.t0, min(t_gibbs, geometry.t1))
    modes = min(K, smoothing_modes(geometry.length, t_lo)) if t_lo > 0 else K
    chi = project_indicator(geometry, 'D', K)
    series = chi.truncate(modes)

    # 时间方向逐级加密, 直到两级结果一致
    previous = None
    delta = None
    for level in range(max_levels):
        count = (n_times - 1) * 2 ** level + 1
        times = np.linspace(t_lo, geometry.t1, count) if geometry.t1 > t_lo else np.array([t_lo])
        table = evaluate_semigroup_table(series, times, x_points)
        index = np.unravel_index(np.argmin(table), table.shape)
        current = float(table[index])
        logging.debug(f'm refinement level {level}: {count} times, min {current:.12g}')
        if previous is not None:
            delta = abs(current - previous)
            if delta <= rel_tol * abs(current):
                break
        previous = current
    else:
        raise ConstantsError(f'm did not settle to relative {rel_tol} after {max_levels} levels')

    n, j = index
    t_star, x_star = float(times[n]), float(x_points[j])
    value = current
    if len(times) > 1:
        column = table[:, j]
        value, t_star = _polish(lambda s: evaluate_series(apply_semigroup(series, s), x_star),
                                times, column, t_lo, geometry.t1)
    evolved = apply_semigroup(series, t_star)
    polished, x_polished = _series_min_on_d(evolved, geometry, x_points)
    if polished < value:
        value, x_star = polished, x_polished

    flagged = False
    if geometry.t0 < t_lo:
        early = min(_row_min(chi, t_gibbs, x_points, K), _row_min(chi, t_gibbs / 2, x_points, K))
        if early < value:
            logging.warning(f'm: early-time row minimum {early:.6g} below the grid minimum {value:.6g}, flagged')
            value, flagged = early, True

    doubled = project_indicator(geometry, 'D', 2 * modes)
    mode_delta = abs(evaluate_series(apply_semigroup(doubled, t_star), x_star) - evaluate_series(evolved, x_star))
    est_error = (delta or 0.0) + mode_delta + float(np.exp(-40.0))
    return MResult(value, (t_star, x_star), flagged, level + 1, modes, est_error)


def _c_pair(geometry, K, convention, x_points):
    chi = project_indicator(geometry, 'D', K)
    c1, _ = _series_min_on_d(integrate_semigroup(chi, 0.0, geometry.tmax), geometry, x_points)
    c2_series = double_integrate_semigroup(chi, geometry.t0, geometry.t1, geometry.tmax, convention)
    c2, _ = _series_min_on_d(c2_series, geometry, x_points)
    return c1, c2


def _C_pair(geometry, K, convention):
    chi = project_indicator(geometry, 'Omega', K)
    C1, _ = _series_max_on_omega(integrate_semigroup(chi, 0.0, geometry.tmax), geometry)
    C2_series = double_integrate_semigroup(chi, 0.0, geometry.tmax, geometry.tmax, convention)
    C2, _ = _series_max_on_omega(C2_series, geometry)
    return C1, C2


def compute_c1_c2(geometry: DomainGeometry, K=None, convention='exact', nx=128, errors=None):
    """
    c1 = floor of integral_0^tmax S(tau) chi_D dtau,
    c2 = floor of integral_t0^tmax integral_t0^min(t, t1) S(t - tau) chi_D dtau dt.
    @errors: dict or None, receives est_error entries for c1 and c2 when given
    """
    geometry, x_points = _d_points(geometry, nx)
    K = default_modes(geometry) if K is None else K
    c1, c2 = _c_pair(geometry, K, convention, x_points)
    if errors is not None:
        c1_2K, c2_2K = _c_pair(geometry, 2 * K, convention, x_points)
        tail = tail_bound(K, geometry.length)
        errors['c1'] = abs(c1 - c1_2K) + tail
        errors['c2'] = abs(c2 - c2_2K) + tail * geometry.tmax
    return c1, c2


def compute_C1_C2(geometry: DomainGeometry, K=None, convention='exact', errors=None):
    """
    C1 = sup over Omega of integral_0^tmax S(tau) chi_Omega dtau,
    C2 = sup over Omega of integral_0^tmax integral_0^t S(tau) chi_Omega dtau dt.
    """
    K = default_modes(geometry) if K is None else K
    C1, C2 = _C_pair(geometry, K, convention)
    if errors is not None:
        C1_2K, C2_2K = _C_pair(geometry, 2 * K, convention)
        tail = tail_bound(K, geometry.length)
        errors['C1'] = abs(C1 - C1_2K) + tail
        errors['C2'] = abs(C2 - C2_2K) + tail * geometry.tmax
    return C1, C2


def nonexistence_constants(c1, c2, C1, C2, m, bounds: ConditionBounds, tmax):
    """
    @return: (e_bar, e_under) of one component
        e_bar = max((1 - qQ C1) / (qQ C2 + C1), (1 - qQ tmax) / C1)
        e_under = ((pP)^-1 - c1) / (m c2)
    """
    assert m > 0, m
    qQ, pP = bounds.qQ, bounds.pP
    e_bar = max((1 - qQ * C1) / (qQ * C2 + C1), (1 - qQ * tmax) / C1)
    e_under = (1 / pP - c1) / (m * c2)
    return e_bar, e_under


def thresholds(c1, c2, C1, C2, bounds: ConditionBounds) -> Thresholds:
    """
    f^R <= sup_threshold and f_{r,R} > inf_threshold rearrange the two existence inequalities.
    """
    qQ, pP = bounds.qQ, bounds.pP
    sup_threshold = (1 - qQ * C1) / (qQ * C2 + C1)
    inf_threshold = (1 / pP - c1) / c2
    result = Thresholds(sup_threshold, inf_threshold, qQ * C1 < 1, pP * c1 > 1)
    if not result.sup_feasible:
        logging.warning(f'qQ*C1 = {qQ * C1:.6g} >= 1: no nonlinearity meets the upper bound condition')
    if result.inf_vacuous:
        logging.info(f'pP*c1 = {pP * c1:.6g} > 1: the lower bound condition holds for every f')
    return result


def compute_constants(geometry: DomainGeometry, nx=128, K=None, convention='exact', t_gibbs=DEFAULT_T_GIBBS,
                      bounds=(ConditionBounds(), ConditionBounds()), estimate_errors=True) -> ConstantsBundle:
    """
    All constants for one geometry, D snapped to the grid with nx intervals.
    @bounds: pair of ConditionBounds (alpha, beta) for the thresholds and non-existence constants
    """
    snapped = Grid(geometry, nx, 1).snapped_geometry()
    K = default_modes(snapped) if K is None else K
    if convention == 'published':
        logging.warning('double integrals use the published series convention; exact values are reported alongside')
    errors = {} if estimate_errors else None
    m = compute_m(snapped, K=K, nx=nx, t_gibbs=t_gibbs)
    c1, c2 = compute_c1_c2(snapped, K, convention, nx, errors)
    C1, C2 = compute_C1_C2(snapped, K, convention, errors)
    if convention == 'exact':
        c2_exact, C2_exact = c2, C2
    else:
        c2_exact = compute_c1_c2(snapped, K, 'exact', nx)[1]
        C2_exact = compute_C1_C2(snapped, K, 'exact')[1]
    if errors is not None:
        errors['m'] = m.est_error
    pairs = [nonexistence_constants(c1, c2, C1, C2, m.value, b, snapped.tmax) for b in bounds]
    bundle = ConstantsBundle(
        m=m.value, c1=c1, c2=c2, C1=C1, C2=C2, c2_exact=c2_exact, C2_exact=C2_exact,
        e_bar=tuple(p[0] for p in pairs), e_under=tuple(p[1] for p in pairs),
        thresholds=tuple(thresholds(c1, c2, C1, C2, b) for b in bounds),
        K_used=K, m_modes=m.modes, grid_used={'nx': nx, 'm_levels': m.levels, 'omega_points': C_OMEGA_POINTS},
        est_error=errors or {}, m_flagged=m.flagged, m_minimizer=m.minimizer,
        convention=convention, geometry=snapped,
    )
    logging.info(f'constants m={m.value:.4f} c1={c1:.4f} c2={c2:.4f} C1={C1:.4f} C2={C2:.4f} ({convention})')
    return bundle
