# Dirichlet sine series and the heat semigroup acting on them
import math
import numpy as np
from dataclasses import dataclass
from scipy.fft import dst
from .geometry import DomainGeometry


class SpectralError(ValueError):
    """Violated precondition of a spectral operation"""


@dataclass(frozen=True, eq=False)
class SineSeries:
    """
    sum_k coeffs[k-1] * sin(k*pi*x/length), k = 1..K
    """
    coeffs: np.ndarray
    length: float = float(np.pi)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        coeffs.flags.writeable = False
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def K(self):
        return len(self.coeffs)

    @property
    def eigenvalues(self):
        return eigenvalues(self.K, self.length)

    def truncate(self, K):
        return SineSeries(self.coeffs[:K], self.length)

    def __add__(self, other):
        assert self.length == other.length
        K = max(self.K, other.K)
        return SineSeries(_pad(self.coeffs, K) + _pad(other.coeffs, K), self.length)

    def __mul__(self, scalar):
        return SineSeries(self.coeffs * float(scalar), self.length)

    __rmul__ = __mul__

    def __call__(self, x):
        return evaluate_series(self, x)

    def __repr__(self):
        return f'SineSeries(K={self.K}, length={self.length:g})'


def _pad(coeffs, K):
    out = np.zeros(K)
    out[:len(coeffs)] = coeffs
    return out


def eigenvalues(K, length=np.pi):
    """lambda_k = (k*pi/length)^2, k = 1..K"""
    k = np.arange(1, K + 1, dtype=float)
    return (k * np.pi / length) ** 2


def default_modes(geometry: DomainGeometry, tolerance=1e-8) -> int:
    """
    Smallest K whose analytic tail bound for the time-integrated indicators is below tolerance.
    The k-th coefficient of an integrated indicator is at most max(T, 1) * 4L^2 / (pi^3 k^3).
    """
    length = geometry.length
    scale = max(geometry.tmax, 1.0)
    return int(math.ceil(math.sqrt(2 * length ** 2 * scale / (math.pi ** 3 * tolerance))))


def tail_bound(K, length=np.pi, scale=1.0):
    """bound of sum_{k>K} 4*scale*L^2/(pi^3 k^3)"""
    return 2 * scale * length ** 2 / (math.pi ** 3 * K ** 2)


def smoothing_modes(length, t_min, cutoff=40.0) -> int:
    """number of modes with lambda_k * t_min <= cutoff; the rest are below exp(-cutoff) relative"""
    assert t_min > 0, t_min
    return int(math.ceil(length / math.pi * math.sqrt(cutoff / t_min))) + 1


def indicator_coefficients(a, b, K, length=np.pi):
    """(2/L) * integral_a^b sin(k*pi*x/L) dx in closed form"""
    k = np.arange(1, K + 1, dtype=float)
    return 2.0 / (k * np.pi) * (np.cos(k * np.pi * a / length) - np.cos(k * np.pi * b / length))


def project_indicator(geometry: DomainGeometry, which: str, K: int) -> SineSeries:
    """
    Exact sine coefficients of the indicator of D or of Omega.
    @which: str, 'D' or 'Omega'
    """
    if K < 1:
        raise SpectralError(f'K must be at least 1, got {K}')
    if which == 'D':
        a, b = geometry.d_lo, geometry.d_hi
    elif which == 'Omega':
        a, b = 0.0, geometry.length
    else:
        raise SpectralError(f'unknown indicator "{which}", expected D or Omega')
    return SineSeries(indicator_coefficients(a, b, K, geometry.length), geometry.length)


def apply_semigroup(s: SineSeries, t: float) -> SineSeries:
    if t < 0:
        raise SpectralError(f'negative time {t}')
    if t == 0:
        return s
    return SineSeries(s.coeffs * np.exp(-s.eigenvalues * t), s.length)


def integrate_semigroup(s: SineSeries, a: float, b: float) -> SineSeries:
    """
    integral_a^b S(tau) s dtau, mode k gets a_k (e^{-lambda a} - e^{-lambda b}) / lambda
    """
    if a < 0:
        raise SpectralError(f'negative time {a}')
    if a > b:
        raise SpectralError(f'reversed integration bounds [{a}, {b}]')
    lam = s.eigenvalues
    weights = np.exp(-lam * a) * -np.expm1(-lam * (b - a)) / lam
    return SineSeries(s.coeffs * weights, s.length)


def double_integral_weights(lam, t0, t1, tmax, convention='exact'):
    """
    Mode weights of integral_{t0}^{tmax} integral_{t0}^{min(t, t1)} e^{-lambda (t - tau)} dtau dt.
    @convention: 'exact' for the closed form; 'published' for the series e^{-lambda h}/lambda^2, h = t1 - t0,
        which matches the exact form on the first mode of the worked [0, pi] example only
    """
    h = t1 - t0
    if convention == 'exact':
        return h / lam + np.expm1(-lam * h) * np.exp(-lam * (tmax - t1)) / lam ** 2
    if convention == 'published':
        return np.exp(-lam * h) / lam ** 2
    raise SpectralError(f'unknown double integral convention "{convention}"')


def double_integrate_semigroup(s: SineSeries, t0, t1, tmax, convention='exact') -> SineSeries:
    if not (0 <= t0 <= t1 <= tmax):
        raise SpectralError(f'need 0 <= t0 <= t1 <= tmax, got {t0}, {t1}, {tmax}')
    return SineSeries(s.coeffs * double_integral_weights(s.eigenvalues, t0, t1, tmax, convention), s.length)


_CHUNK = 512


def evaluate_series(s: SineSeries, x):
    """
    Pointwise value sum_k a_k sin(k*pi*x/L); float for scalar x, array otherwise.
    """
    x_array = np.asarray(x, dtype=float)
    eps = 1e-12 * s.length
    if np.any(x_array < -eps) or np.any(x_array > s.length + eps):
        raise SpectralError(f'x outside [0, {s.length}]')
    flat = x_array.reshape(-1)
    k = np.arange(1, s.K + 1, dtype=float)
    out = np.empty(len(flat))
    for start in range(0, len(flat), _CHUNK):
        block = flat[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.sin(np.outer(block, k) * (np.pi / s.length)) @ s.coeffs
    if x_array.ndim == 0:
        return float(out[0])
    return out.reshape(x_array.shape)


def evaluate_semigroup_table(s: SineSeries, t, x):
    """
    Table of (S(t_i) s)(x_j) for arrays t and x, shape (len(t), len(x)).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(t < 0):
        raise SpectralError('negative time')
    decay = np.exp(-np.outer(t, s.eigenvalues)) * s.coeffs
    k = np.arange(1, s.K + 1, dtype=float)
    basis = np.sin(np.outer(k, x) * (np.pi / s.length))
    return decay @ basis


def synthesize_rows(coeffs, nx):
    """
    Grid values x_j = j*L/nx (j = 0..nx) of coefficient rows; the last axis holds the K modes.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    K = coeffs.shape[-1]
    if K > nx - 1:
        raise SpectralError(f'K = {K} needs nx > K, got nx = {nx}')
    padded = np.zeros(coeffs.shape[:-1] + (nx - 1,))
    padded[..., :K] = coeffs
    values = np.zeros(coeffs.shape[:-1] + (nx + 1,))
    # 端点恒为零
    values[..., 1:nx] = 0.5 * dst(padded, type=1, axis=-1)
    return values


def analyze_rows(values, K):
    """
    Discrete sine coefficients a_k = (2/nx) sum_j v_j sin(k*pi*j/nx) of grid rows, k = 1..K.
    """
    values = np.asarray(values, dtype=float)
    nx = values.shape[-1] - 1
    if K >= nx:
        raise SpectralError(f'K = {K} must be below nx = {nx}')
    if K < 1:
        raise SpectralError(f'K must be at least 1, got {K}')
    return dst(values[..., 1:nx], type=1, axis=-1)[..., :K] / nx


def synthesize_on_grid(s: SineSeries, nx: int):
    return synthesize_rows(s.coeffs, nx)


def analyze_from_grid(values, K: int, length=np.pi) -> SineSeries:
    values = np.asarray(values, dtype=float)
    assert values.ndim == 1, values.shape
    return SineSeries(analyze_rows(values, K), length)
