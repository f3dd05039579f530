# Nemytskii operators, the semigroup maps bar_S / hat_S and the fixed point maps M, N
import math
import logging
import numpy as np
from ..expression import Expression, evaluate, ExpressionDomainError
from ..field import SpaceTimeField, sup_norm
from ..spectral import analyze_rows, synthesize_rows, eigenvalues


def _b_weight(z):
    """
    B(z) = (1 - e^{-z} (1 + z)) / z^2, by its Taylor series sum_{n>=2} (-1)^n (n - 1) / n! z^(n-2) for small z
    """
    z = np.asarray(z, dtype=float)
    small = z < 1e-2
    out = np.empty_like(z)
    zs = z[small]
    series = np.zeros_like(zs)
    for n in range(2, 9):
        series += (-1) ** n * (n - 1) / math.factorial(n) * zs ** (n - 2)
    out[small] = series
    zl = z[~small]
    out[~small] = (1 - np.exp(-zl) * (1 + zl)) / zl ** 2
    return out


def etd2_weights(lam, h):
    """
    Per-mode step weights of w' = -lam w + f with f linear on each step:
    w_{n+1} = decay w_n + w0 f_n + w1 f_{n+1}
    """
    z = lam * h
    decay = np.exp(-z)
    phi1 = -np.expm1(-z) / z
    b = _b_weight(z)
    return decay, h * b, h * (phi1 - b)


class ProblemOperators:
    """
    The operators of one ProblemSpec on its grid with K sine modes.
    """

    def __init__(self, spec, K=None):
        """
        @spec: ProblemSpec
        @K: int or None, sine modes of the semigroup maps, default spec.discretization.K
        """
        self.spec = spec
        self.grid = spec.grid
        self.K = spec.discretization.K if K is None else K
        assert 1 <= self.K <= self.grid.nx - 1, self.K
        self.lam = eigenvalues(self.K, self.grid.geometry.length)
        self.decay, self.w0, self.w1 = etd2_weights(self.lam, self.grid.dt)
        self._t, self._x = np.meshgrid(self.grid.t, self.grid.x, indexing='ij')
        for entry in spec.snap_report():
            # 多点条件的时间对齐到网格行
            logging.info(f'{entry["condition"]}: time {entry["time"]:g} snapped to {entry["snapped_time"]:g}, '
                         f'distance {entry["distance"]:.3g}')

    def nemytskii(self, e: Expression, u: SpaceTimeField, v: SpaceTimeField) -> SpaceTimeField:
        """
        (t, x) -> e(t, x, max(u, 0), max(v, 0)) on the grid
        """
        assert u.values.shape == v.values.shape == self.grid.shape
        try:
            values = evaluate(e, t=self._t, x=self._x, u=np.maximum(u.values, 0.0), v=np.maximum(v.values, 0.0))
        except ExpressionDomainError as error:
            if error.index is not None and len(error.index) == 2:
                n, j = error.index
                raise ExpressionDomainError(f'{error} (t={self.grid.t[n]:.6g}, x={self.grid.x[j]:.6g})') from error
            raise
        return SpaceTimeField(values, self.grid)

    def bar_S(self, u0) -> SpaceTimeField:
        """rows S(t_n) u0"""
        coeffs = analyze_rows(np.asarray(u0, dtype=float), self.K)
        rows = np.exp(-np.outer(self.grid.t, self.lam)) * coeffs
        return SpaceTimeField(synthesize_rows(rows, self.grid.nx), self.grid)

    def hat_S(self, forcing: SpaceTimeField) -> SpaceTimeField:
        """
        rows integral_0^{t_n} S(t_n - s) forcing(s) ds, second order exponential integrator
        """
        coeffs = analyze_rows(forcing.values, self.K)
        w = np.zeros_like(coeffs)
        for n in range(self.grid.nt):
            w[n + 1] = self.decay * w[n] + self.w0 * coeffs[n] + self.w1 * coeffs[n + 1]
        return SpaceTimeField(synthesize_rows(w, self.grid.nx), self.grid)

    def alpha_apply(self, condition, u: SpaceTimeField, v: SpaceTimeField):
        return condition.apply(u, v)

    def forcing(self, u, v):
        return self.nemytskii(self.spec.f, u, v), self.nemytskii(self.spec.g, u, v)

    def M_apply(self, u: SpaceTimeField, v: SpaceTimeField):
        """M(u, v) = (bar_S(alpha(u, v)) + hat_S(F(u, v)), bar_S(beta(u, v)) + hat_S(G(u, v)))"""
        F, G = self.forcing(u, v)
        return (self.bar_S(self.alpha_apply(self.spec.alpha, u, v)) + self.hat_S(F),
                self.bar_S(self.alpha_apply(self.spec.beta, u, v)) + self.hat_S(G))

    def N_apply(self, u: SpaceTimeField, v: SpaceTimeField):
        """
        N(u, v): the nonlocal maps act on the mild trajectories started from u(0), v(0)
        u_bar = bar_S(u(0)) + hat_S(F(u, v)), v_bar likewise,
        N(u, v) = (bar_S(alpha(u_bar, v_bar)) + hat_S(F(u, v)), bar_S(beta(u_bar, v_bar)) + hat_S(G(u, v)))
        """
        F, G = self.forcing(u, v)
        hat_F, hat_G = self.hat_S(F), self.hat_S(G)
        u_bar = self.bar_S(u.initial) + hat_F
        v_bar = self.bar_S(v.initial) + hat_G
        return (self.bar_S(self.alpha_apply(self.spec.alpha, u_bar, v_bar)) + hat_F,
                self.bar_S(self.alpha_apply(self.spec.beta, u_bar, v_bar)) + hat_G)

    def apply(self, which, u, v):
        if which == 'M':
            return self.M_apply(u, v)
        if which == 'N':
            return self.N_apply(u, v)
        raise ValueError(f'unknown map "{which}", expected M or N')

    def residual(self, u: SpaceTimeField, v: SpaceTimeField, which='M') -> float:
        """max of sup_norm(map(u, v) - (u, v)) over the two components"""
        mu, mv = self.apply(which, u, v)
        return max(sup_norm(mu - u), sup_norm(mv - v))

    def zeros(self):
        return SpaceTimeField.zeros(self.grid)
