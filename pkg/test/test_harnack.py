import time
import numpy as np
import pytest
from scipy.integrate import trapezoid, cumulative_trapezoid
from NonlocalParabolic import make_problem
from NonlocalParabolic.constants import compute_m, compute_c1_c2
from NonlocalParabolic.spectral import (
    DomainGeometry, Grid, project_indicator, integrate_semigroup, evaluate_semigroup_table,
)
from NonlocalParabolic.field import SpaceTimeField, in_cone, harnack_check, floor_functional
from NonlocalParabolic.operators import ProblemOperators
from NonlocalParabolic.utils import set_logging_level
set_logging_level()


def _random_cone_element(operators, rng):
    """S(t) u0 + hat_S(F) with smooth nonnegative u0 and F"""
    grid = operators.grid
    x = grid.x
    p = int(rng.choice([1, 3, 5]))
    u0 = rng.uniform(0.1, 3.0) * np.sin(x) ** p + rng.uniform(0.0, 1.0) * np.sin(x)
    q = int(rng.choice([1, 3]))
    amplitude, omega, phase = rng.uniform(0.0, 5.0), rng.uniform(0.0, 20.0), rng.uniform(0.0, 2 * np.pi)
    forcing = SpaceTimeField.from_function(
        grid, lambda t, s: amplitude * (1 + np.cos(omega * t + phase)) * np.sin(s) ** q)
    return operators.bar_S(u0) + operators.hat_S(forcing)


def test_harnack_property():
    start = time.time()
    spec = make_problem()
    operators = ProblemOperators(spec)
    m = compute_m(spec.geometry).value
    rng = np.random.default_rng(2024)
    for _ in range(100):
        u = _random_cone_element(operators, rng)
        assert in_cone(u, 1e-6).holds
        outcome = harnack_check(u, m, tol=1e-4, cone_tol=1e-6)
        assert outcome.applicable
        assert outcome.holds, outcome
        assert floor_functional(u) > 0
    assert time.time() - start < 60


def test_harnack_single_mode():
    # e^{-t} sin(x): the window minimum e^{-1} floor(u) lies above m floor(u), below floor(u)
    spec = make_problem()
    operators = ProblemOperators(spec)
    m = compute_m(spec.geometry).value
    u = operators.bar_S(np.sin(operators.grid.x))
    assert harnack_check(u, m).holds
    assert not harnack_check(u, 1.0).holds


def _quadrature_c1_c2(geometry, K, n_times=2001):
    """
    Floors over the grid points of D of the time integrals of S(s) chi_D by composite trapezoid rules;
    the double integral is iterated, inner over tau and outer over t.
    """
    grid = Grid(geometry, 128, 1)
    chi = project_indicator(grid.snapped_geometry(), 'D', K)
    s = np.linspace(0.0, geometry.tmax, n_times)
    table = evaluate_semigroup_table(chi, s, grid.x[grid.d_slice])
    c1 = np.min(trapezoid(table, s, axis=0))
    # uniform grid: integral_0^t S(t - tau) dtau = integral_0^t S(s) ds
    inner = cumulative_trapezoid(table, s, axis=0, initial=0.0)
    c2 = np.min(trapezoid(inner, s, axis=0))
    return c1, c2


def test_c1_c2_match_quadrature():
    geometry = DomainGeometry()
    c1, c2 = compute_c1_c2(geometry, K=400, convention='exact')
    reference_c1, reference_c2 = _quadrature_c1_c2(geometry, 400)
    assert c1 == pytest.approx(reference_c1, rel=1e-4)
    assert c2 == pytest.approx(reference_c2, rel=1e-4)


def test_m_bounds_the_window_integral():
    for geometry in (DomainGeometry(), DomainGeometry(length=2.0, d_lo=0.3, d_hi=1.1, t0=0.2, t1=0.8)):
        snapped = Grid(geometry, 128, 1).snapped_geometry()
        m = compute_m(snapped).value
        chi = project_indicator(snapped, 'D', 400)
        x = np.linspace(snapped.d_lo, snapped.d_hi, 401)
        window = trapezoid(integrate_semigroup(chi, snapped.t0, snapped.t1)(x), x)
        assert 0 < m * (snapped.t1 - snapped.t0) * snapped.d_length <= window


if __name__ == '__main__':
    test_harnack_property()
