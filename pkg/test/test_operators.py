import logging
import numpy as np
import pytest
from scipy.integrate import trapezoid
from NonlocalParabolic import make_problem, parse
from NonlocalParabolic.problem import Discretization
from NonlocalParabolic.expression import ExpressionDomainError
from NonlocalParabolic.field import SpaceTimeField, sup_norm, in_cone
from NonlocalParabolic.operators import ProblemOperators, IntegralCondition, MultipointCondition, etd2_weights
from NonlocalParabolic.operators.operators import _b_weight
from NonlocalParabolic.spectral import DomainGeometry
from NonlocalParabolic.constants import ConditionBounds
from NonlocalParabolic.report import RunReport, validate_report, render_summary
from NonlocalParabolic.utils import set_logging_level
set_logging_level()


def _operators(nt=200, **kwargs):
    return ProblemOperators(make_problem(discretization=Discretization(nt=nt), **kwargs))


def test_bar_s_single_mode():
    operators = _operators()
    grid = operators.grid
    u = operators.bar_S(np.sin(grid.x))
    expected = np.exp(-grid.t)[:, None] * np.sin(grid.x)[None, :]
    assert np.max(np.abs(u.values - expected)) < 1e-10


def test_hat_s_constant_forcing():
    operators = _operators()
    grid = operators.grid
    forcing = SpaceTimeField.from_function(grid, lambda t, x: np.ones_like(t) * np.sin(x))
    u = operators.hat_S(forcing)
    expected = (1 - np.exp(-grid.t))[:, None] * np.sin(grid.x)[None, :]
    assert np.max(np.abs(u.values - expected)) < 1e-6
    assert np.all(u.values[0] == 0)


def _resonant_error(nt):
    operators = _operators(nt)
    grid = operators.grid
    forcing = SpaceTimeField.from_function(grid, lambda t, x: np.exp(-t) * np.sin(x))
    u = operators.hat_S(forcing)
    expected = (grid.t * np.exp(-grid.t))[:, None] * np.sin(grid.x)[None, :]
    return np.max(np.abs(u.values - expected))


def test_hat_s_second_order():
    coarse, fine = _resonant_error(50), _resonant_error(100)
    assert fine < coarse
    assert coarse / fine >= 3.5


def test_etd2_weights():
    lam = np.array([1e-6, 1.0, 100.0, 1e4])
    h = 0.01
    decay, w0, w1 = etd2_weights(lam, h)
    assert np.all(w0 > 0) and np.all(w1 > 0)
    phi1 = -np.expm1(-lam * h) / (lam * h)
    assert np.allclose(w0 + w1, h * phi1, rtol=1e-12)
    # the small-argument series joins the closed form
    below, above = _b_weight(np.array([1e-2 - 1e-9, 1e-2 + 1e-9]))
    assert abs(below - above) < 1e-8
    assert _b_weight(np.array([0.0]))[0] == 0.5


def test_nemytskii_clamps_and_locates():
    operators = _operators(f='u + v', g='log(u)')
    grid = operators.grid
    u = SpaceTimeField.from_function(grid, lambda t, x: -np.sin(x))
    v = SpaceTimeField.from_function(grid, lambda t, x: np.sin(x))
    F = operators.nemytskii(operators.spec.f, u, v)
    assert np.allclose(F.values, v.values)
    with pytest.raises(ExpressionDomainError) as info:
        operators.nemytskii(operators.spec.g, u, v)
    assert 't=' in str(info.value) and 'x=' in str(info.value)


def test_integral_condition():
    operators = _operators()
    grid = operators.grid
    u = SpaceTimeField.constant_in_time(grid, np.sin(grid.x))
    v = SpaceTimeField.from_function(grid, lambda t, x: 2 * t * np.sin(x))
    condition = IntegralCondition('u')
    assert np.allclose(condition.apply(u, v), np.sin(grid.x), atol=1e-14)
    # trapezoid is exact on linear integrands
    condition = IntegralCondition('v', inner=parse('v'), outer=parse('2*u'))
    assert np.allclose(condition.apply(u, v), 2 * np.sin(grid.x), atol=1e-12)
    assert condition.apply(u, v)[0] == 0 and condition.apply(u, v)[-1] == 0


def test_integral_condition_validation():
    geometry = DomainGeometry()
    assert IntegralCondition('u').validate(geometry, (5.0, 5.0)) == []
    condition = IntegralCondition('u', inner=parse('2*u'), bounds=ConditionBounds(q=1.0))
    errors = condition.validate(geometry, (5.0, 5.0))
    assert any('above' in e for e in errors)
    condition = IntegralCondition('u', inner=parse('u + 0.5*v'), bounds=ConditionBounds(p=0.5, q=1.0))
    # v is unbounded relative to u near u = 0
    assert condition.validate(geometry, (5.0, 5.0)) != []
    condition = IntegralCondition('u', outer=parse('u + 1'))
    errors = condition.validate(geometry, (5.0, 5.0))
    assert any('vanish' in e for e in errors)
    assert IntegralCondition('u') == IntegralCondition('u', inner=parse('u'), outer=parse('u'))


def test_multipoint_condition():
    operators = _operators()
    grid = operators.grid
    u = SpaceTimeField.from_function(grid, lambda t, x: t * np.sin(x))
    condition = MultipointCondition('u', (0.5, 0.5), (0.5, 1.0))
    assert np.allclose(condition.apply(u, u), 0.75 * np.sin(grid.x), atol=1e-14)
    assert np.all(MultipointCondition('v').apply(u, u) == 0)
    geometry = DomainGeometry()
    assert condition.validate(geometry, (1.0, 1.0)) == []
    assert MultipointCondition('u', (1.0,), (0.0,)).validate(geometry, (1.0, 1.0)) != []
    assert MultipointCondition('u', (-1.0,), (0.5,)).validate(geometry, (1.0, 1.0)) != []
    assert MultipointCondition('u', (1.0, 2.0), (0.5,)).validate(geometry, (1.0, 1.0)) != []


def test_fixed_point_of_stationary_problem():
    spec = make_problem(
        f='0.5*sin(x)', g='0.25*sin(x)',
        alpha=MultipointCondition('u', (1.0,), (1.0,)),
        beta=MultipointCondition('v', (0.5, 0.5), (0.5, 1.0)),
    )
    operators = ProblemOperators(spec)
    grid = operators.grid
    u = SpaceTimeField.constant_in_time(grid, 0.5 * np.sin(grid.x))
    v = SpaceTimeField.constant_in_time(grid, 0.25 * np.sin(grid.x))
    assert operators.residual(u, v, 'M') < 1e-12
    assert operators.residual(u, v, 'N') < 1e-12
    assert sup_norm(operators.zeros()) == 0
    with pytest.raises(ValueError):
        operators.residual(u, v, 'X')


def _smooth_nonnegative(grid, rng):
    p = int(rng.choice([1, 3]))
    amplitude, omega = rng.uniform(0.1, 2.0), rng.uniform(0.0, 10.0)
    return SpaceTimeField.from_function(grid, lambda t, x: amplitude * (1 + np.cos(omega * t)) * np.sin(x) ** p)


def test_n_matches_its_initial_value():
    operators = _operators(f='3.2*min(5*u, 1) + v', g='u*v')
    grid = operators.grid
    rng = np.random.default_rng(17)
    for _ in range(5):
        u = SpaceTimeField(rng.uniform(0.0, 2.0, grid.shape), grid)
        v = SpaceTimeField(rng.uniform(0.0, 2.0, grid.shape), grid)
        n_u, n_v = operators.N_apply(u, v)
        F, G = operators.forcing(u, v)
        assert sup_norm(n_u - (operators.bar_S(n_u.initial) + operators.hat_S(F))) < 1e-8
        assert sup_norm(n_v - (operators.bar_S(n_v.initial) + operators.hat_S(G))) < 1e-8


def test_integral_condition_bounds():
    bounds = ConditionBounds(p=1.0, q=2.0, P=2.0, Q=3.0)
    condition = IntegralCondition('u', inner=parse('u*(1.5 + 0.5*sin(t*x))'), outer=parse('u*(2 + 1/(1 + u))'),
                                  bounds=bounds)
    assert condition.validate(DomainGeometry(), (2.0, 2.0)) == []
    operators = _operators(alpha=condition)
    grid = operators.grid
    rng = np.random.default_rng(23)
    for _ in range(5):
        u = SpaceTimeField(rng.uniform(0.0, 2.0, grid.shape), grid)
        integral = trapezoid(u.values, grid.t, axis=0)
        alpha = condition.apply(u, u)
        assert np.all(alpha >= bounds.pP * integral - 1e-12)
        assert np.all(alpha <= bounds.qQ * integral + 1e-12)


def test_maps_are_monotone_and_land_in_the_cone():
    operators = _operators(f='2*u + v', g='u + 3*v')
    grid = operators.grid
    rng = np.random.default_rng(29)
    for _ in range(5):
        u, v = _smooth_nonnegative(grid, rng), _smooth_nonnegative(grid, rng)
        u_up = u + _smooth_nonnegative(grid, rng)
        v_up = v + _smooth_nonnegative(grid, rng)
        for which in ('M', 'N'):
            low = operators.apply(which, u, v)
            high = operators.apply(which, u_up, v_up)
            for a, b in zip(low, high):
                assert np.min(b.values - a.values) >= -1e-6, which
                assert in_cone(a, 1e-6).holds, which
                assert in_cone(b, 1e-6).holds, which


def test_multipoint_snap_distance_is_reported(caplog):
    caplog.set_level(logging.INFO)
    spec = make_problem(alpha=MultipointCondition('u', (1.0,), (0.503,)), discretization=Discretization(nt=200))
    ProblemOperators(spec)
    assert 'alpha: time 0.503 snapped to 0.505, distance 0.002' in caplog.text
    snap = spec.snap_report()
    assert len(snap) == 1
    assert snap[0]['condition'] == 'alpha'
    assert snap[0]['snapped_time'] == pytest.approx(0.505)
    assert snap[0]['distance'] == pytest.approx(0.002, abs=1e-12)
    data = RunReport('constants', spec).to_dict()
    validate_report(data)
    assert data['spec']['grid']['snap'] == snap
    assert 'distance 0.002' in render_summary(data)
    assert RunReport('constants', make_problem()).to_dict()['spec']['grid']['snap'] == []


if __name__ == '__main__':
    test_hat_s_second_order()
