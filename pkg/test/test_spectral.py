import math
import numpy as np
import pytest
from scipy import integrate
from NonlocalParabolic.spectral import (
    DomainGeometry, Grid, GeometryError, SineSeries, SpectralError, eigenvalues, default_modes, tail_bound,
    indicator_coefficients, project_indicator, apply_semigroup, integrate_semigroup, double_integral_weights,
    double_integrate_semigroup, evaluate_series, evaluate_semigroup_table, synthesize_rows, analyze_rows,
    analyze_from_grid, synthesize_on_grid,
)
from NonlocalParabolic.utils import set_logging_level
set_logging_level()


def test_geometry_validation():
    geometry = DomainGeometry()
    assert geometry.d_length == pytest.approx(math.pi / 2)
    with pytest.raises(GeometryError):
        DomainGeometry(d_lo=2.0, d_hi=1.0)
    with pytest.raises(GeometryError):
        DomainGeometry(t0=0.5, t1=0.5)
    with pytest.raises(GeometryError):
        DomainGeometry(t1=2.0, tmax=1.0)
    with pytest.raises(GeometryError):
        Grid(geometry, nx=2)
    with pytest.raises(GeometryError):
        Grid(DomainGeometry(d_lo=1.0, d_hi=1.1), nx=4)


def test_grid_snapping():
    grid = Grid(DomainGeometry(), nx=128, nt=200)
    assert grid.d_indices == (32, 96)
    assert grid.snapped_d == pytest.approx((math.pi / 4, 3 * math.pi / 4))
    grid = Grid(DomainGeometry(d_lo=0.8, d_hi=2.3), nx=10)
    j_lo, j_hi = grid.d_indices
    assert (j_lo, j_hi) == (3, 7)
    assert grid.snapped_geometry().d_lo == pytest.approx(3 * math.pi / 10)
    assert grid.time_index(0.5)[0] == 100
    window = Grid(DomainGeometry(t0=0.25, t1=0.75), nx=8, nt=4).time_window()
    assert list(window) == [False, True, True, True, False]


def test_indicator_coefficients_match_quadrature():
    geometry = DomainGeometry()
    coeffs = project_indicator(geometry, 'D', 12).coeffs
    for k in range(1, 13):
        reference, _ = integrate.quad(lambda x: math.sin(k * x), math.pi / 4, 3 * math.pi / 4)
        assert coeffs[k - 1] == pytest.approx(2 / math.pi * reference, abs=1e-12)
    omega = project_indicator(geometry, 'Omega', 4).coeffs
    assert omega == pytest.approx([4 / math.pi, 0.0, 4 / (3 * math.pi), 0.0], abs=1e-12)
    with pytest.raises(SpectralError):
        project_indicator(geometry, 'E', 4)


def test_single_mode_decay():
    s = SineSeries([1.0])
    x = np.linspace(0, math.pi, 33)
    for t in (0.0, 0.1, 0.5, 1.0, 3.0):
        assert np.max(np.abs(apply_semigroup(s, t)(x) - math.exp(-t) * np.sin(x))) < 1e-12
    with pytest.raises(SpectralError):
        apply_semigroup(s, -0.1)


def test_semigroup_law():
    rng = np.random.default_rng(3)
    s = SineSeries(rng.normal(size=64))
    for a, b in ((0.1, 0.2), (0.0, 0.7), (0.33, 1.5)):
        left = apply_semigroup(apply_semigroup(s, a), b).coeffs
        right = apply_semigroup(s, a + b).coeffs
        assert np.max(np.abs(left - right)) < 1e-12


def test_integrate_semigroup():
    s = SineSeries([0.0, 1.0])
    lam = 4.0
    result = integrate_semigroup(s, 0.2, 0.9)
    assert result.coeffs[1] == pytest.approx((math.exp(-lam * 0.2) - math.exp(-lam * 0.9)) / lam, rel=1e-14)
    assert integrate_semigroup(s, 0.5, 0.5).coeffs[1] == 0.0
    with pytest.raises(SpectralError):
        integrate_semigroup(s, 0.9, 0.2)


def test_double_integral_weights():
    t0, t1, tmax = 0.0, 0.6, 1.0
    for lam in (1.0, 4.0, 25.0):
        reference, _ = integrate.dblquad(lambda tau, t: math.exp(-lam * (t - tau)), t0, tmax,
                                         lambda t: t0, lambda t: min(t, t1))
        assert double_integral_weights(np.array([lam]), t0, t1, tmax)[0] == pytest.approx(reference, rel=1e-8)
    assert double_integral_weights(np.array([1.0]), 0.0, 1.0, 1.0, 'published')[0] == pytest.approx(math.exp(-1))
    with pytest.raises(SpectralError):
        double_integral_weights(np.array([1.0]), 0.0, 1.0, 1.0, 'other')
    with pytest.raises(SpectralError):
        double_integrate_semigroup(SineSeries([1.0]), 0.5, 0.2, 1.0)


def test_evaluate_series():
    s = SineSeries([1.0, 0.5])
    assert evaluate_series(s, math.pi / 2) == pytest.approx(1.0)
    assert isinstance(evaluate_series(s, 0.3), float)
    table = evaluate_semigroup_table(s, [0.0, 1.0], [math.pi / 2, math.pi / 4])
    assert table.shape == (2, 2)
    assert table[1, 0] == pytest.approx(math.exp(-1))
    with pytest.raises(SpectralError):
        evaluate_series(s, 4.0)
    assert (s + SineSeries([0.0, 0.0, 1.0])).K == 3
    assert (2 * s).coeffs[1] == 1.0


def test_grid_transforms():
    nx = 32
    x = np.linspace(0, math.pi, nx + 1)
    values = 2 * np.sin(x) - 0.5 * np.sin(5 * x)
    coeffs = analyze_rows(values, nx - 1)
    expected = np.zeros(nx - 1)
    expected[0], expected[4] = 2.0, -0.5
    assert np.max(np.abs(coeffs - expected)) < 1e-12
    assert np.max(np.abs(synthesize_rows(coeffs, nx) - values)) < 1e-12
    series = analyze_from_grid(values, 8)
    assert np.max(np.abs(synthesize_on_grid(series, nx) - values)) < 1e-12
    with pytest.raises(SpectralError):
        analyze_rows(values, nx)
    with pytest.raises(SpectralError):
        synthesize_rows(np.ones(nx), nx)


def test_default_modes():
    geometry = DomainGeometry()
    K = default_modes(geometry)
    assert 7900 < K < 8100
    assert tail_bound(K, geometry.length) <= 1e-8
    assert eigenvalues(3) == pytest.approx([1.0, 4.0, 9.0])
    assert indicator_coefficients(0.0, math.pi, 2)[1] == pytest.approx(0.0, abs=1e-15)


def test_semigroup_positive_and_contractive():
    geometry = DomainGeometry()
    x = np.linspace(0, math.pi, 201)
    for which in ('D', 'Omega'):
        chi = project_indicator(geometry, which, 400)
        previous = 1.0
        for t in (0.01, 0.05, 0.1, 0.5, 1.0, 2.0):
            values = apply_semigroup(chi, t)(x)
            assert np.min(values) >= -1e-12, (which, t)
            assert np.max(values) <= previous + 1e-12, (which, t)
            previous = np.max(values)


def test_evolved_indicator_values():
    geometry = DomainGeometry()
    # (2/pi) e^{-1} from mode 1, the mode 3 term shifts the fifth digit
    chi_d = project_indicator(geometry, 'D', 200)
    assert apply_semigroup(chi_d, 1.0)(math.pi / 4) == pytest.approx(0.23417, abs=1e-4)
    chi_omega = project_indicator(geometry, 'Omega', 4001)
    assert evaluate_series(chi_omega, math.pi / 2) == pytest.approx(1.0, abs=1e-3)


def test_indicator_on_other_intervals():
    for d_lo, d_hi in ((0.5, 1.5), (0.3, 1.1)):
        geometry = DomainGeometry(length=2.0, d_lo=d_lo, d_hi=d_hi)
        coeffs = project_indicator(geometry, 'D', 8).coeffs
        for k in range(1, 9):
            reference, _ = integrate.quad(lambda x: math.sin(k * math.pi * x / 2), d_lo, d_hi)
            # 2 / L = 1
            assert coeffs[k - 1] == pytest.approx(reference, abs=1e-10)
    # even modes vanish only for D centred in Omega
    centred = project_indicator(DomainGeometry(length=2.0, d_lo=0.5, d_hi=1.5), 'D', 2).coeffs
    shifted = project_indicator(DomainGeometry(length=2.0, d_lo=0.3, d_hi=1.1), 'D', 2).coeffs
    assert abs(centred[1]) < 1e-14
    assert shifted[1] == pytest.approx((math.cos(0.3 * math.pi) - math.cos(1.1 * math.pi)) / math.pi, rel=1e-12)


def test_semigroup_maps_are_linear():
    rng = np.random.default_rng(7)
    s1, s2 = SineSeries(rng.normal(size=32)), SineSeries(rng.normal(size=32))
    a, b = 1.5, -0.75
    maps = (
        lambda s: apply_semigroup(s, 0.3),
        lambda s: integrate_semigroup(s, 0.1, 0.8),
        lambda s: double_integrate_semigroup(s, 0.0, 0.6, 1.0),
        lambda s: double_integrate_semigroup(s, 0.0, 1.0, 1.0, 'published'),
    )
    for semigroup_map in maps:
        left = semigroup_map(a * s1 + b * s2).coeffs
        right = (a * semigroup_map(s1) + b * semigroup_map(s2)).coeffs
        assert np.max(np.abs(left - right)) < 1e-12


if __name__ == '__main__':
    test_semigroup_law()
    test_double_integral_weights()
