from .geometry import DomainGeometry, Grid, GeometryError
from .sine_series import (
    SineSeries, SpectralError, eigenvalues, default_modes, tail_bound, smoothing_modes,
    indicator_coefficients, project_indicator, apply_semigroup, integrate_semigroup,
    double_integral_weights, double_integrate_semigroup, evaluate_series, evaluate_semigroup_table,
    synthesize_rows, analyze_rows, synthesize_on_grid, analyze_from_grid,
)
