# Problem definition: geometry, nonlinearities, nonlocal conditions, discretization and tolerances
import logging
import numpy as np
from dataclasses import dataclass, field
from typing import Optional, Tuple
from .expression import Expression, parse, evaluate, check_nonnegative, ExpressionError
from .spectral import DomainGeometry, Grid, GeometryError


class ConfigurationError(ValueError):
    def __init__(self, errors):
        """
        @errors: list of str, every validation failure found
        """
        errors = [errors] if isinstance(errors, str) else list(errors)
        super().__init__('invalid problem:\n  ' + '\n  '.join(errors))
        self.errors = errors


class RadiiError(ValueError):
    """Malformed radii or nesting"""


@dataclass(frozen=True)
class Discretization:
    # @modes: sine modes of the operators, None means nx - 1
    # @constant_modes: truncation of the constants, None means the tail-bound default
    nx: int = 128
    nt: int = 200
    modes: Optional[int] = None
    constant_modes: Optional[int] = None
    double_integral: str = 'exact'  # 'exact' or 'published'
    t_gibbs: float = 0.01

    @property
    def K(self):
        return self.nx - 1 if self.modes is None else self.modes

    def validate(self):
        errors = []
        if self.nx < 4:
            errors.append(f'nx must be at least 4, got {self.nx}')
        if self.nt < 1:
            errors.append(f'nt must be at least 1, got {self.nt}')
        if self.modes is not None and not (1 <= self.modes <= self.nx - 1):
            errors.append(f'modes must satisfy 1 <= K <= nx - 1 = {self.nx - 1}, got {self.modes}')
        if self.constant_modes is not None and self.constant_modes < 1:
            errors.append(f'constant_modes must be positive, got {self.constant_modes}')
        if self.double_integral not in ('exact', 'published'):
            errors.append(f'double_integral must be exact or published, got {self.double_integral}')
        if not self.t_gibbs > 0:
            errors.append(f't_gibbs must be positive, got {self.t_gibbs}')
        return errors


def _pair(value):
    if value is None:
        return None
    if np.ndim(value) == 0:
        return (float(value), float(value))
    assert len(value) == 2, value
    return (float(value[0]), float(value[1]))


@dataclass(frozen=True)
class RadiiConfig:
    """
    Radii per component. r < R for existence; rho < r for three solutions; varrho < rho and
    rho_tilde <= rho for the refinements of solution 1; R_tilde <= R for the or-existence variant;
    nested holds (r^j, R^j) pairs with R^j < r^(j+1).
    A scalar stands for the same value on both components.
    """
    r: Tuple[float, float]
    R: Tuple[float, float]
    rho: Optional[Tuple[float, float]] = None
    varrho: Optional[Tuple[float, float]] = None
    rho_tilde: Optional[Tuple[float, float]] = None
    R_tilde: Optional[Tuple[float, float]] = None
    nested: Tuple = ()

    def __post_init__(self):
        for name in ('r', 'R', 'rho', 'varrho', 'rho_tilde', 'R_tilde'):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        nested = tuple((_pair(r), _pair(R)) for r, R in self.nested)
        object.__setattr__(self, 'nested', nested)
        errors = self.validate()
        if errors:
            raise RadiiError('; '.join(errors))

    def validate(self):
        errors = []
        for i in range(2):
            if not (0 < self.r[i] < self.R[i]):
                errors.append(f'need 0 < r < R, got r={self.r[i]}, R={self.R[i]} (component {i + 1})')
            if self.rho is not None and not (0 < self.rho[i] < self.r[i]):
                errors.append(f'need 0 < rho < r, got rho={self.rho[i]}, r={self.r[i]} (component {i + 1})')
            if self.varrho is not None:
                if self.rho is None:
                    errors.append('varrho needs rho')
                elif not (0 < self.varrho[i] < self.rho[i]):
                    errors.append(f'need 0 < varrho < rho, got varrho={self.varrho[i]} (component {i + 1})')
            if self.rho_tilde is not None:
                if self.rho is None or self.varrho is None:
                    errors.append('rho_tilde needs rho and varrho')
                elif not (0 < self.rho_tilde[i] <= self.rho[i]):
                    errors.append(f'need 0 < rho_tilde <= rho, got rho_tilde={self.rho_tilde[i]} (component {i + 1})')
            if self.R_tilde is not None and not (0 < self.R_tilde[i] <= self.R[i]):
                errors.append(f'need 0 < R_tilde <= R, got R_tilde={self.R_tilde[i]} (component {i + 1})')
        errors.extend(nesting_errors(self.nested))
        return errors

    def to_dict(self):
        return {
            'r': list(self.r), 'R': list(self.R),
            'rho': None if self.rho is None else list(self.rho),
            'varrho': None if self.varrho is None else list(self.varrho),
            'rho_tilde': None if self.rho_tilde is None else list(self.rho_tilde),
            'R_tilde': None if self.R_tilde is None else list(self.R_tilde),
            'nested': [[list(r), list(R)] for r, R in self.nested],
        }


def nesting_errors(pairs):
    errors = []
    for j, (r, R) in enumerate(pairs):
        for i in range(2):
            if not (0 < r[i] < R[i]):
                errors.append(f'nested pair {j + 1}: need 0 < r < R, got r={r[i]}, R={R[i]}')
            if j + 1 < len(pairs) and not (R[i] < pairs[j + 1][0][i]):
                errors.append(f'nested pairs {j + 1}, {j + 2}: need R^{j + 1} < r^{j + 2}, '
                              f'got {R[i]} >= {pairs[j + 1][0][i]}')
    return errors


@dataclass(frozen=True)
class SolveConfig:
    relaxation: float = 0.5
    max_iters: int = 2000
    residual_tol: float = 1e-10
    divergence_cap: float = 1e8
    random_starts: int = 4
    seed: int = 0
    seed_scale: float = 1.0  # scale of the seeds when no radii are given
    threads: int = 1

    def validate(self):
        errors = []
        if not (0 < self.relaxation <= 1):
            errors.append(f'relaxation must lie in (0, 1], got {self.relaxation}')
        if not self.residual_tol > 0:
            errors.append(f'residual_tol must be positive, got {self.residual_tol}')
        if self.max_iters < 1:
            errors.append(f'max_iters must be positive, got {self.max_iters}')
        if not self.divergence_cap > 0:
            errors.append(f'divergence_cap must be positive, got {self.divergence_cap}')
        if self.random_starts < 0:
            errors.append(f'random_starts must be nonnegative, got {self.random_starts}')
        if self.threads < 1:
            errors.append(f'threads must be positive, got {self.threads}')
        return errors


@dataclass(frozen=True)
class CertificateConfig:
    margin: float = 1e-9  # strict inequalities need slack above margin
    density: int = 9  # samples per axis, refined once to 2*density - 1
    cone_tol: float = 1e-7
    harnack_tol: float = 1e-4

    def validate(self):
        errors = []
        if self.margin < 0:
            errors.append(f'margin must be nonnegative, got {self.margin}')
        if self.density < 2:
            errors.append(f'density must be at least 2, got {self.density}')
        return errors


@dataclass(frozen=True)
class UserBounds:
    """Closed-form bound values supplied by the user; they replace the sampled estimates."""
    f_sup: Optional[float] = None
    g_sup: Optional[float] = None
    f_inf: Optional[float] = None
    g_inf: Optional[float] = None
    f_inf0: Optional[float] = None
    g_inf0: Optional[float] = None
    f_inf00: Optional[float] = None
    g_inf00: Optional[float] = None

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class ProblemSpec:
    """
    u_t - u_xx = f(t, x, u, v), v_t - v_xx = g(t, x, u, v) on (0, tmax) x (0, L), zero Dirichlet data,
    u(0) = alpha(u, v), v(0) = beta(u, v).
    """
    geometry: DomainGeometry
    f: Expression
    g: Expression
    alpha: 'NonlocalCondition'
    beta: 'NonlocalCondition'
    discretization: Discretization = field(default_factory=Discretization)
    radii: Optional[RadiiConfig] = None
    solver: SolveConfig = field(default_factory=SolveConfig)
    certificates: CertificateConfig = field(default_factory=CertificateConfig)
    bounds: UserBounds = field(default_factory=UserBounds)
    lipschitz_f: Optional[float] = None
    lipschitz_g: Optional[float] = None
    name: str = 'problem'

    @property
    def grid(self) -> Grid:
        return Grid(self.geometry, self.discretization.nx, self.discretization.nt)

    @property
    def certifiable(self):
        """certificates cover integral-kind conditions only"""
        return self.alpha.kind == 'integral' and self.beta.kind == 'integral'

    def box(self):
        """(U, V) sampling box of the nonlinearities"""
        if self.radii is not None:
            return self.radii.R
        return (self.solver.seed_scale, self.solver.seed_scale)

    def snap_report(self):
        """multipoint evaluation times moved to grid rows, tagged alpha or beta"""
        grid = self.grid
        return [dict(entry, condition=name) for name, condition in (('alpha', self.alpha), ('beta', self.beta))
                for entry in condition.snap_report(grid)]

    def validate(self):
        """
        Collect every validation failure.
        """
        errors = []
        errors.extend(self.discretization.validate())
        errors.extend(self.solver.validate())
        errors.extend(self.certificates.validate())
        if not errors:
            try:
                self.grid
            except GeometryError as error:
                errors.append(str(error))
        U, V = self.box()
        geom = self.geometry
        box = {'t': (0.0, geom.tmax), 'x': (0.0, geom.length), 'u': (0.0, U), 'v': (0.0, V)}
        density = self.certificates.density
        errors.extend(check_nonnegative(self.f, box, density, 'f'))
        errors.extend(check_nonnegative(self.g, box, density, 'g'))
        for name, condition in (('alpha', self.alpha), ('beta', self.beta)):
            errors.extend(f'{name}: {e}' for e in condition.validate(geom, (U, V), density))
        for name, value in (('lipschitz_f', self.lipschitz_f), ('lipschitz_g', self.lipschitz_g)):
            if value is not None and value < 0:
                errors.append(f'{name} must be nonnegative, got {value}')
        self.check_boundary_assumption()
        return errors

    def check_boundary_assumption(self):
        """f(t, x, 0, 0) = g(t, x, 0, 0) = 0 at both ends of Omega, warned when violated"""
        t = np.linspace(0.0, self.geometry.tmax, 9)
        holds = True
        for name, e in (('f', self.f), ('g', self.g)):
            for x in (0.0, self.geometry.length):
                try:
                    values = evaluate(e, t=t, x=x, u=0.0, v=0.0)
                except ExpressionError:
                    continue
                if np.max(np.abs(values)) > 1e-12:
                    logging.warning(f'{name}(t, {x:g}, 0, 0) != 0: solutions need not vanish continuously at the boundary')
                    holds = False
        return holds


def make_problem(f='0', g='0', alpha=None, beta=None, geometry=None, **kwargs) -> ProblemSpec:
    """
    Programmatic ProblemSpec with defaults: the [0, pi] example geometry and unit integral conditions.
    """
    from .operators.nonlocal_condition import IntegralCondition
    geometry = DomainGeometry() if geometry is None else geometry
    alpha = IntegralCondition('u') if alpha is None else alpha
    beta = IntegralCondition('v') if beta is None else beta
    f = parse(f) if isinstance(f, str) else f
    g = parse(g) if isinstance(g, str) else g
    return ProblemSpec(geometry, f, g, alpha, beta, **kwargs)
