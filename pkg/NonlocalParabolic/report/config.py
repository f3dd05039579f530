# Problem files: INI text, every number a constant expression
import os
import math
import logging
import configparser
from jinja2 import Template
from ..expression import parse, constant_value, ExpressionError
from ..spectral import DomainGeometry, GeometryError
from ..constants import ConditionBounds
from ..operators import IntegralCondition, MultipointCondition
from ..problem import (
    ProblemSpec, Discretization, RadiiConfig, SolveConfig, CertificateConfig, UserBounds,
    ConfigurationError, RadiiError,
)

problem_template = """# {{ name }}
[problem]
name = {{ name }}

[domain]
length = {{ geometry.length }}
d_lo = {{ geometry.d_lo }}
d_hi = {{ geometry.d_hi }}
t0 = {{ geometry.t0 }}
t1 = {{ geometry.t1 }}
tmax = {{ geometry.tmax }}

[nonlinearity]
f = {{ f }}
g = {{ g }}
{%- for key, value in lipschitz.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% for name, section in conditions %}
[nonlocal.{{ name }}]
{%- for key, value in section.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% endfor %}
[discretization]
{%- for key, value in discretization.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% if radii %}
[radii]
{%- for key, value in radii.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% endif %}
[solver]
{%- for key, value in solver.items() %}
{{ key }} = {{ value }}
{%- endfor %}

[certificates]
{%- for key, value in certificates.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% if bounds %}
[bounds]
{%- for key, value in bounds.items() %}
{{ key }} = {{ value }}
{%- endfor %}
{% endif %}
"""

SECTION_KEYS = {
    'problem': {'name'},
    'domain': {'length', 'd_lo', 'd_hi', 't0', 't1', 'tmax'},
    'nonlinearity': {'f', 'g', 'lipschitz_f', 'lipschitz_g'},
    'nonlocal.alpha': {'kind', 'inner', 'outer', 'p', 'q', 'P', 'Q', 'box', 'weights', 'times'},
    'nonlocal.beta': {'kind', 'inner', 'outer', 'p', 'q', 'P', 'Q', 'box', 'weights', 'times'},
    'discretization': {'nx', 'nt', 'modes', 'constant_modes', 'double_integral', 't_gibbs'},
    'radii': {'r', 'R', 'rho', 'varrho', 'rho_tilde', 'R_tilde', 'nested'},
    'solver': {'relaxation', 'max_iters', 'residual_tol', 'divergence_cap', 'random_starts', 'seed',
               'seed_scale', 'threads'},
    'certificates': {'margin', 'density', 'cone_tol', 'harnack_tol'},
    'bounds': set(UserBounds.__dataclass_fields__),
}


def split_top_level(text, separator=','):
    """split on separator outside parentheses"""
    parts, depth, current = [], 0, ''
    for char in text:
        if char == '(':
            depth += 1
        elif char == ')':
            depth -= 1
        if char == separator and depth == 0:
            parts.append(current.strip())
            current = ''
        else:
            current += char
    if current.strip():
        parts.append(current.strip())
    return parts


class _Reader:
    """typed access to a parsed INI file, collecting errors instead of raising"""

    def __init__(self, parser, errors):
        self.parser = parser
        self.errors = errors

    def has(self, section, key=None):
        if key is None:
            return self.parser.has_section(section)
        return self.parser.has_option(section, key)

    def raw(self, section, key, default=None):
        if not self.has(section, key):
            return default
        return self.parser.get(section, key).strip()

    def number(self, section, key, default=None):
        text = self.raw(section, key)
        if text is None or text == '':
            return default
        try:
            return constant_value(text)
        except ExpressionError as error:
            self.errors.append(f'[{section}] {key}: {error}')
            return default

    def integer(self, section, key, default=None):
        value = self.number(section, key, default)
        if value is None:
            return None
        if not math.isfinite(value):
            self.errors.append(f'[{section}] {key}: expected a finite integer, got {value}')
            return default
        if value != int(value):
            self.errors.append(f'[{section}] {key}: expected an integer, got {value}')
            return default
        return int(value)

    def numbers(self, section, key, default=None):
        text = self.raw(section, key)
        if text is None:
            return default
        values = []
        for part in split_top_level(text):
            try:
                values.append(constant_value(part))
            except ExpressionError as error:
                self.errors.append(f'[{section}] {key}: {error}')
        return tuple(values)

    def pair(self, section, key):
        values = self.numbers(section, key)
        if values is None:
            return None
        if len(values) == 1:
            return (values[0], values[0])
        if len(values) != 2:
            self.errors.append(f'[{section}] {key}: expected one or two values, got {len(values)}')
            return None
        return values

    def expression(self, section, key, default=None):
        text = self.raw(section, key)
        if text is None:
            if default is None:
                self.errors.append(f'[{section}] {key}: missing')
                return None
            text = default
        try:
            return parse(text)
        except ExpressionError as error:
            self.errors.append(f'[{section}] {key}: {error}')
            return None


def _nested(reader):
    text = reader.raw('radii', 'nested')
    if not text:
        return ()
    pairs = []
    for chunk in split_top_level(text, ';'):
        values = []
        for part in split_top_level(chunk):
            try:
                values.append(constant_value(part))
            except ExpressionError as error:
                reader.errors.append(f'[radii] nested: {error}')
        if len(values) == 2:
            pairs.append(((values[0], values[0]), (values[1], values[1])))
        elif len(values) == 4:
            pairs.append(((values[0], values[1]), (values[2], values[3])))
        else:
            reader.errors.append(f'[radii] nested: "{chunk}" needs "r, R" or "r1, r2, R1, R2"')
    return tuple(pairs)


def _condition(reader, name, component):
    section = f'nonlocal.{name}'
    kind = reader.raw(section, 'kind', 'integral')
    if kind == 'integral':
        inner = reader.expression(section, 'inner', component)
        outer = reader.expression(section, 'outer', 'u')
        try:
            bounds = ConditionBounds(*(reader.number(section, key, 1.0) for key in ('p', 'q', 'P', 'Q')))
        except ValueError as error:
            reader.errors.append(f'[{section}] {error}')
            bounds = ConditionBounds()
        box = reader.pair(section, 'box')
        if inner is None or outer is None:
            return None
        return IntegralCondition(component, inner, outer, bounds, box)
    if kind == 'multipoint':
        weights = reader.numbers(section, 'weights', ())
        times = reader.numbers(section, 'times', ())
        return MultipointCondition(component, weights, times)
    reader.errors.append(f'[{section}] kind: expected integral or multipoint, got "{kind}"')
    return None


def load_problem_text(text, source='<string>', name=None) -> ProblemSpec:
    """
    Parse and validate problem text; every failure is collected into one ConfigurationError.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#',))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as error:
        raise ConfigurationError([f'{source}: {error}'])
    errors = []
    reader = _Reader(parser, errors)
    for section in parser.sections():
        if section not in SECTION_KEYS:
            errors.append(f'unknown section [{section}]')
            continue
        for key in parser.options(section):
            if key not in SECTION_KEYS[section]:
                errors.append(f'[{section}] unknown key "{key}"')
    for section in ('domain', 'nonlinearity'):
        if not reader.has(section):
            errors.append(f'missing section [{section}]')
    if errors:
        raise ConfigurationError(errors)

    geometry = None
    try:
        geometry = DomainGeometry(
            length=reader.number('domain', 'length', DomainGeometry.length),
            d_lo=reader.number('domain', 'd_lo', DomainGeometry.d_lo),
            d_hi=reader.number('domain', 'd_hi', DomainGeometry.d_hi),
            t0=reader.number('domain', 't0', 0.0),
            t1=reader.number('domain', 't1', 1.0),
            tmax=reader.number('domain', 'tmax', 1.0),
        )
    except GeometryError as error:
        errors.append(f'[domain] {error}')

    f = reader.expression('nonlinearity', 'f')
    g = reader.expression('nonlinearity', 'g')
    alpha = _condition(reader, 'alpha', 'u')
    beta = _condition(reader, 'beta', 'v')

    discretization = Discretization(
        nx=reader.integer('discretization', 'nx', 128),
        nt=reader.integer('discretization', 'nt', 200),
        modes=reader.integer('discretization', 'modes'),
        constant_modes=reader.integer('discretization', 'constant_modes'),
        double_integral=reader.raw('discretization', 'double_integral', 'exact'),
        t_gibbs=reader.number('discretization', 't_gibbs', 0.01),
    )
    radii = None
    if reader.has('radii') and not (reader.has('radii', 'r') and reader.has('radii', 'R')):
        errors.append('[radii] needs both r and R')
    elif reader.has('radii'):
        try:
            radii = RadiiConfig(
                r=reader.pair('radii', 'r'), R=reader.pair('radii', 'R'),
                rho=reader.pair('radii', 'rho'), varrho=reader.pair('radii', 'varrho'),
                rho_tilde=reader.pair('radii', 'rho_tilde'), R_tilde=reader.pair('radii', 'R_tilde'),
                nested=_nested(reader),
            )
        except (RadiiError, TypeError) as error:
            errors.append(f'[radii] {error}')
    solver = SolveConfig(
        relaxation=reader.number('solver', 'relaxation', 0.5),
        max_iters=reader.integer('solver', 'max_iters', 2000),
        residual_tol=reader.number('solver', 'residual_tol', 1e-10),
        divergence_cap=reader.number('solver', 'divergence_cap', 1e8),
        random_starts=reader.integer('solver', 'random_starts', 4),
        seed=reader.integer('solver', 'seed', 0),
        seed_scale=reader.number('solver', 'seed_scale', 1.0),
        threads=reader.integer('solver', 'threads', 1),
    )
    certificates = CertificateConfig(
        margin=reader.number('certificates', 'margin', 1e-9),
        density=reader.integer('certificates', 'density', 9),
        cone_tol=reader.number('certificates', 'cone_tol', 1e-7),
        harnack_tol=reader.number('certificates', 'harnack_tol', 1e-4),
    )
    bounds = UserBounds(**{key: reader.number('bounds', key) for key in UserBounds.__dataclass_fields__})
    name = reader.raw('problem', 'name', name or 'problem')

    if errors or None in (geometry, f, g, alpha, beta):
        raise ConfigurationError(errors or ['incomplete problem'])
    spec = ProblemSpec(
        geometry, f, g, alpha, beta, discretization, radii, solver, certificates, bounds,
        reader.number('nonlinearity', 'lipschitz_f'), reader.number('nonlinearity', 'lipschitz_g'), name,
    )
    errors.extend(spec.validate())
    if errors:
        raise ConfigurationError(errors)
    return spec


def load_problem(path) -> ProblemSpec:
    """
    @path: str, problem file
    @raise ConfigurationError: parse error with location or the list of validation failures
    """
    if not os.path.exists(path):
        raise ConfigurationError([f'{path}: no such file'])
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    name = os.path.splitext(os.path.basename(path))[0]
    spec = load_problem_text(text, source=path, name=name)
    logging.info(f'loaded problem {spec.name} from {path}')
    return spec


def _pair_text(pair):
    if pair is None:
        return None
    if pair[0] == pair[1]:
        return repr(pair[0])
    return f'{pair[0]!r}, {pair[1]!r}'


def dump_problem(spec: ProblemSpec) -> str:
    """INI text of spec; load_problem_text(dump_problem(spec)) == spec"""
    geometry = {key: repr(value) for key, value in spec.geometry.to_dict().items()}
    lipschitz = {key: repr(value) for key, value in (('lipschitz_f', spec.lipschitz_f), ('lipschitz_g', spec.lipschitz_g))
                 if value is not None}
    d = spec.discretization
    discretization = {'nx': d.nx, 'nt': d.nt, 'double_integral': d.double_integral, 't_gibbs': repr(d.t_gibbs)}
    if d.modes is not None:
        discretization['modes'] = d.modes
    if d.constant_modes is not None:
        discretization['constant_modes'] = d.constant_modes
    radii = None
    if spec.radii is not None:
        radii = {key: _pair_text(getattr(spec.radii, key))
                 for key in ('r', 'R', 'rho', 'varrho', 'rho_tilde', 'R_tilde') if getattr(spec.radii, key) is not None}
        if spec.radii.nested:
            radii['nested'] = '; '.join(f'{r[0]!r}, {r[1]!r}, {R[0]!r}, {R[1]!r}' for r, R in spec.radii.nested)
    s = spec.solver
    solver = {
        'relaxation': repr(s.relaxation), 'max_iters': s.max_iters, 'residual_tol': repr(s.residual_tol),
        'divergence_cap': repr(s.divergence_cap), 'random_starts': s.random_starts, 'seed': s.seed,
        'seed_scale': repr(s.seed_scale), 'threads': s.threads,
    }
    c = spec.certificates
    certificates = {'margin': repr(c.margin), 'density': c.density, 'cone_tol': repr(c.cone_tol),
                    'harnack_tol': repr(c.harnack_tol)}
    bounds = {key: repr(value) for key, value in spec.bounds.to_dict().items()}
    return Template(problem_template).render(
        name=spec.name, geometry=geometry, f=str(spec.f), g=str(spec.g), lipschitz=lipschitz,
        conditions=[('alpha', spec.alpha.to_config()), ('beta', spec.beta.to_config())],
        discretization=discretization, radii=radii, solver=solver, certificates=certificates, bounds=bounds,
    )


PROBLEMS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'problems')


def bundled_problem(name) -> str:
    """path of a problem file shipped in NonlocalParabolic/problems, e.g. 'existence'"""
    if not name.endswith('.cfg'):
        name = name + '.cfg'
    return os.path.join(PROBLEMS_DIR, name)
