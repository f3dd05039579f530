# JSON run reports and their text summary
import os
import json
import logging
import datetime
import jsonschema
from dataclasses import dataclass, field
from typing import List
from jinja2 import Template
from ..problem import ProblemSpec
from ..constants import ConstantsBundle
from ..utils import stable_key
from .config import dump_problem

__version__ = '0.1.0'

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), 'report.schema.json')

summary_template = """{{ report.spec.name }} ({{ report.command }}, NonlocalParabolic {{ report.version }})
grid nx={{ report.spec.grid.nx }} nt={{ report.spec.grid.nt }}, D snapped to [{{ '%.6g' % report.spec.grid.d_snapped[0] }}, {{ '%.6g' % report.spec.grid.d_snapped[1] }}]
{%- for s in report.spec.grid.snap %}
{{ s.condition }} time {{ '%g' % s.time }} snapped to {{ '%g' % s.snapped_time }} (distance {{ '%.3g' % s.distance }})
{%- endfor %}
{% if report.constants %}
constants ({{ report.constants.convention }}, K={{ report.constants.K_used }}):
  m = {{ report.constants.m.display }}{% if report.constants.m_flagged %} (flagged){% endif %}
  c1 = {{ report.constants.c1.display }}, c2 = {{ report.constants.c2.display }} (exact {{ report.constants.c2_exact.display }})
  C1 = {{ report.constants.C1.display }}, C2 = {{ report.constants.C2.display }} (exact {{ report.constants.C2_exact.display }})
{%- for t in report.constants.thresholds or [] %}
  thresholds {{ 'uv'[loop.index0] }}: f^R <= {{ t.sup_threshold.display }}, f_inf > {{ t.inf_threshold.display }}
{%- endfor %}
{% endif %}
{%- for cert in report.certificates %}
{{ cert.theorem }}: {% if not cert.applicable %}not applicable ({{ cert.reason }}){% elif cert.holds %}HOLDS{% else %}fails{% endif %} [{{ cert.rigor }}]
{%- for ineq in cert.inequalities %}
  {{ '+' if ineq.holds else '-' }} {{ ineq.name }}: {{ ineq.lhs.display }} {{ ineq.relation }} {{ ineq.rhs.display }}{% if ineq.zero_slack %} (zero slack){% endif %}
{%- endfor %}
{%- for conclusion in cert.conclusions %}
  => {{ conclusion }}
{%- endfor %}
{%- endfor %}
{% if report.solutions %}
solutions: {{ report.solutions.solutions | length }} distinct from {{ report.solutions.runs | length }} seeds
{%- for s in report.solutions.solutions %}
  {{ s.seed }}: residual {{ '%.3g' % s.residual }}, |u| = {{ '%.4g' % s.localization.sup_u }}, |v| = {{ '%.4g' % s.localization.sup_v }}, floor u = {{ '%.4g' % s.localization.floor_u }}, floor v = {{ '%.4g' % s.localization.floor_v }}{% if s.region %}, region {{ s.region }}{% endif %}
{%- endfor %}
{% endif %}
{%- if report.scan %}
scan: minimum ratio at b = {{ '%.6g' % report.scan.rows[report.scan.best].b }}
{% endif %}
"""


def _now():
    return datetime.datetime.now().isoformat(timespec='seconds')


@dataclass
class RunReport:
    # @certificates: CertificateReport list
    # @solutions: MultiStartResult or None
    # @scan: (rows, best) from scan_b or None
    # @timings: seconds per stage
    command: str
    spec: ProblemSpec
    constants: ConstantsBundle = None
    certificates: List = field(default_factory=list)
    solutions: object = None
    scan: tuple = None
    timings: dict = field(default_factory=dict)
    started: str = field(default_factory=_now)
    version: str = __version__

    def spec_echo(self):
        grid = self.spec.grid
        text = dump_problem(self.spec)
        return {
            'name': self.spec.name,
            'hash': stable_key(text),
            'text': text,
            'grid': {'nx': grid.nx, 'nt': grid.nt, 'dx': float(grid.dx), 'dt': float(grid.dt),
                     'd_snapped': [float(c) for c in grid.snapped_d],
                     'snap': self.spec.snap_report()},
        }

    def to_dict(self):
        scan = None
        if self.scan is not None:
            rows, best = self.scan
            scan = {'rows': [row.to_dict() for row in rows], 'best': int(best)}
        return {
            'tool': 'NonlocalParabolic',
            'version': self.version,
            'command': self.command,
            'started': self.started,
            'spec': self.spec_echo(),
            'constants': None if self.constants is None else self.constants.to_dict(),
            'certificates': [c.to_dict() for c in self.certificates],
            'solutions': None if self.solutions is None else self.solutions.to_dict(),
            'scan': scan,
            'timings': {k: float(v) for k, v in self.timings.items()},
        }

    @property
    def failed_certificates(self):
        """applicable certificates whose hypotheses fail"""
        return [c for c in self.certificates if c.applicable and not c.holds]


def load_schema():
    with open(SCHEMA_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


def validate_report(data: dict):
    """
    @raise jsonschema.ValidationError: when data does not follow report.schema.json
    """
    jsonschema.validate(instance=data, schema=load_schema())


def render_summary(data: dict) -> str:
    return Template(summary_template).render(report=data).strip() + '\n'


def write_report(data: dict, path=None):
    """JSON to path, or standard output when path is None"""
    text = json.dumps(data, indent=2)
    if path is None:
        print(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text + '\n')
    logging.info(f'report written to {path}')
