# Certificates: the hypotheses of the existence, multiplicity and non-existence results, evaluated
import logging
import numpy as np
from dataclasses import dataclass, field
from typing import List
from ..constants import ConstantsBundle, nonexistence_constants
from ..expression import sample
from ..problem import RadiiConfig, RadiiError, nesting_errors
from ..utils import report_scalar
from .bounds import estimate_bounds, estimate_sup, BoundSet


@dataclass
class Inequality:
    # @relation: '<=', '<', '>=' or '>', read as lhs relation rhs
    # @group: inequalities sharing an 'any:<name>' group need only one member to hold
    name: str
    lhs: float
    relation: str
    rhs: float
    margin: float = 1e-9
    group: str = 'all'

    @property
    def slack(self):
        if self.relation in ('<=', '<'):
            return self.rhs - self.lhs
        return self.lhs - self.rhs

    @property
    def holds(self):
        if self.relation in ('<', '>'):
            return self.slack > self.margin
        return self.slack >= -self.margin

    @property
    def zero_slack(self):
        """non-strict inequality met with (numerically) no room"""
        return self.relation in ('<=', '>=') and self.holds and abs(self.slack) <= self.margin

    def to_dict(self):
        return {
            'name': self.name, 'lhs': report_scalar(self.lhs, 4), 'relation': self.relation,
            'rhs': report_scalar(self.rhs, 4), 'slack': float(self.slack), 'holds': self.holds,
            'zero_slack': self.zero_slack, 'group': self.group,
        }


def _groups_hold(inequalities):
    groups = {}
    for inequality in inequalities:
        if inequality.group == 'all':
            groups.setdefault(id(inequality), []).append(inequality.holds)
        else:
            groups.setdefault(inequality.group, []).append(inequality.holds)
    return all(any(members) if isinstance(key, str) else all(members) for key, members in groups.items())


@dataclass
class CertificateReport:
    # @theorem: which result the certificate evaluates
    # @conclusions: asserted statements, empty when the hypotheses fail
    # @rigor: 'rigorous' when every bound used is user supplied or Lipschitz corrected, else 'approximate'
    theorem: str
    applicable: bool = True
    reason: str = ''
    inequalities: List[Inequality] = field(default_factory=list)
    conclusions: List[str] = field(default_factory=list)
    bounds: List[BoundSet] = field(default_factory=list)
    rigor: str = 'approximate'
    notes: List[str] = field(default_factory=list)
    parts: List['CertificateReport'] = field(default_factory=list)
    holds_override: bool = None

    @property
    def holds(self):
        if not self.applicable:
            return False
        if self.holds_override is not None:
            return self.holds_override
        return bool(self.inequalities) and _groups_hold(self.inequalities)

    def to_dict(self):
        return {
            'theorem': self.theorem,
            'applicable': self.applicable,
            'reason': self.reason,
            'holds': self.holds,
            'inequalities': [i.to_dict() for i in self.inequalities],
            'conclusions': list(self.conclusions),
            'bounds': [b.to_dict() for b in self.bounds],
            'rigor': self.rigor,
            'notes': list(self.notes),
            'parts': [p.to_dict() for p in self.parts],
        }


def _inapplicable(theorem, spec):
    if spec.certifiable:
        return None
    return CertificateReport(theorem, applicable=False,
                             reason='certificates need integral nonlocal conditions for both components')


def _rigor(*bound_sets):
    return 'rigorous' if all(b.rigorous for b in bound_sets) else 'approximate'


def _sup_inequalities(spec, consts, f_sup, g_sup, label, margin):
    """q Q C1 + f^R (q Q C2 + C1) <= 1 per component"""
    result = []
    for i, (bound, value) in enumerate(((spec.alpha.bounds, f_sup), (spec.beta.bounds, g_sup))):
        qQ = bound.qQ
        lhs = qQ * consts.C1 + value * (qQ * consts.C2 + consts.C1)
        result.append(Inequality(f'upper bound {label} ({"uv"[i]})', lhs, '<=', 1.0, margin))
    return result


def _inf_inequalities(spec, consts, f_inf, g_inf, label, margin):
    """p P (c1 + f_{r,R} c2) > 1 per component"""
    result = []
    for i, (bound, value) in enumerate(((spec.alpha.bounds, f_inf), (spec.beta.bounds, g_inf))):
        lhs = bound.pP * (consts.c1 + value * consts.c2)
        result.append(Inequality(f'lower bound {label} ({"uv"[i]})', lhs, '>', 1.0, margin))
    return result


def _or_inequalities(spec, consts, f_inf00, g_inf00, label, margin):
    """f^00 >= (p1 P1 c2)^-1 or g^00 >= (p2 P2 c2)^-1"""
    return [
        Inequality(f'{label} (u)', f_inf00, '>=', 1.0 / (spec.alpha.bounds.pP * consts.c2), margin, f'any:{label}'),
        Inequality(f'{label} (v)', g_inf00, '>=', 1.0 / (spec.beta.bounds.pP * consts.c2), margin, f'any:{label}'),
    ]


def certify_existence(spec, radii: RadiiConfig, consts: ConstantsBundle, bounds: BoundSet = None) -> CertificateReport:
    """
    Upper bound conditions q Q C1 + f^R (q Q C2 + C1) <= 1 and lower bound conditions p P (c1 + f_{r,R} c2) > 1.
    When all hold there is a solution with |u| <= R1, |v| <= R2, floor(u) > r1, floor(v) > r2.
    """
    report = _inapplicable('existence', spec)
    if report is not None:
        return report
    margin = spec.certificates.margin
    if bounds is None:
        bounds = estimate_bounds(spec, consts.m, radii.r, radii.R)
    report = CertificateReport('existence', bounds=[bounds], rigor=_rigor(bounds))
    report.inequalities += _sup_inequalities(spec, consts, bounds.f_sup.value, bounds.g_sup.value, 'at R', margin)
    report.inequalities += _inf_inequalities(spec, consts, bounds.f_inf.value, bounds.g_inf.value, 'at r, R', margin)
    r, R = radii.r, radii.R
    if report.holds:
        report.conclusions = [
            f'there is a solution (u, v) with |u| <= {R[0]:g}, |v| <= {R[1]:g}, floor(u) > {r[0]:g}, floor(v) > {r[1]:g}',
            f'both components are nonzero: |u| > {r[0]:g}, |v| > {r[1]:g}',
        ]
    for inequality in report.inequalities:
        if inequality.zero_slack:
            report.notes.append(f'{inequality.name} holds with zero slack')
    logging.info(f'existence certificate for r={r}, R={R}: {"holds" if report.holds else "fails"}')
    return report


def certify_or_existence(spec, radii: RadiiConfig, R_tilde, consts: ConstantsBundle) -> CertificateReport:
    """
    Upper bound conditions at R plus f^00_{r,R_tilde} >= (p1 P1 c2)^-1 or g^00_{r,R_tilde} >= (p2 P2 c2)^-1.
    Conclusion: a nontrivial nonnegative solution with floor(u) >= r1 or floor(v) >= r2 or |u| > R_tilde1
    or |v| > R_tilde2.
    """
    report = _inapplicable('or-existence', spec)
    if report is not None:
        return report
    margin = spec.certificates.margin
    R_tilde = tuple(R_tilde) if np.ndim(R_tilde) else (float(R_tilde), float(R_tilde))
    r, R = radii.r, radii.R
    if not all(0 < R_tilde[i] <= R[i] for i in range(2)):
        raise RadiiError(f'need 0 < R_tilde <= R, got R_tilde={R_tilde}, R={R}')
    bounds = estimate_bounds(spec, consts.m, r, R, R_tilde)
    report = CertificateReport('or-existence', bounds=[bounds], rigor=_rigor(bounds))
    report.inequalities += _sup_inequalities(spec, consts, bounds.f_sup.value, bounds.g_sup.value, 'at R', margin)
    report.inequalities += _or_inequalities(spec, consts, bounds.f_inf00.value, bounds.g_inf00.value,
                                            'lower bound at r, R_tilde', margin)
    if report.holds:
        if R_tilde == tuple(R):
            report.conclusions = [f'there is a nontrivial nonnegative solution with floor(u) >= {r[0]:g} '
                                  f'or floor(v) >= {r[1]:g}']
        else:
            report.conclusions = [f'there is a nontrivial nonnegative solution with floor(u) >= {r[0]:g} '
                                  f'or floor(v) >= {r[1]:g} or |u| > {R_tilde[0]:g} or |v| > {R_tilde[1]:g}']
    logging.info(f'or-existence certificate: {"holds" if report.holds else "fails"}')
    return report


def certify_three_solutions(spec, radii: RadiiConfig, consts: ConstantsBundle, strengthened=False) -> CertificateReport:
    """
    Upper bound conditions at R and at rho, lower bound conditions at r, R (with f^0 when strengthened).
    Refinements of the first solution: (i) with varrho, (ii) with varrho and rho_tilde, reported as parts.
    """
    theorem = 'three solutions (strengthened)' if strengthened else 'three solutions'
    report = _inapplicable(theorem, spec)
    if report is not None:
        return report
    if radii.rho is None:
        raise RadiiError('three solutions need rho')
    margin = spec.certificates.margin
    m = consts.m
    r, R, rho = radii.r, radii.R, radii.rho
    bounds = estimate_bounds(spec, m, r, R)
    f_rho, g_rho = estimate_sup(spec, rho)
    report = CertificateReport(theorem, bounds=[bounds])
    rigorous = bounds.rigorous and f_rho.rigorous and g_rho.rigorous
    report.rigor = 'rigorous' if rigorous else 'approximate'
    report.inequalities += _sup_inequalities(spec, consts, bounds.f_sup.value, bounds.g_sup.value, 'at R', margin)
    report.inequalities += _sup_inequalities(spec, consts, f_rho.value, g_rho.value, 'at rho', margin)
    if strengthened:
        report.inequalities += _inf_inequalities(spec, consts, bounds.f_inf0.value, bounds.g_inf0.value,
                                                 'at r, R with f0', margin)
    else:
        report.inequalities += _inf_inequalities(spec, consts, bounds.f_inf.value, bounds.g_inf.value,
                                                 'at r, R', margin)
    report.notes.append(f'f^rho = {f_rho.value:.6g}, g^rho = {g_rho.value:.6g}')
    if report.holds:
        second = (f'floor(u2) < {r[0]:g} and floor(v2) < {r[1]:g}' if strengthened
                  else f'floor(u2) < {r[0]:g} or floor(v2) < {r[1]:g}')
        report.conclusions = [
            f'solution 1: |u1| < {rho[0]:g}, |v1| < {rho[1]:g} (possibly the zero solution)',
            f'solution 2: {second}; |u2| > {rho[0]:g} or |v2| > {rho[1]:g}',
            f'solution 3: floor(u3) > {r[0]:g}, floor(v3) > {r[1]:g} (both components nonzero)',
        ]
        report.notes.append('solution 2 may be unstable under forward iteration; its existence is asserted, '
                            'not necessarily found numerically')

    if radii.varrho is not None:
        varrho = radii.varrho
        inner = estimate_bounds(spec, m, varrho, rho, radii.rho_tilde, use_user_bounds=False)
        part = CertificateReport('three solutions refinement (i)', bounds=[inner], rigor=_rigor(inner))
        part.inequalities = _inf_inequalities(spec, consts, inner.f_inf.value, inner.g_inf.value,
                                              'at varrho, rho', margin)
        if report.holds and part.holds:
            part.conclusions = [f'solution 1: floor(u1) >= {varrho[0]:g} and floor(v1) >= {varrho[1]:g}']
        report.parts.append(part)
        if radii.rho_tilde is not None:
            rho_tilde = radii.rho_tilde
            part = CertificateReport('three solutions refinement (ii)', bounds=[inner], rigor=_rigor(inner))
            part.inequalities = _or_inequalities(spec, consts, inner.f_inf00.value, inner.g_inf00.value,
                                                 'lower bound at varrho, rho_tilde', margin)
            if report.holds and part.holds:
                part.conclusions = [f'solution 1: floor(u1) >= {varrho[0]:g} or floor(v1) >= {varrho[1]:g} '
                                    f'or |u1| > {rho_tilde[0]:g} or |v1| > {rho_tilde[1]:g}']
            report.parts.append(part)
    logging.info(f'{theorem} certificate: {"holds" if report.holds else "fails"}')
    return report


def _ratio_extremes(e, box, variable, density):
    """min and max of e / w over the samples with w > 0"""
    values, points = sample(e, box, density)
    w = np.broadcast_to(points[variable], values.shape)
    positive = w > 0
    ratio = values[positive] / w[positive]
    return float(np.min(ratio)), float(np.max(ratio))


def certify_nonexistence(spec, consts: ConstantsBundle, box=None) -> CertificateReport:
    """
    f < e_bar1 u on [0, tmax] x Omega, f > e_under1 u on [t0, t1] x D (for u > 0), and the same for g in v.
    Any one holding forces that component to vanish. One of them: no positive solutions;
    one per component: no nontrivial nonnegative solutions. p P c1 > 1 forces the component to vanish for any f.
    @box: (U, V) upper ends of the u, v sampling ranges, default the problem box
    """
    report = _inapplicable('non-existence', spec)
    if report is not None:
        return report
    margin = spec.certificates.margin
    geom = spec.geometry
    U, V = spec.box() if box is None else box
    density = 2 * spec.certificates.density - 1
    d_lo, d_hi = spec.grid.snapped_d
    full = {'t': (0.0, geom.tmax), 'x': (0.0, geom.length), 'u': (0.0, U), 'v': (0.0, V)}
    window = {'t': (geom.t0, geom.t1), 'x': (d_lo, d_hi), 'u': (0.0, U), 'v': (0.0, V)}
    report = CertificateReport('non-existence')
    vanishing = []
    for i, (e, bound, variable) in enumerate(((spec.f, spec.alpha.bounds, 'u'), (spec.g, spec.beta.bounds, 'v'))):
        e_bar, e_under = nonexistence_constants(consts.c1, consts.c2, consts.C1, consts.C2, consts.m, bound, geom.tmax)
        name = 'f' if i == 0 else 'g'
        upper = Inequality(f'{name} < e_bar {variable}', _ratio_extremes(e, full, variable, density)[1],
                           '<', e_bar, margin, f'any:{variable} vanishes')
        lower = Inequality(f'{name} > e_under {variable}', _ratio_extremes(e, window, variable, density)[0],
                           '>', e_under, margin, f'any:{variable} vanishes')
        unconditional = bound.pP * consts.c1 > 1
        report.inequalities += [upper, lower]
        report.notes.append(f'{variable}: e_bar = {e_bar:.6g}, e_under = {e_under:.6g}')
        if unconditional:
            report.notes.append(f'{variable}: pP c1 = {bound.pP * consts.c1:.6g} > 1, {variable} = 0 for any {name}')
        vanishing.append(upper.holds or lower.holds or unconditional)
    if vanishing[0]:
        report.conclusions.append('every nonnegative solution has u = 0')
    if vanishing[1]:
        report.conclusions.append('every nonnegative solution has v = 0')
    if vanishing[0] and vanishing[1]:
        report.conclusions.append('there are no nontrivial nonnegative solutions')
    elif vanishing[0] or vanishing[1]:
        report.conclusions.append('there are no positive solutions')
    report.holds_override = any(vanishing)
    report.notes.append('sampled at grid points with positive u (resp. v); strictness only checked on samples')
    logging.info(f'non-existence certificate: {report.conclusions or "no conclusion"}')
    return report


def scan_nested_radii(spec, pairs, consts: ConstantsBundle) -> CertificateReport:
    """
    Existence certificates for nested pairs (r^j, R^j) with R^j < r^(j+1). All holding: n nontrivial solutions;
    with strict upper bound conditions as well: n - 1 more solutions between consecutive boxes.
    @raise RadiiError: malformed nesting
    """
    normalized = RadiiConfig(pairs[0][0], pairs[0][1], nested=tuple(pairs)).nested
    errors = nesting_errors(normalized)
    if errors:
        raise RadiiError('; '.join(errors))
    report = _inapplicable('nested radii', spec)
    if report is not None:
        return report
    report = CertificateReport('nested radii')
    for r, R in normalized:
        part = certify_existence(spec, RadiiConfig(r, R), consts)
        report.parts.append(part)
        report.inequalities += part.inequalities
    n = len(normalized)
    all_hold = all(part.holds for part in report.parts)
    report.rigor = 'rigorous' if all(p.rigor == 'rigorous' for p in report.parts) else 'approximate'
    report.holds_override = all_hold
    if all_hold:
        report.conclusions.append(f'at least {n} nontrivial solutions')
        for j, (r, R) in enumerate(normalized):
            report.conclusions.append(f'solution {j + 1}: |u| <= {R[0]:g}, |v| <= {R[1]:g}, '
                                      f'floor(u) > {r[0]:g}, floor(v) > {r[1]:g}')
        strict = all(i.lhs < i.rhs - i.margin for part in report.parts for i in part.inequalities if i.relation == '<=')
        if strict and n > 1:
            report.conclusions.append(f'{n - 1} additional solution(s)')
            for j in range(n - 1):
                (r, R), (r_next, R_next) = normalized[j], normalized[j + 1]
                report.conclusions.append(
                    f'additional solution {j + 1}: |u| < {R_next[0]:g}, |v| < {R_next[1]:g}; '
                    f'|u| > {R[0]:g} or |v| > {R[1]:g}; floor(u) < {r_next[0]:g} or floor(v) < {r_next[1]:g}')
    logging.info(f'nested radii ({n} pairs): {"holds" if all_hold else "fails"}')
    return report
