# Sampled estimates of the nonlinearity bounds used by the certificates
import logging
import numpy as np
from dataclasses import dataclass
from ..expression import sample


@dataclass
class BoundEstimate:
    # @method: 'grid_sample', 'lipschitz' (grid value corrected by Lipschitz slack) or 'user_supplied'
    # @delta: change of the value between the coarse and the refined sample grid
    value: float
    method: str = 'grid_sample'
    density: int = None
    delta: float = 0.0

    @property
    def rigorous(self):
        return self.method in ('user_supplied', 'lipschitz')

    def to_dict(self):
        return {
            'value': float(self.value), 'method': self.method, 'density': self.density,
            'delta': float(self.delta), 'rigorous': self.rigorous,
        }


@dataclass
class BoundSet:
    """
    f_sup = f^R, f_inf = f_{r,R}, f_inf0 = f^0_{r,R}, f_inf00 = f^00_{r,R_tilde}; g likewise.
    """
    f_sup: BoundEstimate
    g_sup: BoundEstimate
    f_inf: BoundEstimate
    g_inf: BoundEstimate
    f_inf0: BoundEstimate
    g_inf0: BoundEstimate
    f_inf00: BoundEstimate
    g_inf00: BoundEstimate
    r: tuple = None
    R: tuple = None
    R_tilde: tuple = None
    ordering_holds: bool = True

    NAMES = ('f_sup', 'g_sup', 'f_inf', 'g_inf', 'f_inf0', 'g_inf0', 'f_inf00', 'g_inf00')

    @property
    def rigorous(self):
        return all(getattr(self, name).rigorous for name in self.NAMES)

    def to_dict(self):
        result = {name: getattr(self, name).to_dict() for name in self.NAMES}
        result.update({
            'r': list(self.r), 'R': list(self.R), 'R_tilde': list(self.R_tilde),
            'ordering_holds': self.ordering_holds,
        })
        return result


def _boxes(spec, m, r, R, R_tilde):
    """
    sampling boxes, keyed by bound name; the sup box contains all others when R_tilde <= R
    """
    geom = spec.geometry
    grid = spec.grid
    d_lo, d_hi = grid.snapped_d
    window = {'t': (geom.t0, geom.t1), 'x': (d_lo, d_hi)}
    return {
        'sup': {'t': (0.0, geom.tmax), 'x': (0.0, geom.length), 'u': (0.0, R[0]), 'v': (0.0, R[1])},
        'inf': dict(window, u=(m * r[0], R[0]), v=(m * r[1], R[1])),
        'f_inf0': dict(window, u=(m * r[0], R[0]), v=(0.0, R[1])),
        'g_inf0': dict(window, u=(0.0, R[0]), v=(m * r[1], R[1])),
        'inf00': dict(window, u=(0.0, R_tilde[0]), v=(0.0, R_tilde[1])),
    }


def _spacing(box, density):
    return max((high - low) / (density - 1) for low, high in box.values())


def _extremes(e, boxes, density):
    """min and max of e on every box"""
    result = {}
    for name, box in boxes.items():
        values, _ = sample(e, box, density)
        result[name] = (float(np.min(values)), float(np.max(values)))
    return result


def _combine(extremes, which, R_tilde_is_R):
    """
    Bound numerators from box extremes. Samples of a sub-box are samples of every enclosing box,
    so the sup takes all boxes and each inf takes the boxes it encloses.
    """
    inf_box = 'inf'
    own0 = 'f_inf0' if which == 'f' else 'g_inf0'
    sup = max(high for _, high in extremes.values())
    inf = extremes[inf_box][0]
    inf0 = min(extremes[own0][0], inf)
    inf00 = extremes['inf00'][0]
    if R_tilde_is_R:
        inf00 = min(inf00, inf0)
    return sup, inf, inf0, inf00


def estimate_bounds(spec, m, r=None, R=None, R_tilde=None, density=None, use_user_bounds=True) -> BoundSet:
    """
    Sampled f^R, g^R, f_{r,R}, g_{r,R}, f^0_{r,R}, g^0_{r,R}, f^00_{r,R_tilde}, g^00_{r,R_tilde}.
    Each value comes from a grid of `density` points per axis refined once to 2*density - 1; the refined value
    is reported with the change as delta. With a Lipschitz constant the slack L*h/2 is subtracted from infima
    and added to suprema. User supplied values replace the samples.
    @r, R: pairs, default spec.radii
    @R_tilde: pair or None for R
    """
    radii = spec.radii
    r = radii.r if r is None else tuple(r)
    R = radii.R if R is None else tuple(R)
    R_tilde = R if R_tilde is None else tuple(R_tilde)
    density = spec.certificates.density if density is None else density
    refined = 2 * density - 1
    boxes = _boxes(spec, m, r, R, R_tilde)
    R_tilde_is_R = tuple(R_tilde) == tuple(R)

    estimates = {}
    for which, e, lipschitz, i in (('f', spec.f, spec.lipschitz_f, 0), ('g', spec.g, spec.lipschitz_g, 1)):
        coarse = _combine(_extremes(e, boxes, density), which, R_tilde_is_R)
        fine = _combine(_extremes(e, boxes, refined), which, R_tilde_is_R)
        divisors = (R[i], r[i], r[i], r[i])
        names = (f'{which}_sup', f'{which}_inf', f'{which}_inf0', f'{which}_inf00')
        box_names = ('sup', 'inf', f'{which}_inf0', 'inf00')
        for k, name in enumerate(names):
            value = fine[k] / divisors[k]
            delta = abs(fine[k] - coarse[k]) / divisors[k]
            method = 'grid_sample'
            if lipschitz is not None:
                slack = lipschitz * _spacing(boxes[box_names[k]], refined) / 2 / divisors[k]
                value = value + slack if k == 0 else value - slack
                method = 'lipschitz'
            estimates[name] = BoundEstimate(value, method, refined, delta)

    if use_user_bounds:
        for name, value in spec.bounds.to_dict().items():
            estimates[name] = BoundEstimate(float(value), 'user_supplied', None, 0.0)

    bounds = BoundSet(r=tuple(r), R=tuple(R), R_tilde=tuple(R_tilde), **estimates)
    bounds.ordering_holds = check_ordering(bounds, R_tilde_is_R)
    if not bounds.ordering_holds:
        logging.warning('bound estimates violate the ordering f00 <= f0 <= f_inf <= f_sup R/r')
    return bounds


def check_ordering(bounds: BoundSet, R_tilde_is_R=True, tol=1e-12) -> bool:
    """f00 <= f0 <= f_{r,R} <= f^R R1/r1 (f00 only when R_tilde = R), and the same for g"""
    holds = True
    for which, i in (('f', 0), ('g', 1)):
        sup = getattr(bounds, f'{which}_sup').value * bounds.R[i] / bounds.r[i]
        inf = getattr(bounds, f'{which}_inf').value
        inf0 = getattr(bounds, f'{which}_inf0').value
        chain = [inf0, inf, sup]
        if R_tilde_is_R:
            chain.insert(0, getattr(bounds, f'{which}_inf00').value)
        scale = tol * (1 + max(abs(c) for c in chain))
        holds = holds and all(a <= b + scale for a, b in zip(chain, chain[1:]))
    return holds


def estimate_sup(spec, R, density=None):
    """f^R and g^R alone, for the inner radii of the three-solution conditions"""
    geom = spec.geometry
    density = spec.certificates.density if density is None else density
    box = {'t': (0.0, geom.tmax), 'x': (0.0, geom.length), 'u': (0.0, R[0]), 'v': (0.0, R[1])}
    result = []
    for e, lipschitz, divisor in ((spec.f, spec.lipschitz_f, R[0]), (spec.g, spec.lipschitz_g, R[1])):
        coarse = float(np.max(sample(e, box, density)[0]))
        fine = float(np.max(sample(e, box, 2 * density - 1)[0]))
        value, method = fine / divisor, 'grid_sample'
        if lipschitz is not None:
            value += lipschitz * _spacing(box, 2 * density - 1) / 2 / divisor
            method = 'lipschitz'
        result.append(BoundEstimate(value, method, 2 * density - 1, abs(fine - coarse) / divisor))
    return tuple(result)
