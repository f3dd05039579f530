# Relaxed Picard iteration for the fixed points of M, with multi-start
import logging
import concurrent.futures
import numpy as np
from dataclasses import dataclass, field
from typing import List
from ..field import SpaceTimeField, CheckOutcome, sup_norm, floor_functional, in_cone, harnack_check, plateau
from ..operators import ProblemOperators

CONVERGED = 'converged'
DIVERGED = 'diverged'
MAX_ITERS = 'max_iters'


@dataclass
class Localization:
    sup_u: float
    sup_v: float
    floor_u: float
    floor_v: float

    def to_dict(self):
        return {'sup_u': self.sup_u, 'sup_v': self.sup_v, 'floor_u': self.floor_u, 'floor_v': self.floor_v}


@dataclass
class SolveResult:
    # @status: 'converged', 'diverged' or 'max_iters'
    # @residual: residual under M at the returned pair; residual_N under N (converged runs only)
    # @lemma_holds: nonzero components have a positive floor, None when not checked
    status: str
    u: SpaceTimeField
    v: SpaceTimeField
    residual: float
    iterations: int
    seed_label: str = ''
    residual_N: float = None
    localization: Localization = None
    cone: List[CheckOutcome] = None
    harnack: List[CheckOutcome] = None
    lemma_holds: bool = None
    region: str = None

    @property
    def converged(self):
        return self.status == CONVERGED

    def is_zero(self, tol):
        return max(sup_norm(self.u), sup_norm(self.v)) <= tol

    def to_dict(self):
        return {
            'status': self.status,
            'seed': self.seed_label,
            'residual': float(self.residual),
            'residual_N': None if self.residual_N is None else float(self.residual_N),
            'iterations': self.iterations,
            'localization': None if self.localization is None else self.localization.to_dict(),
            'cone': None if self.cone is None else [c.to_dict() for c in self.cone],
            'harnack': None if self.harnack is None else [c.to_dict() for c in self.harnack],
            'lemma_holds': self.lemma_holds,
            'region': self.region,
        }


def localize(u, v) -> Localization:
    return Localization(sup_norm(u), sup_norm(v), floor_functional(u), floor_functional(v))


def classify_region(loc: Localization, radii) -> str:
    """
    Region of a solution in the three-solution taxonomy (W, V\\W, C\\V, outside), or
    'existence-box' / 'outside' when no rho is given. None without radii.
    """
    if radii is None:
        return None
    r, R = radii.r, radii.R
    in_c_minus_v = loc.floor_u > r[0] and loc.floor_v > r[1]
    if radii.rho is None:
        inside = loc.sup_u <= R[0] and loc.sup_v <= R[1] and in_c_minus_v
        return 'existence-box' if inside else 'outside'
    rho = radii.rho
    if loc.sup_u < rho[0] and loc.sup_v < rho[1]:
        return 'W'
    if in_c_minus_v:
        return 'C\\V'
    if (loc.floor_u < r[0] or loc.floor_v < r[1]) and (loc.sup_u > rho[0] or loc.sup_v > rho[1]):
        return 'V\\W'
    return 'outside'


def verify(operators: ProblemOperators, result: SolveResult, m=None):
    """
    Re-check a converged pair: N residual, cone membership, Harnack inequality and positivity of the floor.
    """
    spec = operators.spec
    tol = spec.solver.residual_tol
    certs = spec.certificates
    u, v = result.u, result.v
    result.residual_N = operators.residual(u, v, 'N')
    result.localization = localize(u, v)
    result.cone = [in_cone(u, certs.cone_tol), in_cone(v, certs.cone_tol)]
    if m is not None:
        result.harnack = [harnack_check(u, m, certs.harnack_tol, certs.cone_tol),
                          harnack_check(v, m, certs.harnack_tol, certs.cone_tol)]
    if spec.certifiable:
        loc = result.localization
        result.lemma_holds = ((loc.sup_u <= 10 * tol or loc.floor_u > 0) and
                              (loc.sup_v <= 10 * tol or loc.floor_v > 0))
    result.region = classify_region(result.localization, spec.radii)
    if result.residual_N > 10 * max(result.residual, tol):
        logging.warning(f'seed {result.seed_label}: N residual {result.residual_N:.3g} exceeds 10 x the M residual')
    return result


def picard_solve(spec, seed=None, cfg=None, m=None, operators=None, label='') -> SolveResult:
    """
    Iterate (u, v) <- (1 - omega)(u, v) + omega M(u, v) until the M residual is below cfg.residual_tol.
    @seed: (SpaceTimeField, SpaceTimeField) or None for (0, 0), nonnegative
    @cfg: SolveConfig or None for spec.solver
    @m: float or None, Harnack constant for the post-convergence check
    """
    cfg = spec.solver if cfg is None else cfg
    operators = ProblemOperators(spec) if operators is None else operators
    if seed is None:
        seed = (operators.zeros(), operators.zeros())
    u, v = seed
    assert np.min(u.values) >= 0 and np.min(v.values) >= 0, 'seed must be nonnegative'
    omega = cfg.relaxation
    residual = float('inf')
    for iteration in range(1, cfg.max_iters + 1):
        mu, mv = operators.M_apply(u, v)
        residual = max(sup_norm(mu - u), sup_norm(mv - v))
        if residual <= cfg.residual_tol:
            result = SolveResult(CONVERGED, u, v, residual, iteration, label)
            return verify(operators, result, m)
        # 松弛迭代
        u = u * (1 - omega) + mu * omega
        v = v * (1 - omega) + mv * omega
        size = max(sup_norm(u), sup_norm(v))
        if not np.isfinite(size) or size > cfg.divergence_cap:
            logging.info(f'seed {label}: diverged at iteration {iteration} (norm {size:.3g})')
            return SolveResult(DIVERGED, u, v, residual, iteration, label)
        if iteration % 50 == 0:
            logging.debug(f'seed {label}: iteration {iteration}, residual {residual:.3e}')
    return SolveResult(MAX_ITERS, u, v, residual, cfg.max_iters, label)


def make_seeds(spec, operators: ProblemOperators, cfg=None):
    """
    (0, 0); c R psi for c in 1/4, 1/2, 1; then cfg.random_starts fields bar_S(xi R psi) with xi ~ U(0, 1)
    drawn from numpy.random.default_rng(cfg.seed).
    @return: list of (label, (u, v))
    """
    cfg = spec.solver if cfg is None else cfg
    grid = operators.grid
    R = spec.radii.R if spec.radii is not None else (cfg.seed_scale, cfg.seed_scale)
    psi = plateau(grid)
    seeds = [('zero', (operators.zeros(), operators.zeros()))]
    for c in (0.25, 0.5, 1.0):
        seeds.append((f'plateau x {c:g}', (SpaceTimeField.constant_in_time(grid, c * R[0] * psi),
                                            SpaceTimeField.constant_in_time(grid, c * R[1] * psi))))
    rng = np.random.default_rng(cfg.seed)
    for k in range(cfg.random_starts):
        xi_u = rng.uniform(0.0, 1.0, grid.nx + 1)
        xi_v = rng.uniform(0.0, 1.0, grid.nx + 1)
        u0 = operators.bar_S(xi_u * R[0] * psi).clamped()
        v0 = operators.bar_S(xi_v * R[1] * psi).clamped()
        seeds.append((f'random {k + 1} (rng seed {cfg.seed})', (u0, v0)))
    return seeds


@dataclass
class MultiStartResult:
    solutions: List[SolveResult]  # distinct converged pairs
    runs: List[SolveResult] = field(default_factory=list)  # every seed in seed order
    rng_seed: int = 0

    def to_dict(self):
        return {
            'rng_seed': self.rng_seed,
            'solutions': [s.to_dict() for s in self.solutions],
            'runs': [{'seed': r.seed_label, 'status': r.status, 'iterations': r.iterations,
                      'residual': float(r.residual)} for r in self.runs],
        }


def _distance(a: SolveResult, b: SolveResult):
    return max(sup_norm(a.u - b.u), sup_norm(a.v - b.v))


def multi_start(spec, cfg=None, m=None, threads=None) -> MultiStartResult:
    """
    picard_solve from every seed of make_seeds, in parallel over seeds; distinct converged pairs are those
    whose sup-distance to every earlier one is at least 10 x residual_tol.
    """
    cfg = spec.solver if cfg is None else cfg
    threads = cfg.threads if threads is None else threads
    operators = ProblemOperators(spec)
    seeds = make_seeds(spec, operators, cfg)

    def run(item):
        label, seed = item
        result = picard_solve(spec, seed, cfg, m, operators, label)
        logging.info(f'seed {label}: {result.status} after {result.iterations} iterations, residual {result.residual:.3e}')
        return result

    # 每个起点独立求解, 结果按起点顺序返回
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        runs = list(executor.map(run, seeds))
    solutions = []
    for result in runs:
        if not result.converged:
            continue
        if all(_distance(result, other) >= 10 * cfg.residual_tol for other in solutions):
            solutions.append(result)
    logging.info(f'multi-start: {len(solutions)} distinct solution(s) from {len(runs)} seeds')
    return MultiStartResult(solutions, runs, cfg.seed)
