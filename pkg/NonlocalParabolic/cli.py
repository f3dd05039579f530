# Command line entry point: NonlocalParabolic <command> PROBLEM [options]
import os
import sys
import time
import logging
import argparse
import jsonschema
from dataclasses import replace
from .utils import set_logging_level
from .problem import ConfigurationError
from .constants import ConditionBounds, compute_constants, scan_b, write_scan_csv
from .certificates import (
    certify_existence, certify_or_existence, certify_three_solutions, certify_nonexistence, scan_nested_radii,
)
from .field import write_pair_csv
from .solver import multi_start
from .report import (
    load_problem, bundled_problem, RunReport, validate_report, render_summary, write_report, ReportStore,
    constants_key, __version__,
)

COMMANDS = ('constants', 'certify', 'solve', 'scan', 'all')


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('problem', help='problem file (INI) or the name of a bundled one, e.g. existence')
    common.add_argument('--modes', type=int, default=None, help='sine modes of the operators (default nx - 1)')
    common.add_argument('--nx', type=int, default=None, help='space intervals')
    common.add_argument('--nt', type=int, default=None, help='time steps')
    common.add_argument('--tol', type=float, default=None, help='Picard residual tolerance')
    common.add_argument('--threads', type=int, default=None, help='worker threads of the multi-start')
    common.add_argument('--seed', type=int, default=None, help='random seed of the multi-start')
    common.add_argument('--out', type=str, default=None, help='JSON report path (default standard output)')
    common.add_argument('--csv', type=str, default=None, help='directory for solution and scan CSV files')
    common.add_argument('--strict', action='store_true', help='exit with code 2 when a certificate fails')
    common.add_argument('--summary', action='store_true', help='print a text summary to standard error')
    common.add_argument('--workspace', type=str, default=None,
                        help='directory of the run ledger and constants cache')
    parser = argparse.ArgumentParser(
        prog='NonlocalParabolic',
        description='Spectral solver and certificate engine for parabolic systems with nonlocal initial conditions.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('constants', parents=[common], help='m, c1, c2, C1, C2 and thresholds')
    subparsers.add_parser('certify', parents=[common], help='evaluate the certificates of the configured radii')
    subparsers.add_parser('solve', parents=[common], help='multi-start Picard solve')
    scan = subparsers.add_parser('scan', parents=[common], help='scan D = [b, L - b] for the optimal b')
    scan.add_argument('--b-steps', type=int, default=17, dest='b_steps', help='number of b values')
    subparsers.add_parser('all', parents=[common], help='constants, certificates and solutions')
    return parser


def apply_overrides(spec, args):
    """command line values replace the configured ones"""
    discretization = spec.discretization
    for key in ('nx', 'nt', 'modes'):
        if getattr(args, key) is not None:
            discretization = replace(discretization, **{key: getattr(args, key)})
    solver = spec.solver
    if args.tol is not None:
        solver = replace(solver, residual_tol=args.tol)
    if args.seed is not None:
        solver = replace(solver, seed=args.seed)
    if args.threads is not None:
        solver = replace(solver, threads=args.threads)
    spec = replace(spec, discretization=discretization, solver=solver)
    errors = spec.validate()
    if errors:
        raise ConfigurationError(errors)
    return spec


def constants_for(spec, store=None):
    """ConstantsBundle of the problem, read from and written to the store when one is given"""
    d = spec.discretization
    if spec.certifiable:
        bounds = (spec.alpha.bounds, spec.beta.bounds)
    else:
        bounds = (ConditionBounds(), ConditionBounds())
    key = constants_key(spec.geometry, d.nx, d.constant_modes, d.double_integral, d.t_gibbs, bounds)
    if store is not None:
        bundle = store.get_constants(key)
        if bundle is not None:
            return bundle
    bundle = compute_constants(spec.geometry, nx=d.nx, K=d.constant_modes, convention=d.double_integral,
                               t_gibbs=d.t_gibbs, bounds=bounds)
    if store is not None:
        store.put_constants(key, bundle)
    return bundle


def certify_all(spec, consts):
    """every certificate the configured radii allow; non-existence always"""
    reports = []
    radii = spec.radii
    if radii is not None:
        reports.append(certify_existence(spec, radii, consts))
        if radii.R_tilde is not None:
            reports.append(certify_or_existence(spec, radii, radii.R_tilde, consts))
        if radii.rho is not None:
            reports.append(certify_three_solutions(spec, radii, consts))
            reports.append(certify_three_solutions(spec, radii, consts, strengthened=True))
        if radii.nested:
            reports.append(scan_nested_radii(spec, radii.nested, consts))
    reports.append(certify_nonexistence(spec, consts))
    return reports


def run(command, spec, args=None, store=None) -> RunReport:
    """
    Dispatch one subcommand.
    @command: str, one of COMMANDS
    @args: argparse.Namespace or None, for --csv and --b-steps
    """
    assert command in COMMANDS, command
    csv_dir = getattr(args, 'csv', None)
    report = RunReport(command, spec)
    consts = None
    if command in ('constants', 'certify', 'solve', 'all'):
        start = time.perf_counter()
        consts = constants_for(spec, store)
        report.constants = consts
        report.timings['constants'] = time.perf_counter() - start
    if command in ('certify', 'all'):
        start = time.perf_counter()
        report.certificates = certify_all(spec, consts)
        report.timings['certificates'] = time.perf_counter() - start
    if command in ('solve', 'all'):
        start = time.perf_counter()
        report.solutions = multi_start(spec, m=consts.m)
        report.timings['solve'] = time.perf_counter() - start
        if csv_dir is not None:
            os.makedirs(csv_dir, exist_ok=True)
            for k, solution in enumerate(report.solutions.solutions):
                write_pair_csv(os.path.join(csv_dir, f'{spec.name}_solution_{k + 1}.csv'), solution.u, solution.v)
    if command == 'scan':
        start = time.perf_counter()
        d = spec.discretization
        report.scan = scan_b(spec.geometry, steps=getattr(args, 'b_steps', 17), nx=d.nx, K=d.constant_modes,
                             convention=d.double_integral, t_gibbs=d.t_gibbs)
        report.timings['scan'] = time.perf_counter() - start
        if csv_dir is not None:
            os.makedirs(csv_dir, exist_ok=True)
            write_scan_csv(os.path.join(csv_dir, f'{spec.name}_scan_b.csv'), report.scan[0])
    return report


def main(argv=None) -> int:
    """
    @return: 0 when the run finished, 1 on errors, 2 with --strict and a failed certificate
    """
    set_logging_level()
    args = build_parser().parse_args(argv)
    store = None
    try:
        path = args.problem
        # 不是文件路径时按内置问题名查找
        if not os.path.exists(path) and os.path.exists(bundled_problem(path)):
            path = bundled_problem(path)
        spec = apply_overrides(load_problem(path), args)
        if args.workspace is not None:
            os.makedirs(args.workspace, exist_ok=True)
            store = ReportStore(os.path.join(args.workspace, 'runs.json'))
        report = run(args.command, spec, args, store)
        data = report.to_dict()
        validate_report(data)
        write_report(data, args.out)
        if store is not None:
            store.add_run(data, args.command, data['spec']['hash'])
        if args.summary:
            sys.stderr.write(render_summary(data))
    except (ValueError, OSError, jsonschema.ValidationError) as error:
        logging.exception(error)
        return 1
    finally:
        if store is not None:
            store.close()
    if args.strict and report.failed_certificates:
        logging.info(f'{len(report.failed_certificates)} certificate(s) failed')
        return 2
    return 0


if __name__ == '__main__':
    sys.exit(main())
