import argparse
import sys

from .scenario import (
    VERBOSE, load_scenario, rates_only, run_scenario, sweep_scenario,
    verify_scenario,
)
from .utils import ConfigError, SpinRelaxError

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('config', help='JSON scenario file')
    common.add_argument('--out-dir', metavar='<dir>', default='.',
                        help='directory receiving the output files '
                        '(default: current directory)')
    common.add_argument('--strict', action='store_true',
                        help='exit with code 2 without computing anything '
                        'when a perturbative validity condition fails')
    common.add_argument('--tolerance', metavar='<float>', type=float,
                        default=None,
                        help='validity threshold; a condition passes when '
                        'its margin is below this value (default: config '
                        'value or 0.1)')
    common.add_argument('--grid-points', metavar='<int>', type=int,
                        default=None,
                        help='override the number of time grid points')
    common.add_argument('--verbose', action='store_true',
                        help='print progress lines')

    parser = argparse.ArgumentParser(
        prog='spinrelax',
        description='Relaxation and dephasing of spins coupled to local and '
        'collective thermal reservoirs.'
    )
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    sub.add_parser('run', parents=[ common ],
                   help='write trajectory.csv, rates.json and oracle.csv '
                   'as selected in the scenario')
    sub.add_parser('rates', parents=[ common ],
                   help='write rates.json only')
    sub.add_parser('verify', parents=[ common ],
                   help='cross-check against the exact pure-dephasing '
                   'model and the level shift blocks')
    sweep = sub.add_parser('sweep', parents=[ common ],
                           help='run the scenario once per sweep value')
    sweep.add_argument('--jobs', metavar='<int>', type=int, default=1,
                       help='number of worker processes (default: 1)')
    return parser

def main(argv=None):
    args = build_parser().parse_args(argv)
    verbose = VERBOSE if args.verbose else 0
    try:
        scenario = load_scenario(args.config, grid_points=args.grid_points,
                                 tolerance=args.tolerance)
        if args.command == 'run':
            return run_scenario(scenario, args.out_dir, strict=args.strict,
                                verbose=verbose)
        if args.command == 'rates':
            return rates_only(scenario, args.out_dir, strict=args.strict,
                              verbose=verbose)
        if args.command == 'verify':
            return verify_scenario(scenario, args.out_dir,
                                   strict=args.strict, verbose=verbose)
        return sweep_scenario(scenario, args.out_dir, strict=args.strict,
                              jobs=max(1, args.jobs),
                              grid_points=args.grid_points,
                              tolerance=args.tolerance, verbose=verbose)
    except ConfigError as e:
        sys.stderr.write('ERROR: invalid scenario: {}\n'.format(e))
        return 1
    except OSError as e:
        sys.stderr.write('ERROR: {}\n'.format(e))
        return 1
    except SpinRelaxError as e:
        sys.stderr.write('ERROR: numerical failure: {}\n'.format(e))
        return 1
