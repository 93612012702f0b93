#!/usr/bin/env python3
"""
NUFFT-ES - Main execution script

Command-line front end for the 1D nonuniform FFT library: run type-1/type-2
transforms on CSV data, tabulate kernels and kernel transforms, sweep the
error against the kernel width, and batch-run the analytic checks.
"""

import argparse
import json
import logging
import os
import sys

import aliasing
import sweeps
from csv_io import read_complex, read_points, write_complex, write_table
from errors import DataFileError
from nufft import NuPoints, make_plan, type1, type2

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CHECK_FAILED = 3

DEFAULT_CONFIG = {
    "sigma": 2.0,
    "gamma": 0.98,
    "kernel": "es",
    "tol": 1e-9,
    "grid": 1000,
    "modes": 128,
    "points": 1000,
    "trials": 5,
    "seed": 0,
    "threads": 1,
    "log_file": "nufft_es.log",
}


def load_config(config_file: str) -> dict:
    """Load configuration from file, filling missing keys from the defaults."""
    config = dict(DEFAULT_CONFIG)
    if config_file and os.path.exists(config_file):
        try:
            with open(config_file, 'r') as f:
                config.update(json.load(f))
        except Exception as e:
            logger.error(f"Error loading config {config_file}: {e}")
    return config


def setup_logging(log_file: str, debug: bool = False):
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def run_transform(args, config) -> int:
    """Run one type-1 or type-2 transform on CSV input."""
    pts = NuPoints(read_points(args.points))
    data = read_complex(args.data)

    if args.kind == "type1":
        if args.modes is None:
            raise argparse.ArgumentTypeError("type1 needs --modes")
        if data.size != len(pts):
            raise DataFileError(args.data, 0, f"{data.size} strengths for {len(pts)} points in {args.points}")
        N = args.modes
    else:
        N = data.size
        if N % 2:
            raise DataFileError(args.data, 0, f"{N} coefficients; type2 needs an even number of modes")
        if args.modes is not None and args.modes != N:
            raise DataFileError(args.data, 0, f"{N} coefficients but --modes {args.modes}")

    tol = None if args.width is not None else (args.tol if args.tol is not None else config["tol"])
    plan = make_plan(N, sigma=args.sigma, w=args.width, tol=tol, gamma=args.gamma,
                     kernel_family=args.kernel)
    report = aliasing.eps_inf_estimate(plan)

    if args.kind == "type1":
        out = type1(plan, pts, data, workers=args.threads)
    else:
        out = type2(plan, pts, data, workers=args.threads)
    write_complex(args.out, out)

    clamp_note = " (width clamped)" if plan.width_clamped else ""
    # keep stdout clean when the CSV itself goes there
    stream = sys.stderr if args.out == "-" else sys.stdout
    print(f"{args.kind}: N={plan.N} M={len(pts)} n={plan.n} w={plan.w}{clamp_note} "
          f"beta={plan.beta:.6g} sigma={plan.grid.sigma:.6g} eps_inf~{report.eps_inf_est:.3g}",
          file=stream)
    return EXIT_OK


def run_kernel_table(args, config) -> int:
    which = sweeps.parse_list(args.which, sweeps.KERNEL_COLUMNS, "kernel")
    header, rows = sweeps.kernel_table(args.beta, grid=args.grid, which=which,
                                       normalize=args.normalize, ratio_to=args.ratio_to)
    write_table(args.out, header, rows)
    return EXIT_OK


def run_ft_table(args, config) -> int:
    which = sweeps.parse_list(args.which, sweeps.FT_COLUMNS, "column")
    xi_max = args.xi_max if args.xi_max is not None else 3.0 * args.beta
    header, rows = sweeps.ft_table(args.beta, xi_max, samples=args.samples, which=which)
    write_table(args.out, header, rows)
    return EXIT_OK


def run_error_sweep(args, config) -> int:
    header, rows = sweeps.error_sweep(sigma=args.sigma, gamma=args.gamma, w_min=args.w_min,
                                      w_max=args.w_max, N=args.modes, M=args.points,
                                      trials=args.trials, seed=args.seed, kernel=args.kernel,
                                      threads=args.threads)
    write_table(args.out, header, rows)
    return EXIT_OK


def run_checks(args, config) -> int:
    results = sweeps.run_checks(args.suite)
    write_table(args.out, sweeps.CHECK_HEADER, (r.row() for r in results))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def build_parser(config) -> CliParser:
    parser = CliParser(
        description="NUFFT-ES - 1D nonuniform FFTs with the exponential of semicircle kernel",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py transform type1 --points x.csv --data c.csv --modes 128 --out f.csv
  python main.py transform type2 --points x.csv --data f.csv --width 10 --out c.csv
  python main.py kernel-table --beta 30 --which es,kb,pswf --out kernels.csv
  python main.py ft-table --beta 30 --xi-max 60 --out ft.csv
  python main.py error-sweep --sigma 2 --w-min 4 --w-max 14 --out sweep.csv
  python main.py checks --suite all

Configuration:
  Defaults come from config.json (see config.template.json); flags override them.
        """
    )
    parser.add_argument('--config', default='config.json',
                        help='Path to configuration file (default: config.json)')
    parser.add_argument('--debug', action='store_true',
                        help='Enable debug logging')
    sub = parser.add_subparsers(dest='command', metavar='command')

    def add_kernel_flags(p):
        p.add_argument('--sigma', type=float, default=config["sigma"],
                       help=f'Upsampling factor (default: {config["sigma"]})')
        p.add_argument('--gamma', type=float, default=config["gamma"],
                       help=f'Safety factor in beta (default: {config["gamma"]})')
        p.add_argument('--kernel', choices=['es', 'kb'], default=config["kernel"],
                       help=f'Spreading kernel (default: {config["kernel"]})')
        p.add_argument('--threads', type=int, default=config["threads"],
                       help='Worker threads (results do not depend on it)')

    p = sub.add_parser('transform', help='Run a type-1 or type-2 transform on CSV files')
    p.add_argument('kind', choices=['type1', 'type2'])
    p.add_argument('--points', required=True, metavar='FILE', help='Point file (header x)')
    p.add_argument('--data', required=True, metavar='FILE',
                   help='Strengths (type1) or mode coefficients (type2), header re,im')
    p.add_argument('--modes', type=int, metavar='N', help='Number of output modes (type1)')
    width = p.add_mutually_exclusive_group()
    width.add_argument('--tol', type=float, help=f'Requested tolerance (default: {config["tol"]})')
    width.add_argument('--width', type=int, metavar='W', help='Kernel width in fine-grid points')
    add_kernel_flags(p)
    p.add_argument('--out', default='-', metavar='FILE', help='Output CSV (default: stdout)')
    p.set_defaults(handler=run_transform)

    p = sub.add_parser('kernel-table', help='Tabulate the unscaled kernels on [-1, 1]')
    p.add_argument('--beta', type=float, required=True)
    p.add_argument('--grid', type=int, default=config["grid"], metavar='P',
                   help=f'Number of intervals (default: {config["grid"]})')
    p.add_argument('--which', default='es,kb,pswf', help='Comma list of es,kb,kba,slep,sleph,pswf')
    p.add_argument('--normalize', choices=['center', 'none'], default='center')
    p.add_argument('--ratio-to', choices=['pswf'], default=None)
    p.add_argument('--out', default='-', metavar='FILE')
    p.set_defaults(handler=run_kernel_table)

    p = sub.add_parser('ft-table', help='Tabulate the ES transform against its asymptotics')
    p.add_argument('--beta', type=float, required=True)
    p.add_argument('--xi-max', type=float, default=None, help='Largest xi (default: 3 beta)')
    p.add_argument('--samples', type=int, default=201)
    p.add_argument('--which', default='quad,asym,kb,sinc', help='Comma list of quad,asym,kb,sinc')
    p.add_argument('--out', default='-', metavar='FILE')
    p.set_defaults(handler=run_ft_table)

    p = sub.add_parser('error-sweep', help='Empirical error against eps_inf over kernel widths')
    add_kernel_flags(p)
    p.add_argument('--w-min', type=int, default=4)
    p.add_argument('--w-max', type=int, default=14)
    p.add_argument('--modes', type=int, default=config["modes"], metavar='N')
    p.add_argument('--points', type=int, default=config["points"], metavar='M')
    p.add_argument('--trials', type=int, default=config["trials"])
    p.add_argument('--seed', type=int, default=config["seed"])
    p.add_argument('--out', default='-', metavar='FILE')
    p.set_defaults(handler=run_error_sweep)

    p = sub.add_parser('checks', help='Run the tail, sinc-sum and prolate checks')
    p.add_argument('--suite', choices=['tails', 'sincs', 'pswf', 'all'], default='all')
    p.add_argument('--out', default='-', metavar='FILE')
    p.set_defaults(handler=run_checks)
    return parser


def _config_path(argv) -> str:
    """--config has to be known before the parser is built (it supplies defaults)."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config', default='config.json')
    known, _ = pre.parse_known_args(argv)
    return known.config


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    config = load_config(_config_path(argv))
    parser = build_parser(config)

    if not argv:
        parser.print_help()
        return EXIT_USAGE
    args = parser.parse_args(argv)
    setup_logging(config.get("log_file"), args.debug)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE

    try:
        return args.handler(args, config)
    except DataFileError as e:
        logger.error(f"Error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:
        logger.error(f"Error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
