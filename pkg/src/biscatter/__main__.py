import argparse
import logging
import sys

from . import Workbench
from .acceptance import __CRITERIA__


__LOG_FORMAT__ = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='biscatter',
        description='Pseudospectral workbench comparing cubic NLS and Hartree-NLS under contracting potentials')
    parser.add_argument('config', nargs='?', help='YAML run document')
    parser.add_argument('--check', action='store_true', help='Run the acceptance suite instead of a run document')
    parser.add_argument('--criteria', nargs='+', choices=sorted(__CRITERIA__), help='Subset of acceptance criteria')
    parser.add_argument('-o', '--output', help='Output directory, overrides BISCATTER_OUTPUT_DIR and output.directory')
    parser.add_argument('-j', '--jobs', type=int, help='Worker processes for per-N sweep elements')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Log at DEBUG')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Log at WARNING')
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=__LOG_FORMAT__)

    if args.jobs is not None and args.jobs < 1:
        parser.error('--jobs must be at least 1')
    if not args.check and args.config is None:
        parser.error('a run document is required unless --check is given')

    workbench = Workbench(args.output, args.jobs)
    if args.check:
        code = workbench.check(args.criteria)
    else:
        code = workbench.run_file(args.config)
    sys.exit(code)


if __name__ == '__main__':
    main()
