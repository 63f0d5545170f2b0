"""
Approximate At-Most-k Toolkit - Command Line
============================================

Subcommands:
    encode      DIMACS for a shape, or for a counter/binomial baseline
    analyze     literal rate, coverage and efficiency of one shape
    search      ranked CSV of every shape for (k, n)
    reproduce   CSV data of the fig4 / fig5 / sec31 experiments
    cache       stats, prune or clear the histogram cache

Exit codes:
    0 success, 2 validation error, 3 oracle disagreement, 4 empty search
"""

import argparse
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from .approx import ModelShape, SearchBounds, encode_approx, parse_shape
from .cache import ResultCache, get_cache
from .encoders import counter_literal_count, encode_baseline
from .metrics import EfficiencyReport, best_model, efficiency, find_probability, rank_models
from .oracle import compare_oracles, count_accepted_bruteforce, coverage_from_histogram
from .reports import (
    fig4_table, fig5_table, format_percent, ranking_table, sec31_tables, write_text_atomic
)
from .ui import TerminalUI
from .logger import get_logger, init_from_config
from .config_manager import Constants, config, ensure_paths_exist

# Module logger
logger = get_logger(__name__)


class UsageError(ValueError):
    """Invalid combination of command-line options."""
    pass


# =============================================================================
# ARGUMENTS
# =============================================================================

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    parser.add_argument('-q', '--quiet', action='store_true',
                        help='No panels, tables or progress on stderr')
    parser.add_argument('--threads', type=int, default=None,
                        help='Worker processes (AMK_THREADS still caps it)')
    parser.add_argument('--cache', action='store_true', default=None,
                        help='Reuse cached acceptance histograms')


def _add_bounds(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('search bounds')
    group.add_argument('--max-levels', type=int, default=None)
    group.add_argument('--max-h', type=int, default=None)
    group.add_argument('--max-w', type=int, default=None)
    group.add_argument('--max-leaf-m', type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='amk',
        description='At-most-k CNF encodings and approximate-at-most-k models'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    encode = subparsers.add_parser('encode', help='Write DIMACS for a model or baseline')
    encode.add_argument('--shape', help='Model, e.g. "2x2,2x2;m=2;k=2;ff=0;ft=0"')
    encode.add_argument('--encoding', default='approx',
                        help='approx | counter | binomial (default: approx)')
    encode.add_argument('--n', type=int, default=None)
    encode.add_argument('--k', type=int, default=None)
    encode.add_argument('-o', '--output', default=None, help='DIMACS file (default: stdout)')
    _add_bounds(encode)
    _add_common(encode)

    analyze = subparsers.add_parser('analyze', help='Coverage and efficiency of a model')
    analyze.add_argument('--shape', required=True)
    analyze.add_argument('--oracle', default=None, help='dp | brute | both')
    analyze.add_argument('--solutions', type=int, default=None,
                         help='Probability of admitting one of S solutions')
    _add_common(analyze)

    search = subparsers.add_parser('search', help='Rank every model for (k, n)')
    search.add_argument('--k', type=int, required=True)
    search.add_argument('--n', type=int, required=True)
    search.add_argument('-o', '--output', default=None, help='CSV file (default: stdout)')
    _add_bounds(search)
    _add_common(search)

    reproduce = subparsers.add_parser('reproduce', help='CSV data of an experiment')
    reproduce.add_argument('target', help='fig4 | fig5 | sec31')
    reproduce.add_argument('-o', '--output', default=None,
                           help='Results directory (default: output.results_dir)')
    _add_bounds(reproduce)
    _add_common(reproduce)

    cache = subparsers.add_parser('cache', help='Inspect or empty the histogram cache')
    cache.add_argument('action', help='stats | prune | clear')
    cache.add_argument('--dir', default=None, help='Cache directory (default: cache.path)')
    _add_common(cache)

    return parser


def _bounds(args) -> SearchBounds:
    return SearchBounds.from_config(
        max_levels=args.max_levels, max_h=args.max_h,
        max_w=args.max_w, max_leaf_m=args.max_leaf_m
    )


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_encode(args, ui: TerminalUI) -> int:
    """DIMACS to --output or stdout, stats summary to stderr."""
    encoding = args.encoding
    if encoding not in Constants.ENCODINGS:
        raise UsageError(f"unknown encoding '{encoding}' "
                         f"(expected one of {', '.join(Constants.ENCODINGS)})")

    if args.shape is not None:
        if encoding != 'approx':
            raise UsageError("--shape only applies to --encoding approx")
        if args.n is not None or args.k is not None:
            raise UsageError("give either --shape or --n/--k, not both")
        result = encode_approx(parse_shape(args.shape))
    else:
        if args.n is None or args.k is None:
            raise UsageError("--n and --k are required without --shape")
        if encoding == 'approx':
            report = best_model(args.k, args.n, _bounds(args), threads=args.threads,
                                cache=get_cache(args.cache))
            if report is None:
                ui.show_error(f"no model for k={args.k}, n={args.n} within bounds")
                return Constants.EXIT_NO_MODEL
            ui.show_info(f"using {report.shape}")
            result = encode_approx(report.shape)
        else:
            result = encode_baseline(encoding, args.n, args.k)

    dimacs = result.cnf.to_dimacs()
    if args.output:
        write_text_atomic(args.output, dimacs)
    else:
        ui.write_payload(dimacs)

    ui.print_stats_line(f"{result.stats.summary()} k={result.derived_k} n={result.derived_n}")
    return Constants.EXIT_OK


def _brute_report(shape: ModelShape, threads: Optional[int]) -> EfficiencyReport:
    """Efficiency report with coverage from the literal oracle."""
    encoding = encode_approx(shape)
    report = coverage_from_histogram(count_accepted_bruteforce(encoding, threads=threads))
    k, n = shape.derived_params()
    approx_literals = encoding.stats.literals
    counter_literals = counter_literal_count(n, k)
    rate = Fraction(approx_literals, counter_literals)
    return EfficiencyReport(
        shape=shape, derived_k=k, derived_n=n,
        approx_literals=approx_literals, counter_literals=counter_literals,
        literal_rate=rate, overall_coverage=report.overall_coverage,
        maxcount_coverage=report.maxcount_coverage,
        efficiency=report.overall_coverage / rate
    )


def cmd_analyze(args, ui: TerminalUI) -> int:
    """key=value report on stdout, panel on stderr."""
    oracle = args.oracle or config.oracle.get('default', 'dp')
    if oracle not in Constants.ORACLES:
        raise UsageError(f"unknown oracle '{oracle}' "
                         f"(expected one of {', '.join(Constants.ORACLES)})")

    shape = parse_shape(args.shape)
    if oracle == 'brute':
        report = _brute_report(shape, args.threads)
    else:
        report = efficiency(shape, cache=get_cache(args.cache))

    lines = [
        ('shape', str(shape)),
        ('k', report.derived_k),
        ('n', report.derived_n),
        ('approx_literals', report.approx_literals),
        ('counter_literals', report.counter_literals),
        ('rate', format_percent(report.literal_rate)),
        ('overall', format_percent(report.overall_coverage)),
        ('maxcount', format_percent(report.maxcount_coverage)),
        ('efficiency', f"{float(report.efficiency):.2f}"),
    ]

    if args.solutions is not None:
        s = args.solutions
        lines.append(('find_overall', format_percent(find_probability(report.overall_coverage, s))))
        lines.append(('find_maxcount', format_percent(find_probability(report.maxcount_coverage, s))))

    exit_code = Constants.EXIT_OK
    if oracle == 'both':
        comparison = compare_oracles(shape, threads=args.threads)
        lines.append(('oracles_agree', 'true' if comparison.agree else 'false'))
        if not comparison.agree:
            ui.show_error(f"oracles disagree at true-counts {comparison.mismatched_rows()}")
            exit_code = Constants.EXIT_ORACLE_DISAGREEMENT

    for key, value in lines:
        ui.print_line(f"{key}={value}")
    ui.show_report(report)
    return exit_code


def cmd_search(args, ui: TerminalUI) -> int:
    """Ranking CSV to --output or stdout."""
    cache = get_cache(args.cache)
    with ui.progress() as progress:
        task = progress.add_task(f"k={args.k}, n={args.n}", total=None)
        reports = rank_models(
            args.k, args.n, _bounds(args), threads=args.threads, cache=cache,
            progress_callback=lambda done, total: progress.update(task, completed=done, total=total)
        )

    if not reports:
        ui.show_error(f"no model for k={args.k}, n={args.n} within bounds")
        return Constants.EXIT_NO_MODEL

    text = ranking_table(reports).render()
    if args.output:
        write_text_atomic(args.output, text)
        ui.show_success(f"{len(reports)} models written to {args.output}")
    else:
        ui.write_payload(text)

    ui.show_ranking(reports)
    return Constants.EXIT_OK


def cmd_reproduce(args, ui: TerminalUI) -> int:
    """CSV files of one experiment into the results directory."""
    target = args.target
    if target not in Constants.REPRODUCE_TARGETS:
        raise UsageError(f"unknown target '{target}' "
                         f"(expected one of {', '.join(Constants.REPRODUCE_TARGETS)})")

    out_dir = Path(args.output or config.get('output.results_dir', 'results')).resolve()
    ensure_paths_exist(out_dir)
    cache = get_cache(args.cache)

    if target == 'fig4':
        tables = [fig4_table(cache=cache)]
    elif target == 'sec31':
        tables = sec31_tables(cache=cache)
    else:
        with ui.progress() as progress:
            tasks = {}

            def on_k(n: int, k: int, total: int):
                if n not in tasks:
                    tasks[n] = progress.add_task(f"n={n}", total=total)
                progress.update(tasks[n], completed=k)

            tables = [fig5_table(bounds=_bounds(args), threads=args.threads,
                                 cache=cache, progress_callback=on_k)]

    written: List[str] = []
    for table in tables:
        path = write_text_atomic(out_dir / f"{table.name}.csv", table.render())
        written.append(str(path))

    ui.show_summary({'target': target, 'files': ", ".join(written),
                     'rows': sum(len(t.rows) for t in tables)})
    return Constants.EXIT_OK


def cmd_cache(args, ui: TerminalUI) -> int:
    """Cache maintenance; key=value lines on stdout."""
    action = args.action
    if action not in Constants.CACHE_ACTIONS:
        raise UsageError(f"unknown cache action '{action}' "
                         f"(expected one of {', '.join(Constants.CACHE_ACTIONS)})")

    cache = ResultCache(cache_dir=args.dir)
    if action == 'prune':
        ui.print_line(f"removed={cache.cleanup_expired()}")
    elif action == 'clear':
        ui.print_line(f"removed={cache.clear()}")
    else:
        for key, value in cache.stats().items():
            ui.print_line(f"{key}={value}")
    return Constants.EXIT_OK


COMMANDS = {
    'encode': cmd_encode,
    'analyze': cmd_analyze,
    'search': cmd_search,
    'reproduce': cmd_reproduce,
    'cache': cmd_cache,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and run one subcommand.

    Returns:
        Process exit code, one of 0, 2, 3, 4
    """
    args = build_parser().parse_args(argv)
    init_from_config('DEBUG' if args.verbose else None)
    ui = TerminalUI(quiet=args.quiet)

    try:
        return COMMANDS[args.command](args, ui)
    except ValueError as e:
        # CnfError, EncoderError, ShapeError, OracleError, MetricsError, UsageError
        logger.debug(f"{args.command} rejected: {e}")
        ui.show_error(str(e))
        return Constants.EXIT_VALIDATION
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        ui.show_warning(f"{args.command} interrupted")
        return Constants.EXIT_VALIDATION
    except Exception as e:
        # No exit code of its own: reported like a rejected run
        logger.exception(f"{args.command} failed")
        ui.show_error(f"{args.command} failed: {e}")
        return Constants.EXIT_VALIDATION
