"""
Approximate At-Most-k Toolkit - Reports Module
==============================================

CSV tables for the experiments and file output.

Tables:
- ranking  - search results for one (k, n)
- fig4     - 2x2 chain literals vs counter, with coverage and efficiency
- fig5     - best-efficiency model per k for n = 10, 20, 30
- sec31    - statistics and histogram of approximate-at-most-1/2-of-16

CSV: comma separator, LF endings, header row, ratios as fixed-point decimals.
Files are written atomically under a lock file.
"""

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Union

from filelock import FileLock

from .approx import chain_shape, encode_approx, parse_shape
from .encoders import counter_literal_count
from .metrics import EfficiencyReport, best_model, efficiency
from .oracle import coverage
from .logger import get_logger
from .config_manager import config, Constants

# Module logger
logger = get_logger(__name__)

RANKING_HEADER = ('rank', 'shape', 'approx_literals', 'counter_literals',
                  'literal_rate', 'coverage', 'efficiency')


@dataclass
class CsvTable:
    """A named CSV table."""

    name: str
    header: Sequence[str]
    rows: List[Sequence] = field(default_factory=list)

    def render(self) -> str:
        return render_csv(self.header, self.rows)


def format_ratio(value: Union[Fraction, float], digits: Optional[int] = None) -> str:
    """Fixed-point decimal rendering of a ratio for CSV."""
    if digits is None:
        digits = config.get('output.ratio_digits', 12)
    return f"{float(value):.{digits}f}"


def format_percent(value: Union[Fraction, float]) -> str:
    """One-decimal percentage for human-readable output."""
    return f"{float(value) * 100:.1f}%"


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_text_atomic(path: Union[str, Path], text: str) -> Path:
    """
    Write text via a temp file and rename, holding <path>.lock.

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(path) + '.lock')
    with lock:
        temp_path = path.with_suffix(path.suffix + '.tmp')
        with open(temp_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        temp_path.replace(path)
    logger.info(f"Wrote {path}")
    return path


# =============================================================================
# TABLES
# =============================================================================

def _report_cells(report: EfficiencyReport) -> list:
    return [str(report.shape), report.approx_literals, report.counter_literals,
            format_ratio(report.literal_rate), format_ratio(report.overall_coverage),
            format_ratio(report.efficiency)]


def ranking_table(reports: Sequence[EfficiencyReport]) -> CsvTable:
    rows = [[rank] + _report_cells(report) for rank, report in enumerate(reports, 1)]
    return CsvTable(name='ranking', header=RANKING_HEADER, rows=rows)


def fig4_table(sizes: Sequence[int] = Constants.FIG4_SIZES, cache=None) -> CsvTable:
    """2x2 chain approximate-at-most-1/2 against counter at-most-n/2."""
    table = CsvTable(name='fig4', header=('n', 'k', 'shape', 'approx_literals',
                                          'counter_literals', 'literal_rate',
                                          'coverage', 'efficiency'))
    for n in sizes:
        report = efficiency(chain_shape(n), cache=cache)
        table.rows.append([n, report.derived_k] + _report_cells(report))
    return table


def fig5_table(sizes: Sequence[int] = Constants.FIG5_SIZES, bounds=None,
               threads: Optional[int] = None, cache=None,
               progress_callback: Optional[Callable[[int, int, int], None]] = None
               ) -> CsvTable:
    """Best-efficiency model for every feasible k of each n."""
    table = CsvTable(name='fig5', header=('n', 'k', 'shape', 'approx_literals',
                                          'counter_literals', 'literal_rate',
                                          'coverage', 'efficiency'))
    for n in sizes:
        for k in range(1, n):
            report = best_model(k, n, bounds, threads=threads, cache=cache)
            if progress_callback:
                progress_callback(n, k, n - 1)
            if report is None:
                continue
            table.rows.append([n, k] + _report_cells(report))
    return table


def sec31_tables(cache=None) -> List[CsvTable]:
    """
    Statistics rows and per-count coverage rows of 1/2-of-16.

    The stats table holds the two-level chain and, below it, the
    single-level model of the same (k, n) for comparison; the histogram
    belongs to the chain.
    """
    summary = CsvTable(name='sec31_stats', header=(
        'shape', 'variables', 'aux_variables', 'clauses', 'literals', 'k', 'n',
        'counter_literals', 'overall_solutions', 'overall_coverage',
        'maxcount_solutions', 'maxcount_coverage'))

    reports = []
    for text in (Constants.SEC31_SHAPE, Constants.SEC31_FLAT_SHAPE):
        shape = parse_shape(text)
        encoding = encode_approx(shape)
        stats = encoding.stats
        report = coverage(shape, cache=cache)
        reports.append(report)
        summary.rows.append([
            str(shape), stats.variables, stats.aux_variables, stats.clauses, stats.literals,
            encoding.derived_k, encoding.derived_n,
            counter_literal_count(encoding.derived_n, encoding.derived_k),
            report.overall_denominator, format_ratio(report.overall_coverage),
            report.maxcount_denominator, format_ratio(report.maxcount_coverage)
        ])

    histogram = CsvTable(name='sec31_histogram',
                         header=('t', 'accepted', 'possible', 'ratio'))
    for t, accepted, possible in reports[0].histogram.rows():
        histogram.rows.append([t, accepted, possible,
                               format_ratio(Fraction(accepted, possible))])

    return [summary, histogram]
