"""
Approximate At-Most-k Toolkit - Metrics Module
==============================================

Comparison against the counter encoding:

    literal rate = approximate literals / counter literals
    efficiency   = overall coverage / literal rate

and the best-efficiency search over enumerated shapes. DP histograms of
uncached shapes are computed in worker processes.
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Union

from .approx import ModelShape, SearchBounds, enumerate_shapes, predicted_stats
from .encoders import EncoderError, counter_literal_count
from .oracle import AcceptHistogram, cached_histogram, count_accepted_dp, coverage
from .logger import get_logger
from .config_manager import get_thread_count

# Module logger
logger = get_logger(__name__)

Ratio = Union[Fraction, float]


class MetricsError(ValueError):
    """Metric undefined for the given shape."""
    pass


@dataclass(frozen=True)
class EfficiencyReport:
    """Size and coverage of one shape relative to the counter baseline."""

    shape: ModelShape
    derived_k: int
    derived_n: int
    approx_literals: int
    counter_literals: int
    literal_rate: Fraction
    overall_coverage: Fraction
    maxcount_coverage: Fraction
    efficiency: Fraction

    @property
    def rank_key(self) -> tuple:
        """Higher efficiency first, then fewer literals, then shape order."""
        return (-self.efficiency, self.approx_literals, self.shape.sort_key)


def _counter_baseline(shape: ModelShape) -> int:
    k, n = shape.derived_params()
    try:
        return counter_literal_count(n, k)
    except EncoderError as e:
        raise MetricsError(f"literal rate undefined for k={k}, n={n}: {e}")


def literal_rate(shape: ModelShape) -> Fraction:
    """Approximate literals over counter literals for the shape's (k, n)."""
    return Fraction(predicted_stats(shape).literals, _counter_baseline(shape))


def efficiency(shape: ModelShape, cache=None,
               histogram: Optional[AcceptHistogram] = None) -> EfficiencyReport:
    """Combine coverage and literal rate of one shape."""
    k, n = shape.derived_params()
    counter_literals = _counter_baseline(shape)
    approx_literals = predicted_stats(shape).literals
    rate = Fraction(approx_literals, counter_literals)
    report = coverage(shape, cache=cache, histogram=histogram)

    return EfficiencyReport(
        shape=shape,
        derived_k=k,
        derived_n=n,
        approx_literals=approx_literals,
        counter_literals=counter_literals,
        literal_rate=rate,
        overall_coverage=report.overall_coverage,
        maxcount_coverage=report.maxcount_coverage,
        efficiency=report.overall_coverage / rate
    )


def rank_models(k: int, n: int, bounds: Optional[SearchBounds] = None,
                threads: Optional[int] = None, cache=None,
                progress_callback: Optional[Callable[[int, int], None]] = None
                ) -> List[EfficiencyReport]:
    """
    Evaluate every enumerated shape for (k, n), best first.

    Args:
        k, n: Target approximate-at-most-k of n, 1 <= k < n
        bounds: Search bounds (config defaults when None)
        threads: Worker override (AMK_THREADS still caps it)
        cache: Optional histogram cache
        progress_callback: Called as (done, total) after each shape

    Returns:
        Reports sorted by rank_key; empty when nothing fits the bounds
    """
    if not 1 <= k < n:
        raise MetricsError(f"search needs 1 <= k < n, got k={k}, n={n}")

    shapes = enumerate_shapes(k, n, bounds)
    total = len(shapes)
    workers = get_thread_count(threads)
    reports: List[EfficiencyReport] = []

    if workers == 1 or total <= 1:
        for done, shape in enumerate(shapes, 1):
            reports.append(efficiency(shape, cache=cache))
            if progress_callback:
                progress_callback(done, total)
    else:
        pending = []
        for shape in shapes:
            histogram = cached_histogram(shape, cache)
            if histogram is None:
                pending.append(shape)
            else:
                reports.append(efficiency(shape, histogram=histogram))
        if reports and progress_callback:
            progress_callback(len(reports), total)

        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(count_accepted_dp, shape): shape for shape in pending}
            for future in as_completed(futures):
                reports.append(efficiency(futures[future], cache=cache,
                                          histogram=future.result()))
                if progress_callback:
                    progress_callback(len(reports), total)

    reports.sort(key=lambda r: r.rank_key)
    return reports


def best_model(k: int, n: int, bounds: Optional[SearchBounds] = None,
               threads: Optional[int] = None, cache=None) -> Optional[EfficiencyReport]:
    """
    Maximum-efficiency shape for approximate-at-most-k of n.

    Returns:
        The winning report, or None when no shape exists within bounds
    """
    reports = rank_models(k, n, bounds, threads=threads, cache=cache)
    if not reports:
        logger.info(f"no model for k={k}, n={n}")
        return None

    best = reports[0]
    logger.info(f"best model for k={k}, n={n}: {best.shape} "
                f"(efficiency {float(best.efficiency):.4f})")
    return best


def find_probability(coverage: Ratio, s: int) -> Ratio:
    """
    Chance that at least one of s independent solutions is admitted.

    Returns:
        1 - (1 - coverage)^s, in the numeric type of coverage
    """
    if not 0 <= coverage <= 1:
        raise MetricsError(f"coverage must lie in [0, 1], got {coverage}")
    if s < 0:
        raise MetricsError(f"solution count must be >= 0, got {s}")
    return 1 - (1 - coverage) ** s
