"""
Approximate At-Most-k Toolkit - Oracle Module
=============================================

Which target assignments does a model accept?

Two independent answers:
- structural: a column of height h with factor a must hold ceil(T/a) trues
  when its child needs T; a node needs the sum over its columns; an
  assignment is accepted iff the top node needs at most top_k. Counting is
  a convolution of (free trues, need) distributions up the tree.
- literal: enumerate all target assignments and ask the embedded DPLL
  checker whether the auxiliaries can complete each one to a model. The
  mask space is split across worker processes.

Coverage ratios are exact fractions.
"""

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .approx import EncodingResult, ModelShape, encode_approx
from .cnf import Var
from .solver import DpllSolver
from .logger import get_logger
from .config_manager import config, get_thread_count

# Module logger
logger = get_logger(__name__)

Distribution = Dict[Tuple[int, int], int]


class OracleError(ValueError):
    """Base exception for oracle failures."""
    pass


class GuardRailError(OracleError):
    """Brute-force enumeration refused for too many targets."""
    pass


class LeafCountError(OracleError):
    """Leaf true-counts do not fit the model."""
    pass


@dataclass
class AcceptHistogram:
    """Accepted target assignments per number of trues."""

    n: int
    derived_k: int
    accepted: List[int] = field(default_factory=list)

    @property
    def possible(self) -> List[int]:
        return [comb(self.n, t) for t in range(self.n + 1)]

    def rows(self) -> List[Tuple[int, int, int]]:
        """(t, accepted_t, possible_t) for t = 0..n."""
        return [(t, a, p) for t, (a, p) in enumerate(zip(self.accepted, self.possible))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AcceptHistogram):
            return NotImplemented
        return self.n == other.n and self.accepted == other.accepted


@dataclass
class CoverageReport:
    """Histogram plus overall and maximum-count coverage."""

    histogram: AcceptHistogram
    overall_coverage: Fraction
    maxcount_coverage: Fraction
    derived_k: int
    derived_n: int

    @property
    def overall_denominator(self) -> int:
        return sum(comb(self.derived_n, t) for t in range(self.derived_k + 1))

    @property
    def maxcount_denominator(self) -> int:
        return comb(self.derived_n, self.derived_k)


# =============================================================================
# STRUCTURAL ORACLE
# =============================================================================

class _PinMap:
    """Pinned true/false counts inside a range of bottom positions."""

    def __init__(self, shape: ModelShape):
        self.true_start = shape.bottom_count - shape.fix_true
        self.false_start = self.true_start - shape.fix_false

    def count(self, start: int, end: int) -> Tuple[int, int]:
        pinned_true = max(0, end - max(start, self.true_start))
        pinned_false = max(0, min(end, self.true_start) - max(start, self.false_start))
        return pinned_true, pinned_false


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def min_required_trues(shape: ModelShape, leaf_true_counts: Sequence[int]) -> Optional[int]:
    """
    Trues the top node needs to admit the given leaf-group counts.

    Args:
        shape: Model
        leaf_true_counts: Trues per leaf group (pinned ones included), left to right

    Returns:
        Required trues at the top, or None if some column would overflow
    """
    shape.validate()
    size = shape.leaf_size
    groups = shape.bottom_count // size
    if len(leaf_true_counts) != groups:
        raise LeafCountError(f"expected {groups} leaf counts, got {len(leaf_true_counts)}")

    pins = _PinMap(shape)
    for g, count in enumerate(leaf_true_counts):
        pinned_true, pinned_false = pins.count(g * size, (g + 1) * size)
        if not pinned_true <= count <= size - pinned_false:
            raise LeafCountError(
                f"leaf group {g} count {count} outside {pinned_true}..{size - pinned_false}"
            )

    needs = list(leaf_true_counts)
    for geo in reversed(shape.geometry()):
        parent_needs = []
        for node in range(geo.nodes):
            total = 0
            for c in range(geo.w):
                required = _ceil_div(needs[node * geo.w + c], geo.factor)
                if required > geo.h:
                    return None
                total += required
            parent_needs.append(total)
        needs = parent_needs
    return needs[0]


def accepts(shape: ModelShape, target_values: Sequence[bool]) -> bool:
    """Structural acceptance of one assignment to the unpinned targets (in order)."""
    k, n = shape.derived_params()
    if len(target_values) != n:
        raise LeafCountError(f"expected {n} target values, got {len(target_values)}")

    size = shape.leaf_size
    bottom = list(target_values) + [False] * shape.fix_false + [True] * shape.fix_true
    counts = [sum(bottom[g:g + size]) for g in range(0, len(bottom), size)]
    required = min_required_trues(shape, counts)
    return required is not None and required <= shape.top_k


def _convolve(left: Distribution, right: Distribution, max_trues: int,
              max_need: Optional[int] = None) -> Distribution:
    result: Distribution = defaultdict(int)
    for (t1, r1), c1 in left.items():
        for (t2, r2), c2 in right.items():
            t = t1 + t2
            r = r1 + r2
            if t > max_trues or (max_need is not None and r > max_need):
                continue
            result[(t, r)] += c1 * c2
    return dict(result)


def count_accepted_dp(shape: ModelShape) -> AcceptHistogram:
    """
    Exact accepted-assignment histogram from the tree structure.

    Subtrees with the same pinning pattern share one distribution; entries
    above derived_k free trues are dropped since no model accepts them.
    """
    k, n = shape.derived_params()
    geometry = shape.geometry()
    pins = _PinMap(shape)
    memo: Dict[tuple, Distribution] = {}

    def leaf_distribution(start: int) -> Distribution:
        size = shape.leaf_size
        pinned_true, pinned_false = pins.count(start, start + size)
        key = ('leaf', pinned_true, pinned_false)
        if key not in memo:
            free = size - pinned_true - pinned_false
            memo[key] = {(t, t + pinned_true): comb(free, t)
                         for t in range(min(free, k) + 1)}
        return memo[key]

    def node_distribution(depth: int, start: int) -> Distribution:
        geo = geometry[depth]
        key = (depth,) + pins.count(start, start + geo.span)
        if key in memo:
            return memo[key]

        child_span = geo.span // geo.w
        max_need = shape.top_k if depth == 0 else None
        dist: Distribution = {(0, 0): 1}
        for c in range(geo.w):
            child_start = start + c * child_span
            if depth + 1 < len(geometry):
                child = node_distribution(depth + 1, child_start)
            else:
                child = leaf_distribution(child_start)

            column: Distribution = defaultdict(int)
            for (t, need), count in child.items():
                required = _ceil_div(need, geo.factor)
                if required <= geo.h:
                    column[(t, required)] += count
            dist = _convolve(dist, column, k, max_need)

        memo[key] = dist
        return dist

    accepted = [0] * (n + 1)
    for (t, _need), count in node_distribution(0, 0).items():
        accepted[t] += count

    return AcceptHistogram(n=n, derived_k=k, accepted=accepted)


# =============================================================================
# LITERAL ORACLE
# =============================================================================

def _target_mapping(encoding, target_assignment: Union[Mapping[Var, bool], Sequence[bool]]
                    ) -> Dict[Var, bool]:
    targets = encoding.target_vars
    if isinstance(target_assignment, Mapping):
        missing = [v for v in targets if v not in target_assignment]
        if missing:
            raise OracleError(f"target assignment misses variable {missing[0]}")
        return {v: bool(target_assignment[v]) for v in targets}
    if len(target_assignment) != len(targets):
        raise OracleError(
            f"expected {len(targets)} target values, got {len(target_assignment)}"
        )
    return {v: bool(value) for v, value in zip(targets, target_assignment)}


def sat_extend(encoding: EncodingResult,
               target_assignment: Union[Mapping[Var, bool], Sequence[bool]],
               solver: Optional[DpllSolver] = None) -> bool:
    """
    Can the auxiliary variables complete this target assignment to a model?

    Args:
        encoding: Built formula with its target variables
        target_assignment: {var: value} or values in target order
        solver: Optional reusable checker over encoding.cnf

    Returns:
        True iff the formula is satisfiable under the assignment
    """
    assumptions = _target_mapping(encoding, target_assignment)
    if solver is None:
        solver = DpllSolver(encoding.cnf.clauses, encoding.cnf.var_count)
    return solver.is_satisfiable(assumptions)


def _tally_masks(clauses: List[tuple], var_count: int, targets: List[Var],
                 start: int, stop: int) -> List[int]:
    # Runs in a worker process: plain data in, plain counts out
    solver = DpllSolver(clauses, var_count)
    counts = [0] * (len(targets) + 1)
    for mask in range(start, stop):
        assignment = {v: bool(mask >> i & 1) for i, v in enumerate(targets)}
        if solver.is_satisfiable(assignment):
            counts[bin(mask).count('1')] += 1
    return counts


def count_accepted_bruteforce(encoding, limit: Optional[int] = None,
                              threads: Optional[int] = None) -> AcceptHistogram:
    """
    Accepted-assignment histogram by enumerating all 2^n target assignments.

    Works for any built encoding exposing cnf, target_vars and derived_k.
    The mask space is split into one chunk per worker process, each with
    its own checker.

    Raises:
        GuardRailError: n above the brute-force limit
    """
    targets = list(encoding.target_vars)
    n = len(targets)
    limit = limit if limit is not None else config.oracle.get('brute_force_limit', 20)
    if n > limit:
        raise GuardRailError(f"brute force refused: n={n} exceeds limit {limit}")

    clauses = list(encoding.cnf.clauses)
    var_count = encoding.cnf.var_count
    total = 1 << n
    workers = min(get_thread_count(threads), total)
    chunk = -(-total // workers)
    accepted = [0] * (n + 1)

    if workers == 1:
        accepted = _tally_masks(clauses, var_count, targets, 0, total)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_tally_masks, clauses, var_count, targets,
                                       start, min(start + chunk, total))
                       for start in range(0, total, chunk)]
            for future in as_completed(futures):
                for t, count in enumerate(future.result()):
                    accepted[t] += count

    logger.debug(f"brute force over {total} assignments: {sum(accepted)} accepted")
    return AcceptHistogram(n=n, derived_k=encoding.derived_k, accepted=accepted)


# =============================================================================
# COVERAGE
# =============================================================================

def coverage_from_histogram(histogram: AcceptHistogram) -> CoverageReport:
    """Overall and maximum-count coverage with exact binomial denominators."""
    n, k = histogram.n, histogram.derived_k
    overall = Fraction(sum(histogram.accepted[:k + 1]),
                       sum(comb(n, t) for t in range(k + 1)))
    maxcount = Fraction(histogram.accepted[k], comb(n, k))
    return CoverageReport(histogram=histogram, overall_coverage=overall,
                          maxcount_coverage=maxcount, derived_k=k, derived_n=n)


def cached_histogram(shape: ModelShape, cache) -> Optional[AcceptHistogram]:
    """DP histogram of a shape from the cache, or None."""
    if cache is None:
        return None
    cached = cache.get(f"dp:{shape}")
    if cached is None:
        return None
    k, n = shape.derived_params()
    return AcceptHistogram(n=n, derived_k=k, accepted=list(cached))


def coverage(shape: ModelShape, cache=None,
             histogram: Optional[AcceptHistogram] = None) -> CoverageReport:
    """
    Coverage of a model via the structural oracle.

    Args:
        shape: Model
        cache: Optional ResultCache holding histograms by shape string
        histogram: DP histogram computed elsewhere (e.g. in a worker process)
    """
    if histogram is None:
        histogram = cached_histogram(shape, cache)
        if histogram is None:
            histogram = count_accepted_dp(shape)
            if cache is not None:
                cache.set(f"dp:{shape}", histogram.accepted)
    elif cache is not None:
        cache.set(f"dp:{shape}", histogram.accepted)

    return coverage_from_histogram(histogram)


@dataclass
class OracleComparison:
    """Both oracles' histograms for one model."""

    dp: AcceptHistogram
    brute: AcceptHistogram

    @property
    def agree(self) -> bool:
        return self.dp == self.brute

    def mismatched_rows(self) -> List[int]:
        return [t for t, (a, b) in enumerate(zip(self.dp.accepted, self.brute.accepted))
                if a != b]


def compare_oracles(shape: ModelShape, encoding: Optional[EncodingResult] = None,
                    threads: Optional[int] = None) -> OracleComparison:
    """Run both oracles on one model."""
    encoding = encoding or encode_approx(shape)
    comparison = OracleComparison(dp=count_accepted_dp(shape),
                                  brute=count_accepted_bruteforce(encoding, threads=threads))
    if not comparison.agree:
        logger.error(f"oracles disagree on {shape} at rows {comparison.mismatched_rows()}")
    return comparison
