"""
Approximate At-Most-k Toolkit - Encoders Module
===============================================

Primitive cardinality encoders:
- binomial (pairwise) at-most-k, optionally guarded by a literal
- sequential counter at-most-k
- order-encoding coupling of a variable column

Encoders append to the formula they are given and return the number of
clauses they emitted. Closed-form literal counts are provided for search
loops that never build the formulas.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Optional, Sequence

from .cnf import Cnf, CnfStats, Lit, Var, ROLE_TARGET, new_formula
from .logger import get_logger

# Module logger
logger = get_logger(__name__)


class EncoderError(ValueError):
    """Cardinality bound outside the encoder's domain."""
    pass


@dataclass(frozen=True)
class GuardedAtMost:
    """
    At-most constraint that is switched off when its guard literal holds.

    The guard literal is written into every clause, so the constraint only
    binds while the guard is false.
    """

    vars: tuple
    bound: int
    guard: Optional[Lit] = None

    def __post_init__(self):
        if not 0 <= self.bound <= len(self.vars):
            raise EncoderError(
                f"at-most bound {self.bound} outside 0..{len(self.vars)}"
            )

    @property
    def vacuous(self) -> bool:
        return self.bound >= len(self.vars)

    def emit(self, cnf: Cnf) -> int:
        return at_most_binomial(cnf, self.vars, self.bound, self.guard)


def at_most_binomial(cnf: Cnf, vars: Sequence[Var], k: int,
                     guard: Optional[Lit] = None) -> int:
    """
    Pairwise at-most-k: one clause of k+1 negated variables per subset.

    Subsets are enumerated in lexicographic order of variable ids.

    Args:
        cnf: Formula to extend
        vars: Constrained variables
        k: Bound, 0 <= k <= len(vars)
        guard: Literal prepended to every clause (constraint off when true)

    Returns:
        Number of clauses emitted, C(len(vars), k+1)
    """
    if not 0 <= k <= len(vars):
        raise EncoderError(f"at-most-{k} of {len(vars)} variables is out of range")

    emitted = 0
    prefix = (guard,) if guard is not None else ()
    for subset in combinations(sorted(vars), k + 1):
        cnf.add_clause(prefix + tuple(-v for v in subset))
        emitted += 1
    return emitted


def binomial_literal_count(n: int, k: int, guarded: bool = False) -> int:
    """Literals of at_most_binomial over n variables without building it."""
    if not 0 <= k <= n:
        raise EncoderError(f"at-most-{k} of {n} variables is out of range")
    return comb(n, k + 1) * (k + 1 + (1 if guarded else 0))


def _check_counter_domain(n: int, k: int) -> None:
    if n < 2 or not 1 <= k < n:
        raise EncoderError(
            f"counter encoding needs n >= 2 and 1 <= k < n (got n={n}, k={k}); "
            "use binomial for k = 0 and nothing for k >= n"
        )


def at_most_counter(cnf: Cnf, vars: Sequence[Var], k: int) -> int:
    """
    Sequential counter at-most-k.

    Registers r[i][j] (i = 1..n-1, j = 1..k) hold "at least j of x_1..x_i
    are true". Clause families are emitted in a fixed order:
    x_i -> r_i1; r_1j false for j >= 2; r_(i-1)j -> r_ij;
    x_i and r_(i-1)(j-1) -> r_ij; x_i -> not r_(i-1)k.

    Returns:
        Number of clauses emitted
    """
    n = len(vars)
    _check_counter_domain(n, k)
    x = [None] + list(vars)

    # r[i][j], 1-based in both indices
    r: List[List[Var]] = [[]]
    for _ in range(1, n):
        r.append([None] + cnf.alloc_vars(k))

    before = len(cnf.clauses)

    for i in range(1, n):
        cnf.add_clause((-x[i], r[i][1]))
    for j in range(2, k + 1):
        cnf.add_clause((-r[1][j],))
    for i in range(2, n):
        for j in range(1, k + 1):
            cnf.add_clause((-r[i - 1][j], r[i][j]))
    for i in range(2, n):
        for j in range(2, k + 1):
            cnf.add_clause((-x[i], -r[i - 1][j - 1], r[i][j]))
    for i in range(2, n + 1):
        cnf.add_clause((-x[i], -r[i - 1][k]))

    emitted = len(cnf.clauses) - before
    logger.debug(f"counter at-most-{k} of {n}: {emitted} clauses")
    return emitted


def counter_literal_count(n: int, k: int) -> int:
    """Literals of at_most_counter(n, k) without building the formula."""
    _check_counter_domain(n, k)
    return (2 * (n - 1)
            + (k - 1)
            + 2 * k * (n - 2)
            + 3 * (k - 1) * (n - 2)
            + 2 * (n - 1))


def counter_clause_count(n: int, k: int) -> int:
    _check_counter_domain(n, k)
    return (n - 1) + (k - 1) + k * (n - 2) + (k - 1) * (n - 2) + (n - 1)


def order_column(cnf: Cnf, column_vars: Sequence[Var]) -> int:
    """
    Order-encode a column: v_j -> v_(j-1) for j = 2..h.

    Returns:
        Number of clauses emitted, h - 1
    """
    for j in range(1, len(column_vars)):
        cnf.add_clause((-column_vars[j], column_vars[j - 1]))
    return max(0, len(column_vars) - 1)


@dataclass
class BaselineEncoding:
    """A complete at-most-k formula over n fresh target variables."""

    cnf: Cnf
    target_vars: List[Var]
    encoding: str
    derived_k: int
    derived_n: int

    @property
    def stats(self) -> CnfStats:
        return self.cnf.stats()


def encode_baseline(encoding: str, n: int, k: int) -> BaselineEncoding:
    """
    Build a conventional at-most-k of n on a fresh formula.

    Args:
        encoding: 'counter' or 'binomial'
        n: Number of target variables
        k: Bound

    Returns:
        BaselineEncoding with targets 1..n
    """
    cnf = new_formula()
    targets = cnf.alloc_vars(n, ROLE_TARGET)

    if encoding == 'counter':
        at_most_counter(cnf, targets, k)
    elif encoding == 'binomial':
        at_most_binomial(cnf, targets, k)
    else:
        raise EncoderError(f"Unknown baseline encoding: {encoding}")

    logger.info(f"{encoding} at-most-{k} of {n}: {cnf.stats().summary()}")
    return BaselineEncoding(cnf=cnf, target_vars=targets, encoding=encoding,
                            derived_k=k, derived_n=n)
