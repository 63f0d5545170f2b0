"""
Approximate At-Most-k Toolkit - CNF Module
==========================================

Propositional data model: variables, literals, clauses and formulas.

Variables are positive integers allocated densely from 1; literals are
signed integers in DIMACS convention (-v is the negation of v). Every
variable carries a role: 'target' (constrained by the cardinality
encoding) or 'aux' (introduced by the encoding itself).
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Sequence, Tuple

from .logger import get_logger
from .config_manager import Constants

# Module logger
logger = get_logger(__name__)

Var = int
Lit = int
Clause = Tuple[Lit, ...]

ROLE_TARGET = 'target'
ROLE_AUX = 'aux'
ROLES = (ROLE_TARGET, ROLE_AUX)


class CnfError(ValueError):
    """Base exception for malformed formulas and assignments."""
    pass


class UnallocatedVariableError(CnfError):
    """Clause references a variable that was never allocated."""
    pass


class TautologyError(CnfError):
    """Clause contains a literal and its negation."""
    pass


class DuplicateLiteralError(CnfError):
    """Clause repeats a literal."""
    pass


class PartialAssignmentError(CnfError):
    """Assignment does not cover every allocated variable."""
    pass


def make_lit(var: Var, positive: bool = True) -> Lit:
    """Build a literal from a variable and a polarity."""
    return var if positive else -var


def negate(lit: Lit) -> Lit:
    return -lit


def lit_value(lit: Lit, assignment: Mapping[Var, bool]) -> bool:
    """Truth value of a literal under an assignment."""
    value = assignment[abs(lit)]
    return value if lit > 0 else not value


@dataclass(frozen=True)
class CnfStats:
    """Size statistics of a formula."""

    variables: int = 0
    aux_variables: int = 0
    clauses: int = 0
    literals: int = 0

    def summary(self) -> str:
        return (f"vars={self.variables} aux={self.aux_variables} "
                f"clauses={self.clauses} literals={self.literals}")


@dataclass
class Cnf:
    """
    Clause database with variable accounting.

    Construction is single-writer; once an encoder has finished the formula
    is treated as immutable and may be read from several threads.
    """

    clauses: List[Clause] = field(default_factory=list)
    var_count: int = 0
    target_vars: List[Var] = field(default_factory=list)
    aux_vars: List[Var] = field(default_factory=list)
    literal_count: int = 0

    def alloc_vars(self, count: int, role: str = ROLE_AUX) -> List[Var]:
        """
        Allocate fresh consecutive variables.

        Args:
            count: Number of variables (>= 0)
            role: 'target' or 'aux'

        Returns:
            The new variable ids in ascending order
        """
        if count < 0:
            raise CnfError(f"Cannot allocate a negative number of variables: {count}")
        if role not in ROLES:
            raise CnfError(f"Unknown variable role: {role}")

        start = self.var_count + 1
        self.var_count += count
        new_vars = list(range(start, self.var_count + 1))

        if role == ROLE_TARGET:
            self.target_vars.extend(new_vars)
        else:
            self.aux_vars.extend(new_vars)
        return new_vars

    def add_clause(self, literals: Iterable[Lit]) -> Clause:
        """
        Append a clause after checking it against the formula.

        Raises:
            CnfError: empty clause or zero literal
            UnallocatedVariableError: literal over an unallocated variable
            TautologyError: clause holds x and -x
            DuplicateLiteralError: clause repeats a literal
        """
        clause = tuple(literals)
        if not clause:
            raise CnfError("Empty clause")

        seen = set()
        for lit in clause:
            if lit == 0:
                raise CnfError("Literal 0 is not allowed")
            if abs(lit) > self.var_count:
                raise UnallocatedVariableError(
                    f"Variable {abs(lit)} is not allocated (var_count={self.var_count})"
                )
            if -lit in seen:
                raise TautologyError(f"Tautological clause {clause}")
            if lit in seen:
                raise DuplicateLiteralError(f"Duplicate literal {lit} in clause {clause}")
            seen.add(lit)

        self.clauses.append(clause)
        self.literal_count += len(clause)
        return clause

    def stats(self) -> CnfStats:
        """Size statistics; pure and deterministic."""
        return CnfStats(
            variables=self.var_count,
            aux_variables=len(self.aux_vars),
            clauses=len(self.clauses),
            literals=self.literal_count
        )

    def evaluate(self, assignment: Mapping[Var, bool]) -> bool:
        """
        Check a total assignment against every clause.

        Raises:
            PartialAssignmentError: some allocated variable is unassigned
        """
        missing = [v for v in range(1, self.var_count + 1) if v not in assignment]
        if missing:
            raise PartialAssignmentError(
                f"Assignment misses {len(missing)} variable(s), first: {missing[0]}"
            )
        return all(
            any(lit_value(lit, assignment) for lit in clause)
            for clause in self.clauses
        )

    def to_dimacs(self) -> str:
        """
        Serialize as DIMACS CNF.

        Target variables are announced in 'c target' comment lines ahead of
        the header so downstream tools can project models onto them.
        """
        lines = []
        targets = sorted(self.target_vars)
        per_line = Constants.DIMACS_TARGETS_PER_LINE
        for i in range(0, len(targets), per_line):
            chunk = targets[i:i + per_line]
            lines.append("c target " + " ".join(str(v) for v in chunk))

        lines.append(f"p cnf {self.var_count} {len(self.clauses)}")
        for clause in self.clauses:
            lines.append(" ".join(str(lit) for lit in clause) + " 0")
        return "\n".join(lines) + "\n"


def new_formula() -> Cnf:
    """Create an empty formula."""
    return Cnf()


def alloc_vars(cnf: Cnf, count: int, role: str = ROLE_AUX) -> List[Var]:
    return cnf.alloc_vars(count, role)


def add_clause(cnf: Cnf, literals: Sequence[Lit]) -> Cnf:
    cnf.add_clause(literals)
    return cnf


def stats(cnf: Cnf) -> CnfStats:
    return cnf.stats()


def evaluate(cnf: Cnf, assignment: Mapping[Var, bool]) -> bool:
    return cnf.evaluate(assignment)


def write_dimacs(cnf: Cnf) -> str:
    return cnf.to_dimacs()
