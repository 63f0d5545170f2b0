"""
Approximate At-Most-k Toolkit - Solver Module
=============================================

Small DPLL satisfiability checker: unit propagation over occurrence lists
and chronological backtracking, deciding the lowest unassigned variable
first (false before true). Instances checked here have a few dozen
variables, so no clause learning.
"""

from typing import Dict, List, Mapping, Optional, Sequence

from .cnf import Clause, Lit, Var
from .logger import get_logger

# Module logger
logger = get_logger(__name__)


class DpllSolver:
    """
    Reusable DPLL checker over a fixed clause set.

    Each solve() call starts from a clean state, so one instance can be
    queried with many different assumptions.
    """

    def __init__(self, clauses: Sequence[Clause], num_vars: int):
        self.clauses: List[Clause] = list(clauses)
        self.num_vars = num_vars

        # occurs[lit] -> indices of clauses containing lit
        self._occurs: Dict[Lit, List[int]] = {}
        for idx, clause in enumerate(self.clauses):
            for lit in clause:
                self._occurs.setdefault(lit, []).append(idx)

        self._units = [clause[0] for clause in self.clauses if len(clause) == 1]
        self._values: List[Optional[bool]] = []
        self._trail: List[Var] = []
        self.decisions = 0

    # -- assignment bookkeeping ---------------------------------------------

    def _lit_value(self, lit: Lit) -> Optional[bool]:
        value = self._values[abs(lit)]
        if value is None:
            return None
        return value if lit > 0 else not value

    def _assign(self, lit: Lit) -> None:
        self._values[abs(lit)] = lit > 0
        self._trail.append(abs(lit))

    def _undo_to(self, mark: int) -> None:
        while len(self._trail) > mark:
            self._values[self._trail.pop()] = None

    def _enqueue(self, lit: Lit, queue: List[Lit]) -> bool:
        """Assign lit unless it is already decided; False on contradiction."""
        current = self._lit_value(lit)
        if current is None:
            self._assign(lit)
            queue.append(lit)
            return True
        return current

    def _propagate(self, queue: List[Lit]) -> bool:
        """Unit propagation; False on conflict."""
        while queue:
            lit = queue.pop()
            # Clauses holding -lit lost a literal
            for idx in self._occurs.get(-lit, ()):
                unassigned = None
                open_count = 0
                satisfied = False
                for other in self.clauses[idx]:
                    value = self._lit_value(other)
                    if value is True:
                        satisfied = True
                        break
                    if value is None:
                        open_count += 1
                        unassigned = other
                if satisfied:
                    continue
                if open_count == 0:
                    return False
                if open_count == 1 and not self._enqueue(unassigned, queue):
                    return False
        return True

    def _search(self) -> bool:
        var = next((v for v in range(1, self.num_vars + 1) if self._values[v] is None), None)
        if var is None:
            return True

        self.decisions += 1
        for lit in (-var, var):
            mark = len(self._trail)
            queue: List[Lit] = []
            self._enqueue(lit, queue)
            if self._propagate(queue) and self._search():
                return True
            self._undo_to(mark)
        return False

    # -- public API ----------------------------------------------------------

    def solve(self, assumptions: Mapping[Var, bool] = None) -> Optional[Dict[Var, bool]]:
        """
        Find a model extending the assumptions.

        Args:
            assumptions: Fixed variable values

        Returns:
            Total model as {var: value}, or None when unsatisfiable
        """
        self._values = [None] * (self.num_vars + 1)
        self._trail = []
        self.decisions = 0

        queue: List[Lit] = []
        for var, value in (assumptions or {}).items():
            if not self._enqueue(var if value else -var, queue):
                return None
        for lit in self._units:
            if not self._enqueue(lit, queue):
                return None
        if not self._propagate(queue):
            return None

        if not self._search():
            return None
        return {v: bool(self._values[v]) for v in range(1, self.num_vars + 1)}

    def is_satisfiable(self, assumptions: Mapping[Var, bool] = None) -> bool:
        return self.solve(assumptions) is not None
