"""Complete DPLL engine: two-watched-literal propagation, chronological backtracking."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .encoder import CnfTheory

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class Assignment:
    """Total valuation of variables ``1..n``."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[bool]) -> None:
        self._values = tuple(bool(v) for v in values)

    @classmethod
    def from_true_vars(cls, num_vars: int, true_vars: Iterable[int]) -> Assignment:
        vals = [False] * num_vars
        for v in true_vars:
            if not 1 <= v <= num_vars:
                raise ValueError(f"variable {v} outside [1, {num_vars}]")
            vals[v - 1] = True
        return cls(vals)

    @classmethod
    def from_literals(cls, num_vars: int, lits: Iterable[int]) -> Assignment:
        return cls.from_true_vars(num_vars, (x for x in lits if x > 0))

    @property
    def num_vars(self) -> int:
        return len(self._values)

    def __getitem__(self, var: int) -> bool:
        if var < 1:
            raise IndexError(var)
        return self._values[var - 1]

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Assignment) and self._values == other._values

    def __hash__(self) -> int:
        return hash(self._values)

    def __repr__(self) -> str:
        return f"Assignment(true={self.true_vars()})"

    def values(self) -> tuple[bool, ...]:
        return self._values

    def true_vars(self) -> list[int]:
        return [v for v, x in enumerate(self._values, start=1) if x]

    def literals(self) -> list[int]:
        return [v if x else -v for v, x in enumerate(self._values, start=1)]

    def satisfies_clause(self, clause: Sequence[int]) -> bool:
        vals = self._values
        return any(vals[lit - 1] if lit > 0 else not vals[-lit - 1] for lit in clause)

    def satisfies(self, theory: CnfTheory) -> bool:
        return all(self.satisfies_clause(c) for c in theory.clauses)

    def restrict(self, num_vars: int) -> Assignment:
        return Assignment(self._values[:num_vars])


@dataclass(frozen=True)
class ResourceBudget:
    """Wall-clock seconds and/or decision count; ``None`` means unlimited."""

    seconds: float | None = None
    max_decisions: int | None = None


@dataclass
class Stats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    max_depth: int = 0

    def line(self) -> str:
        return (f"decisions={self.decisions} propagations={self.propagations} "
                f"conflicts={self.conflicts} max_depth={self.max_depth}")


@dataclass
class SolveResult:
    status: Status
    assignment: Assignment | None = None
    reason: str = ""
    stats: Stats = field(default_factory=Stats)
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT


class _Exhausted(Exception):
    pass


class DPLLSolver:
    """Search state for one theory.

    Values are stored per variable as ``1`` (true), ``-1`` (false) or ``0``.
    Watch lists are indexed by ``2 * var + (lit < 0)``.
    """

    def __init__(self, theory: CnfTheory) -> None:
        self.num_vars = n = theory.num_vars
        self.value = [0] * (n + 1)
        self.trail: list[int] = []
        self.stats = Stats()
        self.clauses: list[list[int]] = []
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
        self.units: list[int] = []
        self.trivially_unsat = False
        for c in theory.clauses:
            clause = list(c)
            if not clause:
                self.trivially_unsat = True
            elif len(clause) == 1:
                self.units.append(clause[0])
            else:
                self.clauses.append(clause)
                self.watches[self._widx(clause[0])].append(clause)
                self.watches[self._widx(clause[1])].append(clause)
        self.all_clauses = [list(c) for c in theory.clauses]

    @staticmethod
    def _widx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def assign(self, lit: int) -> None:
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def propagate(self, head: int) -> tuple[int, bool]:
        """Propagate trail entries from ``head`` on; return the new head and whether a conflict arose."""
        value = self.value
        trail = self.trail
        watches = self.watches
        stats = self.stats
        while head < len(trail):
            lit = trail[head]
            head += 1
            false_lit = -lit
            widx = 2 * false_lit if false_lit > 0 else -2 * false_lit + 1
            wl = watches[widx]
            i = 0
            j = 0
            n = len(wl)
            conflict = False
            while i < n:
                clause = wl[i]
                i += 1
                if clause[0] == false_lit:
                    clause[0] = clause[1]
                    clause[1] = false_lit
                first = clause[0]
                fv = value[first] if first > 0 else -value[-first]
                if fv == 1:
                    wl[j] = clause
                    j += 1
                    continue
                moved = False
                for p in range(2, len(clause)):
                    other = clause[p]
                    ov = value[other] if other > 0 else -value[-other]
                    if ov != -1:
                        clause[1] = other
                        clause[p] = false_lit
                        watches[2 * other if other > 0 else -2 * other + 1].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = clause
                j += 1
                if fv == -1:
                    conflict = True
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    break
                value[abs(first)] = 1 if first > 0 else -1
                trail.append(first)
                stats.propagations += 1
            del wl[j:]
            if conflict:
                return head, True
        return head, False

    def pick_branch(self) -> int:
        """Variable with most occurrences in the shortest not-yet-satisfied clauses; 0 if none.

        Ties go to the lowest index. Unit clauses are handled by propagation,
        so the scan only looks at clauses of two or more literals.
        """
        value = self.value
        best_len = 1 << 30
        counts: dict[int, int] = {}
        for clause in self.clauses:
            free = 0
            for lit in clause:
                v = value[lit] if lit > 0 else -value[-lit]
                if v == 1:
                    free = -1
                    break
                if v == 0:
                    free += 1
            if free <= 0 or free > best_len:
                continue
            if free < best_len:
                best_len = free
                counts = {}
            for lit in clause:
                if value[abs(lit)] == 0:
                    a = abs(lit)
                    counts[a] = counts.get(a, 0) + 1
        if not counts:
            return 0
        return min(counts, key=lambda a: (-counts[a], a))

    def check_fixpoint(self) -> bool:
        """True iff no clause is unit or falsified under the current partial assignment."""
        for clause in self.all_clauses:
            free = 0
            sat = False
            for lit in clause:
                v = self.lit_value(lit)
                if v == 1:
                    sat = True
                    break
                if v == 0:
                    free += 1
            if not sat and free <= 1:
                return False
        return True

    def _undo_to(self, size: int) -> None:
        trail = self.trail
        value = self.value
        while len(trail) > size:
            value[abs(trail.pop())] = 0

    def _total(self) -> Assignment:
        return Assignment(x == 1 for x in self.value[1:])

    def search(self, budget: ResourceBudget, enumerate_all: bool = False) -> Iterator[Assignment]:
        """Yield models in search order; ``_Exhausted`` signals budget exhaustion.

        In enumeration mode every variable gets decided, so each total model
        is produced exactly once; otherwise free variables are set false
        once all clauses are satisfied.
        """
        if self.trivially_unsat:
            return
        deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
        max_dec = budget.max_decisions
        stats = self.stats
        # decision stack entries: (trail size before the decision, literal, second branch taken)
        stack: list[tuple[int, int, bool]] = []
        for u in self.units:
            uv = self.lit_value(u)
            if uv == -1:
                return
            if uv == 0:
                self.assign(u)
        head, conflict = self.propagate(0)
        while True:
            if not conflict:
                var = self.pick_branch()
                if var == 0 and enumerate_all:
                    var = next((v for v in range(1, self.num_vars + 1) if self.value[v] == 0), 0)
                if var == 0:
                    if not enumerate_all:
                        for v in range(1, self.num_vars + 1):
                            if self.value[v] == 0:
                                self.value[v] = -1
                                self.trail.append(-v)
                    yield self._total()
                    conflict = True  # continue with the next branch
                else:
                    if max_dec is not None and stats.decisions >= max_dec:
                        raise _Exhausted("decision limit")
                    if deadline is not None and stats.decisions % 64 == 0 and time.monotonic() > deadline:
                        raise _Exhausted("time limit")
                    stats.decisions += 1
                    stack.append((len(self.trail), -var, False))
                    if len(stack) > stats.max_depth:
                        stats.max_depth = len(stack)
                    self.assign(-var)
                    head, conflict = self.propagate(head)
                    continue
            stats.conflicts += 1
            while stack and stack[-1][2]:
                stack.pop()
            if not stack:
                return
            size, lit, _ = stack.pop()
            self._undo_to(size)
            stack.append((size, -lit, True))
            self.assign(-lit)
            head, conflict = self.propagate(size)


def _log_stats(stats: Stats, diagnostics) -> None:
    log.debug("dpll %s", stats.line())
    if diagnostics is not None:
        diagnostics.write(f"# dpll {stats.line()}\n")


def solve_complete(theory: CnfTheory, budget: ResourceBudget | None = None, diagnostics=None) -> SolveResult:
    """Decide ``theory``; Unknown only when the budget runs out."""
    budget = budget or ResourceBudget()
    solver = DPLLSolver(theory)
    try:
        model = next(solver.search(budget), None)
    except _Exhausted as exc:
        _log_stats(solver.stats, diagnostics)
        return SolveResult(Status.UNKNOWN, reason=str(exc), stats=solver.stats)
    _log_stats(solver.stats, diagnostics)
    if model is None:
        return SolveResult(Status.UNSAT, stats=solver.stats)
    if not model.satisfies(theory):
        raise AssertionError("internal error: DPLL model fails re-verification")
    return SolveResult(Status.SAT, model, stats=solver.stats)


@dataclass
class Enumeration:
    models: list[Assignment]
    truncated: bool
    reason: str = ""


def enumerate_models(theory: CnfTheory, limit: int, budget: ResourceBudget | None = None) -> Enumeration:
    """Up to ``limit`` distinct total models in deterministic search order.

    Each model found is blocked by the backtracking itself: the search
    resumes from the last open branch, so no model repeats.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    solver = DPLLSolver(theory)
    models: list[Assignment] = []
    try:
        for model in solver.search(budget or ResourceBudget(), enumerate_all=True):
            if not model.satisfies(theory):
                raise AssertionError("internal error: enumerated model fails re-verification")
            models.append(model)
            if len(models) >= limit:
                return Enumeration(models, truncated=True, reason="limit")
    except _Exhausted as exc:
        return Enumeration(models, truncated=True, reason=str(exc))
    return Enumeration(models, truncated=False)
