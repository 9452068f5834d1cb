"""Walksat-style local search over c-clause theories.

The theory is flattened into CSR arrays and the flip loop runs as numba
compiled code. A c-clause is satisfied when at least one of its items is;
the search keeps, per clause, the number of satisfied items, and per
cardinality atom, the number of true members, so a move's breakcount
only touches the clauses that mention the flipped variables.

A move is a tuple of variables to toggle: one variable for a plain flip,
or ``(currently_true, newly_true)`` for a block move inside an
exactly-one group.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numba
import numpy as np

from .dpll import Assignment, SolveResult, Stats, Status
from .encoder import CardLit, CTheory

log = logging.getLogger(__name__)

RNG_NAME = "numba-mt19937"
FLIP = "flip"
BLOCK_MOVE = "block-move"
NO_BOUND = -1
_STOP_POLL = 1024

Move = tuple[int, ...]


@dataclass(frozen=True)
class WalkConfig:
    noise: float = 0.3
    max_flips: int = 2_000_000
    restarts: int = 20
    seed: int = 0
    neighborhood: str = BLOCK_MOVE

    def __post_init__(self) -> None:
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise must lie in [0, 1], got {self.noise}")
        if self.max_flips < 1 or self.restarts < 1:
            raise ValueError("max_flips and restarts must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.neighborhood not in (FLIP, BLOCK_MOVE):
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")


def restart_seed(seed: int, restart: int) -> int:
    return (seed + restart) % 2**64


def _rng_seed32(seed: int) -> int:
    # numba's generator takes a 32-bit seed; mix all 64 bits into it
    return int(np.random.SeedSequence(seed).generate_state(1, dtype=np.uint32)[0])


def _csr(rows: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    start = np.zeros(len(rows) + 1, dtype=np.int64)
    start[1:] = np.cumsum([len(r) for r in rows])
    flat = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(start[-1]))
    return start, flat


class CompiledTheory:
    """Array form of a ``CTheory`` shared by every search over it."""

    def __init__(self, theory: CTheory) -> None:
        self.theory = theory
        n = self.num_vars = theory.num_vars
        atoms: dict = {}
        atom_list: list = []
        item_kind, item_ref, item_pos = [], [], []
        clause_start = [0]
        var_lits: list[list[int]] = [[] for _ in range(n + 1)]
        var_lit_pos: list[list[int]] = [[] for _ in range(n + 1)]
        atom_occ: list[list[int]] = []
        atom_occ_pos: list[list[int]] = []
        for c, clause in enumerate(theory.cclauses):
            for item in clause:
                if isinstance(item, CardLit):
                    a = atoms.get(item.atom)
                    if a is None:
                        a = atoms[item.atom] = len(atom_list)
                        atom_list.append(item.atom)
                        atom_occ.append([])
                        atom_occ_pos.append([])
                    pos = 0 if item.negated else 1
                    item_kind.append(1)
                    item_ref.append(a)
                    item_pos.append(pos)
                    atom_occ[a].append(c)
                    atom_occ_pos[a].append(pos)
                else:
                    v = abs(item)
                    pos = 1 if item > 0 else 0
                    item_kind.append(0)
                    item_ref.append(v)
                    item_pos.append(pos)
                    var_lits[v].append(c)
                    var_lit_pos[v].append(pos)
            clause_start.append(len(item_kind))
        self.num_clauses = len(theory.cclauses)
        self.clause_start = np.array(clause_start, dtype=np.int64)
        self.item_kind = np.array(item_kind, dtype=np.int64)
        self.item_ref = np.array(item_ref, dtype=np.int64)
        self.item_pos = np.array(item_pos, dtype=np.int64)
        self.var_occ_start, self.var_occ_clause = _csr(var_lits)
        _, self.var_occ_pos = _csr(var_lit_pos)
        self.atom_lo = np.array([NO_BOUND if a.lower is None else a.lower for a in atom_list], dtype=np.int64)
        self.atom_hi = np.array([NO_BOUND if a.upper is None else a.upper for a in atom_list], dtype=np.int64)
        self.atom_start, self.atom_vars = _csr([list(a.vars) for a in atom_list])
        var_atoms: list[list[int]] = [[] for _ in range(n + 1)]
        for a, atom in enumerate(atom_list):
            for v in atom.vars:
                var_atoms[v].append(a)
        self.var_atom_start, self.var_atom_ids = _csr(var_atoms)
        self.atom_occ_start, self.atom_occ_clause = _csr(atom_occ)
        _, self.atom_occ_pos = _csr(atom_occ_pos)
        self.atoms = atom_list
        self._find_groups(theory)
        # each item yields at most (group size - 1) moves per variable it names
        atom_sizes = [len(a.vars) for a in atom_list]
        gmax = int(np.diff(self.group_start).max()) if self.num_groups else 1
        worst = max((sum(atom_sizes[item_ref[j]] if item_kind[j] else 1 for j in range(s, e))
                     for s, e in zip(clause_start[:-1], clause_start[1:])), default=1)
        self.cand_capacity = max(1, worst * max(1, gmax - 1))

    def _find_groups(self, theory: CTheory) -> None:
        """Exactly-one unit c-clauses over disjoint variables become block-move groups."""
        group_of = np.full(self.num_vars + 1, -1, dtype=np.int64)
        groups: list[list[int]] = []
        for clause in theory.cclauses:
            if len(clause) != 1 or not isinstance(clause[0], CardLit):
                continue
            item = clause[0]
            a = item.atom
            if item.negated or a.lower != 1 or a.upper != 1 or len(a.vars) < 2:
                continue
            if any(group_of[v] >= 0 for v in a.vars):
                continue
            for v in a.vars:
                group_of[v] = len(groups)
            groups.append(list(a.vars))
        self.group_of = group_of
        self.num_groups = len(groups)
        self.group_start, self.group_vars = _csr(groups)

    def arrays(self) -> tuple:
        return (self.clause_start, self.item_kind, self.item_ref, self.item_pos,
                self.var_occ_start, self.var_occ_clause, self.var_occ_pos,
                self.var_atom_start, self.var_atom_ids,
                self.atom_lo, self.atom_hi, self.atom_start, self.atom_vars,
                self.atom_occ_start, self.atom_occ_clause, self.atom_occ_pos,
                self.group_of, self.group_start, self.group_vars)


# --- compiled kernels ---------------------------------------------------------
# Argument order for every kernel follows CompiledTheory.arrays().


@numba.njit(cache=True, nogil=True)
def _atom_holds(count, lo, hi):
    return (lo == NO_BOUND or count >= lo) and (hi == NO_BOUND or count <= hi)


@numba.njit(cache=True, nogil=True)
def _init_state(clause_start, item_kind, item_ref, item_pos, atom_lo, atom_hi, atom_start, atom_vars,
                val, atom_count, sat_items, unsat, unsat_pos):
    for a in range(len(atom_lo)):
        cnt = 0
        for j in range(atom_start[a], atom_start[a + 1]):
            cnt += val[atom_vars[j]]
        atom_count[a] = cnt
    n_unsat = 0
    for c in range(len(clause_start) - 1):
        s = 0
        for j in range(clause_start[c], clause_start[c + 1]):
            if item_kind[j] == 0:
                if val[item_ref[j]] == item_pos[j]:
                    s += 1
            else:
                a = item_ref[j]
                if _atom_holds(atom_count[a], atom_lo[a], atom_hi[a]) == (item_pos[j] == 1):
                    s += 1
        sat_items[c] = s
        if s == 0:
            unsat[n_unsat] = c
            unsat_pos[c] = n_unsat
            n_unsat += 1
        else:
            unsat_pos[c] = -1
    return n_unsat


@numba.njit(cache=True, nogil=True)
def _move_deltas(v1, v2, val, var_occ_start, var_occ_clause, var_occ_pos, var_atom_start, var_atom_ids,
                 atom_lo, atom_hi, atom_count, atom_occ_start, atom_occ_clause, atom_occ_pos,
                 delta, touched, atom_delta, touched_atoms, mark, amark):
    """Accumulate per-clause changes in satisfied-item counts; returns (#clauses, #atoms) touched."""
    nt = 0
    na = 0
    for t in range(2):
        v = v1 if t == 0 else v2
        if v < 0:
            continue
        old = val[v]
        new = 1 - old
        for j in range(var_occ_start[v], var_occ_start[v + 1]):
            c = var_occ_clause[j]
            if not mark[c]:
                mark[c] = True
                touched[nt] = c
                nt += 1
            delta[c] += (1 if new == var_occ_pos[j] else 0) - (1 if old == var_occ_pos[j] else 0)
        for j in range(var_atom_start[v], var_atom_start[v + 1]):
            a = var_atom_ids[j]
            if not amark[a]:
                amark[a] = True
                touched_atoms[na] = a
                na += 1
            atom_delta[a] += new - old
    for t in range(na):
        a = touched_atoms[t]
        before = _atom_holds(atom_count[a], atom_lo[a], atom_hi[a])
        after = _atom_holds(atom_count[a] + atom_delta[a], atom_lo[a], atom_hi[a])
        if before == after:
            continue
        for j in range(atom_occ_start[a], atom_occ_start[a + 1]):
            c = atom_occ_clause[j]
            pos = atom_occ_pos[j] == 1
            if not mark[c]:
                mark[c] = True
                touched[nt] = c
                nt += 1
            delta[c] += (1 if after == pos else 0) - (1 if before == pos else 0)
    return nt, na


@numba.njit(cache=True, nogil=True)
def _breakcount(v1, v2, val, var_occ_start, var_occ_clause, var_occ_pos, var_atom_start, var_atom_ids,
                atom_lo, atom_hi, atom_count, atom_occ_start, atom_occ_clause, atom_occ_pos,
                sat_items, delta, touched, atom_delta, touched_atoms, mark, amark):
    nt, na = _move_deltas(v1, v2, val, var_occ_start, var_occ_clause, var_occ_pos, var_atom_start,
                          var_atom_ids, atom_lo, atom_hi, atom_count, atom_occ_start, atom_occ_clause,
                          atom_occ_pos, delta, touched, atom_delta, touched_atoms, mark, amark)
    br = 0
    for t in range(nt):
        c = touched[t]
        if sat_items[c] > 0 and sat_items[c] + delta[c] == 0:
            br += 1
        delta[c] = 0
        mark[c] = False
    for t in range(na):
        atom_delta[touched_atoms[t]] = 0
        amark[touched_atoms[t]] = False
    return br


@numba.njit(cache=True, nogil=True)
def _apply(v1, v2, val, var_occ_start, var_occ_clause, var_occ_pos, var_atom_start, var_atom_ids,
           atom_lo, atom_hi, atom_count, atom_occ_start, atom_occ_clause, atom_occ_pos,
           sat_items, unsat, unsat_pos, n_unsat, group_of, group_cur,
           delta, touched, atom_delta, touched_atoms, mark, amark):
    nt, na = _move_deltas(v1, v2, val, var_occ_start, var_occ_clause, var_occ_pos, var_atom_start,
                          var_atom_ids, atom_lo, atom_hi, atom_count, atom_occ_start, atom_occ_clause,
                          atom_occ_pos, delta, touched, atom_delta, touched_atoms, mark, amark)
    for t in range(nt):
        c = touched[t]
        d = delta[c]
        mark[c] = False
        if d == 0:
            continue
        before = sat_items[c]
        sat_items[c] = before + d
        if before > 0 and sat_items[c] == 0:
            unsat[n_unsat] = c
            unsat_pos[c] = n_unsat
            n_unsat += 1
        elif before == 0 and sat_items[c] > 0:
            p = unsat_pos[c]
            last = unsat[n_unsat - 1]
            unsat[p] = last
            unsat_pos[last] = p
            unsat_pos[c] = -1
            n_unsat -= 1
        delta[c] = 0
    for t in range(na):
        a = touched_atoms[t]
        atom_count[a] += atom_delta[a]
        atom_delta[a] = 0
        amark[a] = False
    for t in range(2):
        v = v1 if t == 0 else v2
        if v < 0:
            continue
        val[v] = 1 - val[v]
        g = group_of[v]
        if g >= 0 and val[v] == 1:
            group_cur[g] = v
    return n_unsat


@numba.njit(cache=True, nogil=True)
def _add_move(cand1, cand2, nc, a, b):
    for t in range(nc):
        if cand1[t] == a and cand2[t] == b:
            return nc
    cand1[nc] = a
    cand2[nc] = b
    return nc + 1


@numba.njit(cache=True, nogil=True)
def _add_set(var, target, block_mode, group_of, group_start, group_vars, group_cur, val, cand1, cand2, nc):
    """Candidate moves that give ``var`` the value ``target``."""
    if val[var] == target:
        return nc
    g = group_of[var] if block_mode else -1
    if g < 0:
        return _add_move(cand1, cand2, nc, var, -1)
    if target == 1:
        return _add_move(cand1, cand2, nc, group_cur[g], var)
    for j in range(group_start[g], group_start[g + 1]):
        w = group_vars[j]
        if w != var:
            nc = _add_move(cand1, cand2, nc, var, w)
    return nc


@numba.njit(cache=True, nogil=True)
def _candidates(c, block_mode, clause_start, item_kind, item_ref, item_pos, atom_lo, atom_hi, atom_start,
                atom_vars, atom_count, group_of, group_start, group_vars, group_cur, val, cand1, cand2):
    nc = 0
    for j in range(clause_start[c], clause_start[c + 1]):
        if item_kind[j] == 0:
            nc = _add_set(item_ref[j], item_pos[j], block_mode, group_of, group_start, group_vars,
                          group_cur, val, cand1, cand2, nc)
            continue
        a = item_ref[j]
        cnt = atom_count[a]
        lo = atom_lo[a]
        hi = atom_hi[a]
        target = -1
        if item_pos[j] == 1:
            if lo != NO_BOUND and cnt < lo:
                target = 1
            elif hi != NO_BOUND and cnt > hi:
                target = 0
        else:
            # leave the range through the nearer side
            if lo == NO_BOUND:
                target = 1
            elif hi == NO_BOUND:
                target = 0
            elif cnt - lo <= hi - cnt:
                target = 0
            else:
                target = 1
        if target < 0:
            continue
        for t in range(atom_start[a], atom_start[a + 1]):
            nc = _add_set(atom_vars[t], target, block_mode, group_of, group_start, group_vars,
                          group_cur, val, cand1, cand2, nc)
    return nc


@numba.njit(cache=True, nogil=True)
def _walk(clause_start, item_kind, item_ref, item_pos, var_occ_start, var_occ_clause, var_occ_pos,
          var_atom_start, var_atom_ids, atom_lo, atom_hi, atom_start, atom_vars,
          atom_occ_start, atom_occ_clause, atom_occ_pos, group_of, group_start, group_vars,
          val, block_mode, seed32, noise, max_flips, cand_capacity, stop, restart):
    """One restart from the initial values in ``val`` (modified in place).

    Returns (solved, flips, best_unsat).
    """
    np.random.seed(seed32)
    n_clauses = len(clause_start) - 1
    n_atoms = len(atom_lo)
    num_groups = len(group_start) - 1
    atom_count = np.zeros(n_atoms, dtype=np.int64)
    sat_items = np.zeros(n_clauses, dtype=np.int64)
    unsat = np.zeros(n_clauses, dtype=np.int64)
    unsat_pos = np.full(n_clauses, -1, dtype=np.int64)
    delta = np.zeros(n_clauses, dtype=np.int64)
    touched = np.zeros(n_clauses, dtype=np.int64)
    atom_delta = np.zeros(n_atoms, dtype=np.int64)
    touched_atoms = np.zeros(max(n_atoms, 1), dtype=np.int64)
    mark = np.zeros(n_clauses, dtype=np.bool_)
    amark = np.zeros(max(n_atoms, 1), dtype=np.bool_)
    cand1 = np.zeros(cand_capacity, dtype=np.int64)
    cand2 = np.zeros(cand_capacity, dtype=np.int64)
    ties = np.zeros(cand_capacity, dtype=np.int64)
    group_cur = np.full(max(num_groups, 1), -1, dtype=np.int64)
    for g in range(num_groups):
        for j in range(group_start[g], group_start[g + 1]):
            if val[group_vars[j]] == 1:
                group_cur[g] = group_vars[j]
    n_unsat = _init_state(clause_start, item_kind, item_ref, item_pos, atom_lo, atom_hi, atom_start,
                          atom_vars, val, atom_count, sat_items, unsat, unsat_pos)
    best = n_unsat
    flips = 0
    while flips < max_flips:
        if n_unsat == 0:
            return True, flips, 0
        if flips % _STOP_POLL == 0 and stop[0] < restart:
            return False, flips, best
        c = unsat[np.random.randint(0, n_unsat)]
        nc = _candidates(c, block_mode, clause_start, item_kind, item_ref, item_pos, atom_lo, atom_hi,
                         atom_start, atom_vars, atom_count, group_of, group_start, group_vars, group_cur,
                         val, cand1, cand2)
        if nc == 0:
            # nothing can repair this clause from here; count the step and keep going
            flips += 1
            continue
        if np.random.random() < noise:
            pick = np.random.randint(0, nc)
        else:
            best_br = -1
            nties = 0
            for t in range(nc):
                br = _breakcount(cand1[t], cand2[t], val, var_occ_start, var_occ_clause, var_occ_pos,
                                 var_atom_start, var_atom_ids, atom_lo, atom_hi, atom_count, atom_occ_start,
                                 atom_occ_clause, atom_occ_pos, sat_items, delta, touched, atom_delta,
                                 touched_atoms, mark, amark)
                if best_br < 0 or br < best_br:
                    best_br = br
                    nties = 0
                if br == best_br:
                    ties[nties] = t
                    nties += 1
            pick = ties[np.random.randint(0, nties)]
        n_unsat = _apply(cand1[pick], cand2[pick], val, var_occ_start, var_occ_clause, var_occ_pos,
                         var_atom_start, var_atom_ids, atom_lo, atom_hi, atom_count, atom_occ_start,
                         atom_occ_clause, atom_occ_pos, sat_items, unsat, unsat_pos, n_unsat, group_of,
                         group_cur, delta, touched, atom_delta, touched_atoms, mark, amark)
        flips += 1
        if n_unsat < best:
            best = n_unsat
    return n_unsat == 0, flips, best


# --- Python-facing state --------------------------------------------------------


class WalkState:
    """Incremental search state over a compiled theory, for inspection and tests."""

    def __init__(self, compiled: CompiledTheory | CTheory, values: Sequence[bool]) -> None:
        if isinstance(compiled, CTheory):
            compiled = CompiledTheory(compiled)
        self.ct = ct = compiled
        if len(values) != ct.num_vars:
            raise ValueError(f"need {ct.num_vars} values, got {len(values)}")
        n_c, n_a = ct.num_clauses, len(ct.atom_lo)
        self.val = np.zeros(ct.num_vars + 1, dtype=np.int64)
        self.val[1:] = np.asarray(values, dtype=np.int64)
        self.atom_count = np.zeros(n_a, dtype=np.int64)
        self.sat_items = np.zeros(n_c, dtype=np.int64)
        self.unsat = np.zeros(n_c, dtype=np.int64)
        self.unsat_pos = np.full(n_c, -1, dtype=np.int64)
        self._delta = np.zeros(n_c, dtype=np.int64)
        self._touched = np.zeros(n_c, dtype=np.int64)
        self._atom_delta = np.zeros(n_a, dtype=np.int64)
        self._touched_atoms = np.zeros(max(n_a, 1), dtype=np.int64)
        self._mark = np.zeros(n_c, dtype=np.bool_)
        self._amark = np.zeros(max(n_a, 1), dtype=np.bool_)
        self.group_cur = np.full(max(ct.num_groups, 1), -1, dtype=np.int64)
        for g in range(ct.num_groups):
            for v in ct.group_vars[ct.group_start[g]:ct.group_start[g + 1]]:
                if self.val[v]:
                    self.group_cur[g] = v
        self.n_unsat = _init_state(ct.clause_start, ct.item_kind, ct.item_ref, ct.item_pos, ct.atom_lo,
                                   ct.atom_hi, ct.atom_start, ct.atom_vars, self.val, self.atom_count,
                                   self.sat_items, self.unsat, self.unsat_pos)

    def _split(self, move: Move) -> tuple[int, int]:
        if not 1 <= len(move) <= 2 or len(set(move)) != len(move):
            raise ValueError(f"a move toggles one or two distinct variables, got {move!r}")
        for v in move:
            if not 1 <= v <= self.ct.num_vars:
                raise ValueError(f"variable {v} outside [1, {self.ct.num_vars}]")
        return move[0], move[1] if len(move) == 2 else -1

    def _occ(self) -> tuple:
        ct = self.ct
        return (ct.var_occ_start, ct.var_occ_clause, ct.var_occ_pos, ct.var_atom_start, ct.var_atom_ids,
                ct.atom_lo, ct.atom_hi, self.atom_count, ct.atom_occ_start, ct.atom_occ_clause,
                ct.atom_occ_pos)

    def breakcount(self, move: Move) -> int:
        v1, v2 = self._split(move)
        return int(_breakcount(v1, v2, self.val, *self._occ(), self.sat_items, self._delta, self._touched,
                               self._atom_delta, self._touched_atoms, self._mark, self._amark))

    def apply(self, move: Move) -> None:
        v1, v2 = self._split(move)
        self.n_unsat = int(_apply(v1, v2, self.val, *self._occ(), self.sat_items, self.unsat,
                                  self.unsat_pos, self.n_unsat, self.ct.group_of, self.group_cur,
                                  self._delta, self._touched, self._atom_delta, self._touched_atoms,
                                  self._mark, self._amark))

    def candidates(self, clause: int, neighborhood: str = BLOCK_MOVE) -> list[Move]:
        ct = self.ct
        cap = ct.cand_capacity
        c1 = np.zeros(cap, dtype=np.int64)
        c2 = np.zeros(cap, dtype=np.int64)
        nc = _candidates(clause, neighborhood == BLOCK_MOVE, ct.clause_start, ct.item_kind, ct.item_ref,
                         ct.item_pos, ct.atom_lo, ct.atom_hi, ct.atom_start, ct.atom_vars, self.atom_count,
                         ct.group_of, ct.group_start, ct.group_vars, self.group_cur, self.val, c1, c2)
        return [(int(a),) if b < 0 else (int(a), int(b)) for a, b in zip(c1[:nc], c2[:nc])]

    def unsatisfied(self) -> list[int]:
        return sorted(int(c) for c in self.unsat[: self.n_unsat])

    def values(self) -> list[bool]:
        return [bool(x) for x in self.val[1:]]


def breakcount(theory: CTheory, current: Assignment | Sequence[bool], move: Move) -> int:
    """Number of c-clauses satisfied under ``current`` that ``move`` would falsify."""
    values = current.values() if isinstance(current, Assignment) else current
    return WalkState(theory, values).breakcount(move)


# --- driver ---------------------------------------------------------------------


@dataclass
class RestartOutcome:
    restart: int
    seed: int
    solved: bool
    flips: int
    best_unsat: int
    values: np.ndarray = field(repr=False)


def _initial_values(ct: CompiledTheory, rng: np.random.Generator, block_mode: bool,
                    warm: Sequence[bool] | None) -> np.ndarray:
    val = np.zeros(ct.num_vars + 1, dtype=np.int64)
    if warm is not None:
        val[1:] = np.asarray(warm, dtype=np.int64)
        return val
    val[1:] = rng.integers(0, 2, size=ct.num_vars)
    if block_mode:
        for g in range(ct.num_groups):
            members = ct.group_vars[ct.group_start[g]:ct.group_start[g + 1]]
            val[members] = 0
            val[members[rng.integers(0, len(members))]] = 1
    return val


def run_restart(ct: CompiledTheory, config: WalkConfig, restart: int,
                warm: Sequence[bool] | None = None, stop: np.ndarray | None = None) -> RestartOutcome:
    """A single deterministic restart: a pure function of (theory, config, restart, warm start)."""
    seed = restart_seed(config.seed, restart)
    block_mode = config.neighborhood == BLOCK_MOVE
    rng = np.random.default_rng(seed)
    val = _initial_values(ct, rng, block_mode, warm)
    if stop is None:
        stop = np.array([np.iinfo(np.int64).max], dtype=np.int64)
    solved, flips, best = _walk(*ct.arrays(), val, block_mode, _rng_seed32(seed), float(config.noise),
                                int(config.max_flips), ct.cand_capacity, stop, restart)
    return RestartOutcome(restart, seed, bool(solved), int(flips), int(best), val)


def solve_local(theory: CTheory | CompiledTheory, config: WalkConfig | None = None,
                warm_start: Sequence[bool] | None = None, progress: TextIO | None = None,
                jobs: int = 1) -> SolveResult:
    """Search for a model; never reports UNSAT.

    The result is the lowest-numbered restart that succeeds, so running
    restarts on several threads returns what a sequential run would.
    ``warm_start`` (one bool per variable) replaces the random initial
    assignment of every restart.
    """
    config = config or WalkConfig()
    ct = theory if isinstance(theory, CompiledTheory) else CompiledTheory(theory)
    if warm_start is not None:
        if len(warm_start) != ct.num_vars:
            raise ValueError(f"warm start has {len(warm_start)} values, theory has {ct.num_vars} variables")
        if config.neighborhood == BLOCK_MOVE:
            for g in range(ct.num_groups):
                members = ct.group_vars[ct.group_start[g]:ct.group_start[g + 1]]
                if sum(bool(warm_start[v - 1]) for v in members) != 1:
                    raise ValueError("warm start must set exactly one variable of every exactly-one group")
    outcomes: dict[int, RestartOutcome] = {}
    stop = np.array([np.iinfo(np.int64).max], dtype=np.int64)
    lock = threading.Lock()

    def one(r: int) -> RestartOutcome:
        if stop[0] < r:
            return RestartOutcome(r, restart_seed(config.seed, r), False, 0, -1, np.zeros(0))
        out = run_restart(ct, config, r, warm_start, stop)
        with lock:
            outcomes[r] = out
            if out.solved and r < stop[0]:
                stop[0] = r
        return out

    if jobs <= 1:
        for r in range(config.restarts):
            out = one(r)
            _report(progress, out)
            if out.solved:
                break
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for out in pool.map(one, range(config.restarts)):
                if out.best_unsat >= 0:
                    _report(progress, out)

    stats = Stats(decisions=sum(o.flips for o in outcomes.values()))
    meta = {"rng": RNG_NAME, "seed": str(config.seed), "noise": str(config.noise),
            "max_flips": str(config.max_flips), "restarts": str(config.restarts),
            "neighborhood": config.neighborhood, "warm_start": str(warm_start is not None).lower()}
    winners = sorted(r for r, o in outcomes.items() if o.solved)
    if winners:
        win = outcomes[winners[0]]
        values = [bool(x) for x in win.values[1:]]
        if not ct.theory.satisfied_by(values):
            raise AssertionError("internal error: local search model fails re-verification")
        meta.update(restart=str(win.restart), restart_seed=str(win.seed), flips=str(win.flips))
        if progress is not None:
            progress.write(f"SAT seed={win.seed} flips={win.flips}\n")
        return SolveResult(Status.SAT, Assignment(values), stats=stats, metadata=meta)
    if progress is not None:
        progress.write("UNKNOWN\n")
    return SolveResult(Status.UNKNOWN, reason="flip budget exhausted", stats=stats, metadata=meta)


def _report(progress: TextIO | None, out: RestartOutcome) -> None:
    line = f"restart={out.restart} seed={out.seed} best_unsat={out.best_unsat} flips={out.flips}"
    log.debug("walk %s", line)
    if progress is not None:
        progress.write(f"# {line}\n")
