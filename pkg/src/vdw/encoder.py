"""Clause theories for van der Waerden instances and their text formats.

Literals are signed DIMACS integers. Variable ``(i - 1) * k + b`` says
"element ``i`` lies in block ``b``"; auxiliary variables, when a symmetry
mode needs them, are numbered after the ``m * k`` primary ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO, Union

from .model import Params, iter_progressions


class SymmetryMode(str, enum.Enum):
    NONE = "none"
    FIX_FIRST = "fix-first"
    LEX = "lex"


class FormatError(ValueError):
    """Malformed DIMACS / xDIMACS input."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def var_of(i: int, b: int, params: Params) -> int:
    if not 1 <= i <= params.m:
        raise ValueError(f"element {i} outside [1, {params.m}]")
    if not 1 <= b <= params.k:
        raise ValueError(f"block {b} outside [1, {params.k}]")
    return (i - 1) * params.k + b


def var_unmap(var: int, params: Params) -> tuple[int, int]:
    if not 1 <= var <= params.num_vars:
        raise ValueError(f"variable {var} outside [1, {params.num_vars}]")
    i, b = divmod(var - 1, params.k)
    return i + 1, b + 1


@dataclass(frozen=True)
class CAtom:
    """Cardinality atom ``lower{vars}upper``; a missing bound is ``None``."""

    lower: int | None
    upper: int | None
    vars: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("cardinality atom needs at least one variable")
        if any(v < 1 for v in self.vars):
            raise ValueError("cardinality atom variables must be positive ids")
        if self.lower is None and self.upper is None:
            raise ValueError("cardinality atom needs a lower or an upper bound")
        if self.lower is not None and self.lower < 0 or self.upper is not None and self.upper < 0:
            raise ValueError("cardinality bounds must be non-negative")
        if self.lower is not None and self.upper is not None and not self.lower <= self.upper <= len(self.vars):
            raise ValueError(f"need lower <= upper <= {len(self.vars)}, got {self.lower}, {self.upper}")

    def holds(self, count: int) -> bool:
        return (self.lower is None or self.lower <= count) and (self.upper is None or count <= self.upper)


@dataclass(frozen=True)
class CardLit:
    """A possibly negated cardinality atom appearing in a c-clause."""

    atom: CAtom
    negated: bool = False


CItem = Union[int, CardLit]
Clause = tuple[int, ...]
CClause = tuple[CItem, ...]


def _check_clause(clause: Iterable[int], num_vars: int) -> None:
    seen = set()
    empty = True
    for lit in clause:
        empty = False
        v = abs(lit)
        if lit == 0 or v > num_vars:
            raise ValueError(f"literal {lit} outside [1, {num_vars}]")
        if v in seen:
            raise ValueError(f"variable {v} repeated in clause")
        seen.add(v)
    if empty:
        raise ValueError("empty clause")


@dataclass(frozen=True)
class CnfTheory:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]], check: bool = True) -> None:
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in clauses))
        if check:
            for c in self.clauses:
                _check_clause(c, num_vars)


@dataclass(frozen=True)
class CTheory:
    num_vars: int
    cclauses: tuple[CClause, ...]

    def __init__(self, num_vars: int, cclauses: Iterable[Iterable[CItem]], check: bool = True) -> None:
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "cclauses", tuple(tuple(c) for c in cclauses))
        if check:
            for c in self.cclauses:
                if not c:
                    raise ValueError("empty c-clause")
                lits = [x for x in c if isinstance(x, int)]
                if lits:
                    _check_clause(lits, num_vars)
                for x in c:
                    if isinstance(x, CardLit) and max(x.atom.vars) > num_vars:
                        raise ValueError(f"cardinality atom mentions variable beyond {num_vars}")

    @property
    def num_atoms(self) -> int:
        return self.num_vars

    def unsatisfied(self, values: Sequence[bool]) -> list[int]:
        """Indices of c-clauses falsified by ``values`` (``values[v - 1]`` is variable ``v``)."""
        return [idx for idx, c in enumerate(self.cclauses) if not cclause_holds(c, values)]

    def satisfied_by(self, values: Sequence[bool]) -> bool:
        return all(cclause_holds(c, values) for c in self.cclauses)

    @classmethod
    def from_cnf(cls, theory: CnfTheory) -> CTheory:
        return cls(theory.num_vars, theory.clauses, check=False)


def cclause_holds(clause: CClause, values: Sequence[bool]) -> bool:
    for item in clause:
        if isinstance(item, int):
            if values[item - 1] if item > 0 else not values[-item - 1]:
                return True
        elif item.atom.holds(sum(1 for v in item.atom.vars if values[v - 1])) != item.negated:
            return True
    return False


def _ap_clauses(params: Params) -> Iterator[Clause]:
    k = params.k
    for ap in iter_progressions(params.m, params.l):
        for b in range(1, k + 1):
            yield tuple(-((i - 1) * k + b) for i in ap.terms())


def _symmetry_clauses(params: Params, symmetry: SymmetryMode) -> tuple[int, list[Clause]]:
    """Extra clauses and the number of auxiliary variables they introduce."""
    symmetry = SymmetryMode(symmetry)
    if symmetry is SymmetryMode.NONE:
        return 0, []
    # with k == 1 the unit would duplicate element 1's at-least-one clause
    clauses: list[Clause] = [(1,)] if params.k > 1 else []
    if symmetry is SymmetryMode.FIX_FIRST:
        return 0, clauses
    k, m = params.k, params.m
    base = params.num_vars

    def x(i: int, b: int) -> int:
        return (i - 1) * k + b

    def used(i: int, b: int) -> int:
        # block b occurs among elements 1..i
        return base + (i - 1) * k + b

    for i in range(1, m + 1):
        for b in range(1, k + 1):
            if i == 1:
                clauses.append((-x(1, b), used(1, b)))
                clauses.append((-used(1, b), x(1, b)))
            else:
                clauses.append((-x(i, b), used(i, b)))
                clauses.append((-used(i - 1, b), used(i, b)))
                clauses.append((-used(i, b), used(i - 1, b), x(i, b)))
    for i in range(2, m + 1):
        for b in range(1, k):
            clauses.append((-x(i, b + 1), used(i - 1, b)))
    return m * k, clauses


def encode_cnf(params: Params, symmetry: SymmetryMode = SymmetryMode.NONE) -> CnfTheory:
    """Plain CNF whose models over the primary variables are the AP-free k-colorings of [m]."""
    k, m = params.k, params.m
    clauses: list[Clause] = []
    for i in range(1, m + 1):
        base = (i - 1) * k
        for b1 in range(1, k + 1):
            for b2 in range(b1 + 1, k + 1):
                clauses.append((-(base + b1), -(base + b2)))
    for i in range(1, m + 1):
        base = (i - 1) * k
        clauses.append(tuple(base + b for b in range(1, k + 1)))
    clauses.extend(_ap_clauses(params))
    n_aux, extra = _symmetry_clauses(params, symmetry)
    clauses.extend(extra)
    return CnfTheory(params.num_vars + n_aux, clauses, check=False)


def encode_ps(params: Params, symmetry: SymmetryMode = SymmetryMode.NONE) -> CTheory:
    """Cardinality-extended theory: an exactly-one atom per element plus the progression clauses."""
    k, m = params.k, params.m
    cclauses: list[CClause] = []
    for i in range(1, m + 1):
        base = (i - 1) * k
        cclauses.append((CardLit(CAtom(1, 1, tuple(base + b for b in range(1, k + 1)))),))
    cclauses.extend(_ap_clauses(params))
    n_aux, extra = _symmetry_clauses(params, symmetry)
    cclauses.extend(extra)
    return CTheory(params.num_vars + n_aux, cclauses, check=False)


def vdw_header(params: Params, symmetry: SymmetryMode = SymmetryMode.NONE) -> str:
    """Comment line that lets a solver recover the instance from an encoded file."""
    return f"vdw k={params.k} l={params.l} m={params.m} symmetry={SymmetryMode(symmetry).value}"


def parse_vdw_header(comments: Iterable[str]) -> tuple[Params, SymmetryMode] | None:
    for line in comments:
        fields = line.split()
        if fields[:1] != ["vdw"]:
            continue
        kv = dict(f.split("=", 1) for f in fields[1:] if "=" in f)
        try:
            params = Params(int(kv["k"]), int(kv["l"]), int(kv["m"]))
            return params, SymmetryMode(kv.get("symmetry", "none"))
        except (KeyError, ValueError):
            return None
    return None


# --- DIMACS ---------------------------------------------------------------


def write_dimacs(theory: CnfTheory, sink: TextIO, comments: Iterable[str] = ()) -> None:
    for c in comments:
        sink.write(f"c {c}\n")
    sink.write(f"p cnf {theory.num_vars} {len(theory.clauses)}\n")
    for clause in theory.clauses:
        sink.write(" ".join(map(str, clause)))
        sink.write(" 0\n")


def _format_item(item: CItem) -> str:
    if isinstance(item, int):
        return str(item)
    a = item.atom
    lo = "-" if a.lower is None else str(a.lower)
    hi = "-" if a.upper is None else str(a.upper)
    prefix = "!" if item.negated else ""
    return f"{prefix}[ {lo} {hi} {len(a.vars)} {' '.join(map(str, a.vars))} ]"


def write_xdimacs(theory: CTheory, sink: TextIO, comments: Iterable[str] = ()) -> None:
    for c in comments:
        sink.write(f"c {c}\n")
    sink.write(f"p ccnf {theory.num_vars} {len(theory.cclauses)}\n")
    for clause in theory.cclauses:
        sink.write(" ".join(_format_item(x) for x in clause))
        sink.write(" 0\n")


def _tokens(source: TextIO) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(source, start=1):
        for tok in line.split():
            yield lineno, tok


def _read_header(source: TextIO, kind: str) -> tuple[list[str], int, int, list[str]]:
    """Consume comment lines and the problem line; return comments, sizes and the body lines."""
    comments: list[str] = []
    lines = source.read().split("\n")
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("c"):
            comments.append(stripped[1:].strip())
            continue
        fields = stripped.split()
        if fields[0] != "p" or len(fields) != 4 or fields[1] != kind:
            raise FormatError(f"expected 'p {kind} <vars> <clauses>', got {stripped!r}", idx + 1)
        try:
            nv, nc = int(fields[2]), int(fields[3])
        except ValueError:
            raise FormatError(f"non-numeric problem line {stripped!r}", idx + 1) from None
        if nv < 0 or nc < 0:
            raise FormatError("negative sizes in problem line", idx + 1)
        body = [""] * (idx + 1) + lines[idx + 1 :]
        return comments, nv, nc, body
    raise FormatError(f"missing 'p {kind}' problem line")


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", lineno) from None


def read_dimacs(source: TextIO) -> tuple[CnfTheory, list[str]]:
    """Parse DIMACS CNF; returns the theory and the comment lines (without the leading ``c``)."""
    comments, nv, nc, body = _read_header(source, "cnf")
    clauses: list[list[int]] = []
    current: list[int] = []
    lineno = 0
    for lineno, line in enumerate(body, start=1):
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("%"):
            continue
        for tok in s.split():
            lit = _parse_int(tok, lineno)
            if lit == 0:
                if not current:
                    raise FormatError("empty clause", lineno)
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        raise FormatError("last clause not terminated by 0", lineno)
    if len(clauses) != nc:
        raise FormatError(f"header announces {nc} clauses, found {len(clauses)}")
    try:
        return CnfTheory(nv, clauses), comments
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _parse_bound(tok: str, lineno: int) -> int | None:
    return None if tok == "-" else _parse_int(tok, lineno)


def read_xdimacs(source: TextIO) -> tuple[CTheory, list[str]]:
    """Parse the extended format with cardinality groups ``[ lo hi n v1 .. vn ]``."""
    comments, nv, nc, body = _read_header(source, "ccnf")
    toks = [(n, t) for n, line in enumerate(body, start=1) if not line.strip().startswith("c")
            for t in line.split()]
    clauses: list[list[CItem]] = []
    current: list[CItem] = []
    pos = 0
    lineno = 0
    while pos < len(toks):
        lineno, tok = toks[pos]
        pos += 1
        negated = False
        if tok == "!":
            if pos >= len(toks) or toks[pos][1] != "[":
                raise FormatError("'!' must precede a cardinality group", lineno)
            negated, tok = True, "["
            pos += 1
        elif tok == "![":
            negated, tok = True, "["
        if tok == "[":
            if pos + 3 > len(toks):
                raise FormatError("truncated cardinality group", lineno)
            lo = _parse_bound(toks[pos][1], lineno)
            hi = _parse_bound(toks[pos + 1][1], lineno)
            n = _parse_int(toks[pos + 2][1], lineno)
            pos += 3
            if n < 1 or pos + n >= len(toks):
                raise FormatError("truncated cardinality group", lineno)
            vs = tuple(_parse_int(t, lineno) for _, t in toks[pos : pos + n])
            pos += n
            if toks[pos][1] != "]":
                raise FormatError(f"expected ']' after {n} variables, got {toks[pos][1]!r}", toks[pos][0])
            pos += 1
            try:
                current.append(CardLit(CAtom(lo, hi, vs), negated))
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            continue
        lit = _parse_int(tok, lineno)
        if lit == 0:
            if not current:
                raise FormatError("empty clause", lineno)
            clauses.append(current)
            current = []
        else:
            current.append(lit)
    if current:
        raise FormatError("last clause not terminated by 0", lineno)
    if len(clauses) != nc:
        raise FormatError(f"header announces {nc} clauses, found {len(clauses)}")
    try:
        return CTheory(nv, clauses), comments
    except ValueError as exc:
        raise FormatError(str(exc)) from None
