"""Model/partition codec, certificate verification, symmetry maps, certificate files.

Certificate text format (UTF-8, LF)::

    origin=free text            (optional)
    k=4
    l=3
    m=75
    Block 1: 6 7 9 14 ...
    Block 2: 4 5 12 ...

A block's numbers may wrap onto following lines. Lines starting with ``#``
are comments.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .dpll import Assignment
from .model import Certificate, Params, Partition, Progression, is_ap_free, monochromatic_progressions

MAX_VIOLATIONS = 10


class MalformedModel(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class RangeError(ParseError):
    pass


class DuplicateError(ParseError):
    pass


def decode_model(assignment: Assignment, params: Params) -> Partition:
    """Read the partition off the primary variables; auxiliary variables are ignored."""
    k, m = params.k, params.m
    if assignment.num_vars < m * k:
        raise MalformedModel(f"assignment covers {assignment.num_vars} variables, need {m * k}")
    values = assignment.values()
    blocks: list[set[int]] = [set() for _ in range(k)]
    for i in range(1, m + 1):
        base = (i - 1) * k
        chosen = [b for b in range(1, k + 1) if values[base + b - 1]]
        if len(chosen) != 1:
            raise MalformedModel(f"element {i} is in {len(chosen)} blocks")
        blocks[chosen[0] - 1].add(i)
    return Partition(m, blocks)


def encode_partition(partition: Partition, params: Params) -> Assignment:
    if partition.m != params.m or partition.k != params.k:
        raise ValueError(f"partition is {partition.k} blocks over [{partition.m}], "
                         f"params want {params.k} over [{params.m}]")
    defects = partition.defects()
    if defects:
        raise ValueError("not a partition: " + "; ".join(defects))
    k = params.k
    true_vars = [(i - 1) * k + b for b, block in enumerate(partition.blocks, start=1) for i in block]
    return Assignment.from_true_vars(params.num_vars, true_vars)


@dataclass
class VerifyReport:
    params: Params
    partition_defects: list[str]
    block_ap_free: list[bool]
    violations: list[tuple[Progression, int]]
    warnings: list[str] = field(default_factory=list)

    @property
    def partition_valid(self) -> bool:
        return not self.partition_defects

    @property
    def valid(self) -> bool:
        return self.partition_valid and all(self.block_ap_free)

    def summary(self) -> str:
        p = self.params
        head = f"k={p.k} l={p.l} m={p.m}"
        if self.valid:
            return f"VALID {head}"
        reasons = []
        if self.partition_defects:
            reasons.append("not-a-partition")
        bad = [str(b) for b, ok in enumerate(self.block_ap_free, start=1) if not ok]
        if bad:
            reasons.append("progression-in-block=" + ",".join(bad))
        return f"INVALID {head} " + " ".join(reasons)

    def render(self) -> str:
        p = self.params
        lines = [f"instance: k={p.k} l={p.l} m={p.m}"]
        lines.append("partition: ok" if self.partition_valid else "partition: DEFECTIVE")
        lines.extend(f"  {d}" for d in self.partition_defects)
        for b, ok in enumerate(self.block_ap_free, start=1):
            lines.append(f"block {b}: {'no' if ok else 'contains a'} {p.l}-term progression")
        for ap, b in self.violations:
            lines.append(f"  violation in block {b}: {ap}")
        lines.extend(f"warning: {w}" for w in self.warnings)
        if self.valid:
            lines.append(f"verdict: valid, W({p.k},{p.l}) > {p.m}")
        else:
            lines.append("verdict: invalid")
        lines.append(self.summary())
        return "\n".join(lines) + "\n"


def verify(certificate: Certificate) -> VerifyReport:
    """Check that the certificate is a partition of [m] with no block holding an l-term progression."""
    params = certificate.params
    part = certificate.partition
    m, l = params.m, params.l
    defects = part.defects()
    in_range = [frozenset(i for i in block if 1 <= i <= m) for block in part.blocks]
    ap_free = [is_ap_free(block, m, l) for block in in_range]
    violations: list[tuple[Progression, int]] = []
    if not all(ap_free):
        # one coloring per offending block, so overlapping blocks are each judged on their own
        found = []
        for b, block in enumerate(in_range, start=1):
            if ap_free[b - 1]:
                continue
            colors = [-1] * (m + 1)
            for i in block:
                colors[i] = b
            found.extend(monochromatic_progressions(colors, m, l, limit=MAX_VIOLATIONS))
        found.sort(key=lambda x: (x[0].step, x[0].start, x[1]))
        violations = found[:MAX_VIOLATIONS]
    warnings = [f"block {b} is empty" for b, block in enumerate(part.blocks, start=1) if not block]
    return VerifyReport(params, defects, ap_free, violations, warnings)


def permute_blocks(partition: Partition, pi: Sequence[int]) -> Partition:
    """Move block ``b`` to position ``pi[b - 1]`` (``pi`` is a 1-based permutation of ``[k]``)."""
    k = partition.k
    if sorted(pi) != list(range(1, k + 1)):
        raise ValueError(f"{list(pi)} is not a permutation of [1, {k}]")
    blocks: list[frozenset[int]] = [frozenset()] * k
    for b, block in enumerate(partition.blocks, start=1):
        blocks[pi[b - 1] - 1] = block
    return Partition(partition.m, blocks)


def reflect(partition: Partition) -> Partition:
    m = partition.m
    return Partition(m, (frozenset(m + 1 - i for i in block) for block in partition.blocks))


# --- certificate files ------------------------------------------------------

_BLOCK_RE = re.compile(r"\s*Block\s+(\d+)\s*:")
_HEADER_RE = re.compile(r"\s*([A-Za-z_]+)\s*=\s*(.*?)\s*$")


def write_certificate(certificate: Certificate, sink: TextIO) -> None:
    p = certificate.params
    if certificate.origin:
        sink.write(f"origin={' '.join(certificate.origin.split())}\n")
    sink.write(f"k={p.k}\nl={p.l}\nm={p.m}\n")
    for b, block in enumerate(certificate.partition.blocks, start=1):
        nums = " ".join(map(str, sorted(block)))
        sink.write(f"Block {b}: {nums}\n" if nums else f"Block {b}:\n")


def format_certificate(certificate: Certificate) -> str:
    buf = io.StringIO()
    write_certificate(certificate, buf)
    return buf.getvalue()


def parse_certificate(source: TextIO | str, l: int | None = None) -> Certificate:
    """Parse a certificate; ``l`` overrides (or supplies) the header's progression length.

    A missing ``k`` header means "as many blocks as listed"; a missing ``m``
    means the largest listed element.
    """
    text = source if isinstance(source, str) else source.read()
    header: dict[str, tuple[str, int]] = {}
    blocks: dict[int, list[tuple[int, int, int]]] = {}
    block_line: dict[int, int] = {}
    current: int | None = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        mb = _BLOCK_RE.match(line)
        if mb:
            current = int(mb.group(1))
            if current in blocks:
                raise ParseError(f"block {current} listed twice", lineno)
            blocks[current] = []
            block_line[current] = lineno
            rest_at = mb.end()
        elif current is None:
            mh = _HEADER_RE.match(line)
            if not mh:
                raise ParseError(f"expected 'key=value' or 'Block <n>:', got {line.strip()!r}", lineno)
            key = mh.group(1)
            if key in header:
                raise ParseError(f"duplicate header {key!r}", lineno)
            header[key] = (mh.group(2), lineno)
            continue
        else:
            rest_at = 0
        for tok in re.finditer(r"\S+", line[rest_at:]):
            col = rest_at + tok.start() + 1
            if not tok.group().isdigit():
                raise ParseError(f"expected a positive integer, got {tok.group()!r}", lineno, col)
            blocks[current].append((int(tok.group()), lineno, col))

    def header_int(key: str) -> int | None:
        if key not in header:
            return None
        raw, lineno = header[key]
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"{key}= needs an integer, got {raw!r}", lineno) from None

    origin = header["origin"][0] if "origin" in header else ""
    for key, (_, lineno) in header.items():
        if key not in ("origin", "k", "l", "m"):
            raise ParseError(f"unknown header {key!r}", lineno)
    if not blocks:
        raise ParseError("no 'Block <n>:' lines", max(1, text.count("\n")))
    k = header_int("k")
    if k is None:
        k = max(blocks)
    for b in blocks:
        if not 1 <= b <= k:
            raise ParseError(f"block number {b} outside [1, {k}]", block_line[b])
    missing = [b for b in range(1, k + 1) if b not in blocks]
    if missing:
        raise ParseError(f"block(s) {missing} not listed (write 'Block <n>:' for an empty block)",
                         max(block_line.values()))
    m = header_int("m")
    if m is None:
        m = max((i for entries in blocks.values() for i, _, _ in entries), default=0)
    ell = l if l is not None else header_int("l")
    if ell is None:
        raise ParseError("no l= header and no progression length supplied", 1)
    seen: dict[int, int] = {}
    for b in range(1, k + 1):
        for i, lineno, col in blocks[b]:
            if not 1 <= i <= m:
                raise RangeError(f"element {i} outside [1, {m}]", lineno, col)
            if i in seen:
                raise DuplicateError(f"element {i} repeated (first in block {seen[i]})", lineno, col)
            seen[i] = b
    try:
        params = Params(k, ell, m)
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None
    partition = Partition(m, ([i for i, _, _ in blocks[b]] for b in range(1, k + 1)))
    return Certificate(params, partition, origin)


def load_certificate(path, l: int | None = None) -> Certificate:
    with open(path, encoding="utf-8") as f:
        return parse_certificate(f, l=l)


def save_certificate(certificate: Certificate, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        write_certificate(certificate, f)
