"""Core domain types and arithmetic-progression arithmetic."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class Params:
    """A van der Waerden instance: ``k`` blocks, progression length ``l``, segment ``[m]``."""

    k: int
    l: int
    m: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.l < 2:
            raise ValueError(f"l must be >= 2, got {self.l}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")

    @property
    def num_vars(self) -> int:
        return self.m * self.k


@dataclass(frozen=True)
class Progression:
    start: int
    step: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 1 or self.step < 1 or self.length < 1:
            raise ValueError(f"invalid progression {self!r}")

    @property
    def last(self) -> int:
        return self.start + (self.length - 1) * self.step

    def terms(self) -> range:
        return range(self.start, self.last + 1, self.step)

    def __iter__(self) -> Iterator[int]:
        return iter(self.terms())

    def __str__(self) -> str:
        return " ".join(map(str, self.terms()))


def iter_progressions(m: int, l: int) -> Iterator[Progression]:
    """Yield every length-``l`` progression in ``[m]``, ascending step, then ascending start."""
    if l < 2:
        raise ValueError("l must be >= 2")
    step = 1
    while 1 + (l - 1) * step <= m:
        for start in range(1, m - (l - 1) * step + 1):
            yield Progression(start, step, l)
        step += 1


def ap_enumerate(m: int, l: int) -> list[Progression]:
    return list(iter_progressions(m, l))


def ap_count(m: int, l: int) -> int:
    """Number of length-``l`` progressions in ``[m]``.

    For step ``d`` there are ``m - (l-1)d`` starts; summing over
    ``d = 1..q`` with ``q = (m-1) // (l-1)`` gives the closed form.
    """
    if m < 1 or l < 2:
        raise ValueError("need m >= 1 and l >= 2")
    q = (m - 1) // (l - 1)
    return q * m - (l - 1) * q * (q + 1) // 2


def _membership_mask(block: Iterable[int], m: int) -> np.ndarray:
    mask = np.zeros(m + 1, dtype=bool)
    idx = np.fromiter(block, dtype=np.int64)
    if idx.size:
        if idx.min() < 1 or idx.max() > m:
            raise ValueError(f"block has elements outside [1, {m}]")
        mask[idx] = True
    return mask


def _monochromatic_starts(colors: np.ndarray, m: int, l: int, step: int) -> np.ndarray:
    """Starts of length-``l`` progressions with the given step whose terms share one color.

    ``colors`` is indexed 1..m; entries < 0 never match (used for "not in block").
    """
    n = m - (l - 1) * step
    first = colors[1 : n + 1]
    same = first >= 0
    for j in range(1, l):
        same &= colors[1 + j * step : n + 1 + j * step] == first
    return np.flatnonzero(same) + 1


def is_ap_free(block: Iterable[int], m: int, l: int) -> bool:
    """True iff no length-``l`` progression lies entirely inside ``block``."""
    mask = _membership_mask(block, m)
    if mask.sum() < l:
        return True
    colors = np.where(mask, 0, -1)
    step = 1
    while 1 + (l - 1) * step <= m:
        if _monochromatic_starts(colors, m, l, step).size:
            return False
        step += 1
    return True


def monochromatic_progressions(
    coloring: Sequence[int] | np.ndarray, m: int, l: int, limit: int | None = None
) -> list[tuple[Progression, int]]:
    """Monochromatic length-``l`` progressions of a coloring of ``[m]``.

    ``coloring[i]`` is the block of element ``i`` (index 0 unused); negative
    entries mark uncolored elements. Results follow enumeration order, and
    each carries the offending block.
    """
    colors = np.asarray(coloring, dtype=np.int64)
    found: list[tuple[Progression, int]] = []
    step = 1
    while 1 + (l - 1) * step <= m:
        for start in _monochromatic_starts(colors, m, l, step):
            found.append((Progression(int(start), step, l), int(colors[start])))
            if limit is not None and len(found) >= limit:
                return found
        step += 1
    return found


@dataclass(frozen=True)
class Partition:
    """An ordered list of ``k`` blocks over ``[m]``; block ``b`` is ``blocks[b - 1]``.

    The constructor does not enforce disjointness or coverage so that a
    defective witness can still be loaded and reported on; see ``defects``.
    """

    m: int
    blocks: tuple[frozenset[int], ...]

    def __init__(self, m: int, blocks: Iterable[Iterable[int]]) -> None:
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "blocks", tuple(frozenset(b) for b in blocks))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def defects(self) -> list[str]:
        problems = []
        seen: dict[int, int] = {}
        for b, block in enumerate(self.blocks, start=1):
            for i in sorted(block):
                if not 1 <= i <= self.m:
                    problems.append(f"element {i} of block {b} outside [1, {self.m}]")
                elif i in seen:
                    problems.append(f"element {i} in blocks {seen[i]} and {b}")
                else:
                    seen[i] = b
        missing = [i for i in range(1, self.m + 1) if i not in seen]
        if missing:
            shown = " ".join(map(str, missing[:10]))
            more = " ..." if len(missing) > 10 else ""
            problems.append(f"{len(missing)} element(s) of [1, {self.m}] uncovered: {shown}{more}")
        return problems

    def is_valid(self) -> bool:
        return not self.defects()

    def coloring(self) -> np.ndarray:
        """Block index per element (index 0 unused, -1 for uncovered); later blocks win overlaps."""
        colors = np.full(self.m + 1, -1, dtype=np.int64)
        for b, block in enumerate(self.blocks, start=1):
            members = [i for i in block if 1 <= i <= self.m]
            colors[members] = b
        return colors

    @classmethod
    def from_coloring(cls, coloring: Sequence[int], k: int) -> Partition:
        """Build from a 1-based block index per element, ``coloring[0]`` ignored."""
        m = len(coloring) - 1
        blocks: list[set[int]] = [set() for _ in range(k)]
        for i in range(1, m + 1):
            blocks[coloring[i] - 1].add(i)
        return cls(m, blocks)


@dataclass(frozen=True)
class Certificate:
    params: Params
    partition: Partition
    origin: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.partition.m != self.params.m:
            raise ValueError(f"partition is over [{self.partition.m}], params say m={self.params.m}")
        if self.partition.k != self.params.k:
            raise ValueError(f"partition has {self.partition.k} blocks, params say k={self.params.k}")
