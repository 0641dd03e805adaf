# The MIT License
#
# Copyright (c) 2025 The simplexmap developers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
# THE SOFTWARE.
"""Exhaustive verification of block-space maps against the simplex cell set.

Every block a strategy launches is mapped, and the kept images are binned
over the target lattice. Comparing the bins with the simplex cell set gives
the missing, duplicated and outside cells of the map. Nothing is sampled:
a map passes only if its images are exactly the side-n simplex.

The bins are a dense count array over the n^m box where that fits in
memory, otherwise the sorted list of image keys. Batches of blocks can be
dealt out to shards; partial bins are merged by addition (or concatenation)
so the report does not depend on the shard count.
"""

from collections.abc import Callable, Iterator
from typing import NamedTuple

import numpy as np

from simplexmap import SAMPLE_LIMIT
from simplexmap.core import BlockMapping, Coord, in_simplex_array, simplex_volume

ENUMERATION_BUDGET = 1 << 32
DENSE_LIMIT = 1 << 24


def enumerate_simplex(m: int, n: int) -> Iterator[Coord]:
    """Yield the cells of the side-n m-simplex in lexicographic order.

    >>> list(enumerate_simplex(2, 2))
    [Coord(0, 0), Coord(0, 1), Coord(1, 0)]
    >>> sum(1 for _ in enumerate_simplex(3, 3))
    10
    """
    if m < 1 or n < 0:
        msg = f"Simplex needs m >= 1 and n >= 0, got m={m}, n={n}"
        raise ValueError(msg)
    if n**m > ENUMERATION_BUDGET:
        msg = f"Enumerating n^m = {n}^{m} cells exceeds the budget of {ENUMERATION_BUDGET}"
        raise ValueError(msg)

    def cells(prefix: tuple[int, ...], room: int) -> Iterator[Coord]:
        if len(prefix) == m:
            yield Coord(*prefix)
            return
        for value in range(room + 1):
            yield from cells((*prefix, value), room - value)

    if n:
        yield from cells((), n - 1)


class CoverageReport(NamedTuple):
    """Outcome of checking one strategy against its simplex.

    Counts are exact; the sample tuples hold at most ``SAMPLE_LIMIT`` cells,
    the lexicographically smallest ones. Duplicates count the surplus images
    (a cell hit three times counts twice).
    """

    strategy: str
    m: int
    n: int
    launched: int
    target_count: int
    mapped_count: int
    missing: int
    missing_samples: tuple[Coord, ...]
    duplicates: int
    duplicate_samples: tuple[Coord, ...]
    outside: int
    outside_samples: tuple[tuple[int, ...], ...]

    @property
    def passed(self) -> bool:
        """True if the map is an exact bijection onto the simplex."""
        return (
            self.missing == self.duplicates == self.outside == 0
            and self.mapped_count == self.target_count
        )

    def as_row(self) -> dict[str, object]:
        """Return the summary fields for tabular output."""
        return {
            "strategy": self.strategy,
            "n": self.n,
            "launched": self.launched,
            "mapped": self.mapped_count,
            "missing": self.missing,
            "duplicates": self.duplicates,
            "outside": self.outside,
            "pass": self.passed,
        }


class _Bins:
    """Partial binning of the kept images of some of the batches."""

    def __init__(self, m: int, n: int) -> None:
        self.shape = (n,) * m
        self.dense = n**m <= DENSE_LIMIT
        self.counts = np.zeros(n**m, dtype=np.int32) if self.dense else None
        self.keys: list[np.ndarray] = []
        self.mapped = 0
        self.outside = 0
        self.outside_rows = np.empty((0, m), dtype=np.int64)

    def add(self, cells: np.ndarray, n: int) -> None:
        self.mapped += len(cells)
        inside = in_simplex_array(cells, n)
        if not inside.all():
            stray = cells[~inside]
            self.outside += len(stray)
            self.outside_rows = _smallest_rows(np.concatenate([self.outside_rows, stray]))
        if not inside.any():
            return
        keys = np.ravel_multi_index(tuple(cells[inside].T), self.shape)
        if self.counts is not None:
            np.add.at(self.counts, keys, 1)
        else:
            self.keys.append(keys)

    def merge(self, other: "_Bins") -> None:
        self.mapped += other.mapped
        self.outside += other.outside
        self.outside_rows = _smallest_rows(np.concatenate([self.outside_rows, other.outside_rows]))
        if self.counts is not None and other.counts is not None:
            self.counts += other.counts
        self.keys.extend(other.keys)


def _smallest_rows(rows: np.ndarray) -> np.ndarray:
    """Return the distinct rows in lexicographic order, at most SAMPLE_LIMIT."""
    if not len(rows):
        return rows
    return np.unique(rows, axis=0)[:SAMPLE_LIMIT]


def _cells(keys: np.ndarray, shape: tuple[int, ...]) -> tuple[Coord, ...]:
    return tuple(Coord(*_) for _ in np.stack(np.unravel_index(keys, shape), axis=1).tolist())


def _missing_dense(counts: np.ndarray, shape: tuple[int, ...], n: int) -> tuple[Coord, ...]:
    """Scan the count array in key order for the first empty simplex cells."""
    found: list[np.ndarray] = []
    total = 0
    step = 1 << 20
    for start in range(0, len(counts), step):
        empty = np.flatnonzero(counts[start : start + step] == 0) + start
        if not len(empty):
            continue
        cells = np.stack(np.unravel_index(empty, shape), axis=1)
        cells = cells[in_simplex_array(cells, n)]
        found.append(cells)
        total += len(cells)
        if total >= SAMPLE_LIMIT:
            break
    if not found:
        return ()
    return tuple(Coord(*_) for _ in np.concatenate(found)[:SAMPLE_LIMIT].tolist())


def _missing_sparse(distinct: np.ndarray, shape: tuple[int, ...], m: int, n: int) -> tuple[Coord, ...]:
    """Walk the simplex in order alongside the sorted hit keys."""
    samples: list[Coord] = []
    pointer = 0
    for cell in enumerate_simplex(m, n):
        key = int(np.ravel_multi_index(cell, shape))
        while pointer < len(distinct) and distinct[pointer] < key:
            pointer += 1
        if pointer == len(distinct) or distinct[pointer] != key:
            samples.append(cell)
            if len(samples) == SAMPLE_LIMIT:
                break
    return tuple(samples)


def shard_bins(
    strategy: BlockMapping,
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> list[_Bins]:
    """Bin the kept images, dealing batch i to the partial bins of shard i % shards.

    The batches are generated once. Shards that receive no batch get no bins.
    """
    m, n = strategy.m, strategy.n
    partial: dict[int, _Bins] = {}
    for index, (launch, blocks) in enumerate(strategy.chunks()):
        cells, keep = strategy.apply(launch, blocks)
        partial.setdefault(index % shards, _Bins(m, n)).add(cells[keep], n)
        if progress is not None:
            progress(len(blocks))
    return [partial[_] for _ in sorted(partial)]


def check_cover(
    strategy: BlockMapping,
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> CoverageReport:
    """Map every block of the strategy and compare with the simplex cell set.

    >>> from simplexmap.core import BoundingBox
    >>> report = check_cover(BoundingBox(2, 5))
    >>> report.passed, report.launched, report.mapped_count, report.outside
    (True, 25, 15, 0)
    """
    m, n = strategy.m, strategy.n
    if shards < 1:
        msg = f"Shard count must be at least 1, got {shards}"
        raise ValueError(msg)
    if n**m > ENUMERATION_BUDGET:
        msg = f"Checking n^m = {n}^{m} cells exceeds the budget of {ENUMERATION_BUDGET}"
        raise ValueError(msg)
    bins, *rest = shard_bins(strategy, shards, progress) or [_Bins(m, n)]
    for other in rest:
        bins.merge(other)

    target = simplex_volume(m, n)
    if bins.counts is not None:
        hit = int(np.count_nonzero(bins.counts))
        duplicates = int(bins.counts.sum(dtype=np.int64)) - hit
        duplicate_samples = _cells(np.flatnonzero(bins.counts > 1)[:SAMPLE_LIMIT], bins.shape)
        missing = target - hit
        missing_samples = _missing_dense(bins.counts, bins.shape, n) if missing else ()
    else:
        keys = np.concatenate(bins.keys) if bins.keys else np.empty(0, dtype=np.int64)
        distinct, counts = np.unique(keys, return_counts=True)
        duplicates = int(counts.sum()) - len(distinct)
        duplicate_samples = _cells(distinct[counts > 1][:SAMPLE_LIMIT], bins.shape)
        missing = target - len(distinct)
        missing_samples = _missing_sparse(distinct, bins.shape, m, n) if missing else ()

    return CoverageReport(
        strategy=strategy.name,
        m=m,
        n=n,
        launched=strategy.launched,
        target_count=target,
        mapped_count=bins.mapped,
        missing=missing,
        missing_samples=missing_samples,
        duplicates=duplicates,
        duplicate_samples=duplicate_samples,
        outside=bins.outside,
        outside_samples=tuple(tuple(_) for _ in bins.outside_rows.tolist()),
    )
