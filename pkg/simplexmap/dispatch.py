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
"""Simulated grid launches measuring the parallel-space efficiency of each strategy.

No kernel runs on a device here. A launch is swept on the host batch by
batch, each block evaluated exactly as a device thread block would be, and
the launched, useful and wasted blocks are counted. For the mapped
strategies the useful count comes from the exhaustive oracle, so a broken
map cannot report a good efficiency.
"""

from collections.abc import Callable
from enum import Enum
from typing import NamedTuple

from simplexmap.core import BlockMapping, BlockShape, BoundingBox, simplex_volume
from simplexmap.map2 import Cover2, DecomposedCover2, thread_surplus2
from simplexmap.map3 import Cover3Flat, Cover3Recursive
from simplexmap.oracle import ENUMERATION_BUDGET, check_cover


class Strategy(str, Enum):
    """Mapping strategies that can be verified and simulated."""

    BB = "bb"
    MAP2 = "map2"
    MAP2_BELOW = "map2-below"
    MAP3_FLAT = "map3-flat"
    MAP3_REC = "map3-rec"

    @property
    def dimension(self) -> int | None:
        """Simplex dimension the strategy is built for, None if any."""
        return {Strategy.BB: None, Strategy.MAP2: 2, Strategy.MAP2_BELOW: 2}.get(self, 3)


# Integer operations per block for the map plus any keep filter,
# counted on the scalar branch-free evaluation.
MAP_OP_COUNTS = {
    Strategy.MAP2: 8,
    Strategy.MAP2_BELOW: 10,
    Strategy.MAP3_FLAT: 30,
    Strategy.MAP3_REC: 6,
}


def build_strategy(strategy: Strategy, m: int, n: int, shape: BlockShape = BlockShape()) -> BlockMapping:
    """Return the block mapping covering the side-n m-simplex.

    The power-of-two maps are padded when n+1 is not a power of two. With
    rho > 1 the maps work on the simplex of blocks, side ceil(n/rho).
    """
    expected = strategy.dimension
    if expected is not None and m != expected:
        msg = f"Strategy {strategy.value} maps {expected}-simplices, got m={m}"
        raise ValueError(msg)
    if strategy is Strategy.BB:
        return BoundingBox(m, n, shape)
    blocks_per_side = -(-n // shape.rho)
    if strategy is Strategy.MAP2:
        return Cover2(blocks_per_side, pad=True)
    if strategy is Strategy.MAP2_BELOW:
        return DecomposedCover2(blocks_per_side)
    if strategy is Strategy.MAP3_FLAT:
        return Cover3Flat(blocks_per_side, pad=True)
    return Cover3Recursive(blocks_per_side, pad=True)


class DispatchStats(NamedTuple):
    """Block counts of one simulated launch."""

    strategy: str
    m: int
    n: int
    rho: int
    launched: int
    useful: int
    wasted: int
    efficiency: float
    map_op_count: int
    map_calls: int
    surplus_threads: int
    improvement: float

    def as_row(self) -> dict[str, object]:
        """Return the fields for tabular output."""
        return self._asdict()


def sweep_useful(
    mapping: BlockMapping,
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> int:
    """Count the kept blocks of every batch, dealing batch i to shard i % shards.

    The batches are generated once; each shard keeps its own partial count
    and the counts are summed at the end.
    """
    if shards < 1:
        msg = f"Shard count must be at least 1, got {shards}"
        raise ValueError(msg)
    partial = [0] * shards
    for index, (launch, blocks) in enumerate(mapping.chunks()):
        _, keep = mapping.apply(launch, blocks)
        partial[index % shards] += int(keep.sum())
        if progress is not None:
            progress(len(blocks))
    return sum(partial)


def _stats(
    strategy: Strategy,
    m: int,
    n: int,
    shape: BlockShape,
    mapping: BlockMapping,
    useful: int,
    map_calls: int,
) -> DispatchStats:
    launched = mapping.launched
    if strategy in (Strategy.MAP2, Strategy.MAP2_BELOW):
        surplus = thread_surplus2(n, shape)
    else:
        surplus = shape.threads(m) * useful - simplex_volume(m, n)
    bb_launched = (-(-n // shape.rho)) ** m
    return DispatchStats(
        strategy=strategy.value,
        m=m,
        n=n,
        rho=shape.rho,
        launched=launched,
        useful=useful,
        wasted=launched - useful,
        efficiency=useful / launched,
        map_op_count=MAP_OP_COUNTS.get(strategy, m),
        map_calls=map_calls,
        surplus_threads=surplus,
        improvement=bb_launched / launched,
    )


def simulate_bb(
    m: int,
    n: int,
    shape: BlockShape = BlockShape(),
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> DispatchStats:
    """Launch the bounding box of the side-n simplex and count useful blocks.

    >>> stats = simulate_bb(2, 64)
    >>> stats.launched, stats.useful, round(stats.efficiency, 4)
    (4096, 2080, 0.5078)
    """
    if n**m > ENUMERATION_BUDGET:
        msg = f"Checking n^m = {n}^{m} cells exceeds the budget of {ENUMERATION_BUDGET}"
        raise ValueError(msg)
    mapping = build_strategy(Strategy.BB, m, n, shape)
    return _stats(Strategy.BB, m, n, shape, mapping, sweep_useful(mapping, shards, progress), 1)


def simulate_mapped(
    strategy: Strategy,
    n: int,
    shape: BlockShape = BlockShape(),
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> DispatchStats:
    """Launch a mapped strategy and count the simplex cells it really reaches.

    The useful blocks are the distinct simplex cells hit, as found by the
    exhaustive oracle.

    >>> stats = simulate_mapped(Strategy.MAP2, 63)
    >>> stats.launched, stats.useful, stats.efficiency
    (2016, 2016, 1.0)
    """
    if strategy is Strategy.BB:
        msg = "Use simulate_bb for the bounding box"
        raise ValueError(msg)
    m = strategy.dimension
    mapping = build_strategy(strategy, m, n, shape)  # type: ignore[arg-type]
    report = check_cover(mapping, shards, progress)
    useful = report.mapped_count - report.outside - report.duplicates
    if isinstance(mapping, Cover3Recursive):
        map_calls = mapping.map_calls
    elif isinstance(mapping, DecomposedCover2):
        map_calls = len(mapping.pieces)
    else:
        map_calls = 1
    return _stats(strategy, m, n, shape, mapping, useful, map_calls)  # type: ignore[arg-type]


def simulate(
    strategy: Strategy,
    m: int,
    n: int,
    shape: BlockShape = BlockShape(),
    shards: int = 1,
    progress: Callable[[int], None] | None = None,
) -> DispatchStats:
    """Simulate any strategy, checking m against the mapped strategies."""
    if strategy is Strategy.BB:
        return simulate_bb(m, n, shape, shards, progress)
    if m != strategy.dimension:
        msg = f"Strategy {strategy.value} maps {strategy.dimension}-simplices, got m={m}"
        raise ValueError(msg)
    return simulate_mapped(strategy, n, shape, shards, progress)
