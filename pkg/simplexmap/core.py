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
"""Simplex geometry, exact volumes, and the bounding-box baseline.

A discrete orthogonal m-simplex of side n is, throughout simplexmap, the set
of lattice cells with non-negative coordinates whose sum is at most n-1.
Counted this way its volume is the simplicial polytopic number C(n+m-1, m),
and every comparison made elsewhere in the package (oracle, dispatch,
analysis) is an exact integer identity against these figures.

This module also defines the ``BlockMapping`` protocol shared by all the
mapping strategies, and the bounding-box strategy every other strategy is
measured against.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Iterator, Sequence
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from simplexmap import CHUNK_BLOCKS

MAX_DIMENSION = 8  # analysis range; maps are specialised for m = 2, 3


class Coord(tuple[int, ...]):
    """An m-dimensional non-negative integer lattice point.

    Behaves exactly like a tuple (and compares equal to one), but checks
    the dimension and sign of the components on construction:

    >>> Coord(3, 0)
    Coord(3, 0)
    >>> Coord(3, 0) == (3, 0)
    True
    >>> Coord(-1, 2)
    Traceback (most recent call last):
    ...
    ValueError: Coordinate components must be non-negative, got (-1, 2)
    """

    __slots__ = ()

    def __new__(cls, *components: int) -> "Coord":
        """Validate and build the coordinate."""
        values = tuple(int(_) for _ in components)
        if not 1 <= len(values) <= MAX_DIMENSION:
            msg = f"Coordinate dimension must be in [1, {MAX_DIMENSION}], got {len(values)}"
            raise ValueError(msg)
        if any(_ < 0 for _ in values):
            msg = f"Coordinate components must be non-negative, got {values}"
            raise ValueError(msg)
        return super().__new__(cls, values)

    def __repr__(self) -> str:
        """Return string representation of the coordinate."""
        return f"Coord({', '.join(str(_) for _ in self)})"

    @property
    def m(self) -> int:
        """Dimension of the coordinate."""
        return len(self)


class SimplexSpec(NamedTuple):
    """Target m-simplex of side n (cells with coordinate sum at most n-1)."""

    m: int
    n: int

    @property
    def volume(self) -> int:
        """Cell count, see ``simplex_volume``."""
        return simplex_volume(self.m, self.n)


class OrthotopeSpec(NamedTuple):
    """A parallel grid given by its per-axis block counts."""

    extents: tuple[int, ...]

    @property
    def volume(self) -> int:
        """Block count of the grid (arbitrary precision)."""
        return math.prod(self.extents)


class BlockShape(NamedTuple):
    """Threads per block per dimension (equal block sides)."""

    rho: int = 1

    def threads(self, m: int) -> int:
        """Thread count of one block in m dimensions."""
        return self.rho**m


def simplex_volume(m: int, n: int) -> int:
    """Return the cell count C(n+m-1, m) of the side-n m-simplex.

    >>> simplex_volume(2, 4)
    10
    >>> simplex_volume(3, 4)
    20
    >>> simplex_volume(1, 7)
    7
    >>> simplex_volume(3, 0)
    0
    """
    if m < 1:
        msg = f"Simplex dimension must be at least 1, got m={m}"
        raise ValueError(msg)
    if n < 0:
        msg = f"Simplex side must be non-negative, got n={n}"
        raise ValueError(msg)
    return math.comb(n + m - 1, m)


def simplex_contains(spec: SimplexSpec, x: Sequence[int]) -> bool:
    """Return True if the cell x belongs to the side-n simplex of spec.

    >>> simplex_contains(SimplexSpec(2, 4), (3, 0))
    True
    >>> simplex_contains(SimplexSpec(2, 4), (3, 1))
    False
    """
    if len(x) != spec.m:
        msg = f"Cell {tuple(x)} has {len(x)} components but the simplex has m={spec.m}"
        raise ValueError(msg)
    return all(_ >= 0 for _ in x) and sum(x) <= spec.n - 1


def stacked_volume(m: int, n: int) -> int:
    """Return the volume as n stacked (m-1)-simplices of sides 1 to n.

    This is the slice-by-slice count of the side-n m-simplex, and must agree
    with ``simplex_volume(m, n)``:

    >>> stacked_volume(3, 4)
    20
    >>> stacked_volume(4, 3) == simplex_volume(4, 3)
    True
    """
    if m < 2 or n < 1:  # noqa: PLR2004
        msg = f"Stacked volume needs m >= 2 and n >= 1, got m={m}, n={n}"
        raise ValueError(msg)
    return sum(simplex_volume(m - 1, i) for i in range(1, n + 1))


def bb_waste(m: int, n: int) -> Fraction:
    """Return the extra volume fraction of the n^m bounding box, as a rational.

    >>> bb_waste(2, 4)
    Fraction(3, 5)
    """
    if m < 1 or n < 1:
        msg = f"Bounding-box waste needs m >= 1 and n >= 1, got m={m}, n={n}"
        raise ValueError(msg)
    return Fraction(n**m, simplex_volume(m, n)) - 1


def bb_waste_limit(m: int) -> int:
    """Return the large-n limit m! - 1 of the bounding-box waste.

    >>> [bb_waste_limit(_) for _ in (2, 3)]
    [1, 5]
    """
    return math.factorial(m) - 1


def in_simplex_array(cells: np.ndarray, n: int) -> np.ndarray:
    """Return a boolean mask of the rows of cells inside the side-n simplex."""
    return (cells >= 0).all(axis=1) & (cells.sum(axis=1) <= n - 1)


def orthotope_chunks(
    lower: Sequence[int], upper: Sequence[int], max_blocks: int = CHUNK_BLOCKS
) -> Iterator[np.ndarray]:
    """Yield every block of the half-open box [lower, upper) in lexicographic order.

    The blocks come as int64 arrays of shape (k, m), sliced along the first
    axis so that no batch holds more than max_blocks rows (unless a single
    slice along the first axis is already larger).

    >>> [_.tolist() for _ in orthotope_chunks((0, 1), (2, 3), max_blocks=2)]
    [[[0, 1], [0, 2]], [[1, 1], [1, 2]]]
    """
    if any(u <= lo for lo, u in zip(lower, upper, strict=True)):
        return
    inner = math.prod(u - lo for lo, u in zip(lower[1:], upper[1:], strict=True))
    step = max(1, max_blocks // inner)
    tail = [np.arange(lo, u, dtype=np.int64) for lo, u in zip(lower[1:], upper[1:], strict=True)]
    for start in range(lower[0], upper[0], step):
        head = np.arange(start, min(start + step, upper[0]), dtype=np.int64)
        mesh = np.meshgrid(head, *tail, indexing="ij")
        yield np.stack([_.ravel() for _ in mesh], axis=1)


class BlockMapping(ABC):
    """A launchable mapping strategy from grid blocks onto a side-n m-simplex.

    A strategy launches one or more orthotope grids (``launched`` blocks in
    total). The blocks are produced in batches by ``chunks`` as pairs of a
    launch index (which grid or kernel call they belong to) and an int64
    array of block coordinates. ``apply`` maps a batch to data-space cells
    in the canonical frame (non-negative coordinates, sum at most n-1 when
    correct) together with a keep mask; blocks with a false mask (filler
    blocks, padding filters) are discarded.
    """

    name: str = "abstract"
    m: int
    n: int

    @property
    @abstractmethod
    def launched(self) -> int:
        """Total blocks launched by the strategy."""

    @abstractmethod
    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (launch index, blocks) batches in a fixed order."""

    @abstractmethod
    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map a batch of blocks, returning (cells, keep mask)."""

    @property
    def target(self) -> SimplexSpec:
        """The simplex this strategy claims to cover."""
        return SimplexSpec(self.m, self.n)


class BoundingBox(BlockMapping):
    """Bounding-box baseline: launch the whole cube of blocks, filter the rest.

    With a block shape of rho threads per side, the side-n simplex of
    threads needs a grid of ceil(n/rho) blocks per axis. A block is kept
    (useful) if it intersects the simplex, which is the case exactly when
    its lowest thread is inside; the block-level simplex therefore has side
    (n-1)//rho + 1.

    >>> bb = BoundingBox(2, 5)
    >>> bb.launched, bb.target.volume
    (25, 15)
    """

    name = "bb"

    def __init__(self, m: int, n: int, shape: BlockShape = BlockShape()) -> None:
        """Set up the bounding box of the side-n m-simplex of threads."""
        if m < 1 or n < 1 or shape.rho < 1:
            msg = f"Bounding box needs m, n, rho >= 1, got m={m}, n={n}, rho={shape.rho}"
            raise ValueError(msg)
        self.m = m
        self.thread_side = n
        self.shape = shape
        self.blocks_per_axis = -(-n // shape.rho)
        self.n = (n - 1) // shape.rho + 1

    @property
    def launched(self) -> int:
        """Blocks in the bounding box grid."""
        return self.blocks_per_axis**self.m

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield the blocks of the single bounding-box grid."""
        for blocks in orthotope_chunks(
            (0,) * self.m, (self.blocks_per_axis,) * self.m, max_blocks
        ):
            yield 0, blocks

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:  # noqa: ARG002
        """Identity map, keeping only the blocks meeting the simplex."""
        return blocks, in_simplex_array(blocks, self.n)
