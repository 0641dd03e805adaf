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
"""Constant-time block-space map onto the 2-simplex (triangle).

A grid of (N/2) x (N-1) blocks, with rows numbered from 1, is mapped by
``lambda2`` onto the strict lower triangle {(x, y) : 0 <= x < y <= N-1} of
an N x N box, for any power of two N. Each row y belongs to the recursion
level of its leading bit b = 2^floor(log2(y)); the column x picks the copy
q = x // b of that level, and the copy is translated by (q*b, 2*q*b). No
loops and no square roots are involved, only a count-leading-zeros.

Since the strict triangle of side N has as many cells as the
diagonal-inclusive simplex of side N-1, a grid for N covers the side
n = N-1 simplex exactly (``cover_simplex2``). Other sizes are covered
either by padding up to the next such grid and filtering (``pad_above``),
or by splitting the simplex into power-of-two triangles and rectangles
which together launch no extra blocks (``decompose_below``).
"""

from collections.abc import Callable, Iterator
from functools import partial
from typing import NamedTuple

import numpy as np

from simplexmap import CHUNK_BLOCKS
from simplexmap.core import (
    BlockMapping,
    BlockShape,
    Coord,
    in_simplex_array,
    orthotope_chunks,
    simplex_volume,
)

WORD_BITS = 64


def is_power_of_two(n: int) -> bool:
    """Return True for 1, 2, 4, 8, ...

    >>> [is_power_of_two(_) for _ in (0, 1, 6, 8)]
    [False, True, False, True]
    """
    return n > 0 and not n & (n - 1)


def clz(y: int, word_bits: int = WORD_BITS) -> int:
    """Count the leading zero bits of y in a word of the given width.

    >>> clz(1)
    63
    >>> clz(5, word_bits=32)
    29
    """
    if y < 1 or y.bit_length() > word_bits:
        msg = f"clz needs 1 <= y < 2**{word_bits}, got {y}"
        raise ValueError(msg)
    return word_bits - y.bit_length()


def floor_log2(y: int, word_bits: int = WORD_BITS) -> int:
    """Return floor(log2(y)) from the leading zero count.

    The exponent of the leading bit is (word_bits - 1) - clz(y), so that
    2**result <= y < 2**(result + 1):

    >>> [floor_log2(_) for _ in (1, 5, 1024)]
    [0, 2, 10]
    >>> floor_log2(0)
    Traceback (most recent call last):
    ...
    ValueError: clz needs 1 <= y < 2**64, got 0
    """
    return (word_bits - 1) - clz(y, word_bits)


def pow2_floor(y: int, word_bits: int = WORD_BITS) -> int:
    """Return the largest power of two not exceeding y, as a single shift.

    >>> [pow2_floor(_) for _ in (1, 7, 4096)]
    [1, 4, 4096]
    """
    return 1 << floor_log2(y, word_bits)


def floor_log2_array(y: np.ndarray) -> np.ndarray:
    """Vectorised ``floor_log2`` for positive integers below 2**53."""
    values = np.asarray(y, dtype=np.int64)
    if values.size and values.min() < 1:
        msg = f"floor_log2 needs positive integers, got minimum {values.min()}"
        raise ValueError(msg)
    # frexp gives y = mantissa * 2**exponent with mantissa in [0.5, 1)
    _, exponent = np.frexp(values.astype(np.float64))
    return exponent.astype(np.int64) - 1


def pow2_floor_array(y: np.ndarray) -> np.ndarray:
    """Vectorised ``pow2_floor`` for positive integers below 2**53."""
    return np.left_shift(np.int64(1), floor_log2_array(y))


class Block2(NamedTuple):
    """A block of the 2D grid; rows start at 1."""

    x: int
    y: int


class Grid2(NamedTuple):
    """The (N/2) x (N-1) grid whose lambda2 image is the strict side-N triangle."""

    N: int

    @property
    def width(self) -> int:
        """Number of columns, x in [0, N/2)."""
        return self.N // 2

    @property
    def height(self) -> int:
        """Number of rows, y in [1, N-1]."""
        return self.N - 1

    @property
    def block_count(self) -> int:
        """Blocks in the grid, N(N-1)/2."""
        return self.width * self.height

    def contains(self, w: Block2) -> bool:
        """Return True if the block lies on the grid."""
        return 0 <= w.x < self.width and 1 <= w.y <= self.height

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[np.ndarray]:
        """Yield every block of the grid in lexicographic order."""
        yield from orthotope_chunks((0, 1), (self.width, self.N), max_blocks)


def grid2_for(N: int) -> Grid2:  # noqa: N803
    """Return the grid mapped onto the strict triangle of side N.

    >>> g = grid2_for(8)
    >>> g.width, g.height, g.block_count
    (4, 7, 28)
    >>> grid2_for(6)
    Traceback (most recent call last):
    ...
    ValueError: Grid size must be a power of two N >= 2, got 6
    """
    if N < 2 or not is_power_of_two(N):  # noqa: PLR2004
        msg = f"Grid size must be a power of two N >= 2, got {N}"
        raise ValueError(msg)
    return Grid2(N)


def lambda2(w: Block2) -> Coord:
    """Map a grid block to its cell of the strict lower triangle.

    >>> lambda2(Block2(1, 1))
    Coord(2, 3)
    >>> lambda2(Block2(2, 3))
    Coord(4, 7)
    >>> lambda2(Block2(3, 5))
    Coord(3, 5)
    """
    b = pow2_floor(w.y)
    q = w.x // b
    return Coord(w.x + q * b, w.y + 2 * q * b)


def lambda2_array(blocks: np.ndarray) -> np.ndarray:
    """Apply lambda2 to every row of an int64 (k, 2) block array."""
    x = blocks[:, 0]
    y = blocks[:, 1]
    b = pow2_floor_array(y)
    q = x // b
    return np.stack([x + q * b, y + 2 * q * b], axis=1)


def to_simplex_frame(images: np.ndarray, N: int) -> np.ndarray:  # noqa: N803
    """Read strict-triangle images (x, y) as simplex cells (x, N-1-y).

    Row y of the strict triangle holds y cells, so flipping the row axis
    turns the triangle of side N into the simplex of side N-1 with
    coordinate sum at most N-2.
    """
    return np.stack([images[:, 0], N - 1 - images[:, 1]], axis=1)


def pad_above(n: int) -> tuple[int, Callable[[np.ndarray], np.ndarray]]:
    """Return the padded grid size N' and the filter for the side-n simplex.

    N' is the smallest power of two with N'-1 >= n, so the exact cover of
    side N'-1 contains the side-n simplex. The filter takes cells in the
    simplex frame and returns a keep mask.

    >>> N, keep = pad_above(5)
    >>> N
    8
    >>> keep(np.array([[0, 4], [1, 4]])).tolist()
    [True, False]
    """
    if n < 1:
        msg = f"Simplex side must be at least 1, got n={n}"
        raise ValueError(msg)
    return 1 << n.bit_length(), partial(in_simplex_array, n=n)


class Cover2(BlockMapping):
    """Cover of the side-n triangle by one lambda2 grid.

    If n+1 is a power of two the cover is exact; otherwise, with pad=True,
    the grid of ``pad_above`` is launched and the extra cells discarded.
    """

    name = "map2"

    def __init__(self, n: int, *, pad: bool = False) -> None:
        """Pick the grid covering the side-n triangle."""
        if n < 1:
            msg = f"Simplex side must be at least 1, got n={n}"
            raise ValueError(msg)
        self.m = 2
        self.n = n
        self.padded = not is_power_of_two(n + 1)
        if self.padded and not pad:
            msg = f"Exact cover needs n+1 to be a power of two, got n={n}"
            raise ValueError(msg)
        N, self.keep = pad_above(n)  # noqa: N806
        self.grid = grid2_for(N)

    @property
    def launched(self) -> int:
        """Blocks in the lambda2 grid."""
        return self.grid.block_count

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield the blocks of the single grid."""
        for blocks in self.grid.chunks(max_blocks):
            yield 0, blocks

    def interpret(self, images: np.ndarray) -> np.ndarray:
        """Convert lambda2 images to simplex cells."""
        return to_simplex_frame(images, self.grid.N)

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:  # noqa: ARG002
        """Map blocks to simplex cells, keeping all unless padded."""
        cells = self.interpret(lambda2_array(blocks))
        if self.padded:
            return cells, self.keep(cells)
        return cells, np.ones(len(cells), dtype=bool)


def cover_simplex2(n: int) -> Cover2:
    """Return the exact cover of the side-n triangle, n+1 a power of two.

    >>> cover = cover_simplex2(7)
    >>> cover.grid, cover.launched
    (Grid2(N=8), 28)
    """
    return Cover2(n)


class Piece2(NamedTuple):
    """One part of a decomposed triangle.

    A "triangle" piece of side a is launched as ``grid2_for(a + 1)``; a
    "rectangle" piece of extent (width, height) is launched as is and
    mapped by identity. Either way the cells are translated by offset.
    """

    kind: str
    extent: tuple[int, ...]
    offset: Coord

    @property
    def block_count(self) -> int:
        """Blocks launched for this piece."""
        if self.kind == "triangle":
            return simplex_volume(2, self.extent[0])
        return self.extent[0] * self.extent[1]


def decompose_below(n: int) -> list[Piece2]:
    """Split the side-n triangle into exactly covering power-of-two pieces.

    With a = 2^floor(log2(n+1)) - 1 and c = n - a, the cells with x >= c
    form a triangle of side a, the cells with x < c and y < a a c x a
    rectangle, and the rest a triangle of side c which is split again.

    >>> decompose_below(3)
    [Piece2(kind='triangle', extent=(3,), offset=Coord(0, 0))]
    >>> [_.block_count for _ in decompose_below(6)]
    [6, 9, 6]
    """
    if n < 1:
        msg = f"Simplex side must be at least 1, got n={n}"
        raise ValueError(msg)
    pieces = []
    base = 0
    while n:
        a = pow2_floor(n + 1) - 1
        c = n - a
        pieces.append(Piece2("triangle", (a,), Coord(c, base)))
        if c:
            pieces.append(Piece2("rectangle", (c, a), Coord(0, base)))
        base += a
        n = c
    return pieces


class DecomposedCover2(BlockMapping):
    """Cover of the side-n triangle by the pieces of ``decompose_below``.

    Each piece is its own launch, so no block is ever discarded.
    """

    name = "map2-below"

    def __init__(self, n: int) -> None:
        """Decompose the side-n triangle."""
        self.m = 2
        self.n = n
        self.pieces = decompose_below(n)

    @property
    def launched(self) -> int:
        """Blocks over all pieces, equal to the simplex volume."""
        return sum(_.block_count for _ in self.pieces)

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield the blocks of each piece in turn, tagged with its index."""
        for index, piece in enumerate(self.pieces):
            if piece.kind == "triangle":
                batches = grid2_for(piece.extent[0] + 1).chunks(max_blocks)
            else:
                batches = orthotope_chunks((0, 0), piece.extent, max_blocks)
            for blocks in batches:
                yield index, blocks

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map the blocks of piece number launch to simplex cells."""
        piece = self.pieces[launch]
        if piece.kind == "triangle":
            cells = to_simplex_frame(lambda2_array(blocks), piece.extent[0] + 1)
        else:
            cells = blocks
        return cells + np.asarray(piece.offset, dtype=np.int64), np.ones(len(blocks), dtype=bool)


def thread_surplus2(n: int, shape: BlockShape) -> int:
    """Return the threads launched beyond the side-n triangle with rho x rho blocks.

    The block-level cover has side ceil(n/rho); only the blocks on its
    diagonal hold threads outside the triangle, at most rho^2 * n in total.

    >>> thread_surplus2(8, BlockShape(4))
    12
    >>> thread_surplus2(8, BlockShape(1))
    0
    """
    if n < 1:
        msg = f"Simplex side must be at least 1, got n={n}"
        raise ValueError(msg)
    blocks_per_side = -(-n // shape.rho)
    return shape.threads(2) * simplex_volume(2, blocks_per_side) - simplex_volume(2, n)
