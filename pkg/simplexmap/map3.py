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
"""Block-space maps onto the 3-simplex (tetrahedron).

Two strategies are provided. The recursive (arity 3) one places a cube of
side N/2 in the corner of the side-N tetrahedron and recurses into the
three sub-tetrahedra beside it, launching one grid per cube; the cubes
stick out of the tetrahedron and the protruding cells (a Sierpinski-like
residue) are discarded, costing about 20% extra volume.

The two-branch one launches a single grid of (N/2, N/2, 3N/4) blocks. The
slab z < N/2 is the main cube, moved up by N/2 in y; the cells of it that
land outside the tetrahedron are reflected back in. The slab z >= N/2
holds every deeper recursion level side by side: row y picks the level
b = 2^floor(log2(y)) exactly as in the 2D map, the column x picks the copy
q, and each level only uses b layers of the slab. About 12.5% of the grid
is surplus.

Both work in the image frame {(x, y, z) : x, z >= 0, y <= N-1, x+z < y},
read as simplex cells (x, N-1-y, z) of the side N-1 simplex.
"""

from collections.abc import Iterator
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from simplexmap import CHUNK_BLOCKS
from simplexmap.core import (
    BlockMapping,
    Coord,
    in_simplex_array,
    orthotope_chunks,
    simplex_volume,
)
from simplexmap.map2 import floor_log2, is_power_of_two, pow2_floor, pow2_floor_array


class Region(str, Enum):
    """Which branch of the two-branch map handles a grid block."""

    MAIN_CUBE = "main_cube"
    INSIDE = "inside"
    DIAGONAL_OR_OUTSIDE = "diagonal_or_outside"
    UNUSED = "unused"


REGION_CODES = {region: code for code, region in enumerate(Region)}


class Block3(NamedTuple):
    """A block of the 3D grid."""

    x: int
    y: int
    z: int


def _check_power_of_two(N: int) -> None:  # noqa: N803
    if N < 1 or not is_power_of_two(N):
        msg = f"Grid size must be a power of two, got N={N}"
        raise ValueError(msg)


class Grid3(NamedTuple):
    """The two-branch grid of (N/2, N/2, Z) blocks."""

    N: int

    @property
    def extents(self) -> tuple[int, int, int]:
        """Blocks per axis; Z is 3N/4, or 1 for the degenerate N=2."""
        half = self.N // 2
        return half, half, max(1, 3 * self.N // 4)

    @property
    def volume(self) -> int:
        """Blocks in the grid."""
        x, y, z = self.extents
        return x * y * z

    def contains(self, w: Block3) -> bool:
        """Return True if the block lies on the grid."""
        return all(0 <= c < e for c, e in zip(w, self.extents, strict=True))

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[np.ndarray]:
        """Yield every block of the grid in lexicographic order."""
        yield from orthotope_chunks((0, 0, 0), self.extents, max_blocks)


def grid3_for(N: int) -> Grid3:  # noqa: N803
    """Return the two-branch grid for the side-N tetrahedron.

    >>> grid3_for(4).extents, grid3_for(4).volume
    ((2, 2, 3), 12)
    >>> grid3_for(64).volume
    49152
    """
    if N < 2:  # noqa: PLR2004
        msg = f"Grid size must be a power of two N >= 2, got N={N}"
        raise ValueError(msg)
    _check_power_of_two(N)
    return Grid3(N)


def volume_s3_arity2(N: int) -> int:  # noqa: N803
    """Return V = (N/2)^3 + 2 V(N/2), V(1) = 0, the two-branch mapped volume.

    >>> [volume_s3_arity2(_) for _ in (2, 4, 64)]
    [1, 10, 43680]
    """
    _check_power_of_two(N)
    volume = 0
    side = 1
    while side < N:
        side *= 2
        volume = (side // 2) ** 3 + 2 * volume
    if volume != (N**3 - N) // 6:  # pragma: no cover
        msg = f"Two-branch recurrence {volume} disagrees with (N^3-N)/6 at N={N}"
        raise RuntimeError(msg)
    return volume


def volume_s3_arity3(N: int) -> int:  # noqa: N803
    """Return V = (N/2)^3 + 3 V(N/2), V(1) = 0, the arity-3 cube volume.

    The recurrence is checked against its closed form (N^3 - 3^log2(N))/5:

    >>> [volume_s3_arity3(_) for _ in (2, 4, 8)]
    [1, 11, 97]
    """
    _check_power_of_two(N)
    volume = 0
    side = 1
    while side < N:
        side *= 2
        volume = (side // 2) ** 3 + 3 * volume
    if 5 * volume != N**3 - 3 ** floor_log2(N):  # pragma: no cover
        msg = f"Arity-3 recurrence {volume} disagrees with its closed form at N={N}"
        raise RuntimeError(msg)
    return volume


def volume_s3_arity3_printed(N: int) -> Fraction:  # noqa: N803
    """Return N^3/5 - 3^log2(N), the closed form as usually printed.

    This misses the 1/5 factor on the power of three, so differs from
    ``volume_s3_arity3``; it is kept only to report the discrepancy.

    >>> volume_s3_arity3_printed(4)
    Fraction(19, 5)
    """
    _check_power_of_two(N)
    return Fraction(N**3, 5) - 3 ** floor_log2(N)


def call_count_arity3(N: int) -> int:  # noqa: N803
    """Return the map calls 3 + 9 + ... + 3^log2(N) of the recursive launch.

    >>> [call_count_arity3(_) for _ in (2, 8, 1024)]
    [3, 39, 88572]
    """
    _check_power_of_two(N)
    return (3 ** (floor_log2(N) + 1) - 3) // 2


def grid3_waste(N: int) -> Fraction:  # noqa: N803
    """Return the surplus grid3 volume over the mapped volume, tending to 1/8.

    >>> grid3_waste(4)
    Fraction(1, 5)
    """
    return Fraction(grid3_for(N).volume, volume_s3_arity2(N)) - 1


def _branch(w: Block3, N: int) -> tuple[Region, int, int, int, int]:  # noqa: N803
    """Return the region of w with its level b, copy q and virtual y, z."""
    half = N // 2
    if w.z < half:
        # main slab, seen as sitting at y, z >= N/2
        vy, vz = w.y + half, w.z + half
    else:
        if w.y == 0 or w.z - half >= pow2_floor(w.y):
            return Region.UNUSED, 0, 0, w.y, w.z
        vy, vz = w.y, w.z
    b = pow2_floor(vy)
    q = w.x // b
    if w.x + q * b + vz - half < vy + 2 * q * b:
        return (Region.MAIN_CUBE if w.z < half else Region.INSIDE), b, q, vy, vz
    return Region.DIAGONAL_OR_OUTSIDE, b, q, vy, vz


def classify3(w: Block3, N: int) -> Region:  # noqa: N803
    """Return the branch handling block w of ``grid3_for(N)``.

    >>> classify3(Block3(0, 0, 0), 4)
    <Region.MAIN_CUBE: 'main_cube'>
    >>> classify3(Block3(1, 0, 1), 4)
    <Region.DIAGONAL_OR_OUTSIDE: 'diagonal_or_outside'>
    >>> classify3(Block3(0, 0, 2), 4)
    <Region.UNUSED: 'unused'>
    """
    if not grid3_for(N).contains(w):
        msg = f"Block {tuple(w)} is outside the grid for N={N}"
        raise ValueError(msg)
    return _branch(w, N)[0]


def h_map(w: Block3, N: int) -> Coord:  # noqa: N803
    """Move a main cube block up by N/2 in y.

    >>> h_map(Block3(1, 1, 1), 4)
    Coord(1, 3, 1)
    """
    region = classify3(w, N)
    if region is not Region.MAIN_CUBE:
        msg = f"Block {tuple(w)} is in region {region.value}, not main_cube"
        raise ValueError(msg)
    return Coord(w.x, w.y + N // 2, w.z)


def reflect3(v: tuple[int, int, int], b: int, q: int, N: int) -> tuple[int, int, int]:  # noqa: N803
    """Reflect virtual coordinates v of copy q at level b into the tetrahedron.

    For fixed b and q this is an affine involution:

    >>> reflect3(reflect3((1, 2, 5), 2, 0, 8), 2, 0, 8)
    (1, 2, 5)
    """
    x, y, z = v
    return b * (1 + 3 * q) - 1 - x, b * (3 + 2 * q) - 1 - y, 2 * b - 1 - z + N // 2


def lambda3(w: Block3, N: int) -> Coord | None:  # noqa: N803
    """Map a block outside the main cube, returning None to discard it.

    >>> lambda3(Block3(1, 0, 1), 4)
    Coord(0, 3, 2)
    >>> lambda3(Block3(1, 2, 5), 8)
    Coord(0, 3, 2)
    >>> lambda3(Block3(0, 0, 2), 4) is None
    True
    """
    if not grid3_for(N).contains(w):
        msg = f"Block {tuple(w)} is outside the grid for N={N}"
        raise ValueError(msg)
    region, b, q, vy, vz = _branch(w, N)
    if region is Region.UNUSED:
        return None
    if region is Region.MAIN_CUBE:
        msg = f"Block {tuple(w)} is in the main cube, use h_map"
        raise ValueError(msg)
    if region is Region.INSIDE:
        return Coord(w.x + q * b, vy + 2 * q * b, vz - N // 2)
    return Coord(*reflect3((w.x, vy, vz), b, q, N))


def map3(w: Block3, N: int) -> Coord | None:  # noqa: N803
    """Map any grid block through whichever branch handles it.

    >>> map3(Block3(0, 0, 0), 4)
    Coord(0, 2, 0)
    """
    if classify3(w, N) is Region.MAIN_CUBE:
        return h_map(w, N)
    return lambda3(w, N)


def map3_arrays(blocks: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:  # noqa: N803
    """Vectorised two-branch map of an int64 (k, 3) block array.

    Returns the image-frame coordinates and the ``REGION_CODES`` of each
    block; the images of unused blocks are meaningless.
    """
    half = N // 2
    x, y, z = blocks[:, 0], blocks[:, 1], blocks[:, 2]
    upper = z >= half
    vy = np.where(upper, y, y + half)
    vz = np.where(upper, z, z + half)
    b = pow2_floor_array(np.maximum(vy, 1))
    unused = upper & ((y == 0) | (z - half >= b))
    q = x // b
    direct = np.stack([x + q * b, vy + 2 * q * b, vz - half], axis=1)
    inside = direct[:, 0] + direct[:, 2] < direct[:, 1]
    reflected = np.stack(
        [b * (1 + 3 * q) - 1 - x, b * (3 + 2 * q) - 1 - vy, 2 * b - 1 - vz + half], axis=1
    )
    images = np.where(inside[:, None], direct, reflected)
    regions = np.full(len(blocks), REGION_CODES[Region.DIAGONAL_OR_OUTSIDE], dtype=np.int8)
    regions[inside & ~upper] = REGION_CODES[Region.MAIN_CUBE]
    regions[inside & upper] = REGION_CODES[Region.INSIDE]
    regions[unused] = REGION_CODES[Region.UNUSED]
    return images, regions


def to_simplex_frame3(images: np.ndarray, N: int) -> np.ndarray:  # noqa: N803
    """Read tetrahedron images (x, y, z) as simplex cells (x, N-1-y, z)."""
    return np.stack([images[:, 0], N - 1 - images[:, 1], images[:, 2]], axis=1)


def _grid_size(n: int, *, pad: bool) -> tuple[int, bool]:
    """Return the power of two N with N-1 >= n, and whether n is padded."""
    if n < 1:
        msg = f"Simplex side must be at least 1, got n={n}"
        raise ValueError(msg)
    padded = not is_power_of_two(n + 1)
    if padded and not pad:
        msg = f"Exact cover needs n+1 to be a power of two, got n={n}"
        raise ValueError(msg)
    return 1 << n.bit_length(), padded


class Cover3Flat(BlockMapping):
    """Two-branch cover of the side-n tetrahedron by a single grid."""

    name = "map3-flat"

    def __init__(self, n: int, *, pad: bool = False) -> None:
        """Pick the grid covering the side-n tetrahedron."""
        self.m = 3
        self.n = n
        N, self.padded = _grid_size(n, pad=pad)  # noqa: N806
        self.grid = grid3_for(N)

    @property
    def launched(self) -> int:
        """Blocks in the grid, unused ones included."""
        return self.grid.volume

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield the blocks of the single grid."""
        for blocks in self.grid.chunks(max_blocks):
            yield 0, blocks

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:  # noqa: ARG002
        """Map blocks to simplex cells, dropping unused blocks and padding."""
        images, regions = map3_arrays(blocks, self.grid.N)
        cells = to_simplex_frame3(images, self.grid.N)
        keep = regions != REGION_CODES[Region.UNUSED]
        if self.padded:
            keep &= in_simplex_array(cells, self.n)
        return cells, keep


def cover_simplex3(n: int) -> Cover3Flat:
    """Return the exact two-branch cover of the side-n tetrahedron.

    >>> cover_simplex3(3).launched
    12
    """
    return Cover3Flat(n)


class Placement(NamedTuple):
    """A cube of the arity-3 recursion, in simplex cell coordinates."""

    offset: Coord
    extent: int

    @property
    def center(self) -> Coord:
        """Relative center the cube is translated by, its corner."""
        return self.offset

    @property
    def volume(self) -> int:
        """Cells in the cube."""
        return self.extent**3


def recursive_placements(N: int) -> list[Placement]:  # noqa: N803
    """Return the cubes of the arity-3 recursion for the side-N tetrahedron.

    A cube of side N/2 sits at the corner, followed (depth first) by the
    placements of side N/2 translated by N/2 along x, y and z in turn.
    Together they cover every cell with coordinate sum at most N-2.

    >>> recursive_placements(2)
    [Placement(offset=Coord(0, 0, 0), extent=1)]
    >>> [_.extent for _ in recursive_placements(4)]
    [2, 1, 1, 1]
    """
    if N < 2:  # noqa: PLR2004
        msg = f"Grid size must be a power of two N >= 2, got N={N}"
        raise ValueError(msg)
    _check_power_of_two(N)

    def place(side: int, corner: tuple[int, int, int]) -> Iterator[Placement]:
        if side < 2:  # noqa: PLR2004
            return
        half = side // 2
        yield Placement(Coord(*corner), half)
        for axis in range(3):
            child = list(corner)
            child[axis] += half
            yield from place(half, (child[0], child[1], child[2]))

    return list(place(N, (0, 0, 0)))


class Cover3Recursive(BlockMapping):
    """Arity-3 cover: one launch per cube, the protruding cells filtered."""

    name = "map3-rec"

    def __init__(self, n: int, *, pad: bool = False) -> None:
        """Materialise the placements covering the side-n tetrahedron."""
        self.m = 3
        self.n = n
        N, self.padded = _grid_size(n, pad=pad)  # noqa: N806
        self.N = N
        self.placements = recursive_placements(N)

    @property
    def launched(self) -> int:
        """Blocks over all cubes, ``volume_s3_arity3(N)``."""
        return sum(_.volume for _ in self.placements)

    @property
    def map_calls(self) -> int:
        """Map calls of the recursive launch."""
        return call_count_arity3(self.N)

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Yield the blocks of each cube in turn, tagged with its index."""
        for index, placement in enumerate(self.placements):
            for blocks in orthotope_chunks((0, 0, 0), (placement.extent,) * 3, max_blocks):
                yield index, blocks

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Translate the blocks of cube number launch, keeping those inside."""
        cells = blocks + np.asarray(self.placements[launch].offset, dtype=np.int64)
        return cells, in_simplex_array(cells, self.n)


def arity3_waste(N: int) -> Fraction:  # noqa: N803
    """Return the extra arity-3 cube volume over the side-N simplex, tending to 1/5.

    >>> arity3_waste(4)
    Fraction(-9, 20)
    """
    return Fraction(volume_s3_arity3(N), simplex_volume(3, N)) - 1
