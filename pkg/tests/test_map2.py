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
"""Tests for the simplexmap/map2.py module.

These tests are intended to be run from the repository root using:

pytest -v
"""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexmap.core import BlockShape, Coord, simplex_volume
from simplexmap.map2 import (
    Block2,
    Cover2,
    DecomposedCover2,
    Piece2,
    clz,
    cover_simplex2,
    decompose_below,
    floor_log2,
    floor_log2_array,
    grid2_for,
    is_power_of_two,
    lambda2,
    lambda2_array,
    pad_above,
    pow2_floor,
    pow2_floor_array,
    thread_surplus2,
)
from simplexmap.oracle import check_cover


def test_bit_helper_examples() -> None:
    """Check the leading-zero helpers on the documented values."""
    assert floor_log2(1) == 0
    assert floor_log2(5) == 2  # noqa: PLR2004
    assert floor_log2(1024) == 10  # noqa: PLR2004
    assert pow2_floor(1) == 1
    assert pow2_floor(7) == 4  # noqa: PLR2004
    assert pow2_floor(4096) == 4096  # noqa: PLR2004
    assert clz(1) == 63  # noqa: PLR2004
    assert clz(2**63) == 0
    assert floor_log2(5, word_bits=32) == 2  # noqa: PLR2004


def test_bit_helper_errors() -> None:
    """Check zero and oversized words are rejected."""
    with pytest.raises(ValueError, match="clz needs 1 <= y < 2\\*\\*64, got 0"):
        floor_log2(0)
    with pytest.raises(ValueError, match="clz needs"):
        pow2_floor(0)
    with pytest.raises(ValueError, match="clz needs"):
        clz(2**64)
    with pytest.raises(ValueError, match="floor_log2 needs positive integers"):
        floor_log2_array(np.array([3, 0, 2]))


def test_bit_helpers_against_naive() -> None:
    """Check the helpers against a naive loop for y up to 2**20."""
    y = np.arange(1, 2**20 + 1, dtype=np.int64)
    naive = np.zeros_like(y)
    power = 2
    while power <= 2**20:
        naive += y >= power
        power *= 2
    assert np.array_equal(floor_log2_array(y), naive)
    assert np.array_equal(pow2_floor_array(y), 1 << naive)
    for value in range(1, 2**12):
        assert floor_log2(value) == int(naive[value - 1])


@given(st.integers(min_value=1, max_value=2**64 - 1))
@settings(max_examples=500)
def test_floor_log2_contract(y: int) -> None:
    """Check 2**floor_log2(y) <= y < 2**(floor_log2(y) + 1)."""
    b = pow2_floor(y)
    assert b == 1 << floor_log2(y)
    assert b <= y < 2 * b


def test_is_power_of_two() -> None:
    """Check the power of two test."""
    assert [_ for _ in range(70) if is_power_of_two(_)] == [1, 2, 4, 8, 16, 32, 64]


def test_lambda2_examples() -> None:
    """Check the map on the documented blocks."""
    assert lambda2(Block2(0, 1)) == (0, 1)
    assert lambda2(Block2(1, 1)) == (2, 3)
    assert lambda2(Block2(2, 3)) == (4, 7)
    assert lambda2(Block2(3, 5)) == (3, 5)
    assert isinstance(lambda2(Block2(3, 5)), Coord)


def test_lambda2_array_matches_scalar() -> None:
    """Check the vectorised map agrees with the scalar one on a whole grid."""
    grid = grid2_for(64)
    blocks = np.concatenate(list(grid.chunks()))
    expected = [list(lambda2(Block2(x, y))) for x, y in blocks.tolist()]
    assert lambda2_array(blocks).tolist() == expected


def test_grid2_for() -> None:
    """Check the grid extents and validation."""
    grid = grid2_for(2)
    assert (grid.width, grid.height, grid.block_count) == (1, 1, 1)
    grid = grid2_for(8)
    assert (grid.width, grid.height, grid.block_count) == (4, 7, 28)
    assert grid.contains(Block2(3, 7))
    assert not grid.contains(Block2(3, 0))
    assert not grid.contains(Block2(4, 1))
    for bad in (0, 1, 6, 12):
        with pytest.raises(ValueError, match="Grid size must be a power of two"):
            grid2_for(bad)


def test_grid2_n4_image() -> None:
    """Check the N=4 grid maps onto the strict triangle of side 4."""
    images = sorted(lambda2(Block2(x, y)) for x in range(2) for y in range(1, 4))
    assert images == sorted([(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)])


@pytest.mark.parametrize("k", range(1, 11))
def test_lambda2_bijection(k: int) -> None:
    """Check lambda2 is a bijection onto the strict lower triangle."""
    size = 2**k
    grid = grid2_for(size)
    images = lambda2_array(np.concatenate(list(grid.chunks())))
    assert len(images) == size * (size - 1) // 2
    x, y = images[:, 0], images[:, 1]
    assert ((x >= 0) & (x < y) & (y <= size - 1)).all()
    assert len(np.unique(images, axis=0)) == len(images)


def test_lambda2_self_similarity() -> None:
    """Check each copy is the first copy of its level moved along the diagonal.

    Block (x, y) of copy q moves by (q*b, 2*q*b), so the image set of copy q
    is that of copy 0 translated by (2*q*b, 2*q*b).
    """
    size = 64
    for level in range(6):
        b = 2**level
        rows = range(b, min(2 * b, size))
        first = {lambda2(Block2(x, y)) for x in range(b) for y in rows}
        for q in range(1, size // (2 * b)):
            blocks = [Block2(x, y) for x in range(q * b, (q + 1) * b) for y in rows]
            images = {lambda2(w) for w in blocks}
            assert images == {(x + 2 * q * b, y + 2 * q * b) for x, y in first}
            for w in blocks:
                assert lambda2(w) == (w.x + q * b, w.y + 2 * q * b)


def test_cover_simplex2() -> None:
    """Check the exact covers have the triangular number of blocks."""
    assert cover_simplex2(3).launched == 6  # noqa: PLR2004
    assert cover_simplex2(1).launched == 1
    assert cover_simplex2(7).launched == 28  # noqa: PLR2004
    for k in range(1, 11):
        n = 2**k - 1
        assert cover_simplex2(n).launched == n * (n + 1) // 2 == simplex_volume(2, n)
    with pytest.raises(ValueError, match="Exact cover needs n\\+1 to be a power of two, got n=5"):
        cover_simplex2(5)
    with pytest.raises(ValueError, match="Simplex side must be at least 1"):
        Cover2(0)


def test_cover_simplex2_oracle() -> None:
    """Check the exact covers pass the oracle."""
    for k in range(1, 11):
        report = check_cover(cover_simplex2(2**k - 1))
        assert report.passed, report


def test_pad_above() -> None:
    """Check the padded grid size and its filter."""
    assert pad_above(5)[0] == 8  # noqa: PLR2004
    assert pad_above(7)[0] == 8  # noqa: PLR2004
    assert pad_above(8)[0] == 16  # noqa: PLR2004
    assert pad_above(1)[0] == 2  # noqa: PLR2004
    _, keep = pad_above(5)
    assert keep(np.array([[0, 4], [4, 0], [1, 4], [5, 0]])).tolist() == [True, True, False, False]
    with pytest.raises(ValueError, match="Simplex side must be at least 1, got n=0"):
        pad_above(0)


def test_padded_cover_small() -> None:
    """Check padded covers for every small side."""
    for n in range(1, 130):
        cover = Cover2(n, pad=True)
        report = check_cover(cover)
        assert report.passed, report
        assert report.mapped_count == simplex_volume(2, n)
        assert cover.launched - report.mapped_count <= simplex_volume(2, cover.grid.N - 1) - simplex_volume(2, n)


@pytest.mark.slow
def test_padded_cover_random() -> None:
    """Check padded covers for 50 random sides up to 4096."""
    rng = random.Random(20250101)  # noqa: S311
    for n in rng.sample(range(2, 4097), 50):
        report = check_cover(Cover2(n, pad=True))
        assert report.passed, report


def test_decompose_below_examples() -> None:
    """Check the documented decompositions."""
    assert decompose_below(3) == [Piece2("triangle", (3,), Coord(0, 0))]
    assert decompose_below(1) == [Piece2("triangle", (1,), Coord(0, 0))]
    assert decompose_below(4) == [
        Piece2("triangle", (3,), Coord(1, 0)),
        Piece2("rectangle", (1, 3), Coord(0, 0)),
        Piece2("triangle", (1,), Coord(0, 3)),
    ]
    assert sum(_.block_count for _ in decompose_below(3)) == 6  # noqa: PLR2004
    assert sum(_.block_count for _ in decompose_below(6)) == 21  # noqa: PLR2004
    with pytest.raises(ValueError, match="Simplex side must be at least 1, got n=0"):
        decompose_below(0)


def test_decompose_below_oracle() -> None:
    """Check the decomposition is disjoint and complete for n up to 512."""
    for n in range(1, 513):
        cover = DecomposedCover2(n)
        assert cover.launched == simplex_volume(2, n)
        report = check_cover(cover)
        assert report.passed, report
        assert report.duplicates == report.missing == report.outside == 0


@given(st.integers(min_value=1, max_value=4096), st.integers(min_value=1, max_value=32))
@settings(max_examples=300)
def test_thread_surplus_bound(n: int, rho: int) -> None:
    """Check diagonal blocks waste at most rho^2 * n threads."""
    surplus = thread_surplus2(n, BlockShape(rho))
    assert 0 <= surplus <= rho * rho * n
    if n % rho == 0:
        assert surplus == (n // rho) * rho * (rho - 1) // 2
