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
"""Pytest configuration file."""

from collections.abc import Iterator

import numpy as np
import pytest
from typer.testing import CliRunner

from simplexmap import CHUNK_BLOCKS
from simplexmap.core import BlockMapping


class ShiftedMapping(BlockMapping):
    """Wrap a mapping, moving every image one cell along the first axis.

    Used to make sure the oracle cannot be vacuously green.
    """

    name = "shifted"

    def __init__(self, inner: BlockMapping) -> None:
        """Wrap the given mapping."""
        self.inner = inner
        self.m = inner.m
        self.n = inner.n

    @property
    def launched(self) -> int:
        """Same launch as the wrapped mapping."""
        return self.inner.launched

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:
        """Same batches as the wrapped mapping."""
        yield from self.inner.chunks(max_blocks)

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map as the wrapped mapping, then add one to the first coordinate."""
        cells, keep = self.inner.apply(launch, blocks)
        cells = cells.copy()
        cells[:, 0] += 1
        return cells, keep


class CollapsedMapping(ShiftedMapping):
    """Wrap a mapping, sending every image to the origin."""

    name = "collapsed"

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Keep as the wrapped mapping, but map everything to the origin."""
        cells, keep = self.inner.apply(launch, blocks)
        return np.zeros_like(cells), keep


class SmallChunks(ShiftedMapping):
    """Wrap a mapping unchanged, but with tiny batches to exercise sharding."""

    name = "small-chunks"

    def chunks(self, max_blocks: int = CHUNK_BLOCKS) -> Iterator[tuple[int, np.ndarray]]:  # noqa: ARG002
        """Batches of at most 7 blocks."""
        yield from self.inner.chunks(7)

    def apply(self, launch: int, blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map as the wrapped mapping."""
        return self.inner.apply(launch, blocks)


@pytest.fixture
def shifted() -> type[ShiftedMapping]:
    """Wrapper class corrupting a mapping by a unit translation."""
    return ShiftedMapping


@pytest.fixture
def collapsed() -> type[CollapsedMapping]:
    """Wrapper class corrupting a mapping by collapsing it to the origin."""
    return CollapsedMapping


@pytest.fixture
def small_chunks() -> type[SmallChunks]:
    """Wrapper class splitting a mapping's launch into many small batches."""
    return SmallChunks


@pytest.fixture
def runner() -> CliRunner:
    """Typer command line runner, for checking exit codes."""
    return CliRunner()
