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

"""simplexmap.

This is ``simplexmap``, an application and Python module for mapping
orthotope-shaped parallel grids (the only shape a GPU launch can take) onto
discrete orthogonal m-simplices, and for exhaustively verifying such maps.
It provides the constant-time block-space maps for triangles and
tetrahedra, the recursive arity-3 tetrahedral packing, a bounding-box
baseline, and an analyser for general-m recursive orthotope sets.
"""

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)

__version__ = "0.0.1"

# The following are assorted centrally defined constants:
SCHEMA_VERSION = "1"  # for the JSON output of every command
CHUNK_BLOCKS = 1 << 20  # blocks per vectorised batch in exhaustive sweeps
SAMPLE_LIMIT = 32  # entries kept per defect list in a coverage report
PROGRESS_BAR_COLUMNS = [
    TextColumn("[progress.description]{task.description}"),
    BarColumn(),
    TaskProgressColumn(),
    # Removing TimeRemainingColumn() from defaults, replacing with:
    TimeElapsedColumn(),
    MofNCompleteColumn(),
]
