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
"""Defines the assorted public command line interface (CLI) arguments we offer.

This is a separate file without any real code, so the option types can be
shared between the commands and their tests without pulling in the whole
of the command definitions.
"""

from enum import Enum
from pathlib import Path
from typing import Annotated

import typer

from simplexmap.analysis import MAX_SCAN
from simplexmap.core import MAX_DIMENSION
from simplexmap.dispatch import Strategy


class OutputFormat(str, Enum):
    """Output formats for the tabular commands."""

    csv = "csv"
    json = "json"
    table = "table"


# Reused required command line arguments (which have no default)
# --------------------------------------------------------------
# These are named REQ_ARG_TYPE_* short for required-argument type
REQ_ARG_TYPE_STRATEGY = Annotated[
    Strategy,
    typer.Option(help="Mapping strategy", show_default=False),
]
REQ_ARG_TYPE_SIDE = Annotated[
    int,
    typer.Option("--n", help="Simplex side n (cells per edge)", show_default=False, min=1),
]
REQ_ARG_TYPE_GRID_SIZE = Annotated[
    int,
    typer.Option("--n", help="Grid size N, a power of two", show_default=False, min=2),
]
REQ_ARG_TYPE_RATIO = Annotated[
    str,
    typer.Option(
        "--r",
        help="Reduction factor r in (0, 1), exact as p/q or approximate as a decimal",
        show_default=False,
    ),
]
REQ_ARG_TYPE_BETA = Annotated[
    int,
    typer.Option("--beta", help="Recursion arity beta", show_default=False, min=2),
]
REQ_ARG_TYPE_BLOCK_X = Annotated[
    int,
    typer.Option("--x", help="Block x coordinate", show_default=False, min=0),
]
REQ_ARG_TYPE_BLOCK_Y = Annotated[
    int,
    typer.Option("--y", help="Block y coordinate", show_default=False, min=0),
]

# Reused optional command line arguments (defined with a default)
# ---------------------------------------------------------------
# These are named OPT_ARG_TYPE_* short for optional-argument type

OPT_ARG_TYPE_SIDE = Annotated[
    int | None,
    typer.Option("--n", help="Simplex side n (cells per edge)", show_default=False, min=1),
]
OPT_ARG_TYPE_SIDE_MAX = Annotated[
    int | None,
    typer.Option(
        "--n-max",
        help="Check every side n = 2^k - 1 up to this value",
        show_default=False,
        min=1,
    ),
]
OPT_ARG_TYPE_DIMENSION = Annotated[
    int | None,
    typer.Option(
        "--m",
        help="Simplex dimension, defaults to that of the strategy (2 for bb)",
        show_default=False,
        min=1,
        max=MAX_DIMENSION,
    ),
]
OPT_ARG_TYPE_BLOCK_Z = Annotated[
    int | None,
    typer.Option("--z", help="Block z coordinate (3D strategies)", show_default=False, min=0),
]
OPT_ARG_TYPE_BETA_MIN = Annotated[
    int,
    typer.Option("--beta-min", help="Smallest arity to scan", min=2, max=64),
]
OPT_ARG_TYPE_BETA_MAX = Annotated[
    int,
    typer.Option("--beta-max", help="Largest arity to scan", min=2, max=64),
]
OPT_ARG_TYPE_N_REF = Annotated[
    int,
    typer.Option(
        "--n-ref",
        help="Reference size for the extra volume, also the n0 scan limit",
        min=2,
        max=MAX_SCAN,
    ),
]
OPT_ARG_TYPE_RHO = Annotated[
    int,
    typer.Option("--rho", help="Threads per block per dimension", min=1),
]
OPT_ARG_TYPE_SHARDS = Annotated[
    int,
    typer.Option(
        "--shards",
        help="Deal the block batches out to this many shards, merged at the end",
        rich_help_panel="Debugging",
        min=1,
    ),
]
OPT_ARG_TYPE_PROGRESS = Annotated[
    # Listing name explicitly to avoid automatic matching --no-progress
    bool,
    typer.Option("--progress", help="Show a progress bar on stderr"),
]
OPT_ARG_TYPE_EXTENDED = Annotated[
    bool,
    typer.Option("--extended", help="Also report map operations, calls, thread surplus and improvement"),
]
OPT_ARG_TYPE_FORMAT = Annotated[
    OutputFormat,
    typer.Option("--format", help="Output format"),
]
OPT_ARG_TYPE_MAP_FORMAT = Annotated[
    OutputFormat | None,
    typer.Option("--format", help="Output format, default plain coordinates", show_default=False),
]
OPT_ARG_TYPE_OUTPUT = Annotated[
    Path | None,
    typer.Option(
        "--output",
        help="Write the output to this file instead of stdout",
        show_default=False,
        dir_okay=False,
        file_okay=True,
    ),
]
OPT_ARG_TYPE_GRID_MAX = Annotated[
    int,
    typer.Option("--n-max", help="Largest power-of-two grid size N to tabulate", min=2, max=1 << 20),
]
