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
"""Implements the public command line interface (CLI) used by simplexmap.

The commands verify maps exhaustively, map single blocks, evaluate and
search the general recursive volumes, simulate launches, and tabulate the
3D volume identities. Results go to stdout (or ``--output``) as CSV, JSON
or a rich table; INFO and WARNING lines and progress bars go to stderr.
"""

import json
import math
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pandas as pd
import typer
from rich.console import Console
from rich.progress import Progress
from rich.table import Table

from simplexmap import PROGRESS_BAR_COLUMNS, SCHEMA_VERSION
from simplexmap.analysis import (
    RecursionParams,
    n0_non_increasing,
    parse_ratio,
    search_params,
    vs_continuous,
    vs_discrete,
)
from simplexmap.analysis import analyze as analyze_params
from simplexmap.core import BlockShape, simplex_volume
from simplexmap.dispatch import Strategy, build_strategy
from simplexmap.dispatch import simulate as simulate_launch
from simplexmap.map2 import Block2, grid2_for, is_power_of_two, lambda2
from simplexmap.map3 import (
    Block3,
    call_count_arity3,
    grid3_for,
    map3,
    volume_s3_arity2,
    volume_s3_arity3,
    volume_s3_arity3_printed,
)
from simplexmap.oracle import check_cover
from simplexmap.public_cli_args import (
    OPT_ARG_TYPE_BETA_MAX,
    OPT_ARG_TYPE_BETA_MIN,
    OPT_ARG_TYPE_BLOCK_Z,
    OPT_ARG_TYPE_DIMENSION,
    OPT_ARG_TYPE_EXTENDED,
    OPT_ARG_TYPE_FORMAT,
    OPT_ARG_TYPE_GRID_MAX,
    OPT_ARG_TYPE_MAP_FORMAT,
    OPT_ARG_TYPE_N_REF,
    OPT_ARG_TYPE_OUTPUT,
    OPT_ARG_TYPE_PROGRESS,
    OPT_ARG_TYPE_RHO,
    OPT_ARG_TYPE_SHARDS,
    OPT_ARG_TYPE_SIDE,
    OPT_ARG_TYPE_SIDE_MAX,
    REQ_ARG_TYPE_BETA,
    REQ_ARG_TYPE_BLOCK_X,
    REQ_ARG_TYPE_BLOCK_Y,
    REQ_ARG_TYPE_GRID_SIZE,
    REQ_ARG_TYPE_RATIO,
    REQ_ARG_TYPE_SIDE,
    REQ_ARG_TYPE_STRATEGY,
    OutputFormat,
)

app = typer.Typer(
    context_settings={"help_option_names": ["-h", "--help"]},
)

SIMULATE_COLUMNS = ["strategy", "m", "n", "rho", "launched", "useful", "wasted", "efficiency"]


def format_value(value: object) -> str:
    """Render a value with stable text, floats to 12 significant digits.

    >>> [format_value(_) for _ in (3, Fraction(5, 7), 0.5, True, None, math.inf)]
    ['3', '0.714285714286', '0.5', 'true', '', 'inf']
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction | float):
        return f"{float(value):.12g}"
    return str(value)


def json_value(value: object) -> object:
    """Convert a value to something JSON can hold (non-finite floats as text)."""
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return format_value(value)
    return value


def emit(
    command: str,
    rows: Sequence[dict[str, object]],
    fmt: OutputFormat,
    output: Path | None,
    metadata: dict[str, object] | None = None,
) -> None:
    """Write the rows to stdout or the output file in the requested format."""
    columns = list(rows[0]) if rows else []
    if fmt is OutputFormat.json:
        payload = {"schema_version": SCHEMA_VERSION, "command": command, **(metadata or {})}
        payload["rows"] = [{k: json_value(v) for k, v in row.items()} for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    elif fmt is OutputFormat.csv:
        frame = pd.DataFrame([[format_value(row[_]) for _ in columns] for row in rows], columns=columns)
        text = frame.to_csv(index=False, lineterminator="\n")
    else:
        table = Table(title=f"simplexmap {command}", row_styles=["dim", ""])
        for column in columns:
            table.add_column(column, justify="left" if column == "strategy" else "right", no_wrap=True)
        for row in rows:
            table.add_row(*[format_value(row[_]) for _ in columns])
        console = Console(width=200, force_terminal=False, color_system=None)
        with console.capture() as capture:
            console.print(table)
        text = capture.get()
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)
        info(f"Wrote {len(rows)} rows to {output}")


def info(message: str) -> None:
    """Print an INFO line to stderr."""
    print(f"INFO: {message}", file=sys.stderr)


def warning(message: str) -> None:
    """Print a WARNING line to stderr."""
    print(f"WARNING: {message}", file=sys.stderr)


@contextmanager
def progress_callback(
    enabled: bool,  # noqa: FBT001
    description: str,
    total: int,
) -> Iterator[Callable[[int], None] | None]:
    """Yield a callback advancing a transient stderr progress bar, or None."""
    if not enabled:
        yield None
        return
    with Progress(*PROGRESS_BAR_COLUMNS, console=Console(stderr=True), transient=True) as progress:
        task = progress.add_task(description, total=total)
        yield lambda blocks: progress.advance(task, blocks)


def _dimension(strategy: Strategy, m: int | None) -> int:
    """Resolve --m against the strategy."""
    expected = strategy.dimension
    if m is None:
        return expected or 2
    if expected is not None and m != expected:
        msg = f"Strategy {strategy.value} maps {expected}-simplices, got --m {m}"
        raise typer.BadParameter(msg)
    return m


@app.command()
def verify(  # noqa: PLR0913
    strategy: REQ_ARG_TYPE_STRATEGY,
    *,
    n: OPT_ARG_TYPE_SIDE = None,
    n_max: OPT_ARG_TYPE_SIDE_MAX = None,
    m: OPT_ARG_TYPE_DIMENSION = None,
    shards: OPT_ARG_TYPE_SHARDS = 1,
    progress: OPT_ARG_TYPE_PROGRESS = False,
    fmt: OPT_ARG_TYPE_FORMAT = OutputFormat.csv,
    output: OPT_ARG_TYPE_OUTPUT = None,
) -> int:
    """Exhaustively check a strategy covers the simplex exactly.

    Give either a single side --n (padded if needed) or --n-max to check
    every side n = 2^k - 1 up to it. Exits with 1 if any check fails.
    """
    if (n is None) == (n_max is None):
        msg = "Give exactly one of --n or --n-max"
        raise typer.BadParameter(msg)
    m = _dimension(strategy, m)
    if n is not None:
        sides = [n]
    else:
        limit: int = n_max  # type: ignore[assignment]
        sides = [(1 << k) - 1 for k in range(1, limit.bit_length() + 1) if (1 << k) - 1 <= limit]

    reports = []
    for side in sides:
        try:
            mapping = build_strategy(strategy, m, side)
            with progress_callback(progress, f"Checking n={side}", mapping.launched) as callback:
                reports.append(check_cover(mapping, shards, callback))
        except ValueError as err:
            raise typer.BadParameter(str(err)) from None

    emit("verify", [_.as_row() for _ in reports], fmt, output)
    failed = [_ for _ in reports if not _.passed]
    for report in failed:
        warning(
            f"{report.strategy} n={report.n}: missing {list(report.missing_samples)},"
            f" duplicated {list(report.duplicate_samples)}, outside {list(report.outside_samples)}"
        )
    if failed:
        msg = f"ERROR: {strategy.value} failed for n = {', '.join(str(_.n) for _ in failed)}"
        sys.exit(msg)
    return 0


@app.command(name="map")
def map_block(  # noqa: PLR0913
    strategy: REQ_ARG_TYPE_STRATEGY,
    n: REQ_ARG_TYPE_GRID_SIZE,
    x: REQ_ARG_TYPE_BLOCK_X,
    y: REQ_ARG_TYPE_BLOCK_Y,
    *,
    z: OPT_ARG_TYPE_BLOCK_Z = None,
    fmt: OPT_ARG_TYPE_MAP_FORMAT = None,
) -> int:
    """Map one block of the power-of-two grid for size --n.

    Prints the image in the map's own frame (strict triangle or
    tetrahedron), or "discard" for an unused block.
    """
    if not is_power_of_two(n):
        msg = f"Grid size --n must be a power of two, got {n}"
        raise typer.BadParameter(msg)
    if strategy is Strategy.MAP2:
        if z is not None:
            msg = "The 2D map takes no --z"
            raise typer.BadParameter(msg)
        block2 = Block2(x, y)
        if not grid2_for(n).contains(block2):
            msg = f"Block ({x}, {y}) is outside the {n // 2} x {n - 1} grid (rows from 1)"
            raise typer.BadParameter(msg)
        block: tuple[int, ...] = block2
        image: tuple[int, ...] | None = lambda2(block2)
    elif strategy is Strategy.MAP3_FLAT:
        if z is None:
            msg = "The 3D map needs --z"
            raise typer.BadParameter(msg)
        block3 = Block3(x, y, z)
        grid = grid3_for(n)
        if not grid.contains(block3):
            msg = f"Block ({x}, {y}, {z}) is outside the {' x '.join(map(str, grid.extents))} grid"
            raise typer.BadParameter(msg)
        block = block3
        image = map3(block3, n)
    else:
        msg = f"Single block mapping is available for map2 and map3-flat, not {strategy.value}"
        raise typer.BadParameter(msg)

    text = "discard" if image is None else " ".join(str(_) for _ in image)
    if fmt is None:
        print(text)
    else:
        row = {"strategy": strategy.value, "n": n, "block": " ".join(str(_) for _ in block), "image": text}
        emit("map", [row], fmt, None)
    return 0


@app.command()
def analyze(  # noqa: PLR0913
    m: OPT_ARG_TYPE_DIMENSION,
    n: REQ_ARG_TYPE_SIDE,
    r: REQ_ARG_TYPE_RATIO,
    beta: REQ_ARG_TYPE_BETA,
    *,
    fmt: OPT_ARG_TYPE_FORMAT = OutputFormat.csv,
    output: OPT_ARG_TYPE_OUTPUT = None,
) -> int:
    """Evaluate the recursive orthotope set volume against the simplex."""
    if m is None:
        msg = "Give the dimension with --m"
        raise typer.BadParameter(msg)
    if n < 2:  # noqa: PLR2004
        msg = f"Side --n must be at least 2, got {n}"
        raise typer.BadParameter(msg)
    try:
        params = RecursionParams(parse_ratio(r), beta)
    except ValueError as err:
        raise typer.BadParameter(str(err)) from None
    if params.approximate:
        info(f"r={params.r_text} is a decimal, results are approximate")
    row = analyze_params(m, n, params)
    metadata: dict[str, object] = {
        "approximate": params.approximate,
        "v_continuous": vs_continuous(m, n, params),
        "v_discrete": vs_discrete(m, n, params),
    }
    emit("analyze", [row._asdict()], fmt, output, metadata)
    return 0


@app.command()
def search(  # noqa: PLR0913
    m: OPT_ARG_TYPE_DIMENSION,
    *,
    beta_min: OPT_ARG_TYPE_BETA_MIN = 2,
    beta_max: OPT_ARG_TYPE_BETA_MAX = 8,
    n_ref: OPT_ARG_TYPE_N_REF = 1024,
    fmt: OPT_ARG_TYPE_FORMAT = OutputFormat.csv,
    output: OPT_ARG_TYPE_OUTPUT = None,
) -> int:
    """Scan the arity beta with r pinned to the solution of 1/r^m - beta = m!."""
    if m is None or m < 2:  # noqa: PLR2004
        msg = "Give a dimension --m of at least 2"
        raise typer.BadParameter(msg)
    if beta_min > beta_max:
        msg = f"--beta-min {beta_min} is larger than --beta-max {beta_max}"
        raise typer.BadParameter(msg)
    rows = search_params(m, range(beta_min, beta_max + 1), n_ref)
    emit("search", [_._asdict() for _ in rows], fmt, output)
    if n0_non_increasing(rows):
        info("n0 never increases with beta over the scanned range")
    else:
        warning("n0 increases with beta somewhere in the scanned range")
    return 0


@app.command()
def simulate(  # noqa: PLR0913
    strategy: REQ_ARG_TYPE_STRATEGY,
    n: REQ_ARG_TYPE_SIDE,
    *,
    m: OPT_ARG_TYPE_DIMENSION = None,
    rho: OPT_ARG_TYPE_RHO = 1,
    shards: OPT_ARG_TYPE_SHARDS = 1,
    progress: OPT_ARG_TYPE_PROGRESS = False,
    extended: OPT_ARG_TYPE_EXTENDED = False,
    fmt: OPT_ARG_TYPE_FORMAT = OutputFormat.csv,
    output: OPT_ARG_TYPE_OUTPUT = None,
) -> int:
    """Simulate launching a strategy and count launched and useful blocks."""
    m = _dimension(strategy, m)
    shape = BlockShape(rho)
    try:
        launched = build_strategy(strategy, m, n, shape).launched
        with progress_callback(progress, f"Launching {strategy.value}", launched) as callback:
            stats = simulate_launch(strategy, m, n, shape, shards, callback)
    except ValueError as err:
        raise typer.BadParameter(str(err)) from None
    row = stats.as_row()
    if not extended:
        row = {_: row[_] for _ in SIMULATE_COLUMNS}
    emit("simulate", [row], fmt, output)
    return 0


@app.command()
def volumes(
    *,
    n_max: OPT_ARG_TYPE_GRID_MAX = 1024,
    fmt: OPT_ARG_TYPE_FORMAT = OutputFormat.csv,
    output: OPT_ARG_TYPE_OUTPUT = None,
) -> int:
    """Tabulate the 3D recursive volumes and call counts for N = 2, 4, ... up to --n-max."""
    rows = []
    size = 2
    while size <= n_max:
        arity3 = volume_s3_arity3(size)
        printed = volume_s3_arity3_printed(size)
        calls = call_count_arity3(size)
        grid = grid3_for(size).volume
        arity2 = volume_s3_arity2(size)
        closed, remainder = divmod(size**3 - 3 ** (size.bit_length() - 1), 5)
        if remainder:
            msg = f"N^3 - 3^log2(N) is not a multiple of 5 for N = {size}"
            raise ValueError(msg)
        rows.append(
            {
                "N": size,
                "v_arity2": arity2,
                "v_arity2_closed": (size**3 - size) // 6,
                "grid3_volume": grid,
                "grid3_waste": Fraction(grid, arity2) - 1,
                "v_arity3": arity3,
                "v_arity3_closed": closed,
                "v_arity3_printed": printed,
                "printed_errata": printed != arity3,
                "arity3_ratio": Fraction(arity3, simplex_volume(3, size)),
                "call_count": calls,
                "call_bound_ok": 2 * calls >= size - 1,
            }
        )
        size *= 2
    emit("volumes", rows, fmt, output)
    if any(_["printed_errata"] for _ in rows):
        warning(
            "the printed arity-3 closed form N^3/5 - 3^log2(N) is errata,"
            " the verified form is (N^3 - 3^log2(N))/5"
        )
    return 0


if __name__ == "__main__":
    sys.exit(app())  # pragma: no cover
