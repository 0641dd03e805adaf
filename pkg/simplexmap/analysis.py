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
"""Volumes of general-m recursive orthotope sets and the (r, beta) explorer.

A recursive set of side n holds one orthotope of side r*n plus beta
recursive children of side r*n, so its volume obeys
V(n) = (r n)^m + beta V(r n). For r = 1/k and n a power of k this sums to
the closed form (n^m - beta^d) / (k^m - beta) with d = log_k(n), which is
evaluated here with exact integers. Other r are handled three ways: the
same recurrence over floats, the closed form with a real depth, and a
lattice version rounding every side to a whole number of cells.

The set is compared with the simplex of side n-1, which it covers exactly
for m = 2, 3 with r = 1/2 and beta = 2. Pinning r to the solution of
1/r^m - beta = m! makes the asymptotic extra volume vanish for any beta;
``search_params`` scans beta to find where the coverage starts (n0) and
how close the volume is at a reference size.
"""

import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from simplexmap.core import simplex_volume

MAX_SCAN = 1 << 20


@dataclass(frozen=True)
class RecursionParams:
    """Reduction factor r and arity beta of a recursive orthotope set.

    An exact r is a ``Fraction``; a float r is treated as approximate.
    """

    r: Fraction | float
    beta: int

    def __post_init__(self) -> None:
        """Validate 0 < r < 1 and beta >= 2."""
        if not 0 < self.r < 1:
            msg = f"Reduction factor r must be in (0, 1), got {self.r}"
            raise ValueError(msg)
        if self.beta < 2:  # noqa: PLR2004
            msg = f"Arity beta must be at least 2, got {self.beta}"
            raise ValueError(msg)

    @property
    def approximate(self) -> bool:
        """True unless r is an exact rational."""
        return not isinstance(self.r, Fraction)

    @property
    def k(self) -> int | None:
        """The integer 1/r, if r is exactly the reciprocal of one."""
        if isinstance(self.r, Fraction) and self.r.numerator == 1:
            return self.r.denominator
        return None

    @property
    def r_text(self) -> str:
        """The reduction factor as reported, "p/q" when exact."""
        return str(self.r) if isinstance(self.r, Fraction) else f"{self.r:.12g}"


def parse_ratio(text: str) -> Fraction | float:
    """Parse "p/q" as an exact Fraction, or a decimal as a float.

    >>> parse_ratio("1/2")
    Fraction(1, 2)
    >>> parse_ratio("0.4428")
    0.4428
    """
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        msg = f"Could not parse {text!r} as a ratio p/q or a decimal"
        raise ValueError(msg) from None


def _depth(n: int, k: int) -> int | None:
    """Return d with k^d == n, or None."""
    d = 0
    while n > 1 and n % k == 0:
        n //= k
        d += 1
    return d if n == 1 else None


def vs_recurrence(m: int, n: int, params: RecursionParams) -> int:
    """Return V(n) = (n/k)^m + beta V(n/k), V(1) = 0, for r = 1/k exactly.

    >>> vs_recurrence(4, 4, RecursionParams(Fraction(1, 2), 2))
    18
    """
    k = params.k
    if k is None or n < 1 or _depth(n, k) is None:
        msg = f"Exact recurrence needs r = 1/k and n a power of k, got r={params.r_text}, n={n}"
        raise ValueError(msg)
    volume = 0
    side = 1
    while side < n:
        side *= k
        volume = (side // k) ** m + params.beta * volume
    return volume


def _closed_form(m: int, n: int, params: RecursionParams) -> int:
    """Return the exact closed form for r = 1/k and n = k^d."""
    k = params.k
    d = _depth(n, k)  # type: ignore[arg-type]
    if k**m == params.beta:
        return (n // k) ** m * d  # type: ignore[operator]
    return (n**m - params.beta**d) // (k**m - params.beta)  # type: ignore[operator]


def vs_general(m: int, n: int, params: RecursionParams) -> int | float:
    """Return the recursive set volume V(S_n^m).

    On the exact path (r = 1/k, n a power of k) the closed form is
    returned as an integer after checking it against the recurrence.
    Otherwise the recurrence is run over floats until the side drops to 1.

    >>> half = RecursionParams(Fraction(1, 2), 2)
    >>> [vs_general(m, 8, half) for m in (2, 3)]
    [28, 84]
    >>> vs_general(2, 8, RecursionParams(Fraction(1, 2), 4))
    48
    """
    if m < 1 or n < 1:
        msg = f"Volume needs m >= 1 and n >= 1, got m={m}, n={n}"
        raise ValueError(msg)
    if params.k is not None and _depth(n, params.k) is not None:
        volume = vs_recurrence(m, n, params)
        if volume != _closed_form(m, n, params):  # pragma: no cover
            msg = f"Closed form disagrees with the recurrence at m={m}, n={n}, r={params.r_text}"
            raise RuntimeError(msg)
        return volume
    r = float(params.r)
    volume = 0.0
    weight = 1.0
    side = float(n)
    while side > 1:
        side *= r
        volume += weight * side**m
        weight *= params.beta
    return volume


def vs_continuous(m: int, n: int, params: RecursionParams) -> float:
    """Return the closed form with the real depth log_{1/r}(n).

    >>> round(vs_continuous(2, 8, RecursionParams(Fraction(1, 2), 2)), 9)
    28.0
    """
    r = float(params.r)
    depth = math.log(n) / -math.log(r)
    reduction = r**-m
    if math.isclose(reduction, params.beta):
        return (r * n) ** m * depth
    return (n**m - params.beta**depth) / (reduction - params.beta)


def vs_discrete(m: int, n: int, params: RecursionParams) -> int:
    """Return the volume with every side rounded to a whole number of cells.

    The child side is round(r * side), at least 1 and less than the
    parent, and the recursion stops at side 1.

    >>> vs_discrete(3, 8, RecursionParams(Fraction(1, 2), 2))
    84
    >>> vs_discrete(2, 5, RecursionParams(Fraction(1, 2), 2))
    21
    """
    half = Fraction(1, 2) if isinstance(params.r, Fraction) else 0.5
    volume = 0
    weight = 1
    side = n
    while side > 1:
        side = min(side - 1, max(1, math.floor(params.r * side + half)))
        volume += weight * side**m
        weight *= params.beta
    return volume


def v_simplex(m: int, n: int) -> int:
    """Volume of the simplex of side n-1, the target of the side-n set."""
    return simplex_volume(m, n - 1)


def alpha_at(m: int, n: int, params: RecursionParams) -> Fraction | float:
    """Return the extra volume V(S_n^m) / V(simplex) - 1 at size n.

    >>> alpha_at(4, 4, RecursionParams(Fraction(1, 2), 2))
    Fraction(1, 5)
    """
    if n < 2:  # noqa: PLR2004
        msg = f"Extra volume needs n >= 2, got n={n}"
        raise ValueError(msg)
    volume = vs_general(m, n, params)
    if isinstance(volume, int):
        return Fraction(volume, v_simplex(m, n)) - 1
    return volume / v_simplex(m, n) - 1


def alpha_limit(m: int, params: RecursionParams) -> Fraction | float:
    """Return the asymptotic extra volume m!/(1/r^m - beta) - 1.

    Exact for rational r, infinite if the set does not shrink
    (1/r^m <= beta); floats are rounded to 12 decimal places.

    >>> [alpha_limit(m, RecursionParams(Fraction(1, 2), 2)) for m in (4, 5, 7)]
    [Fraction(5, 7), Fraction(3, 1), Fraction(39, 1)]
    >>> alpha_limit(2, RecursionParams(Fraction(1, 2), 4))
    inf
    """
    if isinstance(params.r, Fraction):
        denominator = params.r**-m - params.beta
        if denominator <= 0:
            return math.inf
        return Fraction(math.factorial(m)) / denominator - 1
    denominator = params.r**-m - params.beta
    if denominator <= 0:
        return math.inf
    return round(math.factorial(m) / denominator - 1, 12) + 0.0


def alpha_limit_half(m: int) -> Fraction:
    """Return m!/(2^m - 2) - 1, the limit for r = 1/2 and beta = 2.

    >>> alpha_limit_half(3)
    Fraction(0, 1)
    """
    return Fraction(math.factorial(m), 2**m - 2) - 1


def r_star(m: int, beta: int) -> Fraction | float:
    """Return r solving 1/r^m - beta = m!, exact when m! + beta is an m-th power.

    >>> r_star(2, 2), r_star(3, 2)
    (Fraction(1, 2), Fraction(1, 2))
    >>> round(r_star(4, 2), 4)
    0.4429
    """
    if m < 2 or beta < 2:  # noqa: PLR2004
        msg = f"r* needs m >= 2 and beta >= 2, got m={m}, beta={beta}"
        raise ValueError(msg)
    total = math.factorial(m) + beta
    root = round(total ** (1 / m))
    for k in (root - 1, root, root + 1):
        if k > 1 and k**m == total:
            return Fraction(1, k)
    return total ** (-1 / m)


def subtracted_term(m: int, n: int, params: RecursionParams) -> int | float:  # noqa: ARG001
    """Return beta^log_{1/r}(n), the term the closed form subtracts from n^m.

    >>> subtracted_term(3, 1024, RecursionParams(Fraction(1, 2), 2))
    1024
    """
    if params.k is not None:
        d = _depth(n, params.k)
        if d is not None:
            return params.beta**d
    return params.beta ** (math.log(n) / -math.log(float(params.r)))


def find_n0(m: int, params: RecursionParams, n_max: int) -> int | None:
    """Return the size from which the recursive set covers the simplex.

    The scanned sizes are the powers of k for r = 1/k (with exact
    volumes), otherwise every n from 2 to n_max (with ``vs_discrete``).
    The result is the first scanned size after the last one failing
    V(S_n^m) >= V(simplex of side n-1), or None if the largest scanned
    size still fails.

    >>> find_n0(2, RecursionParams(Fraction(1, 2), 2), 1024)
    2
    """
    if not 2 <= n_max <= MAX_SCAN:  # noqa: PLR2004
        msg = f"Scan limit must be in [2, {MAX_SCAN}], got {n_max}"
        raise ValueError(msg)
    k = params.k
    if k is not None:
        sizes = [k**d for d in range(1, math.floor(math.log(n_max, k)) + 2) if k**d <= n_max]
    else:
        sizes = list(range(2, n_max + 1))
    n0 = None
    for n in sizes:
        volume = vs_recurrence(m, n, params) if k is not None else vs_discrete(m, n, params)
        if volume >= v_simplex(m, n):
            if n0 is None:
                n0 = n
        else:
            n0 = None
    return n0


class ParamRow(NamedTuple):
    """One beta of the parameter scan, with r pinned to r*."""

    m: int
    beta: int
    r_star: Fraction | float
    n0: int | None
    alpha_at_ref: float
    alpha_limit: Fraction | float
    subtracted_term: int | float


def search_params(m: int, betas: Iterable[int], n_ref: int) -> list[ParamRow]:
    """Scan the arity beta with r = r*(m, beta), sorted by (alpha at n_ref, n0).

    The extra volume at n_ref uses the continuous closed form; n0 is
    searched up to n_ref.

    >>> [(_.beta, _.r_star, _.n0) for _ in search_params(3, [2], 1024)]
    [(2, Fraction(1, 2), 2)]
    """
    rows = []
    for beta in betas:
        if not 2 <= beta <= 64:  # noqa: PLR2004
            msg = f"Arity beta must be in [2, 64], got {beta}"
            raise ValueError(msg)
        r = r_star(m, beta)
        params = RecursionParams(r, beta)
        rows.append(
            ParamRow(
                m=m,
                beta=beta,
                r_star=r,
                n0=find_n0(m, params, n_ref),
                alpha_at_ref=vs_continuous(m, n_ref, params) / v_simplex(m, n_ref) - 1,
                alpha_limit=alpha_limit(m, params),
                subtracted_term=subtracted_term(m, n_ref, params),
            )
        )
    return sorted(rows, key=lambda _: (_.alpha_at_ref, _.n0 is None, _.n0 or 0, _.beta))


def n0_non_increasing(rows: Iterable[ParamRow]) -> bool:
    """Return True if n0 never increases with beta among the rows.

    A missing n0 counts as larger than any found one.
    """
    ordered = sorted(rows, key=lambda _: _.beta)
    values = [math.inf if _.n0 is None else _.n0 for _ in ordered]
    return all(a >= b for a, b in zip(values, values[1:], strict=False))


class AnalyzeRow(NamedTuple):
    """Recursive set volume against the simplex at one (m, n, r, beta)."""

    m: int
    n: int
    r: str
    beta: int
    v_simplex: int
    v_recursive: int | float
    alpha: Fraction | float
    alpha_limit: Fraction | float


def analyze(m: int, n: int, params: RecursionParams) -> AnalyzeRow:
    """Evaluate the recursive set at size n.

    >>> row = analyze(4, 4, RecursionParams(Fraction(1, 2), 2))
    >>> row.v_simplex, row.v_recursive, row.alpha_limit
    (15, 18, Fraction(5, 7))
    """
    return AnalyzeRow(
        m=m,
        n=n,
        r=params.r_text,
        beta=params.beta,
        v_simplex=v_simplex(m, n),
        v_recursive=vs_general(m, n, params),
        alpha=alpha_at(m, n, params),
        alpha_limit=alpha_limit(m, params),
    )
