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
"""Tests for the simplexmap/analysis.py module.

These tests are intended to be run from the repository root using:

pytest -v
"""

import math
from fractions import Fraction

import pytest

from simplexmap.analysis import (
    RecursionParams,
    alpha_at,
    alpha_limit,
    alpha_limit_half,
    analyze,
    find_n0,
    n0_non_increasing,
    parse_ratio,
    r_star,
    search_params,
    subtracted_term,
    vs_continuous,
    vs_discrete,
    vs_general,
    vs_recurrence,
)
from simplexmap.core import simplex_volume

HALF = Fraction(1, 2)


def test_recursion_params() -> None:
    """Check the parameter validation and derived properties."""
    params = RecursionParams(HALF, 2)
    assert params.k == 2  # noqa: PLR2004
    assert not params.approximate
    assert params.r_text == "1/2"
    assert RecursionParams(Fraction(2, 5), 3).k is None
    approx = RecursionParams(0.4428, 2)
    assert approx.approximate
    assert approx.k is None
    assert approx.r_text == "0.4428"
    for bad in (Fraction(0), Fraction(1), Fraction(3, 2), -0.5):
        with pytest.raises(ValueError, match="Reduction factor r must be in"):
            RecursionParams(bad, 2)
    with pytest.raises(ValueError, match="Arity beta must be at least 2, got 1"):
        RecursionParams(HALF, 1)


def test_parse_ratio() -> None:
    """Check exact and decimal ratios."""
    assert parse_ratio("1/2") == HALF
    assert isinstance(parse_ratio("1/2"), Fraction)
    assert parse_ratio(" 2/6 ") == Fraction(1, 3)
    assert parse_ratio("0.5") == 0.5  # noqa: PLR2004
    assert isinstance(parse_ratio("0.5"), float)
    for bad in ("abc", "1/0", "1/2/3", ""):
        with pytest.raises(ValueError, match="Could not parse"):
            parse_ratio(bad)


def test_vs_general_examples() -> None:
    """Check the documented volumes."""
    params = RecursionParams(HALF, 2)
    assert vs_general(2, 8, params) == 28  # noqa: PLR2004
    assert vs_general(3, 8, params) == 84  # noqa: PLR2004
    assert vs_general(4, 4, params) == 18  # noqa: PLR2004
    assert vs_recurrence(4, 4, params) == 18  # noqa: PLR2004


def test_vs_general_specialisations() -> None:
    """Check r=1/2, beta=2 reproduces the 2D, 3D and 4D closed forms."""
    params = RecursionParams(HALF, 2)
    for k in range(1, 17):
        n = 2**k
        assert vs_general(2, n, params) == (n**2 - n) // 2
        assert vs_general(3, n, params) == (n**3 - n) // 6
        assert vs_general(4, n, params) == (n**4 - n) // 14


def test_closed_form_against_recurrence() -> None:
    """Check the closed form equals the recurrence over a grid of cases."""
    for m in range(2, 9):
        for beta in range(2, 7):
            params = RecursionParams(HALF, beta)
            for k in range(17):
                n = 2**k
                expected = vs_recurrence(m, n, params)
                if 2**m != beta:
                    assert expected * (2**m - beta) == n**m - beta**k
                assert vs_general(m, n, params) == expected


def test_degenerate_closed_form() -> None:
    """Check beta = 1/r^m uses the depth times the first level."""
    params = RecursionParams(HALF, 4)
    assert vs_general(2, 8, params) == 48  # noqa: PLR2004
    assert vs_general(2, 1024, params) == 512**2 * 10
    third = RecursionParams(Fraction(1, 3), 9)
    assert vs_general(2, 81, third) == 27**2 * 4


def test_vs_recurrence_needs_exact_path() -> None:
    """Check the integer recurrence refuses other r and n."""
    with pytest.raises(ValueError, match="Exact recurrence needs r = 1/k and n a power of k"):
        vs_recurrence(3, 12, RecursionParams(HALF, 2))
    with pytest.raises(ValueError, match="Exact recurrence needs"):
        vs_recurrence(3, 8, RecursionParams(Fraction(2, 5), 2))


def test_vs_general_real_path() -> None:
    """Check the float recurrence off the exact path."""
    params = RecursionParams(HALF, 2)
    # n=12 is not a power of two: sides 6, 3, 1.5, 0.75
    assert vs_general(2, 12, params) == pytest.approx(36 + 2 * 9 + 4 * 2.25 + 8 * 0.5625)
    approx = RecursionParams(0.5, 2)
    assert vs_general(3, 64, approx) == pytest.approx((64**3 - 64) / 6)


def test_vs_continuous() -> None:
    """Check the real closed form agrees on the exact path."""
    for m in range(2, 7):
        for beta in (2, 3, 5):
            params = RecursionParams(HALF, beta)
            for n in (8, 256, 4096):
                assert vs_continuous(m, n, params) == pytest.approx(vs_general(m, n, params), rel=1e-9)
    assert vs_continuous(2, 1024, RecursionParams(HALF, 4)) == pytest.approx(512**2 * 10)


def test_vs_discrete() -> None:
    """Check the lattice recurrence matches the exact one for powers of two."""
    for m in range(2, 6):
        params = RecursionParams(HALF, 2)
        for k in range(1, 12):
            assert vs_discrete(m, 2**k, params) == vs_general(m, 2**k, params)
    assert vs_discrete(2, 5, RecursionParams(HALF, 2)) == 21  # noqa: PLR2004
    assert vs_discrete(3, 1, RecursionParams(HALF, 2)) == 0
    # a child is always smaller than its parent, so this terminates
    assert vs_discrete(2, 3, RecursionParams(0.9, 2)) == 4 + 2 * 1


def test_alpha() -> None:
    """Check the extra volume at a size and in the limit."""
    params = RecursionParams(HALF, 2)
    assert alpha_at(4, 4, params) == Fraction(1, 5)
    assert alpha_at(3, 64, params) == 0
    assert alpha_limit(4, params) == Fraction(5, 7)
    assert alpha_limit(5, params) == 3  # noqa: PLR2004
    assert alpha_limit(7, params) == 39  # noqa: PLR2004
    assert alpha_limit(2, RecursionParams(HALF, 4)) == math.inf
    assert alpha_limit(2, RecursionParams(0.5, 5)) == math.inf
    assert alpha_limit(3, RecursionParams(0.5, 2)) == 0
    with pytest.raises(ValueError, match="Extra volume needs n >= 2, got n=1"):
        alpha_at(3, 1, params)


def test_alpha_limit_half() -> None:
    """Check the r=1/2, beta=2 limit formula for every dimension."""
    for m in range(2, 9):
        assert alpha_limit_half(m) == alpha_limit(m, RecursionParams(HALF, 2))
    assert alpha_limit_half(2) == 0
    assert alpha_limit_half(3) == 0


def test_r_star() -> None:
    """Check the constraint solution, exact for perfect powers."""
    assert r_star(2, 2) == HALF
    assert r_star(3, 2) == HALF
    assert isinstance(r_star(3, 2), Fraction)
    assert r_star(2, 7) == Fraction(1, 3)
    assert r_star(3, 21) == Fraction(1, 3)
    assert math.isclose(r_star(4, 2), 26**-0.25, rel_tol=1e-12)
    assert f"{r_star(4, 2):.4f}" == "0.4429"
    for m in range(2, 9):
        for beta in range(2, 65):
            r = r_star(m, beta)
            assert 0 < r < 1
            assert math.isclose(float(r) ** -m - beta, math.factorial(m), rel_tol=1e-12)
    with pytest.raises(ValueError, match="r\\* needs m >= 2 and beta >= 2"):
        r_star(1, 2)


def test_subtracted_term() -> None:
    """Check the subtracted power of beta."""
    assert subtracted_term(3, 1024, RecursionParams(HALF, 2)) == 1024  # noqa: PLR2004
    assert subtracted_term(3, 1024, RecursionParams(HALF, 3)) == 3**10
    assert subtracted_term(3, 1000, RecursionParams(HALF, 2)) == pytest.approx(1000)


def test_find_n0() -> None:
    """Check the coverage threshold scans."""
    assert find_n0(2, RecursionParams(HALF, 2), 1024) == 2  # noqa: PLR2004
    assert find_n0(3, RecursionParams(HALF, 2), 1024) == 2  # noqa: PLR2004
    # V = (n^4-n)/14 stays above C(n+2, 4) in 4D
    assert find_n0(4, RecursionParams(HALF, 2), 1024) == 2  # noqa: PLR2004
    with pytest.raises(ValueError, match="Scan limit must be in"):
        find_n0(2, RecursionParams(HALF, 2), 1)


def test_find_n0_at_r_star() -> None:
    """Check the 5D threshold at r* is consistent with the volumes it scans."""
    params = RecursionParams(r_star(5, 2), 2)
    n0 = find_n0(5, params, 256)
    assert n0 is None or 2 <= n0 <= 256  # noqa: PLR2004
    if n0 is not None:
        for n in range(n0, 257):
            assert vs_discrete(5, n, params) >= simplex_volume(5, n - 1)
        if n0 > 2:  # noqa: PLR2004
            assert vs_discrete(5, n0 - 1, params) < simplex_volume(5, n0 - 2)


def test_search_params() -> None:
    """Check the scan rows and their order."""
    rows = search_params(5, range(2, 9), 1024)
    assert len(rows) == 7  # noqa: PLR2004
    assert sorted(_.beta for _ in rows) == list(range(2, 9))
    keys = [(_.alpha_at_ref, _.n0 is None, _.n0 or 0) for _ in rows]
    assert keys == sorted(keys)
    assert search_params(5, range(2, 9), 1024) == rows

    rows = search_params(3, range(2, 5), 1024)
    row = next(_ for _ in rows if _.beta == 2)  # noqa: PLR2004
    assert row.r_star == HALF
    assert row.n0 == 2  # noqa: PLR2004
    assert row.alpha_limit == 0
    assert row.subtracted_term == 1024  # noqa: PLR2004

    (row,) = search_params(2, [2], 64)
    assert row.alpha_limit == 0
    assert row.alpha_at_ref == pytest.approx(0, abs=1e-9)

    with pytest.raises(ValueError, match="Arity beta must be in"):
        search_params(3, [1], 64)


def test_n0_non_increasing() -> None:
    """Check the monotonicity helper."""
    rows = search_params(3, range(2, 5), 256)
    assert n0_non_increasing([rows[0]._replace(n0=None), rows[1]._replace(beta=99, n0=5)])
    assert not n0_non_increasing([rows[0]._replace(beta=2, n0=4), rows[1]._replace(beta=3, n0=8)])


def test_analyze() -> None:
    """Check the analysis row."""
    row = analyze(4, 4, RecursionParams(HALF, 2))
    assert row.m == 4  # noqa: PLR2004
    assert row.r == "1/2"
    assert (row.v_simplex, row.v_recursive) == (15, 18)
    assert row.alpha == Fraction(1, 5)
    assert row.alpha_limit == Fraction(5, 7)
