"""Exact subshift arithmetic: representation, distances, splices, samplers."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from holonomy_lab.conformal import sample_rng
from holonomy_lab.errors import NotSameLeaf, TooFarApart
from holonomy_lab.shift import (STABLE, UNSTABLE, ShiftPoint, ShiftSpace,
                                base_distance, bracket_shift, n_first_iterate,
                                parse_point, points_equal, random_point,
                                resample_window, shift_iterate)


def pt(space, text):
    return parse_point(space, text)


# ---------------------------------------------------------------------------
# spaces and representation
# ---------------------------------------------------------------------------

def test_space_validation():
    with pytest.raises(ValueError):
        ShiftSpace(2, ((0, 0), (1, 1)), Fraction(2))      # symbol 0 has no successor
    with pytest.raises(ValueError):
        ShiftSpace(2, ((1, 1), (1, 1)), Fraction(1))      # lambda must exceed 1


def test_golden_mean_forbids_11(golden):
    assert golden.admits("0", "0") and golden.admits("0", "1")
    assert golden.admits("1", "0") and not golden.admits("1", "1")
    with pytest.raises(ValueError):
        pt(golden, "0|11@0|0")


def test_parse_roundtrip(full2):
    x = pt(full2, "10|0110@-2|01")
    assert points_equal(parse_point(full2, x.to_string()), x)


def test_normalization_is_canonical(full2):
    # the same sequence described with different boundary placements
    a = pt(full2, "01|@4|01")
    b = pt(full2, "01|@-4|01")
    assert a.to_string() == b.to_string() == "01|@0|01"
    assert points_equal(a, b)


def test_normalization_shrinks_tails_and_core(full2):
    x = pt(full2, "0101|01@0|0000")
    # left tail reduces to its primitive period; the core matches the tail's
    # continuation, so the boundary slides right past it
    assert x.to_string() == "01|@2|0"


def test_window_reads_both_tails(full2):
    x = pt(full2, "10|0110@-2|01")
    assert x.window(-2, 1) == "0110"
    assert x.window(-6, -3) == "1010"
    assert x.window(2, 5) == "0101"


@given(st.text(alphabet="01", min_size=1, max_size=4),
       st.text(alphabet="01", min_size=0, max_size=6),
       st.text(alphabet="01", min_size=1, max_size=4),
       st.integers(-6, 6))
def test_make_preserves_the_described_sequence(left, core, right, start):
    space = ShiftSpace.full(2, 2)
    x = ShiftPoint.make(space, left, core, start, right)
    lo, hi = start - 3 * len(left), start + len(core) + 3 * len(right)
    want = []
    for k in range(lo, hi + 1):
        if k < start:
            want.append(left[(k - start) % len(left)])
        elif k < start + len(core):
            want.append(core[k - start])
        else:
            want.append(right[(k - start - len(core)) % len(right)])
    assert x.window(lo, hi) == "".join(want)


@given(st.text(alphabet="01", min_size=1, max_size=4),
       st.text(alphabet="01", min_size=0, max_size=6),
       st.text(alphabet="01", min_size=1, max_size=4),
       st.integers(-6, 6))
def test_string_roundtrip_is_identity(left, core, right, start):
    space = ShiftSpace.full(2, 2)
    x = ShiftPoint.make(space, left, core, start, right)
    assert points_equal(parse_point(space, x.to_string()), x)


# ---------------------------------------------------------------------------
# base distance
# ---------------------------------------------------------------------------

def test_distance_examples(full2):
    x = pt(full2, "0|@0|0")
    assert base_distance(x, pt(full2, "0|1000@-3|0")) == Fraction(1, 8)
    assert base_distance(x, x) == 0
    assert base_distance(x, pt(full2, "0|1@0|0")) == 1


def test_distance_uses_min_abs_position(full2):
    # differences at -5 and +2: the +2 one is closer to the origin
    y = pt(full2, "0|1000000 1@-5|0".replace(" ", ""))
    assert base_distance(pt(full2, "0|@0|0"), y) == Fraction(1, 4)


@given(st.integers(0, 400), st.integers(0, 400), st.integers(0, 400))
def test_distance_is_an_exact_ultrametric(i, j, k):
    space = ShiftSpace.full(2, 2)
    x = random_point(space, sample_rng(17, i))
    y = random_point(space, sample_rng(17, j))
    z = random_point(space, sample_rng(17, k))
    dxy, dyz, dxz = base_distance(x, y), base_distance(y, z), base_distance(x, z)
    assert dxy == base_distance(y, x)
    assert dxz <= max(dxy, dyz)
    assert (dxy == 0) == points_equal(x, y)


# ---------------------------------------------------------------------------
# iteration
# ---------------------------------------------------------------------------

def test_iterate_examples(full2):
    x = pt(full2, "1|01@0|1")
    assert points_equal(shift_iterate(x, 0), x)
    assert points_equal(shift_iterate(shift_iterate(x, 1), -1), x)
    moved = shift_iterate(x, 2)
    assert moved.window(-2, -1) == "01"
    assert moved.symbol_at(-2) == x.symbol_at(0)


@given(st.integers(0, 400), st.integers(-9, 9), st.integers(-9, 9))
def test_iterate_is_additive(i, a, b):
    space = ShiftSpace.golden_mean(2)
    x = random_point(space, sample_rng(23, i))
    assert points_equal(shift_iterate(shift_iterate(x, a), b),
                        shift_iterate(x, a + b))


# ---------------------------------------------------------------------------
# bracket (splice)
# ---------------------------------------------------------------------------

def test_bracket_splice_example(full2):
    x = pt(full2, "0|@0|0")
    y = pt(full2, "1|0@0|1")          # all ones except coordinate 0
    z = bracket_shift(x, y)
    assert z.window(-3, 3) == "1110000"
    assert points_equal(bracket_shift(x, x), x)


def test_bracket_same_future(full2):
    x = pt(full2, "10|0@0|0")
    y = pt(full2, "01|0@0|0")
    z = bracket_shift(x, y)
    assert z.window(0, 6) == x.window(0, 6)
    assert z.window(-6, -1) == y.window(-6, -1)


def test_bracket_needs_matching_origin(full2):
    with pytest.raises(TooFarApart):
        bracket_shift(pt(full2, "0|@0|0"), pt(full2, "0|1@0|0"))


@given(st.integers(0, 300), st.integers(0, 300), st.integers(1, 30))
def test_bracket_splice_contracts_both_ways(i, j, k):
    space = ShiftSpace.full(2, 2)
    xi = Fraction(1, 2)
    x = random_point(space, sample_rng(31, i))
    y = random_point(space, sample_rng(31, j))
    if x.symbol_at(0) != y.symbol_at(0):
        return
    z = bracket_shift(x, y)
    # z in the xi-stable set of x and the xi-unstable set of y, at the exact
    # conformal rate
    dzx = base_distance(z, x)
    dzy = base_distance(z, y)
    assert dzx <= xi and dzy <= xi
    if dzx > 0:
        assert base_distance(shift_iterate(z, k), shift_iterate(x, k)) \
            == Fraction(1, 2) ** k * dzx
    if dzy > 0:
        assert base_distance(shift_iterate(z, -k), shift_iterate(y, -k)) \
            == Fraction(1, 2) ** k * dzy


# ---------------------------------------------------------------------------
# first iterate into the local leaf
# ---------------------------------------------------------------------------

def test_n_first_iterate_examples(full2):
    zeros = pt(full2, "0|@0|0")
    assert n_first_iterate(zeros, pt(full2, "0|1@1|0"), STABLE) == 2
    assert n_first_iterate(zeros, pt(full2, "0|1@-1|0"), STABLE) == 0
    assert n_first_iterate(zeros, zeros, STABLE) == 0
    assert n_first_iterate(zeros, pt(full2, "0|1@-2|0"), UNSTABLE) == 3
    with pytest.raises(NotSameLeaf):
        n_first_iterate(zeros, pt(full2, "0|@0|1"), STABLE)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def test_random_point_is_deterministic_and_admissible(golden):
    a = random_point(golden, sample_rng(5, 9))
    b = random_point(golden, sample_rng(5, 9))
    assert points_equal(a, b)
    w = a.window(-30, 30)
    assert "11" not in w


def test_resample_window_respects_the_complement(golden):
    x = pt(golden, "10|010@-3|01")
    y = resample_window(golden, x, 1, 2, sample_rng(3, 0))
    assert y.window(-12, 0) == x.window(-12, 0)
    assert y.window(3, 12) == x.window(3, 12)
    assert "11" not in y.window(-12, 12)


@given(st.integers(0, 200), st.integers(-5, -1), st.integers(0, 4))
def test_resample_window_stays_admissible(i, lo, width):
    space = ShiftSpace.golden_mean(2)
    rng = sample_rng(41, i)
    x = random_point(space, rng)
    y = resample_window(space, x, lo, lo + width, rng)
    assert "11" not in y.window(lo - 8, lo + width + 8)
    assert y.window(lo + width + 1, lo + width + 9) == x.window(lo + width + 1,
                                                                lo + width + 9)
