from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sinfty.errors import DomainError, ResourceCapError
from sinfty.partitions import (
    FrobeniusCoords,
    Partition,
    ThomaPoint,
    add_box,
    addable_removable,
    box_data,
    contents,
    count_partitions,
    covers,
    dimension,
    enumerate_partitions,
    frobenius,
    from_frobenius,
    from_string,
    log_dimension,
    partitions_up_to,
    thoma_embed,
    to_string,
    transpose,
)


def brute_partitions(n, largest=None):
    """Recursive enumeration oracle."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first,) + rest for rest in brute_partitions(n - first, first))
    return out


def count_tableaux(parts):
    """Standard Young tableaux by removing corners one at a time."""
    parts = list(parts)
    if sum(parts) == 0:
        return 1
    total = 0
    for i, p in enumerate(parts):
        if p and (i + 1 == len(parts) or parts[i + 1] < p):
            parts[i] -= 1
            total += count_tableaux(parts)
            parts[i] += 1
    return total


partitions_st = st.lists(st.integers(1, 9), min_size=0, max_size=8).map(lambda xs: Partition(tuple(sorted(xs, reverse=True))))


def test_enumerate_small():
    assert enumerate_partitions(0) == [Partition(())]
    assert len(enumerate_partitions(5)) == 7
    assert len(enumerate_partitions(30)) == 5604


@pytest.mark.parametrize("n", range(0, 16))
def test_enumerate_matches_oracle_in_reverse_lex_order(n):
    got = [lam.parts for lam in enumerate_partitions(n)]
    assert got == brute_partitions(n)
    assert got == sorted(got, reverse=True)
    assert count_partitions(n) == len(got)


def test_count_partitions_recurrence_at_30():
    assert count_partitions(30) == 5604
    assert count_partitions(100) == 190569292


def test_enumeration_cap():
    with pytest.raises(ResourceCapError):
        enumerate_partitions(61)
    assert len(enumerate_partitions(12, cap=12)) == 77


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))


def test_dimension_examples():
    assert dimension(Partition((7,))) == 1
    assert dimension(Partition((2, 1))) == 2
    assert dimension(Partition((3, 2))) == 5


@pytest.mark.parametrize("n", range(1, 11))
def test_dimension_matches_tableau_count(n):
    for lam in enumerate_partitions(n):
        assert dimension(lam) == count_tableaux(lam.parts)


@pytest.mark.parametrize("n", range(1, 13))
def test_sum_of_squared_dimensions(n):
    assert sum(dimension(lam) ** 2 for lam in enumerate_partitions(n)) == math.factorial(n)


def test_log_dimension_agrees_with_exact():
    lam = Partition((40, 30, 20, 10, 5))
    assert log_dimension(lam) == pytest.approx(math.log(dimension(lam)), rel=1e-12)
    big = Partition((100, 60, 30, 10))
    assert math.isfinite(log_dimension(big))


def test_transpose():
    assert transpose(Partition((3, 1))) == Partition((2, 1, 1))
    assert transpose(Partition(())) == Partition(())
    for lam in partitions_up_to(12):
        assert transpose(transpose(lam)) == lam


def test_frobenius_examples():
    fc = frobenius(Partition((3, 1)))
    assert (fc.d, fc.a, fc.b) == (1, (Fraction(5, 2),), (Fraction(3, 2),))
    assert sum(fc.a) + sum(fc.b) == 4
    assert frobenius(Partition((1,))).a == (Fraction(1, 2),)
    assert frobenius(Partition((2, 1))).b == (Fraction(3, 2),)


def test_frobenius_coords_validation():
    with pytest.raises(ValueError):
        FrobeniusCoords((4,), (3,))
    with pytest.raises(ValueError):
        FrobeniusCoords((3, 5), (3, 1))


def test_transpose_swaps_frobenius_sides():
    for lam in partitions_up_to(12):
        f, g = frobenius(lam), frobenius(transpose(lam))
        assert (f.a2, f.b2) == (g.b2, g.a2)
        assert f.n == lam.n


@given(partitions_st)
def test_frobenius_round_trip(lam):
    assert from_frobenius(frobenius(lam)) == lam


def test_thoma_embed():
    w = thoma_embed(Partition((1,)))
    assert w.alpha == (Fraction(1, 2),) and w.beta == (Fraction(1, 2),)
    assert w.deficiency == 0
    n = 9
    w = thoma_embed(Partition((n,)))
    assert w.alpha == (Fraction(2 * n - 1, 2 * n),) and w.beta == (Fraction(1, 2 * n),)
    with pytest.raises(DomainError):
        thoma_embed(Partition(()))


def test_thoma_embed_deficiency_zero_exhaustive():
    for lam in partitions_up_to(20):
        if lam.n:
            w = thoma_embed(lam)
            assert w.deficiency == 0
            assert tuple(a * lam.n for a in w.alpha) == frobenius(lam).a


def test_thoma_point_validation():
    with pytest.raises(ValueError):
        ThomaPoint((Fraction(1, 4), Fraction(1, 2)), ())
    with pytest.raises(ValueError):
        ThomaPoint((Fraction(3, 4),), (Fraction(1, 2),))
    with pytest.raises(ValueError):
        ThomaPoint((-0.1,), ())
    assert ThomaPoint((0.5,), (0.5 + 1e-13,)).deficiency == pytest.approx(0, abs=1e-12)
    assert ThomaPoint((Fraction(1, 2), 0), ()).alpha == (Fraction(1, 2),)


def test_box_data():
    assert [c for *_, c, _h in box_data(Partition((2,)))] == [0, 1]
    assert contents(Partition((1, 1))) == [0, -1]
    hooks = sorted(h for *_, h in box_data(Partition((2, 2))))
    assert hooks == [1, 2, 2, 3]
    assert math.factorial(4) // math.prod(hooks) == 2 == count_tableaux((2, 2))


def test_addable_removable():
    assert addable_removable(Partition(())) == ([(1, 1)], [])
    add, rem = addable_removable(Partition((2, 1)))
    assert set(add) == {(1, 3), (2, 2), (3, 1)}
    assert set(rem) == {(1, 2), (2, 1)}
    for lam in partitions_up_to(12):
        add, rem = addable_removable(lam)
        assert len(add) == len(rem) + 1
        for r, _c in add:
            mu = add_box(lam, r)
            assert covers(mu, lam) is not None


def test_string_round_trip():
    assert to_string(Partition((3, 1))) == "3,1"
    assert to_string(Partition(())) == "-"
    for lam in partitions_up_to(8):
        assert from_string(to_string(lam)) == lam
