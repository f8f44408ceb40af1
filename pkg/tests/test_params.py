from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import chacon, dyadic
from rankone import (
    CFSequence,
    FiniteSubset,
    IntegerLine,
    InvariantViolation,
    ValidationError,
    arithmetic_family,
    from_cutting_stacking,
    mass_profile,
    odometer,
    shift_family,
    validate,
)
from rankone.params import product_block

Z = IntegerLine()


def test_finite_subset_is_canonical():
    s = FiniteSubset(Z, [3, 1, 3, 2])
    assert s.elements == (1, 2, 3)
    assert 2 in s and 5 not in s
    assert s == FiniteSubset(Z, [1, 2, 3])


def test_dyadic_odometer_passes_every_clause():
    report = validate(dyadic(4))
    assert report.accepted
    assert report.normalized


def test_overlapping_translates_fail_disjointness_at_level_two():
    seq = dyadic(3)
    C = list(seq.C)
    C[1] = FiniteSubset(Z, [0, 1])
    report = validate(CFSequence(Z, seq.F, C))
    assert report.failed("disjointness") == [2]
    assert not report.accepted


def test_singleton_c_fails_size_clause():
    report = validate(CFSequence(Z, [[0], [0]], [[0]]))
    assert report.failed("C-size") == [1]
    assert report.structural_ok


def test_mass_profiles():
    assert mass_profile(dyadic(5)) == [1] * 6
    assert mass_profile(chacon(3)) == [1, 1, Fraction(4, 3), Fraction(13, 9)]
    exact = CFSequence(Z, [[0], [0, 1], [0, 1, 2, 3, 4, 5]], [[0, 1], [0, 2, 4]])
    assert mass_profile(exact) == [1, 1, 1]


def test_mass_profile_rejects_invalid_sequence():
    with pytest.raises(ValidationError):
        mass_profile(CFSequence(Z, [[0], [0, 1]], [[0, 1, 2]]))


def test_product_blocks():
    assert product_block(dyadic(3), 0, 2) == FiniteSubset(Z, [0, 1, 2, 3])
    ch = chacon(3)
    block = product_block(ch, 1, 3)
    assert len(block) == 9
    assert block == FiniteSubset(Z, {a + b for a in [0, 1, 3] for b in [0, 4, 9]})
    assert product_block(ch, 2, 3) == ch.c(3)


def test_product_block_detects_collisions():
    bad = CFSequence(Z, [[0], [0, 1], [0, 1, 2]], [[0, 1], [0, 1]])
    with pytest.raises(InvariantViolation):
        product_block(bad, 0, 2)


def test_cutting_stacking_recurrence():
    seq = from_cutting_stacking([2], [[0, 1]], 1)
    assert seq.c(2) == FiniteSubset(Z, [0, 1])
    assert seq.f(2) == FiniteSubset(Z, [0, 1, 2])
    seq = from_cutting_stacking([3], [[0, 1, 0]], 1)
    assert seq.c(2) == FiniteSubset(Z, [0, 1, 3])
    assert len(seq.f(2)) == 4
    plain = from_cutting_stacking([2, 2], [[0, 0], [0, 0]], 2)
    assert plain.C[1:] == odometer([1, 2, 2, 2]).C[1:]


def test_odometer_formulas():
    seq = odometer([1, 2, 2, 2])
    assert [list(F) for F in seq.F] == [[0], [0, 1], [0, 1, 2, 3], list(range(8))]
    assert [list(C) for C in seq.C] == [[0, 1], [0, 2], [0, 4]]
    seq = odometer([1, 3, 3])
    assert [list(C) for C in seq.C] == [[0, 1, 2], [0, 3, 6]]
    assert odometer([1, 2]).depth == 1


def test_shift_family_overlaps():
    seq = CFSequence(Z, [[0], range(10)], [range(10)])
    assert shift_family(seq, [1]).c_overlap == [Fraction(9, 10)]
    assert shift_family(seq, [0]).c_overlap == [1]
    assert shift_family(seq, [10]).c_overlap == [0]


def test_arithmetic_family_shape():
    seq, beta = arithmetic_family(4, 3)
    assert [list(C) for C in seq.C] == [[0, 1, 2, 3], [0, 4, 8, 12], [0, 16, 32, 48]]
    assert beta == [1, 4, 16]
    assert shift_family(seq, beta).c_overlap == [Fraction(3, 4)] * 3


# properties -----------------------------------------------------------------

cut_stack = st.lists(st.integers(2, 3), min_size=1, max_size=3).flatmap(
    lambda rs: st.tuples(
        st.just(rs),
        st.tuples(*[st.lists(st.integers(0, 2), min_size=r, max_size=r) for r in rs]),
        st.integers(1, 3),
    )
)


@settings(max_examples=60, deadline=None)
@given(cut_stack)
def test_cutting_stacking_output_is_structurally_valid(data):
    rs, ss, h1 = data
    seq = from_cutting_stacking(rs, list(ss), h1)
    report = validate(seq)
    assert report.structural_ok
    for n in range(1, seq.depth + 1):
        shifted = [{f + c for f in seq.f(n - 1)} for c in seq.c(n)]
        assert sum(map(len, shifted)) == len(set().union(*shifted))
        assert set().union(*shifted) <= set(seq.f(n))


@settings(max_examples=60, deadline=None)
@given(cut_stack)
def test_mass_profile_nondecreasing_and_block_sizes(data):
    rs, ss, h1 = data
    seq = from_cutting_stacking(rs, list(ss), h1)
    mass = mass_profile(seq)
    assert all(a <= b for a, b in zip(mass, mass[1:]))
    for n in range(seq.depth):
        for m in range(n + 1, seq.depth + 1):
            expected = 1
            for k in range(n + 1, m + 1):
                expected *= len(seq.c(k))
            assert len(product_block(seq, n, m)) == expected


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=4))
def test_odometer_tiles_exactly(ds):
    seq = odometer([1] + ds)
    for n in range(seq.depth):
        assert {f + c for f in seq.f(n) for c in seq.c(n + 1)} == set(seq.f(n + 1))
    assert mass_profile(seq) == [1] * (seq.depth + 1)
