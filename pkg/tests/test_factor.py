import random
from fractions import Fraction

import pytest

from conftest import Z, chacon, dyadic, triadic
from rankone import (
    CFSequence,
    FactorWitness,
    OdometerSpec,
    PreconditionError,
    act,
    approx_eq,
    build_factor_map,
    check_factor_witness,
    check_topological_quotient,
    non_overlap,
    odometer,
    odometer_defects,
    search_odometer_telescoping,
)
from rankone.factor import MassAssumptionWarning, block_defect, preimage_law
from rankone.params import product_block
from rankone.space import enumerate_points, value

IDENTITY = FactorWitness((0, 1, 2, 3), [[0]] * 4)
DYADIC_SHIFT = FactorWitness((0, 2, 3, 4), [[0], [0, 2], [0, 4], [0, 8]])


def test_identity_factor_witness():
    T = dyadic(3)
    report = check_factor_witness(T, T, IDENTITY)
    assert report.passed and not report.warnings
    assert all(r.fill == 0 and r.block == 0 for r in report.rows)


def test_dyadic_level_shift():
    T = dyadic(4)
    thin = FactorWitness((0, 2, 3, 4), [[0]] * 4)
    rows = check_factor_witness(T, T, thin).rows
    assert [r.fill for r in rows] == [Fraction(1, 2)] * 3
    assert not check_factor_witness(T, T, thin).passed
    assert check_factor_witness(T, T, DYADIC_SHIFT).passed


def test_collisions_are_reported():
    T = dyadic(4)
    bad = FactorWitness((0, 2, 3), [[0], [0, 1], [0, 1]])
    assert (1, "injective") in check_factor_witness(T, T, bad).failures()


def test_factor_indices_validated():
    with pytest.raises(PreconditionError):
        FactorWitness((0, 2, 2), [[0]] * 3)
    with pytest.raises(PreconditionError):
        check_factor_witness(dyadic(3), dyadic(3), FactorWitness((0, 1), [[1], [0]]))


def test_identity_factor_map():
    T = dyadic(3)
    theta = build_factor_map(T, T, IDENTITY)
    assert [theta.domain_fraction(n) for n in range(3)] == [1, 1, 1]
    for p in enumerate_points(T, 0, 3):
        q = theta(p)
        assert value(T, q) == value(T, p)


def test_dyadic_factor_map_pushforward_is_uniform():
    T = dyadic(4)
    theta = build_factor_map(T, T, DYADIC_SHIFT)
    assert [theta.domain_fraction(n) for n in range(3)] == [1, 1, 1]
    for n in range(3):
        counts = theta.pushforward(n)
        assert sorted(counts) == list(T.f(n + 1))
        assert len(set(counts.values())) == 1


def test_factor_map_equivariance_samples():
    T = dyadic(4)
    theta = build_factor_map(T, T, DYADIC_SHIFT)
    checked = 0
    for g in range(-3, 4):
        for p in enumerate_points(T, 0, 4):
            gp = act(T, g, p)
            a, b = theta(gp) if gp is not None else None, theta(p)
            if a is None or b is None:
                continue
            gb = act(T, g, b)
            if gb is None or gb.depth != a.depth:
                continue
            checked += 1
            assert value(T, gb) == value(T, a)
    assert checked > 0


def test_mass_assumption_only_warns():
    ch = chacon(3)
    report = check_factor_witness(ch, ch, IDENTITY)
    assert report.passed and len(report.warnings) == 2
    with pytest.warns(MassAssumptionWarning):
        build_factor_map(ch, ch, IDENTITY)


def test_approx_eq_examples():
    A, B = [0, 1, 2, 3], [0, 1, 2, 4]
    assert approx_eq(A, B, Fraction(3, 5))
    assert not approx_eq(A, B, Fraction(1, 2))
    assert approx_eq(A, A, Fraction(1, 1000))


def test_non_overlap():
    assert non_overlap([0, 1], [2, 3])
    assert non_overlap([5], [1, 2])
    assert not non_overlap([0, 3], [1, 2])
    with pytest.raises(PreconditionError):
        non_overlap([], [1])


def test_odometer_defect_examples():
    odo = OdometerSpec([1] + [3] * 5)
    assert all(d.raw == 0 for d in odometer_defects(triadic(5), odo, range(6)))
    d = odometer_defects(chacon(3), odo, (0, 1, 2))[0]
    assert (d.raw, d.best, d.residue) == (Fraction(1, 3), Fraction(1, 3), 0)
    assert block_defect(product_block(chacon(3), 1, 3), OdometerSpec([1]).modulus(0)).raw == 0


def test_best_residue_recenters():
    d = block_defect(product_block(CFSequence(Z, [[0], [0, 1, 2, 3]], [[1, 4, 7, 8]]), 0, 1), 3)
    assert d.raw == 1 and d.best == Fraction(1, 4) and d.residue == 1


def test_odometer_telescoping_search():
    odo = OdometerSpec([1] + [3] * 6)
    found = search_odometer_telescoping(triadic(6), odo)
    assert found.found and found.k == (0, 1, 2, 3, 4, 5, 6) and found.partial_sum == 0
    miss = search_odometer_telescoping(chacon(6), odo)
    assert not miss.found and miss.failed_at == 2
    loose = search_odometer_telescoping(chacon(6), odo, thresholds=[1] * 7)
    assert loose.found and loose.k == (0, 1, 2, 3, 4, 5, 6)
    assert loose.partial_sum <= 6


def test_merged_block_defect_is_subadditive():
    ch = chacon(6)
    for mod in (3, 9, 27):
        for a in range(1, 5):
            for b in range(a + 1, 6):
                for c in range(b + 1, 7):
                    left = block_defect(product_block(ch, a, b), mod).best
                    right = block_defect(product_block(ch, b, c), mod).best
                    merged = block_defect(product_block(ch, a, c), mod).best
                    assert merged <= left + right


def test_topological_quotient_identity():
    T = dyadic(3)
    result = check_topological_quotient(T, T, [0, 1, 2, 3], [[0]] * 3)
    assert result.passed


def test_four_adic_onto_dyadic():
    T, T2 = odometer([1, 4, 4, 4]), dyadic(3)
    A = [[2 ** n * j for j in range(2 ** n)] for n in range(1, 4)]
    result = check_topological_quotient(T, T2, [0, 1, 2, 3], A)
    assert result.passed
    assert preimage_law(result.telescoped, T2, A, result.map) == []


def test_broken_sandwich_names_level():
    T, T2 = odometer([1, 4, 4, 4]), dyadic(3)
    A = [[0, 2], [0, 4, 8, 12], [0, 9, 16, 24, 32, 40, 48, 56]]
    result = check_topological_quotient(T, T2, [0, 1, 2, 3], A)
    assert not result.passed
    assert result.report.failed("sandwich") == [3]


# the approximate-equality bullets on random sets -----------------------------------

def _random_set(rng, lo=0, hi=20):
    return set(rng.sample(range(lo, hi), rng.randint(1, 10)))


def test_calculus_bullets_random():
    from rankone.factor import inverse_bound_holds, transitivity_holds, translation_holds

    rng = random.Random(7)
    for _ in range(300):
        A, B, D = (_random_set(rng) for _ in range(3))
        eps, delta = Fraction(rng.randint(1, 9), 10), Fraction(rng.randint(1, 9), 10)
        assert inverse_bound_holds(A, B, eps)
        assert transitivity_holds(A, B, D, eps, delta)
        assert translation_holds(A, B, {0, 40, 80}, eps)
