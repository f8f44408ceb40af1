import pytest
from hypothesis import given, settings, strategies as st

from rankone import DirectProduct, DomainError, FormatError, FreeGroup, IntegerLattice, IntegerLine
from rankone.groups import group_from_dict, identity, inverse, multiply

Z = IntegerLine()
Z2 = IntegerLattice(2)
F2 = FreeGroup(2)
P = DirectProduct([Z, F2])


def test_integer_product_and_inverse():
    assert multiply(Z, 2, 3) == 5
    assert inverse(Z, 5) == -5
    assert identity(Z) == 0


def test_free_group_reduces_words():
    g1g2 = F2.decode("ab")
    assert F2.encode(multiply(F2, g1g2, F2.decode("Ba"))) == "aa"
    assert F2.encode(inverse(F2, g1g2)) == "BA"
    assert identity(F2) == ()
    assert F2.encode(()) == ""


def test_lattice_is_componentwise():
    assert multiply(Z2, (1, 0), (0, 1)) == (1, 1)
    assert identity(Z2) == (0, 0)
    assert Z2.encode((1, -2)) == "(1,-2)"
    assert Z2.decode("(1,-2)") == (1, -2)


def test_descriptor_mismatch_is_domain_error():
    with pytest.raises(DomainError):
        multiply(Z, 1, (0, 1))
    with pytest.raises(DomainError):
        multiply(Z2, (1,), (0, 1))


def test_descriptor_invariants():
    with pytest.raises(DomainError):
        IntegerLattice(0)
    with pytest.raises(DomainError):
        FreeGroup(0)
    with pytest.raises(DomainError):
        DirectProduct([Z])


def test_unreduced_word_is_rejected():
    assert not F2.is_element((1, -1))
    with pytest.raises(FormatError):
        F2.decode("aA")
    with pytest.raises(FormatError):
        F2.decode("c")


def test_product_encoding_round_trip():
    x = (3, F2.decode("aB"))
    assert P.encode(x) == "<3;aB>"
    assert P.decode("<3;aB>") == x
    nested = DirectProduct([P, Z2])
    y = (x, (1, 2))
    assert nested.decode(nested.encode(y)) == y


def test_descriptor_dict_round_trip():
    for g in (Z, Z2, F2, P, DirectProduct([P, Z])):
        assert group_from_dict(g.to_dict()) == g
    with pytest.raises(FormatError):
        group_from_dict({"kind": "Matrix"})


# properties -----------------------------------------------------------------

ints = st.integers(-50, 50)
words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8).map(F2.reduce)
vectors = st.tuples(ints, ints)
pairs = st.tuples(ints, words)

GROUPS = [(Z, ints), (Z2, vectors), (F2, words), (P, pairs)]


@pytest.mark.parametrize("group,elements", GROUPS, ids=["Z", "Z2", "F2", "ZxF2"])
@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_group_axioms(group, elements, data):
    a, b, c = (data.draw(elements) for _ in range(3))
    mul, inv, e = group.mul, group.inv, group.identity()
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, e) == a == mul(e, a)
    assert mul(a, inv(a)) == e == mul(inv(a), a)
    assert group.is_element(mul(a, b))
    assert group.decode(group.encode(a)) == a


@settings(max_examples=300, deadline=None)
@given(words, words)
def test_free_products_are_reduced(a, b):
    w = F2.mul(a, b)
    assert all(w[i] != -w[i + 1] for i in range(len(w) - 1))


@settings(max_examples=200, deadline=None)
@given(st.lists(words, min_size=3, max_size=3))
def test_canonical_order_is_strict_total(ws):
    a, b, c = ws
    assert (a < b) + (b < a) + (a == b) == 1
    if a < b and b < c:
        assert a < c
