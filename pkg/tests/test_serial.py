from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import chacon, dyadic
from rankone import CFSequence, DirectProduct, FactorWitness, FormatError, FreeGroup, IntegerLattice, IntegerLine, IsoWitness
from rankone import serial


def test_sequence_round_trip_is_byte_exact():
    for seq in (dyadic(3), chacon(3)):
        text = serial.dumps(serial.sequence_to_doc(seq))
        back = serial.sequence_from_doc(serial.loads(text))
        assert back == seq
        assert serial.dumps(serial.sequence_to_doc(back)) == text


def test_non_free_groups_round_trip():
    F2 = FreeGroup(2)
    seq = CFSequence(F2, [[()], [(), (1,)]], [[(), (1,)]])
    doc = serial.sequence_to_doc(seq)
    assert doc["C"] == [["", "a"]]
    assert serial.sequence_from_doc(doc) == seq
    P = DirectProduct([IntegerLine(), IntegerLattice(2)])
    seq = CFSequence(P, [[(0, (0, 0))], [(0, (0, 0)), (1, (0, 0))]], [[(0, (0, 0)), (1, (0, 0))]])
    assert serial.sequence_from_doc(serial.sequence_to_doc(seq)) == seq


def test_non_canonical_documents_are_rejected():
    doc = serial.sequence_to_doc(dyadic(1))
    doc["F"][1] = ["0", "01"]
    with pytest.raises(FormatError):
        serial.sequence_from_doc(doc)
    doc = serial.sequence_to_doc(dyadic(1))
    doc["C"][0] = ["0", "0"]
    with pytest.raises(FormatError):
        serial.sequence_from_doc(doc)
    with pytest.raises(FormatError):
        serial.loads("   ")
    with pytest.raises(FormatError):
        serial.sequence_from_doc({"type": "iso-witness"})


def test_rationals():
    assert serial.rational_str(Fraction(6, 4)) == "3/2"
    assert serial.parse_rational("3/2") == Fraction(3, 2)
    assert serial.parse_rational(2) == 2
    for bad in ("6/4", "1.5", True, "1/0"):
        with pytest.raises(FormatError):
            serial.parse_rational(bad)


def test_witness_documents_round_trip():
    g = IntegerLine()
    w = IsoWitness((0, 0, 2), (0, 1, 3), ([0], [0, 1], [0, 4]), ([0], [0, 2]))
    g2, back = serial.iso_witness_from_doc(serial.iso_witness_to_doc(g, w.bind(dyadic(3), dyadic(3))))
    assert g2 == g and back == w.bind(dyadic(3), dyadic(3))
    fw = FactorWitness((0, 2), [[0], [0, 2]], eps=[Fraction(1, 2), Fraction(1, 4)])
    _, back = serial.factor_witness_from_doc(serial.factor_witness_to_doc(g, fw.bind(dyadic(2), dyadic(2))))
    assert back.eps == (Fraction(1, 2), Fraction(1, 4))


def test_bad_witness_is_format_error():
    doc = {"type": "iso-witness", "group": {"kind": "IntegerLine"}, "k": [0, 1], "l": [0, 1], "J": [["0"]], "Jt": [["0"], ["0"]]}
    with pytest.raises(FormatError):
        serial.iso_witness_from_doc(doc)


def test_reports_serialize_rationals_as_strings():
    from rankone import check_witness

    T = dyadic(3)
    w = IsoWitness((0, 0, 2), (0, 1, 3), ([0], [0, 1], [0, 4]), ([0], [0, 2]))
    plain = serial.to_plain(check_witness(T, T, w), T.group)
    assert plain["rows"][0]["ratio"] == "0"
    assert plain["rows"][0]["bound"] == "4"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=6), min_size=1, max_size=6))
def test_free_words_round_trip(letters):
    F3 = FreeGroup(3)
    words = [F3.reduce(w) for w in letters]
    s = serial.encode_set(F3, sorted(set(words)))
    assert serial.decode_set(F3, s).elements == tuple(sorted(set(words)))
