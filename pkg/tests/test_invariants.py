import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mipkit.caps import Caps, set_caps
from mipkit.corpus import corpus_groups, named
from mipkit.invariants import (ENTRY_KEYS, UNCOMPUTED, Cond, IsoType, _Labeler, bin_groups,
                               fingerprint, format_bins, format_fingerprint, iso_type,
                               power_class_counts, quillen_invariant, roggenkamp_parameter,
                               values_equal)
from mipkit.pcgroup import abelian_invariants
from mipkit.smallring import baginski_quotient

import oracles

SMALL = corpus_groups(8) + corpus_groups(16) + corpus_groups(27)


def test_entry_keys_in_order():
    fp = fingerprint(named("D8"))
    assert tuple(k for k, _ in fp.entries) == ENTRY_KEYS


def test_c4_and_klein_differ_at_a():
    a, b = fingerprint(named("C4")), fingerprint(named("C2xC2"))
    assert "a" in a.differences(b)
    assert a["a"] == [2] and b["a"] == [2, 2]


def test_heisenberg_and_exponent_nine_differ_at_f():
    h, e = fingerprint(named("Heis27")), fingerprint(named("Ext27"))
    assert "f" in h.differences(e)
    assert h["f"] == [11, 1] and e["f"] == [11, 3, 1]


def test_d8_q8_separated():
    d, q = fingerprint(named("D8")), fingerprint(named("Q8"))
    assert d["h"] == 2 and q["h"] == 1
    assert d["g"] == 9 and q["g"] == 7
    assert {"d", "g", "h"} <= set(d.differences(q))
    assert len(bin_groups([named("D8"), named("Q8")])) == 2


@pytest.mark.parametrize("G", SMALL, ids=lambda g: g.name)
def test_roggenkamp_matches_brute_force(G):
    assert roggenkamp_parameter(G) == oracles.brute_roggenkamp(G)


@pytest.mark.parametrize("G", SMALL, ids=lambda g: g.name)
def test_quillen_matches_brute_force(G):
    assert quillen_invariant(G) == oracles.brute_quillen(G)


@pytest.mark.parametrize("G", SMALL, ids=lambda g: g.name)
def test_power_class_counts_match_brute_force(G):
    assert power_class_counts(G) == oracles.brute_power_class_counts(G)


@pytest.mark.parametrize("G", corpus_groups(8) + corpus_groups(16), ids=lambda g: g.name)
def test_jennings_entry_predicts_graded_dims(G):
    ranks = [row[0] for row in fingerprint(G)["e"]]
    predicted = oracles.poincare_from_ranks(ranks, G.prime)
    while predicted and predicted[-1] == 0:
        predicted.pop()
    assert predicted == oracles.dense_graded_dims(G)


def test_abelian_invariant_entries_match_brute_force():
    for G in SMALL:
        if G.is_abelian():
            assert sorted(fingerprint(G)["b"]) == sorted(oracles.brute_abelian_invariants(G))


@pytest.mark.parametrize("order", [8, 16, 27])
def test_small_orders_fully_binned(order):
    bins = bin_groups(corpus_groups(order))
    assert all(len(b) == 1 for b in bins)
    assert sum(len(b) for b in bins) == len(corpus_groups(order))


def test_bin_rejects_mixed_orders():
    with pytest.raises(ValueError):
        bin_groups([named("C4"), named("D8")])


def test_conditional_and_uncomputed_compare_equal():
    assert values_equal(Cond(False), Cond(True, 3))
    assert not values_equal(Cond(True, 2), Cond(True, 3))
    assert values_equal(UNCOMPUTED, [1, 2])
    assert values_equal(iso_type(named("D8")), iso_type(oracles.re_present(named("D8"), 3)))
    assert not values_equal(iso_type(named("D8")), iso_type(named("Q8")))


def test_cap_hit_gives_uncomputed():
    set_caps(Caps(subgroups=2))
    try:
        fp = fingerprint(named("C2xC2xC2"))
    finally:
        set_caps(None)
    assert fp["h"] is UNCOMPUTED


def test_baginski_quotient_examples():
    assert baginski_quotient(named("D8")).order == 8
    assert baginski_quotient(named("Heis27")).order == 27
    assert baginski_quotient(named("C4xC2")).order == 8
    # maximal class of order 16: G' = C4, so the quotient has order 8
    for G in corpus_groups(16):
        der = oracles.brute_derived(G)
        if len(der) == 4 and len({G.power(x, 2) for x in der}) == 2:
            assert baginski_quotient(G).order == 8


def test_format_fingerprint():
    text = format_fingerprint(fingerprint(named("D8")), _Labeler())
    lines = text.splitlines()
    assert lines[0] == "group = D8" and lines[1] == "order = 8"
    assert "h = 2" in lines and "i = NotApplicable" in lines
    assert "d = type[order=8,id=T1]" in lines
    assert lines[-1] == "pp_milies_interpretation = class_size"


def test_format_bins():
    out = format_bins(bin_groups([named("C4"), named("C2xC2")]))
    assert out == "bin 1 [solved_by_invariants]: C4\nbin 2 [solved_by_invariants]: C2xC2\n"


@settings(max_examples=15)
@given(st.sampled_from(corpus_groups(8) + corpus_groups(27)), st.integers(0, 10**6))
def test_fingerprint_independent_of_presentation(G, seed):
    H = oracles.re_present(G, seed)
    assert fingerprint(G).matches(fingerprint(H))
