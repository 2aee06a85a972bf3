import itertools

import pytest

from mipkit.corpus import corpus_groups, named
from mipkit.pcgroup import is_isomorphic_groups, subgroup_presentation
from mipkit.smallring import (a_commutes, action_mismatches, check_hypotheses,
                              contains_normal_copy, format_report, small_unit_group,
                              unit_group_order)

import oracles

OK_GROUPS = [G for G in corpus_groups(8) + corpus_groups(16) if not check_hypotheses(G)] + [
    named("Heis27"), named("Ext27")]


def test_klein_four():
    sr = small_unit_group(named("C2xC2"))
    assert sr.S.order == 8 and sr.A_order == 2
    assert sr.S.is_abelian()
    assert all(not any(sr.S.power(x, 2)) for x in sr.S.elements())


def test_d8_hypotheses_hold():
    assert check_hypotheses(named("D8")) == []
    sr = small_unit_group(named("D8"))
    assert sr.S.order == 16 and sr.A_order == 2


def test_gamma4_violation_is_reported():
    bad = [G for G in corpus_groups(16) if check_hypotheses(G)]
    assert bad
    for G in bad:
        with pytest.raises(ValueError):
            small_unit_group(G)
    big = [G for G in corpus_groups(32) if any("gamma_4" in m for m in check_hypotheses(G))]
    assert big
    with pytest.raises(ValueError, match="gamma_4"):
        small_unit_group(big[0])


@pytest.mark.parametrize("G", OK_GROUPS, ids=lambda g: g.name)
def test_unit_group_order_matches_brute_force(G):
    sr = small_unit_group(G, reduced=False)
    dim = oracles.brute_small_ring_dim(G)
    assert sr.S.order == G.prime ** (dim - 1) == unit_group_order(sr)


@pytest.mark.parametrize("G", OK_GROUPS, ids=lambda g: g.name)
def test_action_agrees_with_conjugation(G):
    sr = small_unit_group(G, reduced=False)
    assert action_mismatches(sr) == []
    assert a_commutes(sr)


@pytest.mark.parametrize("G", OK_GROUPS, ids=lambda g: g.name)
def test_generator_orders(G):
    sr = small_unit_group(G, reduced=False)
    total = 1
    for j, a in enumerate(sr.A_gens):
        assert a.rule_order_abelian == a.order
        assert sr.S.element_order(sr.a_element(j)) == a.order
        assert sr.algebra.unit_order(sr.unit_of(j)) == a.order
        total *= a.order
    assert sr.A_order == total


def test_rule_in_full_quotient_can_overshoot():
    sr = small_unit_group(named("Q8"))
    a = sr.A_gens[0]
    assert (a.order, a.rule_order, a.rule_order_abelian) == (2, 4, 2)


@pytest.mark.parametrize("G", OK_GROUPS, ids=lambda g: g.name)
def test_embedding_is_a_homomorphism(G):
    sr = small_unit_group(G, reduced=False)
    for x, y in itertools.product(list(G.elements())[:8], repeat=2):
        assert sr.S.multiply(sr.embed(x), sr.embed(y)) == sr.embed(G.multiply(x, y))


def _brute_contains(S, H):
    """Normal subgroups of ``S`` of order ``|H|`` isomorphic to ``H``, found by
    closing all pairs and triples of elements."""
    els = oracles.elements(S)
    seen = set()
    for k in (1, 2, 3):
        for gens in itertools.combinations(els, k):
            sub = oracles.closure(S, list(gens))
            if len(sub) != H.order or sub in seen:
                continue
            seen.add(sub)
            if all(S.multiply(S.inverse(g), S.multiply(u, g)) in sub for g in els for u in sub):
                from mipkit.pcgroup import subgroup_generated
                P = subgroup_presentation(subgroup_generated(S, list(sub)))
                if is_isomorphic_groups(P, H):
                    return True
    return False


@pytest.mark.parametrize("gname", ["C2xC2", "C4", "D8", "Q8"])
def test_contains_normal_copy_matches_brute_force(gname):
    G = named(gname)
    sr = small_unit_group(G)
    for H in corpus_groups(G.order):
        want = "yes" if _brute_contains(sr.S, H) else "no"
        assert contains_normal_copy(sr, H) == want
    assert contains_normal_copy(sr, G) == "yes"


def test_contains_budget_gives_unknown():
    sr = small_unit_group(named("D8"))
    assert contains_normal_copy(sr, named("Q8"), budget=3) == "unknown"


def test_contains_rejects_wrong_order():
    with pytest.raises(ValueError):
        contains_normal_copy(small_unit_group(named("D8")), named("C4"))


def test_report():
    text = format_report(small_unit_group(named("D8")), {"Q8": "no"})
    lines = text.splitlines()
    assert lines[:4] == ["group D8", "order_G 8", "order_S 16", "order_A 2"]
    assert "a_gen (1 1) order 2 rule 2 rule_abelianized 2" in lines
    assert lines[-1] == "contains Q8 no"
