import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mipkit.algtable import build_aug_table, ideal_power_dims
from mipkit.canon import (BudgetExceeded, CERT_HEADER, canonical_form, canonical_form_exhaustive,
                          certificate_from_bytes, filtered_basis_change, iso_oracle,
                          random_filtered_basis_change, random_nilpotent_table)
from mipkit.caps import CapExceeded
from mipkit.corpus import corpus_groups, named
from mipkit.jennings import jennings_bound, jennings_series

import oracles


def test_c4_vs_klein():
    a = canonical_form(build_aug_table(named("C4"), 3), 3)
    b = canonical_form(build_aug_table(named("C2xC2"), 3), 3)
    assert a != b
    assert not iso_oracle(build_aug_table(named("C4"), 4), build_aug_table(named("C2xC2"), 4))


def test_d8_q8_split_at_three():
    tD, tQ = build_aug_table(named("D8"), 3), build_aug_table(named("Q8"), 3)
    assert tD.dim == tQ.dim == 4
    assert canonical_form(tD, 3) != canonical_form(tQ, 3)
    assert canonical_form(tD, 2) == canonical_form(tQ, 2)
    assert not iso_oracle(tD, tQ)


def test_certificate_bytes():
    t = build_aug_table(named("D8"), 4)
    c = canonical_form(t, 4)
    assert c.canonical_bytes.startswith(f"{CERT_HEADER}\nlevel 4\n".encode())
    assert certificate_from_bytes(c.canonical_bytes) == c
    assert len(c.digest) == 64
    assert c.table.dim == t.dim


def test_identity_change_is_identity():
    t = build_aug_table(named("Heis27"), 4)
    assert filtered_basis_change(t, np.eye(t.dim, dtype=np.int64)) == t


def test_basis_change_must_respect_filtration():
    t = build_aug_table(named("C4"), 4)
    P = np.eye(3, dtype=np.int64)
    P[2, 0] = 1
    with pytest.raises(ValueError):
        filtered_basis_change(t, P)


def test_budget_is_explicit():
    t = build_aug_table(corpus_groups(32)[0], 3)
    with pytest.raises(BudgetExceeded) as info:
        canonical_form(t, 3, budget=2)
    assert isinstance(info.value, CapExceeded) and info.value.level >= 2


def test_oracle_cap():
    t = build_aug_table(corpus_groups(16)[0], 3)
    with pytest.raises(CapExceeded):
        iso_oracle(t, t)


def test_exhaustive_agrees_with_layered():
    for G in (named("D8"), named("Q8"), named("C4xC2")):
        t = build_aug_table(G, 4)
        assert canonical_form(t, 4) == canonical_form_exhaustive(t, 4)
    for seed in range(30):
        t = random_nilpotent_table(2, seed, max_dim=4)
        assert canonical_form(t) == canonical_form_exhaustive(t)


@pytest.mark.parametrize("G", corpus_groups(8) + corpus_groups(27), ids=lambda g: g.name)
def test_certificates_survive_representation_change(G):
    H = oracles.re_present(G, 11)
    s = min(jennings_series(G).nil_index, 5)
    tG, tH = build_aug_table(G, s), build_aug_table(H, s)
    checked = 0
    for n in range(2, s + 1):
        try:
            budget = None if n <= 3 else 8000
            a, b = canonical_form(tG, n, budget=budget), canonical_form(tH, n, budget=budget)
        except BudgetExceeded:
            break
        assert a == b
        checked = n
    assert checked >= 3


def test_levels_up_to_jennings_bound_agree():
    checked = 0
    for order in (8, 16, 27):
        for G, H in itertools.combinations(corpus_groups(order), 2):
            s = jennings_bound(G, H)
            if s < 2:
                continue
            tG, tH = build_aug_table(G, s), build_aug_table(H, s)
            try:
                a, b = canonical_form(tG, s, budget=5000), canonical_form(tH, s, budget=5000)
            except BudgetExceeded:
                continue
            assert a == b
            checked += 1
    assert checked >= 20


def test_monotone_refinement_on_pairs():
    groups = corpus_groups(8) + corpus_groups(27)
    for G, H in itertools.combinations(groups, 2):
        if G.order != H.order:
            continue
        top = min(jennings_series(G).nil_index, jennings_series(H).nil_index, 4)
        tG, tH = build_aug_table(G, top), build_aug_table(H, top)
        differ = False
        for n in range(2, top + 1):
            try:
                now = canonical_form(tG, n, budget=2000) != canonical_form(tH, n, budget=2000)
            except BudgetExceeded:
                break
            assert now or not differ
            differ = now


@given(st.sampled_from([2, 3]), st.integers(0, 10**6), st.integers(0, 10**6))
def test_certificate_invariant_under_basis_change(p, seed, seed2):
    t = random_nilpotent_table(p, seed)
    u = random_filtered_basis_change(t, seed2)
    assert ideal_power_dims(u) == ideal_power_dims(t)
    assert canonical_form(t) == canonical_form(u)
    assert iso_oracle(t, u)


@given(st.sampled_from([2, 3]), st.integers(0, 10**6), st.integers(0, 10**6))
def test_certificate_equality_iff_oracle(p, s1, s2):
    a = random_nilpotent_table(p, s1, max_dim=4)
    b = random_nilpotent_table(p, s2, max_dim=4)
    same = canonical_form(a) == canonical_form(b)
    if a.dim != b.dim:
        assert not same
    else:
        assert same == iso_oracle(a, b)
