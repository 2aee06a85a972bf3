"""The ten acceptance criteria, one test each.

Every test prints ``criterion N: PASS|FAIL <detail>`` (also collected in the
"acceptance criteria" section of the terminal summary) and then asserts.
"""
import itertools
import time
import warnings

import numpy as np
import pytest

from mipkit.algtable import (associativity_failures, build_aug_table, center_ideal_basis,
                             element_weight, phi_count, psi_count)
from mipkit.canon import (canonical_form, iso_oracle, random_filtered_basis_change,
                          random_nilpotent_table)
from mipkit.caps import CapExceeded
from mipkit.corpus import corpus_groups, named
from mipkit.driver import Split, bound_rows, format_bound_rows, mip_bin_split
from mipkit.invariants import fingerprint
from mipkit.jennings import hilbert_series, jennings_series, weight_of
from mipkit.pcgroup import frattini_subgroup, is_isomorphic_groups
from mipkit.smallring import (a_commutes, action_mismatches, check_hypotheses, small_unit_group)

import oracles

ORDERS_2 = [2, 4, 8, 16, 32]
ORDERS_ODD = [27, 81, 125]


@pytest.fixture
def report(request, capsys):
    def emit(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
        request.config.acceptance_lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def _corpus(orders):
    return [G for o in orders for G in corpus_groups(o)]


def test_criterion_1_jennings_dimensions(report):
    t0 = time.perf_counter()
    bad = []
    groups = _corpus(ORDERS_2 + ORDERS_ODD)
    for G in groups:
        jd = jennings_series(G)
        t = build_aug_table(G, jd.nil_index)
        formula = hilbert_series(jd)[1:]
        while formula and formula[-1] == 0:
            formula.pop()
        if t.dim != G.order - 1 or not t.complete or sum(formula) != G.order - 1:
            bad.append(G.name)
        elif formula != oracles.dense_graded_dims(G):
            bad.append(G.name)
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 60,
           f"{len(groups)} groups, basis size |G|-1 and graded dims vs kG, {dt:.1f}s; bad={bad}")


def test_criterion_2_weights(report):
    groups = _corpus([2, 4, 8, 16, 32, 27])
    checked, bad = 0, []
    for G in groups:
        jd = jennings_series(G)
        t = build_aug_table(G, jd.nil_index)
        for g in G.elements():
            if any(g):
                checked += 1
                if weight_of(jd, g) != element_weight(t, G, g):
                    bad.append((G.name, g))
    report(2, not bad, f"{checked} elements in {len(groups)} groups; mismatches={bad[:5]}")


def test_criterion_3_truncation(report):
    groups = _corpus(ORDERS_2 + ORDERS_ODD)
    pairs, bad = 0, []
    for G in groups:
        top = jennings_series(G).nil_index
        tables = {s: build_aug_table(G, s) for s in range(2, top + 1)}
        for s, s2 in itertools.combinations(range(2, top + 1), 2):
            pairs += 1
            if tables[s2].restrict(s) != tables[s]:
                bad.append((G.name, s, s2))
    report(3, not bad, f"{pairs} level pairs in {len(groups)} groups; bad={bad[:5]}")


def test_criterion_4_associativity(report):
    rng = np.random.default_rng(4)
    groups = _corpus(ORDERS_2 + ORDERS_ODD)
    exhaustive = sampled = 0
    bad = []
    for G in groups:
        t = build_aug_table(G, jennings_series(G).nil_index)
        if t.dim <= 40:
            exhaustive += 1
            fails = associativity_failures(t, limit=1)
        else:
            sampled += 1
            trip = [tuple(int(x) for x in rng.integers(0, t.dim, 3)) for _ in range(10**4)]
            fails = associativity_failures(t, trip, limit=1)
        if fails:
            bad.append((G.name, fails[0]))
    report(4, not bad, f"{exhaustive} tables exhaustive, {sampled} with 10^4 random triples; bad={bad}")


def test_criterion_5_canonical_forms(report):
    t0 = time.perf_counter()
    algebras = [random_nilpotent_table((2, 3)[i % 2], 1000 + i) for i in range(200)]
    certs = [canonical_form(a) for a in algebras]
    changed_bad, oracle_bad = [], []
    for i, a in enumerate(algebras):
        for k in range(20):
            b = random_filtered_basis_change(a, 7919 * i + k)
            if canonical_form(b) != certs[i]:
                changed_bad.append((i, k))
            if k < 2 and not iso_oracle(a, b):
                oracle_bad.append((i, k))
    pairs = 0
    for i, j in itertools.combinations(range(len(algebras)), 2):
        a, b = algebras[i], algebras[j]
        if a.p != b.p or a.dim != b.dim:
            if certs[i] == certs[j]:
                oracle_bad.append((i, j))
            continue
        pairs += 1
        if (certs[i] == certs[j]) != iso_oracle(a, b):
            oracle_bad.append((i, j))
    classes = len({c.digest for c in certs})
    dt = time.perf_counter() - t0
    report(5, not changed_bad and not oracle_bad,
           f"200 algebras ({classes} classes), 4000 basis changes, {pairs} oracle pairs, "
           f"{dt:.0f}s; bad={changed_bad[:3] + oracle_bad[:3]}")


def test_criterion_6_d8_q8(report):
    D, Q = named("D8"), named("Q8")
    res = mip_bin_split([D, Q])
    tD, tQ = build_aug_table(D, 3), build_aug_table(Q, 3)
    ok = (res.verdict == Split(3) and res.jennings_bounds[0][1] == 2
          and tD.dim == tQ.dim == 4 and not iso_oracle(tD, tQ))
    report(6, ok, f"verdict {res.verdict}, Jennings bound {res.jennings_bounds[0][1]}, "
                  f"oracle on dim-{tD.dim} tables: non-isomorphic")


def test_criterion_7_small_orders(report):
    counts = {"fingerprint": 0, "split": 0}
    bad = []
    for order in (16, 27):
        gs = corpus_groups(order)
        fps = [fingerprint(g) for g in gs]
        for i, j in itertools.combinations(range(len(gs)), 2):
            if is_isomorphic_groups(gs[i], gs[j]):
                continue
            if not fps[i].matches(fps[j]):
                counts["fingerprint"] += 1
                continue
            res = mip_bin_split([gs[i], gs[j]])
            nil = max(jennings_series(g).nil_index for g in (gs[i], gs[j]))
            if isinstance(res.verdict, Split) and res.verdict.level <= nil:
                counts["split"] += 1
            else:
                bad.append((gs[i].name, gs[j].name, str(res.verdict)))
    report(7, not bad, f"pairs by fingerprint {counts['fingerprint']}, by Split {counts['split']}; "
                       f"unresolved={bad}")


def test_criterion_8_small_group_ring(report):
    sr = small_unit_group(named("C2xC2"))
    S = sr.S
    klein_ok = (S.order == 8 and S.is_abelian()
                and all(not any(S.power(x, 2)) for x in S.elements()))
    checked, bad = [], []
    for G in _corpus([8, 16, 27, 32]):
        d = G.ngens - frattini_subgroup(G).size_exp
        if d != 2 or G.is_abelian() or check_hypotheses(G):
            continue
        try:
            sr = small_unit_group(G, reduced=False)
        except CapExceeded:
            continue
        checked.append(G.name)
        if (sr.S.order != G.order * sr.A_order or not a_commutes(sr) or action_mismatches(sr)):
            bad.append(G.name)
    report(8, klein_ok and checked and not bad,
           f"C2xC2 gives elementary abelian S of order {S.order}; "
           f"{len(checked)} non-abelian 2-generated groups checked; bad={bad}")


def test_criterion_9_counting_maps(report):
    C2 = named("C2")
    full = build_aug_table(C2, 2).with_complete()
    examples = phi_count(full, 1, 1, 1) == 2 and psi_count(C2, full, 1) == 2
    n_phi = n_psi = 0
    bad = []
    for G in _corpus([2, 4, 8, 16, 3, 9, 27]):
        jd = jennings_series(G)
        t = build_aug_table(G, jd.nil_index)
        for n, m, l in itertools.product(range(1, 4), range(1, 3), range(0, 2)):
            if G.prime ** sum(1 for w in t.weights if n <= w < n + m) > 4096:
                continue
            if G.prime ** (sum(1 for w in t.weights if w >= n)) > 3 ** 9:
                continue
            n_phi += 1
            if phi_count(t, n, m, l) != oracles.dense_phi(G, n, m, l):
                bad.append(("phi", G.name, n, m, l))
        for n in range(1, jd.nil_index):
            if G.prime ** len(center_ideal_basis(G, t, n)) > 3 ** 8:
                continue
            n_psi += 1
            if psi_count(G, t, n) != oracles.dense_psi(G, n):
                bad.append(("psi", G.name, n))
    report(9, examples and not bad,
           f"C2 examples {'ok' if examples else 'wrong'}; {n_phi} phi and {n_psi} psi counts "
           f"vs dense kG; bad={bad[:5]}")


def test_criterion_10_bound_report(report):
    rows = []
    unresolved = []
    for order, budget in ((27, None), (81, 3000)):
        gs = corpus_groups(order)
        for G, H in itertools.combinations(gs, 2):
            res = mip_bin_split([G, H], budget=budget)
            if not isinstance(res.verdict, Split):
                unresolved.append((G.name, H.name))
                continue
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                rows += bound_rows(res, [G, H])
            for w in caught:
                print(f"WARNING {w.message}")
    text = format_bound_rows(rows)
    print(text)
    violated = [r for r in rows if not r.odd_ok or not r.bkrw_ok]
    # a violation would answer an open question; it is reported, not asserted
    report(10, bool(rows), f"{len(rows)} odd-p split pairs, odd-p bound held for "
                           f"{len(rows) - len(violated)}, VIOLATED={[(r.g, r.h) for r in violated]}; "
                           f"{len(unresolved)} order-81 pairs not split within budget")
