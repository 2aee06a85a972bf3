"""The small group ring ``kG/I`` and its normalized unit group ``S = G x| A``.

``I`` is the ideal generated by ``(g - 1)(n - 1)`` with ``n`` in ``G'``.  When
``Phi(G') = 1`` and ``gamma_4(G) = 1`` the unit group splits over ``G`` with
an abelian complement ``A`` whose generators are indexed by exponent tuples.
We assemble ``S`` as a pc presentation (``A`` generators first) and keep the
dense quotient algebra around so every structural claim can be rechecked by
direct multiplication.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .caps import CapExceeded, get_caps
from .groupalgebra import QuotientAlgebra, small_group_ring
from .pcgroup import (Element, PcPresentation, abelian_basis, agemo, frattini_subgroup,
                      is_isomorphic_groups, lower_central_series, make_presentation,
                      normal_closure, quotient_group, subgroup_generated, subgroup_presentation,
                      trivial_subgroup)


def baginski_quotient(G: PcPresentation) -> PcPresentation:
    """``G / gamma_2(G)^p gamma_4(G)``."""
    lcs = lower_central_series(G)
    g2 = lcs[1] if len(lcs) > 1 else trivial_subgroup(G)
    g4 = lcs[3] if len(lcs) > 3 else trivial_subgroup(G)
    N = normal_closure(G, list(agemo(g2, 1).igs) + list(g4.igs))
    return quotient_group(G, N, name=f"{G.name}/B")


@dataclass(frozen=True)
class AGenerator:
    exponents: tuple     # (k_1, ..., k_m)
    order: int           # by direct powering in kG/I
    rule_order: int      # nilpotency rule evaluated in kG/I
    rule_order_abelian: int  # nilpotency rule evaluated in k[G/G']
    first_index: int     # pc generator index of this factor in S


@dataclass(eq=False)
class SmallRingGroup:
    G: PcPresentation
    S: PcPresentation
    A_gens: list
    g_basis: list        # lifts of an independent generating set of G/G'
    algebra: QuotientAlgebra = field(repr=False)
    reduced: PcPresentation | None = None

    @property
    def a_rank(self) -> int:
        return sum(_log(a.order, self.G.prime) for a in self.A_gens)

    @property
    def A_order(self) -> int:
        return self.G.prime ** self.a_rank

    def embed(self, g: Element) -> Element:
        """Image of ``g`` in ``S``."""
        return (0,) * self.a_rank + tuple(g)

    def a_element(self, j: int) -> Element:
        x = [0] * self.S.ngens
        x[self.A_gens[j].first_index] = 1
        return tuple(x)

    def unit_of(self, j: int) -> np.ndarray:
        """``1 + prod (g_i - 1)^{k_i}`` as a vector of ``kG`` (not reduced)."""
        R = self.algebra
        alg = R.alg
        x = alg.one
        for g, k in zip(self.g_basis, self.A_gens[j].exponents):
            x = alg.mul(x, alg.power(alg.bar(g), k))
        return (alg.one + x) % R.p


def _log(q: int, p: int) -> int:
    e = 0
    while q > 1:
        q //= p
        e += 1
    return e


def iterated_commutator(G: PcPresentation, g: Element, seq) -> Element:
    c = tuple(g)
    for x in seq:
        c = G.commutator(c, x)
    return c


def _rule_order(R: QuotientAlgebra, gs, ks) -> int:
    """Smallest power ``t`` of ``p`` with ``(g_i - 1)^{k_i t} = 0`` for some ``k_i != 0``."""
    alg = R.alg
    t = 1
    while True:
        for g, k in zip(gs, ks):
            if k and R.is_zero(alg.power(alg.bar(g), k * t)):
                return t
        t *= R.p


def _abelianization_ring(G, der) -> QuotientAlgebra:
    """``k[G/G']`` realised as ``kG`` modulo the ideal generated by ``n - 1``."""
    R = small_group_ring(G, der)
    alg = R.alg
    gens = [alg.bar(n) for n in der.elements() if any(n)]
    return QuotientAlgebra(alg, alg.ideal_closure(gens))


def check_hypotheses(G: PcPresentation) -> list:
    lcs = lower_central_series(G)
    problems = []
    if len(lcs) > 3 and not lcs[3].is_trivial():
        problems.append("gamma_4(G) is not trivial: reduce modulo gamma_4 first")
    der = lcs[1] if len(lcs) > 1 else trivial_subgroup(G)
    if not der.is_trivial():
        if not frattini_subgroup(subgroup_presentation(der)).is_trivial():
            problems.append("Phi(G') is not trivial: reduce modulo Phi(G') first")
    return problems


def small_unit_group(G: PcPresentation, reduced: bool = True) -> SmallRingGroup:
    problems = check_hypotheses(G)
    if problems:
        raise ValueError("; ".join(problems))
    p = G.prime
    lcs = lower_central_series(G)
    der = lcs[1] if len(lcs) > 1 else trivial_subgroup(G)
    Q, proj = quotient_group(G, der, with_projection=True)
    basis = abelian_basis(Q)
    gs = [proj.lift(x) for x, _ in basis]
    qs = [q for _, q in basis]
    R = small_group_ring(G, der)
    Rab = _abelianization_ring(G, der)
    alg = R.alg

    tuples = [ks for ks in itertools.product(*[range(q) for q in qs])
              if sum(ks) >= 2 and any(k % p for k in ks)]
    a_gens = []
    nxt = 0
    for ks in tuples:
        x = alg.one
        for g, k in zip(gs, ks):
            x = alg.mul(x, alg.power(alg.bar(g), k))
        order = R.unit_order((alg.one + x) % p)
        a_gens.append(AGenerator(ks, order, _rule_order(R, gs, ks), _rule_order(Rab, gs, ks), nxt))
        nxt += _log(order, p)
    r = nxt
    get_caps().check("unit_gens", r + G.ngens)

    def action(u: Element, ks) -> Element:
        seq = [g for g, k in zip(gs, ks) for _ in range(k)]
        return G.multiply(u, iterated_commutator(G, u, seq))

    def apply(images, x: Element) -> Element:
        y = G.identity
        for k, e in enumerate(x):
            if e:
                y = G.multiply(y, G.power(images[k], e))
        return y

    n = G.ngens
    powers, comms = {}, {}
    pad = (0,) * r
    for k in range(n):
        powers[r + k] = pad + tuple(G.power(G.gen(k), p))
        for l in range(k):
            comms[(r + k, r + l)] = pad + tuple(G.commutator(G.gen(k), G.gen(l)))
    for a in a_gens:
        images = [action(G.gen(k), a.exponents) for k in range(n)]
        for i in range(_log(a.order, p)):
            idx = a.first_index + i
            nxt_pow = [0] * (r + n)
            if i + 1 < _log(a.order, p):
                nxt_pow[idx + 1] = 1
            powers[idx] = tuple(nxt_pow)
            for k in range(n):
                # [g, a] = g^-1 g^a
                comms[(r + k, idx)] = pad + tuple(G.multiply(G.inverse(G.gen(k)), images[k]))
            images = [apply(images, im) for im in images]
    S = make_presentation(p, r + n, powers, comms, name=f"S({G.name})", check=True)
    out = SmallRingGroup(G, S, a_gens, gs, R)
    if reduced:
        out.reduced = _reduced_form(out)
    return out


def _reduced_form(sr: SmallRingGroup):
    """``S / (Z(S) cap A)`` when ``A`` is small enough to enumerate."""
    S, r = sr.S, sr.a_rank
    p = S.prime
    if p ** r > get_caps().conjugacy:
        return None
    central = []
    for ex in itertools.product(range(p), repeat=r):
        a = tuple(ex) + (0,) * sr.G.ngens
        if all(S.commutator(a, g) == S.identity for g in S.gens):
            central.append(a)
    K = subgroup_generated(S, central)
    return quotient_group(S, K, name=f"{S.name}/Z(S)A")


def action_mismatches(sr: SmallRingGroup) -> list:
    """Pairs (A-generator, G-generator) where the commutator formula disagrees
    with conjugation computed directly in ``kG/I``."""
    R = sr.algebra
    alg = R.alg
    G = sr.G
    bad = []
    for j, a in enumerate(sr.A_gens):
        u = sr.unit_of(j)
        u_inv = R.power(u, a.order - 1)
        seq = [g for g, k in zip(sr.g_basis, a.exponents) for _ in range(k)]
        for k in range(G.ngens):
            g = G.gen(k)
            direct = R.mul(R.mul(u_inv, alg.basis(g)), u)
            formula = alg.basis(G.multiply(g, iterated_commutator(G, g, seq)))
            if not R.equal(direct, formula):
                bad.append((a.exponents, k))
    return bad


def a_commutes(sr: SmallRingGroup) -> bool:
    """``A`` is abelian, checked by multiplying the units in ``kG/I``."""
    R = sr.algebra
    us = [sr.unit_of(j) for j in range(len(sr.A_gens))]
    return all(R.equal(R.mul(x, y), R.mul(y, x)) for x, y in itertools.combinations(us, 2))


def unit_group_order(sr: SmallRingGroup) -> int:
    """``|V(kG/I)| = p^(dim - 1)``."""
    return sr.G.prime ** (sr.algebra.dim - 1)


# ---------------------------------------------------------------------------
# normal copies
# ---------------------------------------------------------------------------

def _min_generators(H: PcPresentation) -> list:
    fr = set(frattini_subgroup(H).depths)
    return [H.gen(k) for k in range(H.ngens) if k not in fr]


class _Budget(Exception):
    pass


def contains_normal_copy(sr: SmallRingGroup | PcPresentation, H: PcPresentation,
                         budget: int | None = None) -> str:
    """``"yes"``, ``"no"`` or ``"unknown"``: does ``S`` have a normal subgroup
    isomorphic to ``H``?  ``"no"`` means the search space was exhausted."""
    if isinstance(sr, SmallRingGroup):
        S = sr.S
        if H.order != sr.G.order:
            raise ValueError("H must have the order of G")
    else:
        S = sr
    budget = get_caps().search if budget is None else budget
    target = H.order
    hg = _min_generators(H)
    orders = [H.element_order(h) for h in hg]
    if not hg:
        return "yes"
    steps = [0]

    def tick():
        steps[0] += 1
        if steps[0] > budget:
            raise _Budget

    by_order: dict = {}
    first_reps = None
    if S.order <= get_caps().conjugacy:
        en = S.enum
        lab = en.class_labels
        ords = en.orders
        for i, x in enumerate(en.elements):
            by_order.setdefault(int(ords[i]), []).append(x)
        first_reps = [en.elements[i] for i in sorted(set(lab.tolist()))
                      if int(ords[i]) == orders[0]]

    def candidates(o, first):
        if first and first_reps is not None:
            return iter(first_reps)
        if by_order:
            return iter(by_order.get(o, []))
        return (x for x in S.elements() if S.element_order(x) == o)

    def extend(chosen, sub):
        i = len(chosen)
        if i == len(hg):
            tick()
            if sub.order == target and sub.is_normal():
                return is_isomorphic_groups(subgroup_presentation(sub), H)
            return False
        for x in candidates(orders[i], i == 0):
            tick()
            if i and sub.contains(x):
                continue
            if normal_closure(S, list(chosen) + [x]).order > target:
                continue
            nsub = subgroup_generated(S, list(sub.igs) + [x])
            if nsub.order > target:
                continue
            if extend(chosen + [x], nsub):
                return True
        return False

    try:
        found = extend([], trivial_subgroup(S))
    except (_Budget, CapExceeded):
        return "unknown"
    return "yes" if found else "no"


def format_report(sr: SmallRingGroup, verdicts=None) -> str:
    lines = [f"group {sr.G.name}", f"order_G {sr.G.order}", f"order_S {sr.S.order}",
             f"order_A {sr.A_order}"]
    for a in sr.A_gens:
        ks = " ".join(map(str, a.exponents))
        lines.append(f"a_gen ({ks}) order {a.order} rule {a.rule_order} "
                     f"rule_abelianized {a.rule_order_abelian}")
    if sr.reduced is not None:
        lines.append(f"order_reduced {sr.reduced.order}")
    for name, v in (verdicts or {}).items():
        lines.append(f"contains {name} {v}")
    return "\n".join(lines) + "\n"
