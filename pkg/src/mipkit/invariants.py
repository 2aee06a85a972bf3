"""Group-theoretical invariants of modular group algebras and binning.

A fingerprint is an ordered list of labelled entries ``a`` ... ``s``.  Values
are plain data (lists, integers), :class:`IsoType` for non-abelian quotient
types, :class:`Cond` for entries guarded by a hypothesis, or
:data:`UNCOMPUTED` when an enumeration cap was hit.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any

from .caps import CapExceeded
from .jennings import jennings_series
from .pcgroup import (IsomorphismUndecided, PcPresentation, Subgroup, abelian_invariants, agemo,
                      centralizer, commutator_subgroup, conjugacy_classes, exponent,
                      frattini_subgroup, intersection, is_isomorphic_groups,
                      lower_central_series, nilpotency_class, normal_closure, quotient_group,
                      section, standard_subgroups, subgroup_generated, subgroup_presentation,
                      trivial_subgroup, whole_group)

PP_MILIES_INTERPRETATION = "class_size"

ENTRY_KEYS = tuple("abcdefghijklmnopqrs")


class _Uncomputed:
    def __repr__(self):
        return "Uncomputed"


UNCOMPUTED = _Uncomputed()


@dataclass(frozen=True, eq=False)
class IsoType:
    """Isomorphism type of a group, compared by isomorphism testing."""

    group: PcPresentation
    summary: tuple

    def matches(self, other: "IsoType") -> bool:
        if self.summary != other.summary:
            return False
        if self.summary[1] is not None:  # abelian: invariants decide
            return True
        return is_isomorphic_groups(self.group, other.group)

    def __repr__(self):
        return f"IsoType{self.summary}"


def iso_type(g: PcPresentation) -> IsoType:
    if g.is_abelian():
        return IsoType(g, (g.order, tuple(abelian_invariants(g))))
    lcs = lower_central_series(g)
    der = lcs[1]
    ab = quotient_group(g, der)
    return IsoType(g, (g.order, None, tuple(abelian_invariants(ab)), len(lcs) - 1, exponent(g),
                       len(conjugacy_classes(g))))


@dataclass(frozen=True)
class Cond:
    """Conditional entry: ``value`` only when ``applicable``."""

    applicable: bool
    value: Any = None

    def __repr__(self):
        return f"Applicable({self.value!r})" if self.applicable else "NotApplicable"


def values_equal(a, b) -> bool:
    if a is UNCOMPUTED or b is UNCOMPUTED:
        return True
    if isinstance(a, Cond) and isinstance(b, Cond):
        if not (a.applicable and b.applicable):
            return True
        return values_equal(a.value, b.value)
    if isinstance(a, IsoType) and isinstance(b, IsoType):
        try:
            return a.matches(b)
        except IsomorphismUndecided:
            return True
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return a == b


@dataclass(frozen=True)
class Fingerprint:
    name: str
    order: int
    prime: int
    entries: tuple  # ((key, value), ...)

    def __getitem__(self, key):
        return dict(self.entries)[key]

    def differences(self, other: "Fingerprint") -> list:
        if self.order != other.order or self.prime != other.prime:
            return ["order"]
        return [k for (k, a), (_, b) in zip(self.entries, other.entries) if not values_equal(a, b)]

    def matches(self, other: "Fingerprint") -> bool:
        return not self.differences(other)


# ---------------------------------------------------------------------------
# individual invariants
# ---------------------------------------------------------------------------

def power_class_counts(G: PcPresentation) -> list:
    """Number of classes consisting of ``p^n``-th powers for ``n = 0, 1, ...``."""
    en = G.enum
    lab = en.class_labels
    q, out = 1, []
    while True:
        classes = {int(lab[en.pres.index(G.power(x, q))]) for x in en.elements}
        out.append(len(classes))
        if len(classes) == 1:
            return out
        q *= G.prime


def _rank_frattini_quotient(S: Subgroup) -> int:
    if S.is_trivial():
        return 0
    sub = subgroup_presentation(S)
    return sub.ngens - frattini_subgroup(sub).size_exp


def roggenkamp_parameter(G: PcPresentation) -> int:
    return sum(_rank_frattini_quotient(centralizer(G, rep)) for rep, _ in conjugacy_classes(G))


def elementary_abelian_subgroups(G: PcPresentation, cap: int | None = None) -> list:
    """All nontrivial elementary abelian subgroups (by canonical igs)."""
    from .caps import get_caps
    cap = cap or get_caps().subgroups
    p = G.prime
    invol = [x for x in G.elements() if any(x) and not any(G.power(x, p))]
    seen: dict = {}
    frontier = []
    for x in invol:
        s = subgroup_generated(G, [x])
        if s.igs not in seen:
            seen[s.igs] = s
            frontier.append(s)
    while frontier:
        nxt = []
        for s in frontier:
            for x in invol:
                if s.contains(x):
                    continue
                if any(G.commutator(x, u) != G.identity for u in s.igs):
                    continue
                t = subgroup_generated(G, list(s.igs) + [x])
                if t.igs not in seen:
                    seen[t.igs] = t
                    nxt.append(t)
                    if len(seen) > cap:
                        raise CapExceeded("subgroups", len(seen), cap)
        frontier = nxt
    return list(seen.values())


def _conjugate_subgroup(G, s: Subgroup, g) -> Subgroup:
    return subgroup_generated(G, [G.conjugate(u, g) for u in s.igs])


def quillen_invariant(G: PcPresentation) -> int:
    """Conjugacy classes of maximal elementary abelian subgroups."""
    subs = elementary_abelian_subgroups(G)
    p = G.prime
    invol = [x for x in G.elements() if any(x) and not any(G.power(x, p))]
    maximal = []
    for s in subs:
        ext = any(not s.contains(x) and all(G.commutator(x, u) == G.identity for u in s.igs)
                  for x in invol)
        if not ext:
            maximal.append(s)
    seen, classes = set(), 0
    for s in maximal:
        if s.igs in seen:
            continue
        classes += 1
        orbit = [s]
        seen.add(s.igs)
        while orbit:
            t = orbit.pop()
            for g in G.gens:
                c = _conjugate_subgroup(G, t, g)
                if c.igs not in seen:
                    seen.add(c.igs)
                    orbit.append(c)
    return classes


def pp_milies_counts(G: PcPresentation) -> list:
    """For ``n = 1, 2, ...``: classes ``C`` with a class ``C'`` of the same size
    and ``C'^{p^n}`` inside ``C`` (class-size reading)."""
    en = G.enum
    lab = en.class_labels
    sizes = Counter(lab.tolist())
    reps = sorted(sizes)
    out = []
    q = G.prime
    while True:
        hit = set()
        for r in reps:
            img = int(lab[G.index(G.power(en.elements[r], q))])
            if sizes[img] == sizes[r]:
                hit.add(img)
        out.append(len(hit))
        if all(not any(G.power(en.elements[r], q)) for r in reps):
            return out
        q *= G.prime


def _is_cyclic(G: PcPresentation, s: Subgroup) -> bool:
    return s.is_abelian() and len(abelian_invariants(s)) <= 1


def _elementary(s: Subgroup) -> bool:
    pres = s.parent
    return s.is_abelian() and all(not any(pres.power(u, pres.prime)) for u in s.igs)


def largest_cyclic_over(G: PcPresentation, der: Subgroup) -> int:
    best = 1
    gen = der.igs[0] if der.igs else None
    for x in G.elements():
        c = subgroup_generated(G, [x])
        if gen is None or c.contains(gen):
            best = max(best, c.order)
    return best


def section_centralizer(G: PcPresentation, top: Subgroup, bottom: Subgroup) -> Subgroup:
    """``C_G(top/bottom)``: elements whose commutators with ``top`` lie in ``bottom``."""
    keep = [x for x in G.elements()
            if all(bottom.contains(G.commutator(x, u)) for u in top.igs)]
    return subgroup_generated(G, keep)


def _quot(G, N, name=""):
    return quotient_group(G, N, name=name)


def _iso_quot(G, N):
    return iso_type(_quot(G, N))


def _guard(fn):
    try:
        return fn()
    except CapExceeded:
        return UNCOMPUTED


def fingerprint(G: PcPresentation) -> Fingerprint:
    p = G.prime
    rec = standard_subgroups(G)
    lcs = rec.lower_central
    g2 = lcs[1] if len(lcs) > 1 else trivial_subgroup(G)
    g3 = lcs[2] if len(lcs) > 2 else trivial_subgroup(G)
    jd = jennings_series(G)
    cls = len(lcs) - 1
    entries = []

    entries.append(("a", _guard(lambda: abelian_invariants(_quot(G, rec.frattini)))))
    entries.append(("b", _guard(lambda: abelian_invariants(_quot(G, g2)))))
    entries.append(("c", _guard(lambda: abelian_invariants(rec.center))))

    def sandling():
        return _iso_quot(G, normal_closure(G, list(agemo(g2, 1).igs) + list(g3.igs)))
    entries.append(("d", _guard(sandling)))

    def dseries():
        out = []
        c = jd.length
        for i in range(1, c):
            out.append((len(jd.D(i).igs) - len(jd.D(i + 1).igs),
                        iso_type(section(jd.D(i), jd.D(i + 2))),
                        iso_type(section(jd.D(i), jd.D(2 * i + 1)))))
        return out
    entries.append(("e", _guard(dseries)))
    entries.append(("f", _guard(lambda: power_class_counts(G))))
    entries.append(("g", _guard(lambda: roggenkamp_parameter(G))))
    entries.append(("h", _guard(lambda: quillen_invariant(G))))
    entries.append(("i", _guard(lambda: Cond(p != 2, _iso_quot(G, jd.D(4)) if p != 2 else None))))
    entries.append(("j", _guard(lambda: pp_milies_counts(G))))

    def item_k():
        ok = _elementary(g2) and (len(lcs) <= 2 * p or lcs[2 * p - 1].is_trivial())
        return Cond(ok, iso_type(subgroup_presentation(rec.frattini)) if ok else None)
    entries.append(("k", _guard(item_k)))

    def item_l():
        ok = _is_cyclic(G, g2)
        return Cond(ok, largest_cyclic_over(G, g2) if ok else None)
    entries.append(("l", _guard(item_l)))

    def item_m():
        phi_der = frattini_of(g2)
        C = section_centralizer(G, g2, phi_der)
        top = _quot(G, C)
        ok = top.is_abelian() and len(abelian_invariants(top)) <= 1
        if not ok:
            return Cond(False)
        return Cond(True, (iso_type(section(C, phi_der)),
                           _iso_quot(G, frattini_of(C))))
    entries.append(("m", _guard(item_m)))

    def item_n():
        zd = intersection(g2, rec.center)
        return (abelian_invariants(zd), abelian_invariants(section(rec.center, zd)))
    entries.append(("n", _guard(item_n)))
    entries.append(("o", _guard(lambda: Cond(cls == 2, _iso_quot(G, rec.center) if cls == 2 else None))))

    def item_p():
        if g2.is_trivial():
            return []
        return list(jennings_series(subgroup_presentation(g2)).graded_dims)
    entries.append(("p", _guard(item_p)))
    entries.append(("q", _guard(lambda: nilpotency_class(_quot(G, frattini_of(g2))))))

    def item_r():
        ok = (exponent(G) == p or cls == 2 or _is_cyclic(G, g2)
              or (G.ngens >= 2 and cls == G.ngens - 1))
        return Cond(ok, cls if ok else None)
    entries.append(("r", _guard(item_r)))

    def item_s():
        d = G.ngens - rec.frattini.size_exp
        if d != 2:
            return Cond(False)
        from .smallring import baginski_quotient
        return Cond(True, iso_type(baginski_quotient(G)))
    entries.append(("s", _guard(item_s)))
    return Fingerprint(G.name, G.order, p, tuple(entries))


def frattini_of(s: Subgroup) -> Subgroup:
    """``Phi(S)`` for a subgroup ``S``, as a subgroup of the parent."""
    if s.is_trivial():
        return s
    G = s.parent
    sub = subgroup_presentation(s)
    fr = frattini_subgroup(sub)
    return subgroup_generated(G, [s.element_from_exponents(u) for u in fr.igs])


# ---------------------------------------------------------------------------
# binning and reports
# ---------------------------------------------------------------------------

def bin_groups(groups) -> list:
    """Partition by fingerprint agreement (connected components of the
    pairwise agreement relation, since conditional entries are not transitive)."""
    groups = list(groups)
    if not groups:
        return []
    orders = {(g.prime, g.order) for g in groups}
    if len(orders) > 1:
        raise ValueError("all groups must have the same order")
    fps = [fingerprint(g) for g in groups]
    parent = list(range(len(groups)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            if find(i) != find(j) and fps[i].matches(fps[j]):
                parent[find(j)] = find(i)
    cells: dict = {}
    for i in range(len(groups)):
        cells.setdefault(find(i), []).append(groups[i])
    return [cells[r] for r in sorted(cells)]


def _fmt(v, labels) -> str:
    if v is UNCOMPUTED:
        return "Uncomputed"
    if isinstance(v, Cond):
        return f"Applicable({_fmt(v.value, labels)})" if v.applicable else "NotApplicable"
    if isinstance(v, IsoType):
        if v.summary[1] is not None:
            return f"abelian{list(v.summary[1])}"
        return f"type[order={v.summary[0]},id={labels(v)}]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x, labels) for x in v) + "]"
    return str(v)


class _Labeler:
    """Per-run deterministic labels for non-abelian isomorphism types."""

    def __init__(self):
        self.reps: list = []

    def __call__(self, v: IsoType) -> str:
        for i, r in enumerate(self.reps):
            if values_equal(r, v):
                return f"T{i + 1}"
        self.reps.append(v)
        return f"T{len(self.reps)}"


def format_fingerprint(fp: Fingerprint, labeler=None) -> str:
    labeler = labeler or _Labeler()
    lines = [f"group = {fp.name}", f"order = {fp.order}"]
    for k, v in fp.entries:
        lines.append(f"{k} = {_fmt(v, labeler)}")
    lines.append(f"pp_milies_interpretation = {PP_MILIES_INTERPRETATION}")
    return "\n".join(lines) + "\n"


def format_bins(bins) -> str:
    lines = []
    for i, cell in enumerate(bins, start=1):
        names = " ".join(g.name for g in cell)
        tag = "solved_by_invariants" if len(cell) == 1 else "open"
        lines.append(f"bin {i} [{tag}]: {names}")
    return "\n".join(lines) + "\n"
