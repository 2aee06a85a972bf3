"""Jennings-Zassenhaus (dimension subgroup) series and the Jennings bound."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .pcgroup import (Element, PcPresentation, Subgroup, agemo, depth, is_isomorphic_groups,
                      lower_central_series, make_presentation, quotient_group,
                      subgroup_generated, whole_group)


@dataclass(frozen=True, eq=False)
class JenningsData:
    """The series ``D_1 > D_2 > ... > D_c = 1`` with a pcgs refining it.

    ``weighted_gens[k] = (u_k, w_k)``.  ``pres`` is the same group presented on
    the ``u_k``; ``to_jennings`` converts normal forms of ``group`` into it.
    """

    group: PcPresentation
    series: tuple
    weighted_gens: tuple
    graded_dims: tuple
    nil_index: int
    pres: PcPresentation

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.weighted_gens)

    @property
    def length(self) -> int:
        """Index ``c`` of the first trivial term."""
        return len(self.series)

    def D(self, m: int) -> Subgroup:
        if m < 1:
            raise ValueError("series starts at D_1")
        if m > len(self.series):
            return self.series[-1]
        return self.series[m - 1]

    def to_jennings(self, g: Element) -> tuple:
        """Exponents of ``g`` over ``u_1, ..., u_n`` (ordered product)."""
        pres = self.group
        p = pres.prime
        out = [0] * pres.ngens
        x = tuple(g)
        k0 = 0
        for w, dw in enumerate(self.graded_dims, start=1):
            layer = list(range(k0, k0 + dw))
            coords = _layer_coords(pres, self.D(w + 1), self.weighted_gens, layer, x)
            for k, e in zip(layer, coords):
                out[k] = e
            # peel the layer off on the left
            y = pres.identity
            for k, e in zip(layer, coords):
                if e:
                    y = pres.multiply(y, pres.power(self.weighted_gens[k][0], e))
            x = pres.multiply(pres.inverse(y), x)
            k0 += dw
        if any(x):
            raise ValueError("element did not sift through the series")
        del p
        return tuple(out)

    def from_jennings(self, exps) -> Element:
        pres = self.group
        x = pres.identity
        for (u, _), e in zip(self.weighted_gens, exps):
            if e:
                x = pres.multiply(x, pres.power(u, e))
        return x


def _layer_coords(pres, below: Subgroup, wgens, layer, x) -> list:
    """Coordinates of ``x`` in ``D_w/D_{w+1}`` on the layer generators."""
    p = pres.prime
    pivots = {depth(wgens[k][0]): i for i, k in enumerate(layer)}
    nb = dict(zip(below.depths, below.igs))
    coords = [0] * len(layer)
    for d in range(pres.ngens):
        e = x[d]
        if not e:
            continue
        if d in nb:
            x = pres.multiply(x, pres.power(nb[d], p - e))
        elif d in pivots:
            i = pivots[d]
            coords[i] = (coords[i] + e) % p
            x = pres.multiply(pres.power(wgens[layer[i]][0], p - e), x)
        else:
            raise ValueError("element is not in the expected series term")
    return coords


def _ceil_log(p: int, q: int) -> int:
    """Smallest ``j`` with ``p**j >= q``."""
    j, v = 0, 1
    while v < q:
        v *= p
        j += 1
    return j


def dimension_subgroup(pres: PcPresentation, m: int, lcs=None) -> Subgroup:
    """``D_m`` as the product of ``gamma_i^{p^j}`` over ``i p^j >= m``."""
    p = pres.prime
    lcs = lcs if lcs is not None else lower_central_series(pres)
    gens = []
    for i in range(1, m + 1):
        if i > len(lcs):
            break
        term = agemo(lcs[i - 1], _ceil_log(p, -(-m // i)))
        gens.extend(term.igs)
    return subgroup_generated(pres, gens)


@lru_cache(maxsize=256)
def jennings_series(G: PcPresentation) -> JenningsData:
    p = G.prime
    lcs = lower_central_series(G)
    series = [whole_group(G)]
    while not series[-1].is_trivial():
        series.append(dimension_subgroup(G, len(series) + 1, lcs))
    wgens = []
    dims = []
    for w in range(1, len(series)):
        top, below = series[w - 1], series[w]
        bd = set(below.depths)
        layer = [u for u in top.igs if depth(u) not in bd]
        dims.append(len(layer))
        wgens.extend((u, w) for u in layer)
    nil = 1 + (p - 1) * sum(i * d for i, d in enumerate(dims, start=1))
    jd = JenningsData(G, tuple(series), tuple(wgens), tuple(dims), nil, None)
    object.__setattr__(jd, "pres", _jennings_presentation(jd))
    return jd


def _jennings_presentation(jd: JenningsData) -> PcPresentation:
    G = jd.group
    us = [u for u, _ in jd.weighted_gens]
    n = len(us)
    powers = {k: jd.to_jennings(G.power(us[k], G.prime)) for k in range(n)}
    comms = {(l, k): jd.to_jennings(G.commutator(us[l], us[k]))
             for l in range(n) for k in range(l)}
    return make_presentation(G.prime, n, powers, comms, name=G.name, check=False)


def weight_of(jd: JenningsData, g: Element) -> int:
    """Largest ``w`` with ``g`` in ``D_w``."""
    g = tuple(g)
    if not any(g):
        raise ValueError("the identity has no finite weight")
    w = 1
    while w < jd.length and jd.D(w + 1).contains(g):
        w += 1
    return w


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def hilbert_series(jd: JenningsData) -> list:
    """Coefficients of the product over ``i`` of ``(1 + t^i + ... + t^{(p-1)i})^{d_i}``."""
    p = jd.group.prime
    poly = [1]
    for i, d in enumerate(jd.graded_dims, start=1):
        factor = [0] * ((p - 1) * i + 1)
        for k in range(p):
            factor[k * i] = 1
        for _ in range(d):
            poly = _poly_mul(poly, factor)
    return poly


def graded_dims_of_ideal(jd: JenningsData, s: int) -> list:
    """``dim I^m/I^{m+1}`` for ``1 <= m < s``."""
    if s < 2:
        raise ValueError("level must be at least 2")
    poly = hilbert_series(jd)
    return [poly[m] if m < len(poly) else 0 for m in range(1, s)]


def jennings_quotient(jd: JenningsData, s: int) -> PcPresentation:
    return quotient_group(jd.group, jd.D(s), name=f"{jd.group.name}/D{s}")


def jennings_bound(G: PcPresentation, H: PcPresentation) -> int:
    """Largest ``s`` with ``G/D_s(G) ~ H/D_s(H)`` (series length if ``G ~ H``)."""
    if G.prime != H.prime or G.order != H.order:
        raise ValueError("groups must have the same order")
    jg, jh = jennings_series(G), jennings_series(H)
    s = 1
    top = max(jg.length, jh.length)
    while s < top:
        a, b = jennings_quotient(jg, s + 1), jennings_quotient(jh, s + 1)
        if a.order != b.order or not is_isomorphic_groups(a, b):
            break
        s += 1
    return s


def format_report(jd: JenningsData) -> str:
    lines = [f"group {jd.group.name}", f"order {jd.group.order}"]
    for m, d in enumerate(jd.series, start=1):
        lines.append(f"D_{m} order {d.order}")
    lines.append("graded_dims " + " ".join(map(str, jd.graded_dims)))
    lines.append(f"nil_index {jd.nil_index}")
    for u, w in jd.weighted_gens:
        lines.append(f"gen {' '.join(map(str, u))} weight {w}")
    return "\n".join(lines) + "\n"
