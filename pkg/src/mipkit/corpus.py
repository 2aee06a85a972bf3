"""Small p-group corpus: generation by central extension and packaged data.

Every group of order ``p^(n+1)`` is a central extension of a group of order
``p^n`` by ``C_p``, so iterating over all tail choices on a full set of parents
and removing isomorphic duplicates yields every group of the next order.
"""
from __future__ import annotations

import itertools
from importlib import resources

from .pcgroup import (PcPresentation, PresentationError, _IsoData, _find_isomorphism,
                      abelian_invariants, format_presentation, make_presentation,
                      parse_presentation, rename)

#: number of isomorphism types, used to sanity-check generated data
KNOWN_COUNTS = {(2, 1): 1, (2, 2): 2, (2, 3): 5, (2, 4): 14, (2, 5): 51,
                (3, 1): 1, (3, 2): 2, (3, 3): 5, (3, 4): 15,
                (5, 1): 1, (5, 2): 2, (5, 3): 5}


def cyclic(p: int, k: int = 1) -> PcPresentation:
    return make_presentation(p, k, powers={i: [(i + 1, 1)] for i in range(k - 1)},
                             name=f"C{p ** k}")


def central_extensions(pres: PcPresentation):
    """All consistent presentations obtained by appending a central ``C_p`` tail."""
    p, n = pres.prime, pres.ngens
    z = n
    slots = [("pow", i) for i in range(n)] + [("comm", j, i) for j in range(n) for i in range(j)]
    for tails in itertools.product(range(p), repeat=len(slots)):
        powers, comms = {}, {}
        for slot, t in zip(slots, tails):
            if slot[0] == "pow":
                w = list(pres.power_rels[slot[1]])
                if t:
                    w.append((z, t))
                powers[slot[1]] = w
            else:
                w = list(pres.comm_rels[slot[1]][slot[2]])
                if t:
                    w.append((z, t))
                comms[(slot[1], slot[2])] = w
        try:
            yield make_presentation(p, n + 1, powers, comms)
        except PresentationError:
            continue


def _abelian_key(pres):
    return tuple(abelian_invariants(pres))


def dedupe(cands, progress=None) -> list:
    """Isomorphism-type representatives, in order of first appearance."""
    reps: list = []
    buckets: dict = {}
    for k, g in enumerate(cands):
        if g.is_abelian():
            key = ("ab", _abelian_key(g))
            if key not in buckets:
                buckets[key] = [g]
                reps.append(g)
            continue
        d = _IsoData(g)
        key = ("na",) + tuple(map(repr, d.summary()))
        bucket = buckets.setdefault(key, [])
        if any(_find_isomorphism(d, h) is not None for h in bucket):
            continue
        bucket.append(d)
        reps.append(g)
        if progress:
            progress(k, len(reps))
    return reps


def _sort_key(g: PcPresentation):
    # abelian first, then by exponent-vector "shape" of relations for stability
    return (not g.is_abelian(), format_presentation(g))


def generate(p: int, n: int, parents=None) -> list:
    """All groups of order ``p^n`` up to isomorphism (desk-scale orders only)."""
    if n == 1:
        return [cyclic(p)]
    if parents is None:
        parents = generate(p, n - 1)
    cands = itertools.chain.from_iterable(central_extensions(q) for q in parents)
    reps = sorted(dedupe(cands), key=_sort_key)
    return [rename(g, f"G{p ** n}_{k + 1}") for k, g in enumerate(reps)]


# -- packaged data -------------------------------------------------------------

def _data_dir():
    return resources.files("mipkit") / "data"


def corpus_groups(order: int) -> list:
    """Groups of the given order shipped with the package (all types)."""
    path = _data_dir() / f"order{order}.pcp"
    if not path.is_file():
        raise KeyError(f"no corpus data for order {order}")
    return parse_many(path.read_text(encoding="utf-8"))


def corpus_orders() -> list:
    out = []
    for f in _data_dir().iterdir():
        name = f.name
        if name.startswith("order") and name.endswith(".pcp"):
            out.append(int(name[5:-4]))
    return sorted(out)


def parse_many(text: str) -> list:
    """Several ``.pcp`` documents separated by lines consisting of ``---``."""
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "---":
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    chunks.append("\n".join(cur))
    return [parse_presentation(c) for c in chunks if c.strip()]


def format_many(groups) -> str:
    return "---\n".join(format_presentation(g) for g in groups)


_NAMED = {
    "C2": "p 2\nn 1\n",
    "C4": "p 2\nn 2\npow 1 = g2\n",
    "C2xC2": "p 2\nn 2\n",
    "C4xC2": "p 2\nn 3\npow 1 = g2\n",
    "C8": "p 2\nn 3\npow 1 = g2\npow 2 = g3\n",
    "C2xC2xC2": "p 2\nn 3\n",
    "D8": "p 2\nn 3\ncomm 2 1 = g3\n",
    "Q8": "p 2\nn 3\npow 1 = g3\npow 2 = g3\ncomm 2 1 = g3\n",
    "C3": "p 3\nn 1\n",
    "C9": "p 3\nn 2\npow 1 = g2\n",
    "C3xC3": "p 3\nn 2\n",
    "Heis27": "p 3\nn 3\ncomm 2 1 = g3\n",
    "Ext27": "p 3\nn 3\npow 1 = g3\ncomm 2 1 = g3\n",
    "C5": "p 5\nn 1\n",
}


def named(name: str) -> PcPresentation:
    """A few standard groups by name (D8, Q8, C4, C2xC2, Heis27, Ext27, ...)."""
    return parse_presentation(f"name {name}\n" + _NAMED[name])


def named_groups() -> list:
    return sorted(_NAMED)


def main(argv=None):
    """Regenerate the packaged corpus files (slow for order 32)."""
    import argparse
    import os
    import time

    ap = argparse.ArgumentParser(description="regenerate corpus data")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "data"))
    ap.add_argument("--orders", default="2,4,8,16,32,3,9,27,81,5,25,125")
    args = ap.parse_args(argv)
    wanted = [int(x) for x in args.orders.split(",")]
    os.makedirs(args.out, exist_ok=True)
    cache: dict = {}
    for q in sorted(wanted, key=lambda q: (min(p for p in (2, 3, 5) if q % p == 0), q)):
        p = min(x for x in (2, 3, 5) if q % x == 0)
        n = round(__import__("math").log(q, p))
        t0 = time.time()
        groups = generate(p, n, cache.get((p, n - 1)))
        cache[(p, n)] = groups
        expect = KNOWN_COUNTS.get((p, n))
        if expect is not None and len(groups) != expect:
            raise SystemExit(f"order {q}: got {len(groups)} groups, expected {expect}")
        with open(os.path.join(args.out, f"order{q}.pcp"), "w", encoding="utf-8") as fh:
            fh.write(format_many(groups))
        print(f"order {q}: {len(groups)} groups in {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
