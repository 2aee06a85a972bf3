"""Bin splitting by canonical forms of ``I(kG)/I(kG)^i`` at increasing ``i``."""
from __future__ import annotations

import itertools
import time
import warnings
from dataclasses import dataclass, field

from .algtable import build_aug_table, extend_table
from .canon import canonical_form
from .caps import CapExceeded
from .invariants import bin_groups
from .jennings import jennings_bound, jennings_series
from .pcgroup import PcPresentation


@dataclass(frozen=True)
class Split:
    level: int

    def __str__(self):
        return f"Split({self.level})"


@dataclass(frozen=True)
class Unresolved:
    level: int

    def __str__(self):
        return f"Unresolved({self.level})"


@dataclass(frozen=True)
class SolvedByInvariants:
    def __str__(self):
        return "SolvedByInvariants"


@dataclass
class SplitResult:
    bin: list
    verdict: object
    digests: dict = field(default_factory=dict)       # level -> [digest per group]
    jennings_bounds: list = field(default_factory=list)
    start: int = 0
    step: int = 0
    max_level: int = 0
    sub_partition: list | None = None
    diagnostics: list = field(default_factory=list)
    seconds: float = 0.0

    def pair_level(self, i: int, j: int) -> int | None:
        """First computed level at which groups ``i`` and ``j`` have different certificates."""
        for lvl in sorted(self.digests):
            d = self.digests[lvl]
            if d[i] != d[j]:
                return lvl
        return None


def _check_input(L):
    if len(L) < 2:
        raise ValueError("need at least two groups")
    if len({(g.prime, g.order) for g in L}) != 1:
        raise ValueError("groups must share prime and order")


def pairwise_bounds(L) -> list:
    n = len(L)
    out = [[0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        out[i][j] = out[j][i] = jennings_bound(L[i], L[j])
    for i in range(n):
        out[i][i] = jennings_series(L[i]).length
    return out


def _partition(names, digests):
    cells: dict = {}
    for name, d in zip(names, digests):
        cells.setdefault(d, []).append(name)
    return sorted(cells.values(), key=lambda c: names.index(c[0]))


def mip_bin_split(L, s: int = 0, t: int = 2, m: int = 0, budget: int | None = None) -> SplitResult:
    """Compare canonical forms at levels ``1..m``; tables start at level ``s``
    and are extended by ``t`` whenever the level passes them.

    ``s = 0`` starts one above the largest pairwise Jennings bound and
    ``m = 0`` runs up to the largest nilpotency index in ``L``.
    """
    L = list(L)
    _check_input(L)
    t0 = time.perf_counter()
    bounds = pairwise_bounds(L)
    off = [bounds[i][j] for i, j in itertools.combinations(range(len(L)), 2)]
    if s == 0:
        s = max(off) + 1
    if m == 0:
        m = max(jennings_series(g).nil_index for g in L)
    s = max(s, 2)
    if t < 1 or m < s:
        raise ValueError("need t >= 1 and m >= s")
    names = [g.name for g in L]
    res = SplitResult(names, Unresolved(m), {}, bounds, s, t, m)
    tables = [build_aug_table(g, s) for g in L]
    a = s
    last = None
    for i in range(1, m + 1):
        if i > a:
            a += t
            tables = [extend_table(g, tab, a) for g, tab in zip(L, tables)]
        if i < 2:
            continue  # I/I is zero for every group
        try:
            certs = [canonical_form(tab, i, budget=budget) for tab in tables]
        except CapExceeded as exc:
            res.diagnostics.append(f"level {i}: {exc}")
            res.verdict = Unresolved(i)
            break
        last = [c.digest for c in certs]
        res.digests[i] = last
        if len(set(c.canonical_bytes for c in certs)) == len(certs):
            res.verdict = Split(i)
            break
    if isinstance(res.verdict, Unresolved) and last is not None and len(set(last)) > 1:
        res.sub_partition = _partition(names, last)
    res.seconds = time.perf_counter() - t0
    return res


def split_all(groups, **kw) -> list:
    """Bin by fingerprints, then run the splitter on every bin of size > 1."""
    out = []
    for cell in bin_groups(groups):
        if len(cell) == 1:
            out.append(SplitResult([cell[0].name], SolvedByInvariants()))
        else:
            out.append(mip_bin_split(cell, **kw))
    return out


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundRow:
    g: str
    h: str
    p: int
    s: int          # Jennings bound
    r: int          # first distinguishing level
    n: int          # D_{n+1} = 1
    bkrw_bound: int
    bkrw_ok: bool
    odd_bound: int | None
    odd_ok: bool | None


def bound_rows(res: SplitResult, groups) -> list:
    """One row per pair of ``res`` that was separated by some certificate."""
    rows = []
    for i, j in itertools.combinations(range(len(groups)), 2):
        r = res.pair_level(i, j)
        if r is None:
            continue
        G, H = groups[i], groups[j]
        p = G.prime
        s = res.jennings_bounds[i][j]
        n = min(jennings_series(G).length, jennings_series(H).length) - 1
        b1 = 2 * n + 1
        if p % 2:
            mm = max(s, 2 * s - (p - 1) // 2)
            b2, ok2 = mm + 1, r <= mm + 1
        else:
            b2, ok2 = None, None
        rows.append(BoundRow(G.name, H.name, p, s, r, n, b1, r <= b1, b2, ok2))
        if ok2 is False or r > b1:
            warnings.warn(f"bound violated for {G.name}, {H.name}: r={r}, s={s}, n={n}")
    return rows


def format_bound_rows(rows) -> str:
    lines = []
    for row in rows:
        odd = "n/a" if row.odd_bound is None else f"{row.odd_bound} {'ok' if row.odd_ok else 'VIOLATED'}"
        lines.append(f"pair {row.g} {row.h} s={row.s} r={row.r} n={row.n} "
                     f"bkrw<= {row.bkrw_bound} {'ok' if row.bkrw_ok else 'VIOLATED'} "
                     f"odd<= {odd}")
    return "\n".join(lines) + ("\n" if lines else "")


def format_split(res: SplitResult) -> str:
    lines = [f"bin {' '.join(res.bin)}", f"verdict {res.verdict}"]
    if isinstance(res.verdict, SolvedByInvariants):
        return "\n".join(lines) + "\n"
    lines.append(f"start {res.start} step {res.step} max {res.max_level}")
    for row in res.jennings_bounds:
        lines.append("jennings " + " ".join(map(str, row)))
    for lvl in sorted(res.digests):
        lines.append(f"level {lvl} " + " ".join(d[:16] for d in res.digests[lvl]))
    if res.sub_partition:
        lines.append("sub_partition " + " | ".join(" ".join(c) for c in res.sub_partition))
    for d in res.diagnostics:
        lines.append(f"diagnostic {d}")
    return "\n".join(lines) + "\n"


def bound_report(L, res: SplitResult | None = None) -> str:
    L = list(L)
    res = res if res is not None else mip_bin_split(L)
    return format_bound_rows(bound_rows(res, L))
