"""Compiled vs pure-Python kernels on collection and table building.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import time

from mipkit import kernels
from mipkit.corpus import corpus_groups


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def collect_workload(G, words):
    tab = G.tables

    def run(impl):
        def go():
            for start, word in words:
                impl(tab, start, word)
        return go
    return run


def sparse_workload(p, n, rows_per, seed):
    rng = random.Random(seed)
    rows = [{rng.randrange(n): rng.randrange(1, p) for _ in range(rows_per)} for _ in range(n)]
    vecs = [{rng.randrange(n): rng.randrange(1, p) for _ in range(rows_per)} for _ in range(200)]

    def run(impl):
        def go():
            for v in vecs:
                impl(v, rows, p)
        return go
    return run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"compiled backend: {kernels.BACKEND}")
    rng = random.Random(1)
    for order in (32, 81, 125):
        G = corpus_groups(order)[-1]
        words = []
        for _ in range(2000):
            start = [rng.randrange(G.prime) for _ in range(G.ngens)]
            word = [(rng.randrange(G.ngens), rng.randrange(1, G.prime)) for _ in range(8)]
            words.append((start, word))
        run = collect_workload(G, words)
        tp = _time(run(kernels.python_collect), args.repeat)
        tc = _time(run(kernels.collect), args.repeat)
        print(f"collect  {G.name:8s} python {tp:7.3f}s  active {tc:7.3f}s  speedup {tp / tc:5.1f}x")
    for p in (2, 3, 5):
        run = sparse_workload(p, 400, 30, p)
        tp = _time(run(kernels.python_sparse_vec_times), args.repeat)
        tc = _time(run(kernels.sparse_vec_times), args.repeat)
        print(f"sparse   p={p}      python {tp:7.3f}s  active {tc:7.3f}s  speedup {tp / tc:5.1f}x")


if __name__ == "__main__":
    main()
