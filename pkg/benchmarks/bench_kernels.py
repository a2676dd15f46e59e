"""Compare the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row times one public entry point under both backends and checks that the
results are bit-identical before reporting the speed-up.
"""

import argparse
import timeit

import numpy as np

from afforest import kernels
from afforest.forests import count_maximal_forests, enumerated_parents, sampled_parents
from afforest.games import SymmetricGame, check_superadditive
from afforest.generators import random_dag, random_superadditive_game, random_table_game
from afforest.measures import OrganisationalSituation, af_exact
from afforest.montecarlo import EstimationPlan, af_estimate


def dag_with_count(rng, n, lo, hi):
    while True:
        g = random_dag(rng, n, 0.5)
        if lo <= count_maximal_forests(g) <= hi:
            return g


def workloads(quick):
    rng = np.random.default_rng(7)
    scale = 10 if quick else 1
    g_enum = dag_with_count(rng, 14, 200_000 // scale, 600_000 // scale)
    g_mc = random_dag(rng, 16, 0.5)
    table_sit = OrganisationalSituation(g_enum, random_table_game(rng, 14))
    sym_sit = OrganisationalSituation(g_enum, SymmetricGame(np.arange(15.0) ** 1.5))
    mc_sit = OrganisationalSituation(g_mc, random_table_game(rng, 16))
    big_game = random_superadditive_game(rng, 12 if quick else 14)
    count = count_maximal_forests(g_enum)
    k = 200_000 // scale
    return [
        (f"enumerate {count} forests (n=14)", lambda: enumerated_parents(g_enum, 0, count)),
        (f"sample {k} forests (n=16)", lambda: sampled_parents(g_mc, 1, 0, k)),
        ("exact AF, table game", lambda: af_exact(table_sit, cap=None, workers=1).af),
        ("exact AF, symmetric game", lambda: af_exact(sym_sit, cap=None, workers=1).af),
        (f"Monte Carlo AF, k={k}", lambda: af_estimate(mc_sit, EstimationPlan(k=k, seed=3), workers=1).af),
        (f"superadditivity check (n={big_game.n})", lambda: check_superadditive(big_game).verdict),
    ]


def same(a, b):
    if isinstance(a, np.ndarray):
        return a.tobytes() == b.tobytes()
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the pure-Python backend is available")
    before = kernels.backend()
    print(f"{'workload':42} " + " ".join(f"{b:>10}" for b in backends) + "   speed-up  identical")
    for name, fn in workloads(args.quick):
        times, results = {}, {}
        for b in backends:
            kernels.use_backend(b)
            results[b] = fn()
            times[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        cells = " ".join(f"{times[b]:9.3f}s" for b in backends)
        if len(backends) == 2:
            speed = f"{times['python'] / times['cython']:8.1f}x"
            ident = "yes" if same(results["python"], results["cython"]) else "NO"
        else:
            speed, ident = "", ""
        print(f"{name:42} {cells}  {speed:>9}  {ident}")
    kernels.use_backend(before)


if __name__ == "__main__":
    main()
