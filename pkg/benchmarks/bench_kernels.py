"""Compare the compiled kernels against the pure-Python fallback.

The backend is chosen at import time by the FLAGSOS_NO_NUMBA environment
variable, so the benchmark re-executes itself in two child processes and
prints a side-by-side table.  JIT compilation happens inside a warmup
call and is excluded from the timings.

Usage:
    python benchmarks/bench_kernels.py [--census-level N] [--seed S]
"""

import argparse
import hashlib
import json
import os
import random
import subprocess
import sys
import time


def build_inputs(seed: int, census_level: int):
    from flagsos import SmallGraph

    rng = random.Random(seed)

    def random_graph(n, p):
        edges = [
            (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
        ]
        return SmallGraph(n, edges)

    def random_tf(n):
        rows = [0] * n
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rng.shuffle(pairs)
        for i, j in pairs:
            if rng.random() < 0.5 and (rows[i] & rows[j]) == 0:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        return SmallGraph._from_rows(tuple(rows))

    return {
        "canon": [random_graph(16, rng.choice([0.2, 0.5, 0.8])) for _ in range(400)],
        "pentagons": [random_tf(14) for _ in range(120)],
        "cutnorm": [
            [[rng.randrange(-5, 6) for _ in range(14)] for _ in range(14)]
            for _ in range(12)
        ],
        "homs": [
            (random_graph(4, 0.5), random_graph(9, 0.5)) for _ in range(200)
        ],
        "census_level": census_level,
    }


def run_measurements(seed: int, census_level: int) -> dict:
    from flagsos import (
        canonical_code,
        count_pentagons,
        cut_norm,
        model_count,
        strong_hom_count,
    )
    from flagsos import _kernels

    _kernels.warmup()
    inputs = build_inputs(seed, census_level)
    results = {"backend": "numba" if _kernels.NUMBA_ENABLED else "pure"}
    checks = {}

    t0 = time.perf_counter()
    codes = b"".join(canonical_code(g) for g in inputs["canon"])
    results["canonical_form x400 (n=16)"] = time.perf_counter() - t0
    checks["canon"] = hashlib.sha256(codes).hexdigest()

    t0 = time.perf_counter()
    checks["pentagons"] = sum(count_pentagons(g) for g in inputs["pentagons"])
    results["count_pentagons x120 (n=14)"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    checks["cutnorm"] = str(sum(cut_norm(m) for m in inputs["cutnorm"]))
    results["cut_norm x12 (n=14)"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    checks["homs"] = sum(strong_hom_count(h, g) for h, g in inputs["homs"])
    results["strong_hom_count x200 (4->9)"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    checks["census"] = model_count(census_level)
    results[f"census to n={census_level}"] = time.perf_counter() - t0

    results["checks"] = checks
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--census-level", type=int, default=9)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        json.dump(run_measurements(args.seed, args.census_level), sys.stdout)
        return 0

    rows = {}
    for no_numba in (False, True):
        env = dict(os.environ)
        env.pop("FLAGSOS_NO_NUMBA", None)
        if no_numba:
            env["FLAGSOS_NO_NUMBA"] = "1"
        proc = subprocess.run(
            [sys.executable, __file__, "--child",
             "--census-level", str(args.census_level), "--seed", str(args.seed)],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        rows[no_numba] = json.loads(proc.stdout)

    fast, slow = rows[False], rows[True]
    if fast.pop("checks") != slow.pop("checks"):
        print("backend results disagree; refusing to print timings", file=sys.stderr)
        return 1
    fast.pop("backend")
    slow.pop("backend")

    width = max(len(k) for k in fast)
    print(f"{'operation':<{width}}  {'numba':>9}  {'pure':>9}  {'speedup':>8}")
    for key in fast:
        a, b = fast[key], slow[key]
        ratio = b / a if a > 0 else float("inf")
        print(f"{key:<{width}}  {a:>8.3f}s  {b:>8.3f}s  {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
