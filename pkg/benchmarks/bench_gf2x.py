"""Compare the compiled GF(2)[x] kernel with the pure-Python fallback.

Usage: python3 benchmarks/bench_gf2x.py [--degree 210] [--n 20000] [--csv out.csv]

Both kernels are imported directly, run on the same operands, and their
results are checked for equality before timings are reported.
"""

import argparse
import csv
import random
import sys
import timeit

from rackrepair import _gf2x_py
from rackrepair.field import irreducible_poly

try:
    from rackrepair import _gf2x
except ImportError:
    _gf2x = None


def modulus_int(degree):
    coeffs = irreducible_poly(2, degree)
    return sum(1 << i for i, c in enumerate(coeffs) if c)


def run(degree, n, seed=0):
    rng = random.Random(seed)
    mod = modulus_int(degree)
    xs = [rng.getrandbits(degree) for _ in range(n)]
    ys = [rng.getrandbits(degree) or 1 for _ in range(n)]
    kernels = {"pure": _gf2x_py}
    if _gf2x is not None:
        kernels["compiled"] = _gf2x
    rings = {name: k.Ring(mod) for name, k in kernels.items()}

    ops = {
        "mul": lambda R: [R.mul(a, b) for a, b in zip(xs, ys)],
        "sqr": lambda R: [R.sqr(a) for a in xs],
        "inv": lambda R: [R.inv(b) for b in ys[: max(n // 20, 1)]],
        "pow": lambda R: [R.pow(a, (1 << degree) - 2) for a in xs[: max(n // 200, 1)]],
    }
    rows = []
    for op, fn in ops.items():
        results = {name: fn(R) for name, R in rings.items()}
        ref = results["pure"]
        for name, got in results.items():
            if got != ref:
                raise AssertionError(f"{name} kernel disagrees on {op}")
        timings = {}
        for name, R in rings.items():
            timings[name] = min(timeit.repeat(lambda: fn(R), number=1, repeat=3))
        speedup = timings["pure"] / timings["compiled"] if "compiled" in timings else None
        rows.append((op, degree, len(fn(rings["pure"])), timings["pure"],
                     timings.get("compiled"), speedup))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, action="append")
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)
    degrees = args.degree or [8, 64, 210]
    if _gf2x is None:
        print("compiled kernel not built; timing the fallback only", file=sys.stderr)
    rows = []
    for d in degrees:
        rows.extend(run(d, args.n))
    header = ("op", "degree", "count", "pure_s", "compiled_s", "speedup")
    print(f"{'op':<5}{'degree':>8}{'count':>8}{'pure s':>12}{'compiled s':>12}{'speedup':>9}")
    for op, d, cnt, p, c, s in rows:
        cs = f"{c:12.4f}" if c is not None else f"{'-':>12}"
        ss = f"{s:9.1f}" if s is not None else f"{'-':>9}"
        print(f"{op:<5}{d:>8}{cnt:>8}{p:12.4f}{cs}{ss}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)


if __name__ == "__main__":
    main()
