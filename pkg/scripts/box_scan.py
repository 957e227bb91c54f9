"""Exact rank-4 scan in boxes around the suspected conformal exponent tuples."""

import argparse
import json
import time

from vvmf.families import ScanConfig, builtin_instance, rank4_scan

ROWS = {"table3-row-1": 40, "table3-row-2": 40, "table3-row-3": 36, "table3-row-4": 36,
        "hard-hexagon": 40}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=2)
    ap.add_argument("--terms", type=int, default=12)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--json", action="store_true", help="emit candidates as JSON lines")
    args = ap.parse_args()
    for name, d in ROWS.items():
        inst = builtin_instance(name)
        cfg = ScanConfig(denominators=(d,), centers=inst.exponents.values, radius=args.radius,
                         n_terms=args.terms, workers=args.workers)
        t0 = time.perf_counter()
        res = rank4_scan(cfg)
        dt = time.perf_counter() - t0
        print(f"{name}: {res.tuples_enumerated} tuples, {len(res.candidates)} survivors, {dt:.1f} s")
        for c in res.candidates:
            if args.json:
                print(json.dumps(c.to_json()))
            else:
                print(f"  {[str(e) for e in c.exponents]} vacuum {c.vacuum} "
                      f"scales {[str(r) for r in c.rescale]}")


if __name__ == "__main__":
    main()
