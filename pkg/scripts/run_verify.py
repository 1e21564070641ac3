"""Run verification suites and write one JSONL report per suite.

Also runs each built-in mutant against the suite it should break, so the
report directory shows the checks are able to fail.
"""
import argparse
import json
import sys
import time
from collections import Counter
from pathlib import Path

from tstruct.linalg import Field
from tstruct.mutations import KNOWN, mutated
from tstruct.suites import SUITES, RunConfig, run_suites

MUTANT_SUITE = {"drop-monotonicity": "criterion", "sigma-convention": "criterion", "break-d2": "axioms"}


def _write(path: Path, recs) -> Counter:
    tally = Counter()
    with path.open("w") as fh:
        for r in recs:
            fh.write(json.dumps(r.to_json(), sort_keys=True, separators=(",", ":")) + "\n")
            tally["pass" if r.verdict else "fail"] += 1
    return tally


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--field", default="F2")
    ap.add_argument("--max-points", type=int, default=4)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--suite", action="append", choices=sorted(SUITES))
    ap.add_argument("--skip-mutants", action="store_true")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = dict(seed=args.seed, field=Field.parse(args.field), max_points=args.max_points, samples=args.samples)
    failed = 0
    for name in args.suite or sorted(SUITES):
        t = time.perf_counter()
        tally = _write(out / f"{name}.jsonl", run_suites(RunConfig(suites=(name,), **base)))
        failed += tally["fail"]
        print(f"{name:12s} pass={tally['pass']:5d} fail={tally['fail']:3d} {time.perf_counter() - t:7.1f}s", flush=True)
    if not args.skip_mutants:
        for mutant in sorted(KNOWN):
            suite = MUTANT_SUITE[mutant]
            cfg = RunConfig(suites=(suite,), **{**base, "max_points": min(3, args.max_points), "samples": min(20, args.samples)})
            with mutated(mutant):
                tally = _write(out / f"mutant-{mutant}.jsonl", run_suites(cfg))
            print(f"mutant {mutant:18s} on {suite:9s} fail={tally['fail']} (expected > 0)", flush=True)
            failed += tally["fail"] == 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
