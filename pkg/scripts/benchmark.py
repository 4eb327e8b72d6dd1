#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback.

Runs the volatile headline scenario in two subprocesses (CHOMET_NUMBA=1
and CHOMET_NUMBA=0) so each picks its execution path at import time,
checks that both produce identical decisions, and reports wall times.

Usage: python scripts/benchmark.py [--slots N] [--seeds N] [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent(
    """
    import json, sys, time
    import numpy as np
    from chomet import harness, learner
    from chomet.radio import ScenarioConfig, generate_timeline
    from chomet._jit import NUMBA_ENABLED

    slots, seeds, repeat = (int(a) for a in sys.argv[1:4])
    scenario = ScenarioConfig(mode="volatile", ue_count=20, cell_count=10,
                              slots=slots, change_period=10)
    timelines = [
        generate_timeline(scenario, np.random.SeedSequence([s, 0]))
        for s in range(1, seeds + 1)
    ]
    hyper = learner.hyperparams_for_timeline(timelines[0])

    # Warm-up triggers jit compilation so it is not billed to the timing.
    learner.run_chomet(timelines[0], hyper,
                       np.random.default_rng(np.random.SeedSequence([1, 1])))

    best = float("inf")
    checksum = 0
    for _ in range(repeat):
        start = time.perf_counter()
        checksum = 0
        for s, tl in enumerate(timelines, start=1):
            rng = np.random.default_rng(np.random.SeedSequence([s, 1]))
            decisions, _, _ = learner.run_chomet(tl, hyper, rng)
            checksum += int(decisions.astype(np.int64).sum())
        best = min(best, time.perf_counter() - start)
    json.dump({"numba": NUMBA_ENABLED, "seconds": best, "checksum": checksum},
              sys.stdout)
    """
)


def run_worker(numba_flag, args):
    env = dict(os.environ, CHOMET_NUMBA="1" if numba_flag else "0")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(args.slots), str(args.seeds), str(args.repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--slots", type=int, default=1000)
    parser.add_argument("--seeds", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=2)
    args = parser.parse_args()

    results = {}
    for flag, label in ((True, "numba"), (False, "numpy")):
        results[label] = run_worker(flag, args)
        print(f"{label:>6}: {results[label]['seconds']:8.3f} s "
              f"(jit={'on' if results[label]['numba'] else 'off'})")

    if results["numba"]["checksum"] != results["numpy"]["checksum"]:
        print("error: the two paths produced different decisions", file=sys.stderr)
        return 1
    speedup = results["numpy"]["seconds"] / results["numba"]["seconds"]
    print(f"identical decisions on both paths; speedup {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
