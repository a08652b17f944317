"""Time the compiled kernels against the pure-Python fallback.

Each backend runs in its own interpreter because the backend is fixed at
import time by CCTF_DISABLE_NUMBA.  Both must produce identical traces.

    python benchmarks/bench_backends.py [--runs 20] [--ticks 1000]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = """
import hashlib, json, sys, time
from cctf import _kernels
from cctf.engine import SimConfig, simulate
runs, ticks = int(sys.argv[1]), int(sys.argv[2])
simulate(SimConfig(scouts=1, detectors=1, max_ticks=5))  # warm-up / JIT compile
h = hashlib.sha256()
t0 = time.perf_counter()
for i in range(runs):
    cfg = SimConfig(scouts=1 + i % 9, detectors=1 + (i // 9) % 9, max_ticks=ticks, seed=i)
    m, trace = simulate(cfg)
    h.update(trace.tobytes())
elapsed = time.perf_counter() - t0
print(json.dumps({"backend": _kernels.BACKEND, "seconds": elapsed, "digest": h.hexdigest()}))
"""


def run_backend(disable, runs, ticks):
    env = dict(os.environ, CCTF_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(runs), str(ticks)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--ticks", type=int, default=1000)
    args = ap.parse_args()

    fast = run_backend(False, args.runs, args.ticks)
    slow = run_backend(True, args.runs, args.ticks)
    for r in (fast, slow):
        per_run = 1e3 * r["seconds"] / args.runs
        print(f"{r['backend']:>7}: {r['seconds']:8.3f} s total, {per_run:9.3f} ms/run")
    print(f"speedup: {slow['seconds'] / fast['seconds']:.0f}x")
    same = fast["digest"] == slow["digest"]
    print("traces identical:", same)
    print(f"projected 6480-run sweep: numba {fast['seconds'] / args.runs * 6480:.0f} s, "
          f"python {slow['seconds'] / args.runs * 6480:.0f} s (single worker)")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
