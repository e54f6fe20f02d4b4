"""Compare the compiled simulation kernel against the interpreted fallback.

Usage: python3 benchmarks/bench_kernel.py [--slots N] [--vehicles N] [--repeat N]
"""

from __future__ import annotations

import argparse
import time

from cv2x_aoi.config import ScenarioConfig, validate
from cv2x_aoi.engine import kernel_is_compiled, run


def time_backend(cfg, backend: str, repeat: int) -> tuple[float, str]:
    best = float("inf")
    digest = None
    for _ in range(repeat):
        start = time.perf_counter()
        report = run(cfg, backend=backend)
        best = min(best, time.perf_counter() - start)
        if digest is None:
            digest = report.state_digest
        elif digest != report.state_digest:
            raise RuntimeError(f"{backend}: non-deterministic repeat")
    return best, digest


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--slots", type=int, default=20_000)
    parser.add_argument("--vehicles", type=int, default=30)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    cfg = validate(ScenarioConfig(num_vehicles=args.vehicles,
                                  sim_duration=args.slots,
                                  access_mode="NOMA"))
    print(f"vehicles={args.vehicles} slots={args.slots} "
          f"repeat={args.repeat} (best of)")

    py_time, py_digest = time_backend(cfg, "py", args.repeat)
    print(f"interpreted : {py_time:8.3f} s "
          f"({args.slots / py_time:,.0f} slots/s)")

    if not kernel_is_compiled():
        print("compiled    : extension not built, skipping")
        return

    c_time, c_digest = time_backend(cfg, "c", args.repeat)
    print(f"compiled    : {c_time:8.3f} s "
          f"({args.slots / c_time:,.0f} slots/s)")
    print(f"speedup     : {py_time / c_time:8.1f}x")
    match = "identical" if c_digest == py_digest else "MISMATCH"
    print(f"final state : {match}")
    if c_digest != py_digest:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
