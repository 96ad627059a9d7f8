"""Scan-time comparison across the four protocol kernels.

Small counts so the pairing comparator finishes quickly; the full ladder
(5k..80k announcements, 10 seeds) runs via the CLI: `stealthkem bench`.
Workloads are seed-deterministic, timings obviously are not; look at the
ratio column, not the absolute numbers.

Run: python3 demos/04_benchmark.py  (about fifteen seconds)
"""

from stealthkem.bench import KERNELS, BenchConfig, emit_report, run_bench

cfg = BenchConfig(
    announcement_counts=(500, 1000),
    seeds=(0, 1),
    kernels=(
        KERNELS["efficient_curvy"],
        KERNELS["mlwe_sap"],
        KERNELS["dksap_ecdh"],
        KERNELS["curvy_pairing"],
    ),
    planted=3,
)

result = run_bench(cfg)
print(emit_report(result, fmt="table"))
print("ratio is mean scan time relative to efficient_curvy at the same count")
