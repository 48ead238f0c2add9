"""Greedy against the single-bus baseline over many synthetic derivatives.

Each seed is a full-size line (about 80 ECUs, 100 stations). For each we
record station counts and the utilization/parallelization metrics of both
plans, then break the greedy plan down by process type for one seed.

    python3 demos/line_study.py [N_SEEDS]
"""

from __future__ import annotations

import statistics
import sys

from dvcsched.scheduler import baseline_sequential, compute_metrics, process_breakdown, schedule
from dvcsched.synth import gen_instance


def main(n: int = 20) -> None:
    rows = []
    for seed in range(1, n + 1):
        inst = gen_instance(seed)
        g, b = schedule(inst), baseline_sequential(inst)
        mg, mb = compute_metrics(g, inst), compute_metrics(b, inst)
        rows.append((seed, b.station_count, g.station_count, mb.U, mg.U, mb.P, mg.P))

    print(f"{'seed':>4}{'Sb':>5}{'Sa':>5}{'U before':>10}{'U after':>9}{'P before':>10}{'P after':>9}")
    for seed, sb, sa, ub, ua, pb, pa in rows:
        print(f"{seed:>4}{sb:>5}{sa:>5}{ub:>10.3f}{ua:>9.3f}{pb:>10.3f}{pa:>9.3f}")
    saved = [sb - sa for _, sb, sa, *_ in rows]
    print(f"\nstations saved: mean {statistics.mean(saved):.1f}, min {min(saved)}, max {max(saved)}")

    inst = gen_instance(1)
    print("\nseed 1 by process type (greedy):")
    for proc, d in process_breakdown(schedule(inst), inst).items():
        print(f"  {proc:<14} stations={d['stations']:>3}  U={d['U']:.3f}  P={d['P']:.3f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
