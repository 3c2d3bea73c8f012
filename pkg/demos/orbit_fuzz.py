"""Push every class through random invertible local operations and re-classify.

``python demos/orbit_fuzz.py [trials] [cond_max]``; defaults 50 and 100.
"""

import sys

from slocc4 import ALL_CLASSES
from slocc4.cli import run_fuzz


def main() -> None:
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    cond = float(sys.argv[2]) if len(sys.argv) > 2 else 100.0
    res = run_fuzz(ALL_CLASSES, trials=trials, seed=0, cond_max=cond)
    print(f"{'class':<20} {'trials':>6} {'boundary':>8} {'flips':>5}")
    for name, (n, boundary, flips) in res.per_class.items():
        print(f"{name:<20} {n:>6} {boundary:>8} {flips:>5}")
    print(f"\n{res.trials} trials, {len(res.flips)} flips, boundary rate {100 * res.boundary_rate:.2f}%")


if __name__ == "__main__":
    main()
