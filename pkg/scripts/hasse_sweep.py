"""Run the quadratic Hasse-principle sweep (r <= 2) against the brute-force oracles."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from sweep import run_sweep  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-radius", type=int, default=10**5)
    parser.add_argument("--limit", type=int, default=None, help="stop after this many instances")
    args = parser.parse_args()
    r = run_sweep(args.max_radius, args.limit)
    print(f"instances   {r.total}")
    print(f"solved      {r.solved}")
    print(f"obstructed  {r.obstructed}")
    print(f"exhausted   {r.exhausted}")
    print(f"false pos.  {r.false_positive}")
    print(f"false neg.  {r.false_negative}")
    print(f"seconds     {r.seconds:.1f}")
    for specs, why in r.mismatch:
        print("mismatch", specs, why)
    sys.exit(1 if r.mismatch else 0)


if __name__ == "__main__":
    main()
