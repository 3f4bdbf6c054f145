"""Compare the Harrison total complex with the polyvector (LP) complex on the plane.

    python3 scripts/smooth_comparison.py --truncs 6,7 --weights=-3..4
"""

import argparse

from poisson_coh.cli import parse_range
from poisson_coh.harrison import total_hp
from poisson_coh.lp_cohomology import derham_slice_dimension, hp_dimension
from poisson_coh.structures import example


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--example", default="symplectic2")
    ap.add_argument("--truncs", default="6,7")
    ap.add_argument("--weights", default="-3..4")
    args = ap.parse_args()

    ps = example(args.example)
    truncs = [int(t) for t in args.truncs.split(",")]
    cache = {}
    head = " ".join(f"D={D:<3}" for D in truncs)
    print(f"deg weight   LP  dR  {head}")
    mismatches = 0
    for i in (1, 2):
        for w in parse_range(args.weights):
            lp = hp_dimension(ps, i, w, "paper")
            dr = derham_slice_dimension(ps, i, w, "paper")
            cells = []
            for D in truncs:
                r = total_hp(ps, i, w, D, cache)
                mark = "" if r.stable else "?"
                if r.stable and r.dim != lp:
                    mark = "!"
                    mismatches += 1
                cells.append(f"{r.dim}{mark:<4}")
            print(f"{i:>3} {w:>6} {lp:>4} {dr:>3}  " + " ".join(cells))
    print("'?' marks an unstable truncation, '!' a stable mismatch")
    print(f"stable mismatches: {mismatches}")


if __name__ == "__main__":
    main()
