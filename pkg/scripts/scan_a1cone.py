"""Scan truncated HP^2 of the A1 cone over a weight range and list deformation classes.

    python3 scripts/scan_a1cone.py --trunc 8 --weights=-8..8
"""

import argparse

from poisson_coh.cli import parse_range
from poisson_coh.deform import build_dual_number_algebra, enumerate_first_order, reverify, verify_first_order
from poisson_coh.harrison import total_hp
from poisson_coh.structures import example


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trunc", type=int, default=8)
    ap.add_argument("--weights", default="-8..8")
    ap.add_argument("--deform-trunc", type=int, default=6, help="truncation for class enumeration")
    args = ap.parse_args()

    ps = example("a1cone")
    cache = {}
    total = 0
    print(f"{'weight':>6} {'dim':>4} {'prev':>4} {'stable':>6} {'cochains':>9}")
    for w in parse_range(args.weights):
        r = total_hp(ps, 2, w, args.trunc, cache)
        total += r.dim
        print(f"{w:>6} {r.dim:>4} {r.dim_previous!s:>4} {r.stable!s:>6} {r.cochain_dim:>9}")
        if r.dim:
            for d in enumerate_first_order(ps, w, args.deform_trunc, "direct"):
                ok = verify_first_order(ps, d, args.deform_trunc).ok
                rv = reverify(build_dual_number_algebra(ps, d, args.deform_trunc)).ok
                support = sum(1 for v in d.phi.values.values() if v)
                print(f"       class: verified={ok} reverified={rv} phi nonzero on {support} keys")
    print(f"total HP^2 dimension over the scan: {total}")


if __name__ == "__main__":
    main()
