#!/usr/bin/env python3
"""Scan density weights and report the behavior of the quantization cocycles.

For each weight the top symbol projection of the connecting cocycle is
checked for the identity, tested for triviality against the divergence
candidate, and matched against the first invariant class; at the halfway
weight the splitting witness and the next projection are reported as well.
"""

import argparse
import sys

from cohomolab.cocycles import (
    builtin_c1,
    class_proportionality,
    coboundary_solve,
    cocycle_check,
)
from cohomolab.operators import divergence_diffop, op_str
from cohomolab.poly import rat, rat_str, single_ring
from cohomolab.quantization import (
    quantization_projected_cocycle,
    quantization_top_cocycle,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--order", type=int, default=2)
    ap.add_argument("--weights", nargs="+",
                    default=["0", "1/3", "1/2", "2/3", "1"])
    ap.add_argument("--max-vf-degree", type=int, default=3)
    args = ap.parse_args()

    n, k, d = args.dim, args.order, args.max_vf_degree
    D = divergence_diffop(single_ring(n))
    reference = builtin_c1(n, k)
    print(f"dim={n}  symbol degree k={k}  (top projection maps S_{k} -> S_{k - 1})")
    for raw in args.weights:
        lam = rat(raw)
        c = quantization_top_cocycle(n, k, lam)
        identity = cocycle_check(c, d).holds
        cob = coboundary_solve(c, [D], min(d, 3))
        prop = class_proportionality(c, reference, [D], min(d, 3))
        mu = rat_str(prop[0]) if prop else "-"
        line = (f"lambda={rat_str(lam):>5}: identity={identity} "
                f"trivial={cob.is_coboundary} first-class-scalar={mu}")
        if cob.is_coboundary:
            line += f" witness={op_str(cob.witness)}"
            if k >= 2:
                proj = quantization_projected_cocycle(n, k, lam, cob.witness)
                ok = cocycle_check(proj, min(d, 3)).holds
                nontrivial = not coboundary_solve(
                    proj, [D.power(2)], min(d, 3)).is_coboundary
                line += f" | projected: identity={ok} nontrivial={nontrivial}"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
