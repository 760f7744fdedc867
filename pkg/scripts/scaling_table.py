"""Write a CSV comparing exact sparsity, approximator sparsity and sampler free counts across n."""

import argparse
import csv
import sys

from boolspar.cli import compare_scaling


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--families", default="or,thr,parity")
    ap.add_argument("--ns", default="4,6,8,10,12")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    ns = [int(v) for v in args.ns.split(",")]
    rows = []
    for fam in args.families.split(","):
        for row in compare_scaling(fam, ns, args.trials, args.seed, args.threads):
            rows.append({"family": fam, **row})

    fields = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=fields)
    w.writeheader()
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
