"""Largest network resolving each bit target with 0, 1 or 2 amplifiers."""

import argparse

from photomac.catalog import SimConfig
from photomac.scaling import MAX_SOA_COUNT, max_n_with_soas


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--responsivity", type=float, default=1.2)
    ap.add_argument("--n-sp", type=float, default=None, help="override the spontaneous emission factor")
    args = ap.parse_args()
    cfg = SimConfig().with_(responsivity=args.responsivity)
    if args.n_sp is not None:
        cfg = cfg.with_(soa=type(cfg.soa)(n_sp=args.n_sp))
    counts = range(MAX_SOA_COUNT + 1)
    print("arch bits " + " ".join(f"{c}xSOA".rjust(7) for c in counts))
    for arch in ("mzm", "mrr"):
        for bits in range(1, 7):
            reach = [max_n_with_soas(arch, bits, c, cfg) for c in counts]
            print(f"{arch:4} {bits:>4} " + " ".join(f"{r:>7}" for r in reach))


if __name__ == "__main__":
    main()
