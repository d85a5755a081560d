"""Print the headline scaling limits and energies for both architectures."""

import argparse

from photomac.catalog import SimConfig, load_config_file
from photomac.energy import cmos_ratio
from photomac.scaling import optimum_network, scaling_limit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="configuration file")
    ap.add_argument("--responsivity", type=float, default=1.2)
    ap.add_argument("--tuning", default="TOPS_insulated")
    args = ap.parse_args()

    cfg = load_config_file(args.config) if args.config else SimConfig()
    cfg = cfg.with_(responsivity=args.responsivity, tuning_kind=args.tuning)
    print(f"{'arch':5} {'bits':>4} {'N_ltd':>6} {'N_opt':>6} {'fJ/Op':>9} {'xCMOS':>7}")
    for arch in ("mzm", "mrr"):
        for bits in (1, 2, 3, 4):
            lim = scaling_limit(arch, bits, None, cfg, with_energy=False)
            if not lim.feasible:
                print(f"{arch:5} {bits:>4} {'-':>6}  ({lim.limiting_factor})")
                continue
            n_opt, br = optimum_network(arch, bits, None, cfg)
            print(f"{arch:5} {bits:>4} {lim.n_ltd:>6} {n_opt:>6} {br.total * 1e15:>9.2f} "
                  f"{cmos_ratio(br.total):>7.2f}")


if __name__ == "__main__":
    main()
