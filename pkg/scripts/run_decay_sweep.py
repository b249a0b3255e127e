#!/usr/bin/env python3
"""Kernel decay sweeps on A1 and A2: small-time regularized high piece on
the critical line, large-time total kernel in the interior regime."""

import argparse
import json

import numpy as np

from symwave.estimates import decay_sweep
from symwave.root_system import root_system_from_tag


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--root-system", default="A1")
    ap.add_argument("--regime", choices=["small_time", "large_time"],
                    default="small_time")
    ap.add_argument("--sigma-re", type=float, default=None)
    ap.add_argument("--sigma-im", type=float, default=0.5)
    args = ap.parse_args()
    rs = root_system_from_tag(args.root_system)
    sigma = None
    if args.sigma_re is not None:
        sigma = complex(args.sigma_re, args.sigma_im)
    times = None
    if args.regime == "large_time" and rs.rank == 2:
        times = np.geomspace(2.0, 12.0, 10)
    rep = decay_sweep(rs, args.regime, sigma=sigma, times=times)
    print(json.dumps(rep.as_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
