#!/usr/bin/env python3
"""Dispersive functionals along a time sweep: the phi0-weighted convolution
bound on the low kernel piece and the sup of the regularized high piece."""

import argparse
import json

import numpy as np

from symwave.estimates import dispersive_report
from symwave.root_system import root_system_from_tag


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--root-system", default="A1")
    ap.add_argument("--q", type=float, default=4.0)
    ap.add_argument("--regime", choices=["small", "large"], default="large")
    args = ap.parse_args()
    rs = root_system_from_tag(args.root_system)
    times = (np.geomspace(0.05, 0.8, 8) if args.regime == "small"
             else np.geomspace(2.0, 40.0, 10))
    rep = dispersive_report(rs, args.q, times)
    print(json.dumps(rep.as_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
