#!/usr/bin/env python3
"""Round-trip accuracy of the spherical transform pair on A1 and A2.

Prints the calibrated inversion constant and the sup relative error of
inverse(forward(Gaussian)) for a few grid resolutions.
"""

import time

import numpy as np

from symwave.geometry import RadialFunction, RadialGrid
from symwave.root_system import build_root_system
from symwave.spherical import (SpectralGrid, forward_transform,
                               inverse_transform, plancherel_constant)

CASES = {
    "A1": [(10.0, 129, 9.0, 129), (10.0, 193, 9.0, 193), (10.0, 257, 9.0, 257)],
    "A2": [(10.0, 81, 11.0, 89), (10.0, 121, 10.0, 109), (10.0, 161, 10.0, 131)],
}


def main():
    for tag, grids in CASES.items():
        rs = build_root_system(tag[0], int(tag[1]))
        print(f"{tag}: plancherel constant {plancherel_constant(rs):.12g}")
        for R, n, L, m in grids:
            t0 = time.monotonic()
            rgrid, sgrid = RadialGrid(rs, R, n), SpectralGrid(rs, L, m)
            f = RadialFunction(rgrid, np.exp(-np.sum(rgrid.nodes ** 2, axis=1)))
            frt = inverse_transform(rs, forward_transform(rs, f, sgrid), rgrid)
            err = np.max(np.abs(frt.values - f.values)) / np.max(np.abs(f.values))
            print(f"  n={n:4d} m={m:4d}: sup rel error {err:.3e}"
                  f"  ({time.monotonic() - t0:.1f}s)")


if __name__ == "__main__":
    main()
