"""Weights, oscillation norms and one Hankel section in a few lines.

Run with ``python3 demos/quickstart.py``.
"""

import numpy as np

from hardylab.circle import DiskScan
from hardylab.hankel import HankelSection, weighted_operator_norm
from hardylab.oscillation import garsia_norm, weighted_garsia_norm
from hardylab.symbols import make_symbol
from hardylab.weights import ArcFamily, a2_characteristic, default_grid, pa2, shipped_weights


def main():
    grid = default_grid()
    arcs, scan = ArcFamily(10, 64), DiskScan()
    weights = shipped_weights(grid)

    print("weight        [w]_A2   PA2")
    for name, w in weights.items():
        print(f"{name:12s} {a2_characteristic(w, arcs):8.4f} {pa2(w, scan):8.4f}")

    phi = make_symbol("log", grid, np.random.default_rng(0))
    g = garsia_norm(phi, scan).value
    print(f"\nGarsia norm of the log symbol: {g:.6f}")
    for name in ("pow+0.5", "piecewise"):
        wg = weighted_garsia_norm(phi, weights[name], scan).value
        print(f"  weighted by {name:10s}: {wg:.6f} (ratio {wg / g:.4f})")

    sec = HankelSection(phi, 64)
    print(f"\nHankel section norm at n = 64: {weighted_operator_norm(sec):.6f}")


if __name__ == "__main__":
    main()
