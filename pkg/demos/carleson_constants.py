"""Embedding constants B, C and D for a random atomic measure and the area measure.

Run with ``python3 demos/carleson_constants.py``.
"""

import numpy as np

from hardylab.carleson import DiskMeasure, carleson_constants, random_measure
from hardylab.disk import DiskQuadrature
from hardylab.weights import default_grid, weight_pairs


def show(label, c):
    print(f"{label:32s} B={c.B:9.5f} C={c.C:9.5f} D={c.D:9.5f} D_h={c.D_h:8.5f}")


def main():
    rng = np.random.default_rng(2)
    grid = default_grid()
    m = random_measure(rng, 12)
    for pname, (mu, lam) in weight_pairs(grid).items():
        c = carleson_constants(m, None if lam.is_unit else lam, None if mu.is_unit else mu, rng=rng)
        show(f"random, {pname}", c)
    show("area measure, unit weights", carleson_constants(DiskMeasure.area(DiskQuadrature())))


if __name__ == "__main__":
    main()
