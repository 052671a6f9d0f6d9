"""Hankel section norms against the two-weight Garsia quantity over the n-ladder.

Run with ``python3 demos/hankel_ladder.py [symbol]``; the symbol defaults to ``log``.
"""

import sys

import numpy as np

from hardylab.circle import DiskScan
from hardylab.hankel import rkt_experiment
from hardylab.symbols import make_symbol
from hardylab.weights import default_grid, weight_pairs


def main(symbol="log"):
    grid = default_grid()
    phi = make_symbol(symbol, grid, np.random.default_rng(0))
    scan = DiskScan()
    print(f"symbol {symbol}")
    print("pair                       n     norm      testing   C-ratio")
    for pname, (mu, lam) in weight_pairs(grid).items():
        mu = None if mu.is_unit else mu
        lam = None if lam.is_unit else lam
        ex = rkt_experiment(phi, mu, lam, scan=scan)
        for r in ex["rows"]:
            print(f"{pname:24s} {r['n']:4d} {r['norm']:9.5f} {r['kernel_testing']:9.5f} "
                  f"{r['C_ratio']:9.5f}")
        flag = "ok" if ex["fluctuation_ok"] else "exceeds the 20% rule"
        print(f"{'':24s} garsia {ex['garsia'][0]:.5f}, fluctuation {flag}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
