"""Anti-analytic test symbols shared by the norm, Carleson and Hankel experiments.

Every symbol is built from Fourier coefficients on negative frequencies so the
spectral paths (gradients, Hankel matrices) see exactly the same function as
the grid paths (Poisson averages).
"""

import numpy as np

from .circle import CircleFn

__all__ = ["SYMBOL_NAMES", "LOG_DEGREE", "make_symbol", "symbol_matrix", "random_antianalytic"]

SYMBOL_NAMES = ("zbar", "zbar2", "log", "random16", "nearlog")

# Truncation degree of the logarithmic symbol.  Its finest scale 1/256 matches
# the innermost default scan ring 1 - 2^-8, so the default scan sees its sup.
LOG_DEGREE = 256
NEARLOG_RHO = 1 - 2.0**-6


def _log_degree(grid):
    return min(LOG_DEGREE, grid.n_points // 2 - 1)


def random_antianalytic(grid, degree, rng):
    """Random ``sum_{k=1}^{degree} c_k zeta^-k`` with ``c_k ~ CN(0, 1/k^2)``."""
    k = np.arange(1, degree + 1)
    c = (rng.standard_normal(degree) + 1j * rng.standard_normal(degree)) / (np.sqrt(2) * k)
    return CircleFn.from_coefficients(grid, dict(zip((-k).tolist(), c)))


def make_symbol(name, grid, rng=None):
    """Build a named symbol on ``grid``.

    ``zbar``, ``zbar2``
        ``zeta^-1`` and ``zeta^-2``.
    ``log``
        Anti-analytic half of ``log|1 - zeta|``, i.e. ``-(1/2) sum zeta^-k / k``,
        truncated at degree ``LOG_DEGREE``.
    ``random16``
        Random anti-analytic polynomial of degree 16 (needs ``rng``).
    ``nearlog``
        ``(1/2) sum rho^k zeta^-k / k`` with ``rho = 1 - 2^-6``: bounded, but
        close to the unbounded logarithm.
    """
    if name == "zbar":
        return CircleFn.from_coefficients(grid, {-1: 1.0})
    if name == "zbar2":
        return CircleFn.from_coefficients(grid, {-2: 1.0})
    if name in ("log", "nearlog"):
        k = np.arange(1, _log_degree(grid) + 1)
        c = -0.5 / k if name == "log" else 0.5 * NEARLOG_RHO**k / k
        return CircleFn.from_coefficients(grid, dict(zip((-k).tolist(), c)))
    if name == "random16":
        if rng is None:
            rng = np.random.default_rng(0)
        return random_antianalytic(grid, 16, rng)
    raise ValueError(f"unknown symbol {name!r}")


def symbol_matrix(grid, rng=None, names=SYMBOL_NAMES):
    """Ordered ``{name: CircleFn}`` for the standard test matrix."""
    return {name: make_symbol(name, grid, rng) for name in names}
