import numpy as np
import pytest

from hardylab.circle import CircleGrid, riesz_project
from hardylab.oscillation import garsia_norm, weighted_garsia_norm
from hardylab.circle import DiskScan
from hardylab.symbols import LOG_DEGREE, SYMBOL_NAMES, make_symbol, symbol_matrix


def test_all_symbols_antianalytic(symbols):
    for phi in symbols.values():
        plus = riesz_project(phi, "plus")
        assert np.max(np.abs(plus.samples)) < 1e-12


def test_names_and_order(grid):
    assert tuple(symbol_matrix(grid)) == SYMBOL_NAMES


def test_log_coefficients(grid):
    phi = make_symbol("log", grid)
    assert phi.coef(-1) == pytest.approx(-0.5)
    assert phi.coef(-LOG_DEGREE) == pytest.approx(-0.5 / LOG_DEGREE)
    assert abs(phi.coef(-LOG_DEGREE - 1)) < 1e-15


def test_log_degree_capped_on_small_grids():
    phi = make_symbol("log", CircleGrid(64))
    assert abs(phi.coef(-31)) > 0


def test_random_symbol_reproducible(grid):
    a = make_symbol("random16", grid, np.random.default_rng(9))
    b = make_symbol("random16", grid, np.random.default_rng(9))
    assert np.array_equal(a.samples, b.samples)


def test_unknown_name(grid):
    with pytest.raises(ValueError):
        make_symbol("sin", grid)


def test_weighted_ratio_stable_under_scan_doubling(symbols, weights):
    # the finest scale of every symbol is resolved by the default scan
    base, deep = DiskScan(8), DiskScan(16)
    for phi in symbols.values():
        g1, g2 = garsia_norm(phi, base).value, garsia_norm(phi, deep).value
        for w in weights.values():
            r1 = weighted_garsia_norm(phi, w, base).value / g1
            r2 = weighted_garsia_norm(phi, w, deep).value / g2
            assert abs(r2 / r1 - 1) < 0.02
