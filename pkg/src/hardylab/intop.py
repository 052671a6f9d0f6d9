"""The integral operators ``T_g f = (1/z) int_0^z f g'`` and ``P_g = M_z T_g``.

Both act on analytic polynomials coefficientwise.  Weighted section norms use
the Toeplitz Gram machinery of :mod:`hardylab.hankel`.
"""

from dataclasses import dataclass

import numpy as np

from .circle import CircleFn, DiskScan, _as_fn
from .disk import DiskQuadrature, gradient_on_quadrature
from .hankel import N_LADDER, WeightedGram, generalized_norm
from .oscillation import two_weight_garsia

__all__ = [
    "BandLimitError",
    "AnalyticPoly",
    "tg_apply",
    "pg_apply",
    "tg_matrix",
    "pg_matrix",
    "tg_section_norm",
    "tg_norm_experiment",
    "lp_pairing_check",
]


class BandLimitError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyticPoly:
    """``sum_k coefs[k] z^k`` with ``degree <= band_limit``."""

    coefs: tuple
    band_limit: int = 2047

    def __post_init__(self):
        c = np.array(self.coefs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if c.size - 1 > self.band_limit:
            raise BandLimitError(f"degree {c.size - 1} exceeds band limit {self.band_limit}")
        c.setflags(write=False)
        object.__setattr__(self, "coefs", c)

    @property
    def degree(self):
        nz = np.nonzero(self.coefs)[0]
        return int(nz[-1]) if nz.size else 0

    @classmethod
    def monomial(cls, n, band_limit=2047):
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1
        return cls(c, band_limit)

    @classmethod
    def from_circle(cls, f, degree=None):
        """Analytic part of a circle function, up to ``degree``."""
        fn = _as_fn(f)
        half = fn.grid.n_points // 2
        degree = half - 1 if degree is None else degree
        return cls(fn.fourier[:degree + 1], half - 1)

    def derivative(self):
        k = np.arange(1, self.coefs.size)
        return AnalyticPoly(k * self.coefs[1:], self.band_limit)

    def __call__(self, z):
        return np.polyval(self.coefs[::-1], np.asarray(z))

    def to_circle(self, grid):
        return CircleFn.from_coefficients(grid, dict(enumerate(self.coefs)))

    def __add__(self, other):
        n = max(self.coefs.size, other.coefs.size)
        a = np.zeros(n, dtype=complex)
        a[:self.coefs.size] += self.coefs
        a[:other.coefs.size] += other.coefs
        return AnalyticPoly(a, min(self.band_limit, other.band_limit))

    def __mul__(self, s):
        return AnalyticPoly(self.coefs * s, self.band_limit)

    __rmul__ = __mul__


def _trim(c):
    nz = np.nonzero(c)[0]
    return c[:nz[-1] + 1] if nz.size else c[:1]


def tg_apply(g, f):
    """``T_g f``: convolve ``a_k`` with ``(m+1) b_{m+1}`` and divide entry ``k`` by ``k + 1``."""
    limit = min(g.band_limit, f.band_limit)
    if f.degree + g.degree - 1 > limit:
        raise BandLimitError("T_g f exceeds the band limit")
    dg = _trim(g.derivative().coefs) if g.coefs.size > 1 else np.zeros(1, dtype=complex)
    c = np.convolve(_trim(f.coefs), dg)
    return AnalyticPoly(c / np.arange(1, c.size + 1), limit)


def pg_apply(g, f):
    """``P_g f = z T_g f``."""
    t = tg_apply(g, f)
    if t.coefs.size > t.band_limit:
        raise BandLimitError("P_g f exceeds the band limit")
    return AnalyticPoly(np.concatenate([[0], t.coefs]), t.band_limit)


def tg_matrix(g, n):
    """Matrix of ``T_g`` from ``z^0..z^n`` to ``z^0..z^{n + deg g - 1}`` (no output truncation)."""
    rows = n + max(g.degree, 1)
    out = np.zeros((rows, n + 1), dtype=complex)
    dg = g.derivative().coefs if g.coefs.size > 1 else np.zeros(1, dtype=complex)
    d = min(dg.size, rows)
    for j in range(n + 1):
        stop = min(rows, j + d)
        out[j:stop, j] = dg[:stop - j]
    return out / np.arange(1, rows + 1)[:, None]


def pg_matrix(g, n):
    t = tg_matrix(g, n)
    return np.vstack([np.zeros((1, n + 1), dtype=complex), t])


def tg_section_norm(g, n, mu=None, lam=None, which="T"):
    """Degree-``n`` section norm of ``T_g`` (or ``P_g``) from ``H^2(mu)`` to ``L^2(lam)``."""
    mat = tg_matrix(g, n) if which == "T" else pg_matrix(g, n)
    g_in = WeightedGram("analytic", mu, n + 1)
    g_out = WeightedGram("analytic", lam, mat.shape[0])
    return generalized_norm(mat, g_in, g_out)


def tg_norm_experiment(g, mu=None, lam=None, grid=None, ladder=N_LADDER, scan=None):
    """Section norms of ``T_g`` and ``P_g`` for two dual weight pairs against the Garsia quantities.

    Pair i): ``H^2(mu) -> L^2(lam)`` against
    ``sup (1/mu(z)) int |g - g(z)|^2 P_z lam dm``.
    Pair ii): ``H^2(lam^-1) -> L^2(mu^-1)`` against the ``mu^-1 / lam^-1`` version.
    """
    scan = scan or DiskScan()
    if grid is None:
        grid = next(w.grid for w in (mu, lam) if w is not None) if (mu or lam) else None
    if grid is None:
        raise ValueError("a grid is needed when both weights are the unit weight")
    gfn = g.to_circle(grid)
    r1, r2 = two_weight_garsia(gfn, lam, mu, scan)
    lam_inv = None if lam is None else lam.inverse()
    mu_inv = None if mu is None else mu.inverse()
    rows = []
    for n in ladder:
        t1 = tg_section_norm(g, n, mu, lam)
        p1 = tg_section_norm(g, n, mu, lam, "P")
        t2 = tg_section_norm(g, n, lam_inv, mu_inv)

        def ratio(a, b):
            return a / b if b > 0 else (0.0 if a == 0 else np.inf)

        rows.append({"n": n, "T_norm": t1, "P_norm": p1, "T_norm_dual": t2,
                     "C_ratio": ratio(t1, r1.value), "C_ratio_dual": ratio(t2, r2.value)})
    return {"garsia": [r1.value, r2.value], "rows": rows}


def lp_pairing_check(g, f, h, quad=None, grid=None):
    """``(P_g f, h)`` on the circle against ``4 int f g' conj(h') ln(1/|z|) dA``.

    With ``dA = dx dy / (2 pi)`` the Littlewood-Paley pairing of two analytic
    functions vanishing at 0 carries the factor 4.  Returns ``(circle, disk)``.
    """
    quad = quad or DiskQuadrature()
    pg = pg_apply(g, f)
    n = max(pg.coefs.size, h.coefs.size)
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[:pg.coefs.size] = pg.coefs
    b[:h.coefs.size] = h.coefs
    circle = complex(np.dot(a, np.conj(b)))
    z = quad.points
    fg = f(z) * g.derivative()(z)
    hp = h.derivative()(z)
    disk = complex(4 * quad.integrate(fg * np.conj(hp) * quad.log_kernel))
    return circle, disk
