"""Finite sections of Hankel operators between weighted Hardy spaces.

A section of degree ``n`` maps analytic coefficients ``a_0..a_n`` to the
anti-analytic coefficients ``b_1..b_n`` of ``P_-(phi f)`` through the matrix
``B[m-1, k] = phi_hat(-(m + k))``.  Weighted norms on either side come from
Toeplitz Gram matrices of the weight's Fourier coefficients, and the section
norm is the largest generalized singular value.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cholesky, solve_triangular, toeplitz, LinAlgError

from .circle import CircleFn, DiskScan, _as_fn, riesz_project, szego_kernel

__all__ = [
    "DegenerateWeightError",
    "ConsistencyError",
    "N_LADDER",
    "toeplitz_gram",
    "WeightedGram",
    "HankelSection",
    "hankel_apply",
    "generalized_norm",
    "power_iteration_norm",
    "weighted_operator_norm",
    "kernel_testing",
    "rkt_sup",
    "rkt_experiment",
    "commutator_apply",
    "bandwidth",
    "ratio_increments",
    "fluctuation_ok",
]

N_LADDER = (16, 32, 64, 128)


class DegenerateWeightError(ValueError):
    """A Gram matrix that should be positive definite is not."""


class ConsistencyError(ArithmeticError):
    """Two independent computations of the same quantity disagree."""


def _weight_fn(w):
    return None if w is None else getattr(w, "base", w)


def toeplitz_gram(w, size, side="analytic"):
    """Gram matrix of ``int |f|^2 w dm`` on a polynomial section.

    ``side="analytic"`` uses the basis ``zeta^0..zeta^(size-1)`` and gives
    ``G[j, k] = w_hat(j - k)``; ``side="antianalytic"`` uses
    ``zeta^-1..zeta^-size`` and gives ``G[j, k] = w_hat(k - j)``.
    ``w = None`` means the unit weight.
    """
    if w is None:
        return np.eye(size, dtype=complex)
    fn = _weight_fn(w)
    if size >= fn.grid.n_points // 2:
        raise ValueError("section exceeds the grid band limit")
    c = fn.fourier
    idx = np.arange(size)
    col = c[idx % fn.grid.n_points]
    row = c[(-idx) % fn.grid.n_points]
    if side == "analytic":
        return toeplitz(col, row)
    if side == "antianalytic":
        return toeplitz(row, col)
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class WeightedGram:
    side: str
    weight: object
    size: int

    @cached_property
    def matrix(self):
        return toeplitz_gram(self.weight, self.size, self.side)

    @cached_property
    def factor(self):
        """Lower Cholesky factor ``L`` with ``G = L L^*``."""
        try:
            return cholesky(self.matrix, lower=True)
        except LinAlgError as exc:
            raise DegenerateWeightError(f"Gram matrix of size {self.size} is not positive definite") from exc

    def norm2(self, coefs):
        a = np.asarray(coefs)
        return float(np.real(np.conj(a) @ self.matrix @ a))


@dataclass(frozen=True)
class HankelSection:
    """Degree-``n`` section of the Hankel operator with symbol ``phi``.

    Inputs are ``a_0..a_n``.  Output rows run over ``m = 1..max(n, d)`` where
    ``d`` is the anti-analytic bandwidth of ``phi``, so no part of
    ``P_-(phi f)`` is cut off; the first ``n`` rows are the square-ish Hankel
    block ``phi_hat(-(m + k))``.  Keeping every reachable row makes the
    section an exact restriction of the operator, which is what makes
    weighted section norms nondecreasing in ``n``.
    """

    phi: object
    n: int = 64

    @cached_property
    def n_out(self):
        f = _as_fn(self.phi)
        npts = f.grid.n_points
        neg = np.abs(f.fourier[npts // 2 + 1:][::-1])
        scale = max(float(np.abs(f.fourier).max()), 1e-300)
        nz = np.nonzero(neg > 1e-13 * scale)[0]
        d = int(nz[-1]) + 1 if nz.size else 0
        return max(self.n, d)

    @cached_property
    def matrix(self):
        f = _as_fn(self.phi)
        npts = f.grid.n_points
        if self.n_out >= npts // 2 or 2 * self.n >= npts // 2:
            raise ValueError("section exceeds the grid band limit")
        m = np.arange(1, self.n_out + 1)[:, None]
        k = np.arange(self.n + 1)[None, :]
        idx = m + k
        vals = f.fourier[(-idx) % npts]
        # frequencies past the band limit are not Fourier data of the grid function
        return np.where(idx < npts // 2, vals, 0)

    @property
    def block(self):
        """The ``n x (n + 1)`` Hankel block ``B[m-1, k] = phi_hat(-(m + k))``."""
        return self.matrix[:self.n]

    def input_gram(self, w):
        return WeightedGram("analytic", w, self.n + 1)

    def output_gram(self, w):
        return WeightedGram("antianalytic", w, self.n_out)


def hankel_apply(section, coefs):
    """Anti-analytic coefficients ``b_1..b_{n_out}`` of ``P_-(phi f)``."""
    a = np.zeros(section.n + 1, dtype=complex)
    c = np.asarray(coefs, dtype=complex)
    if c.size > section.n + 1:
        raise ValueError("input degree exceeds the section")
    a[:c.size] = c
    return section.matrix @ a


def _whitened(matrix, g_in, g_out):
    """``M^* B L^{-*}`` for ``G_in = L L^*`` and ``G_out = M M^*``."""
    L = g_in.factor
    M = g_out.factor
    # B L^{-*} = (L^{-1} B^*)^*
    right = solve_triangular(L, matrix.conj().T, lower=True).conj().T
    return M.conj().T @ right


def generalized_norm(matrix, g_in, g_out):
    """Largest generalized singular value ``sup ||B a||_out / ||a||_in``."""
    if not np.any(matrix):
        return 0.0
    return float(np.linalg.svd(_whitened(matrix, g_in, g_out), compute_uv=False)[0])


def power_iteration_norm(matrix, g_in, g_out, tol=1e-12, maxiter=20000, seed=0):
    """Same quantity by power iteration on ``A^* A`` (cross-check)."""
    A = _whitened(matrix, g_in, g_out)
    if not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(maxiter):
        y = A.conj().T @ (A @ x)
        new = np.linalg.norm(y)
        x = y / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def weighted_operator_norm(section, mu=None, lam=None):
    """Section norm of ``H_phi : H^2(mu) -> L^2(lam)``."""
    return generalized_norm(section.matrix, section.input_gram(mu), section.output_gram(lam))


def kernel_testing(section, mu=None, lam=None, points=None):
    """Max over ``points`` of ``||H K_z^(n)||_lam / ||K_z^(n)||_mu`` with truncated kernels."""
    points = DiskScan().points if points is None else np.asarray(points)
    k = np.arange(section.n + 1)[:, None]
    A = np.conj(points)[None, :] ** k
    BA = section.matrix @ A
    g_in = section.input_gram(mu).matrix
    g_out = section.output_gram(lam).matrix
    num = np.real(np.einsum("ij,ik,kj->j", np.conj(BA), g_out, BA))
    den = np.real(np.einsum("ij,ik,kj->j", np.conj(A), g_in, A))
    vals = np.sqrt(np.maximum(num, 0) / den)
    i = int(np.argmax(vals))
    return float(vals[i]), complex(points[i])


def rkt_sup(phi, mu=None, lam=None, scan=None, chunk=64):
    """``sup_z ||H_phi K_z||_{L^2(lam)} / ||K_z||_{L^2(mu)}`` with exact kernels.

    Uses ``H_phi K_z = (phi - phi(z)) K_z`` where
    ``phi(z) = <phi K_z, K_z> / ||K_z||^2`` (so ``P_+(phi K_z) = phi(z) K_z``
    for anti-analytic ``phi``), all integrals by direct circle quadrature.
    Returns ``(value, witness)``.
    """
    scan = scan or DiskScan()
    f = _as_fn(phi)
    g = f.grid
    lam_s = np.ones(g.n_points) if lam is None else lam.samples
    mu_s = np.ones(g.n_points) if mu is None else mu.samples
    pts = scan.points
    vals = np.empty(pts.size)
    for i in range(0, pts.size, chunk):
        z = pts[i:i + chunk, None]
        k2 = np.abs(szego_kernel(z, g.zeta[None, :])) ** 2
        norm_k = k2.sum(axis=1)
        phi_z = (k2 @ f.samples) / norm_k
        num = (np.abs(f.samples[None, :] - phi_z[:, None]) ** 2 * k2) @ lam_s
        vals[i:i + chunk] = num / (k2 @ mu_s)
    j = int(np.argmax(vals))
    return float(np.sqrt(vals[j])), complex(pts[j])


def rkt_experiment(phi, mu=None, lam=None, ladder=N_LADDER, scan=None, garsia=None):
    """Section norms over the ``n`` ladder for both weight pairs against the Garsia bound.

    Returns a dict with per-``n`` rows: operator norms for ``mu -> lam`` and
    ``lam^-1 -> mu^-1``, the kernel-testing value, and the C-ratio
    ``norm / max(G_lam_mu, G_muinv_laminv)``.
    """
    from .oscillation import two_weight_garsia

    scan = scan or DiskScan()
    if garsia is None:
        g1, g2 = two_weight_garsia(_as_fn(phi), lam, mu, scan)
        garsia = (g1.value, g2.value)
    gmax = max(garsia)
    lam_inv = None if lam is None else lam.inverse()
    mu_inv = None if mu is None else mu.inverse()
    rows = []
    for n in ladder:
        sec = HankelSection(phi, n)
        norm1 = weighted_operator_norm(sec, mu, lam)
        norm2 = weighted_operator_norm(sec, lam_inv, mu_inv)
        test, wit = kernel_testing(sec, mu, lam, scan.points)
        rows.append({
            "n": n, "norm": norm1, "norm_dual": norm2,
            "kernel_testing": test, "kernel_witness": [wit.real, wit.imag],
            "testing_ok": bool(test <= norm1 + 1e-8),
            "C_ratio": norm1 / gmax if gmax > 0 else (0.0 if norm1 == 0 else np.inf),
            "C_ratio_dual": norm2 / gmax if gmax > 0 else (0.0 if norm2 == 0 else np.inf),
        })
    norms = [r["norm"] for r in rows]
    ratios = [r["C_ratio"] for r in rows]
    spread = (max(ratios) / min(ratios) - 1) if min(ratios) > 0 else 0.0
    steps = ratio_increments(ratios)
    return {
        "garsia": list(garsia),
        "rows": rows,
        "monotone": bool(all(b >= a * (1 - 1e-12) for a, b in zip(norms, norms[1:]))),
        "testing_ok": all(r["testing_ok"] for r in rows),
        "C_ratio_spread": spread,
        "C_ratio_increments": steps,
        "fluctuation_ok": fluctuation_ok(steps),
    }


# absolute slack when comparing consecutive increments
FLUCTUATION_SLACK = 0.005


def ratio_increments(ratios):
    """Relative changes ``r_{i+1} / r_i - 1`` along the ladder."""
    return [b / a - 1 if a > 0 else 0.0 for a, b in zip(ratios, ratios[1:])]


def fluctuation_ok(steps, bound=0.2, slack=FLUCTUATION_SLACK):
    """Each step at most ``bound`` in size and no step larger than its predecessor (up to ``slack``)."""
    small = all(abs(d) <= bound for d in steps)
    settling = all(abs(b) <= abs(a) + slack for a, b in zip(steps, steps[1:]))
    return bool(small and settling)


def bandwidth(f):
    """Largest ``|k|`` with a nonzero Fourier coefficient."""
    fn = _as_fn(f)
    c = np.abs(fn.fourier)
    nz = np.nonzero(c > 1e-14 * max(c.max(), 1e-300))[0]
    if nz.size == 0:
        return 0
    return int(np.max(np.abs(fn.grid.freqs[nz])))


def commutator_apply(phi, f, tol=1e-10):
    """``[phi, H] f`` computed as ``P_- M_phi P_+ f - P_+ M_phi P_- f`` on the grid and as
    ``H_phi f_+ - H_{conj phi}^* f_-`` with Hankel matrices; the two must agree."""
    phi = _as_fn(phi)
    f = _as_fn(f)
    grid = f.grid
    fp = riesz_project(f, "plus")
    fm = riesz_project(f, "minus")
    grid_form = riesz_project(phi * fp, "minus") - riesz_project(phi * fm, "plus")

    n = bandwidth(phi) + bandwidth(f) + 1
    npts = grid.n_points
    if 2 * n >= npts // 2:
        raise ValueError("inputs are not band-limited enough for this grid")
    sec = HankelSection(phi, n)
    a = fp.fourier[np.arange(n + 1)]
    b_out = sec.matrix @ a
    # adjoint of the Hankel matrix of conj(phi): entries phi_hat(m + k)
    m = np.arange(1, n + 1)[None, :]
    k = np.arange(n + 1)[:, None]
    adj = phi.fourier[(m + k) % npts]
    h = fm.fourier[(-np.arange(1, n + 1)) % npts]
    c_out = adj @ h
    coefs = np.zeros(npts, dtype=complex)
    coefs[(-np.arange(1, n + 1)) % npts] += b_out
    coefs[np.arange(n + 1)] -= c_out
    matrix_form = CircleFn.from_fourier(grid, coefs)
    diff = np.max(np.abs(matrix_form.fourier - grid_form.fourier))
    scale = max(1.0, float(np.max(np.abs(grid_form.fourier))))
    if diff > tol * scale:
        raise ConsistencyError(f"commutator forms differ by {diff:.3e}")
    return grid_form
