"""BMO-type and Garsia-type norms of circle functions.

Arc-based norms take their supremum over an :class:`~hardylab.weights.ArcFamily`;
disk-based (Garsia) norms over a :class:`~hardylab.circle.DiskScan`.  Every
report carries the arc or disk point where the maximum was attained.

The weighted BMO constant ``c_I`` comes in three flavours:

``"as-written"``
    ``c_I = (1 / w(I)) int_I phi dm`` with oscillation ``int_I |phi - c_I| dm``.
``"oscillation-mean"``
    ``c_I = phi_I`` (plain average) with oscillation ``int_I |phi - phi_I| dm``.
``"weighted-mean"``
    ``c_I = (1 / w(I)) int_I phi w dm`` with oscillation
    ``int_I |phi - c_I| w dm``; this is the normalization under which the
    dyadic telescoping estimate is a two-line consequence of doubling.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circle import CircleFn, DiskScan, scan_averages
from .weights import TWO_PI, Arc, ArcFamily, arc_matrix, _arc_row

__all__ = [
    "NumericalConsistencyError",
    "OscillationReport",
    "VARIANTS",
    "arc_means",
    "bmo_norm",
    "weighted_bmo_norm",
    "garsia_norm",
    "garsia_profile",
    "weighted_garsia_norm",
    "two_weight_garsia",
    "jn_p_norm",
    "jn_inf_c_norm",
    "inf_c_on_arc",
    "check_telescoping",
]

VARIANTS = ("as-written", "oscillation-mean", "weighted-mean")


class NumericalConsistencyError(ArithmeticError):
    """A quantity that is nonnegative analytically came out clearly negative."""


@dataclass
class OscillationReport:
    kind: str
    value: float
    witness: object
    params: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def as_dict(self):
        w = self.witness
        if isinstance(w, Arc):
            w = {"arc_center": w.center, "arc_length": w.length}
        elif isinstance(w, complex):
            w = {"re": w.real, "im": w.imag}
        return {"kind": self.kind, "value": float(self.value), "witness": w,
                "params": self.params}


def _samples(f):
    return f.samples


def _weight_samples(w, grid):
    if w is None:
        return np.ones(grid.n_points)
    return w.samples


class _ArcSums:
    """Row-wise sums over the nonzeros of the arc matrix."""

    def __init__(self, grid, arcs):
        arcs.validate(grid)
        self.arcs = arcs
        self.mat = arc_matrix(grid, arcs)
        self.rows = np.repeat(np.arange(self.mat.shape[0]), np.diff(self.mat.indptr))
        self.measure = np.repeat(arcs.lengths / TWO_PI, arcs.M)

    def integrate(self, values):
        return self.mat @ values

    def integrate_per_arc(self, func):
        """``sum_j W_ij func(j, i)`` where ``func`` sees node and arc indices."""
        vals = self.mat.data * func(self.mat.indices, self.rows)
        return np.bincount(self.rows, weights=vals, minlength=self.mat.shape[0])


def arc_means(phi, w, arcs, variant):
    """Per-arc constant ``c_I`` for a weighted BMO variant."""
    sums = _ArcSums(phi.grid, arcs)
    ws = _weight_samples(w, phi.grid)
    w_I = sums.integrate(ws)
    if variant == "as-written":
        return sums.integrate(phi.samples) / w_I
    if variant == "oscillation-mean":
        return sums.integrate(phi.samples) / sums.measure
    if variant == "weighted-mean":
        return sums.integrate(phi.samples * ws) / w_I
    raise ValueError(f"unknown variant {variant!r}")


def _max_report(kind, vals, arcs, params):
    i = int(np.argmax(vals))
    return OscillationReport(kind, float(vals[i]), arcs.arcs[i], params)


def bmo_norm(phi, arcs=None):
    """``sup_I (1/|I|) int_I |phi - phi_I| dm`` over the arc family."""
    arcs = arcs or ArcFamily()
    sums = _ArcSums(phi.grid, arcs)
    c = sums.integrate(phi.samples) / sums.measure
    s = phi.samples
    osc = sums.integrate_per_arc(lambda j, i: np.abs(s[j] - c[i])) / sums.measure
    return _max_report("bmo", osc, arcs, {"J": arcs.J, "M": arcs.M})


def weighted_bmo_norm(phi, w, arcs=None, variant="as-written"):
    """Weighted BMO norm ``sup_I (1/w(I)) int_I |phi - c_I| (w) dm``."""
    arcs = arcs or ArcFamily()
    sums = _ArcSums(phi.grid, arcs)
    ws = _weight_samples(w, phi.grid)
    c = arc_means(phi, w, arcs, variant)
    s = phi.samples
    if variant == "weighted-mean":
        osc = sums.integrate_per_arc(lambda j, i: np.abs(s[j] - c[i]) * ws[j])
    else:
        osc = sums.integrate_per_arc(lambda j, i: np.abs(s[j] - c[i]))
    osc = osc / sums.integrate(ws)
    return _max_report(f"bmo_w[{variant}]", osc, arcs,
                       {"J": arcs.J, "M": arcs.M, "variant": variant})


def garsia_profile(phi, scan=None):
    """``|phi|^2(z) - |phi(z)|^2`` at every scan point (clamping tiny negatives)."""
    scan = scan or DiskScan()
    # centring leaves the variance unchanged and avoids cancellation
    s = phi.samples - np.mean(phi.samples)
    ext, ext2 = scan_averages(phi.grid, scan, s, np.abs(s) ** 2)
    inner = ext2 - np.abs(ext) ** 2
    if np.min(inner) < -1e-8:
        raise NumericalConsistencyError(
            f"Garsia inner quantity {np.min(inner):.3e} is negative"
        )
    return np.where(inner < 0, 0.0, inner)


def _scan_report(kind, vals, scan, params):
    i = int(np.argmax(vals))
    params = {"kmax": scan.kmax, "n_angles": scan.n_angles, **params}
    return OscillationReport(kind, float(np.sqrt(vals[i])), complex(scan.points[i]), params)


def garsia_norm(phi, scan=None):
    """``sup_z (|phi|^2(z) - |phi(z)|^2)^{1/2}`` over the disk scan."""
    scan = scan or DiskScan()
    return _scan_report("garsia", garsia_profile(phi, scan), scan, {})


def _two_weight_profile(phi, num_w, den_w, scan):
    """``(1/den(z)) int |phi - phi(z)|^2 P_z num dm`` at every scan point."""
    s = phi.samples - np.mean(phi.samples)
    nw = _weight_samples(num_w, phi.grid)
    dw = _weight_samples(den_w, phi.grid)
    ext, den, a0, a1, a2 = scan_averages(
        phi.grid, scan, s, dw, nw, nw * s, nw * np.abs(s) ** 2
    )
    var = a2 - 2 * np.real(np.conj(ext) * a1) + np.abs(ext) ** 2 * a0
    if np.min(var) < -1e-8 * np.max(np.abs(a2)):
        raise NumericalConsistencyError("weighted Poisson variance is negative")
    return np.maximum(var, 0.0) / den


def weighted_garsia_norm(phi, w, scan=None):
    """``sup_z ((1/w(z)) int |phi - phi(z)|^2 P_z w dm)^{1/2}``."""
    scan = scan or DiskScan()
    return _scan_report("garsia_w", _two_weight_profile(phi, w, w, scan), scan, {})


def two_weight_garsia(phi, lam, mu, scan=None):
    """The two-weight Garsia pair ``(||phi||_{G, lam mu}, ||phi||_{G, mu^-1 lam^-1})``.

    The first is normalized by ``mu(z)`` with ``lam`` in the integrand; the
    second by ``lam^{-1}(z)`` with ``mu^{-1}`` in the integrand.
    """
    scan = scan or DiskScan()
    first = _two_weight_profile(phi, lam, mu, scan)
    lam_inv = None if lam is None else lam.inverse()
    mu_inv = None if mu is None else mu.inverse()
    second = _two_weight_profile(phi, mu_inv, lam_inv, scan)
    return (_scan_report("garsia_lam_mu", first, scan, {}),
            _scan_report("garsia_muinv_laminv", second, scan, {}))


def jn_p_norm(phi, w, p, arcs=None):
    """``sup_I ((1/w(I)) int_I |phi - c_I|^p dm)^{1/p}`` with ``c_I`` as printed."""
    arcs = arcs or ArcFamily()
    sums = _ArcSums(phi.grid, arcs)
    ws = _weight_samples(w, phi.grid)
    c = arc_means(phi, w, arcs, "as-written")
    s = phi.samples
    osc = sums.integrate_per_arc(lambda j, i: np.abs(s[j] - c[i]) ** p)
    vals = (osc / sums.integrate(ws)) ** (1.0 / p)
    return _max_report(f"jn_p{p:g}", vals, arcs, {"p": float(p)})


def _weighted_median(x, wts):
    order = np.argsort(x)
    cw = np.cumsum(wts[order])
    return x[order][np.searchsorted(cw, 0.5 * cw[-1])]


def inf_c_on_arc(phi, w, arc, p):
    """``inf_c ((1/w(I)) int_I |phi - c|^p w dm)^{1/p}`` on one arc.

    Returns ``(value, c)``.  For ``p = 2`` the minimizer is the weighted
    mean; for ``p = 1`` it starts from coordinatewise weighted medians and
    is refined by Nelder-Mead in the complex plane (skipped for real data,
    where the weighted median is already optimal).
    """
    j, b = _arc_row(phi.grid, arc)
    ws = _weight_samples(w, phi.grid)[j]
    x = phi.samples[j]
    mass = b * ws
    total = mass.sum()

    def objective(c):
        return np.dot(mass, np.abs(x - c) ** p) / total

    if p == 2:
        c = np.dot(mass, x) / total
    elif p == 1:
        re = _weighted_median(np.real(x), mass)
        if np.iscomplexobj(x) and np.any(np.imag(x)):
            im = _weighted_median(np.imag(x), mass)
            scale = max(np.ptp(np.real(x)), np.ptp(np.imag(x)), 1e-300)
            res = minimize(lambda v: objective(v[0] + 1j * v[1]), [re, im],
                           method="Nelder-Mead",
                           options={"xatol": 1e-8 * scale, "fatol": 1e-12,
                                    "maxiter": 4000})
            c = complex(res.x[0], res.x[1])
            if objective(c) > objective(re + 1j * im):
                c = re + 1j * im
        else:
            c = re
    else:
        res = minimize(lambda v: objective(v[0] + 1j * v[1]),
                       [np.real(np.mean(x)), np.imag(np.mean(x))],
                       method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        c = complex(res.x[0], res.x[1])
    return float(objective(c) ** (1.0 / p)), c


def jn_inf_c_norm(phi, w, p, arcs=None):
    """``sup_I inf_c ((1/w(I)) int_I |phi - c|^p w dm)^{1/p}`` (w in the integrand)."""
    arcs = arcs or ArcFamily()
    arcs.validate(phi.grid)
    if p == 2:
        sums = _ArcSums(phi.grid, arcs)
        ws = _weight_samples(w, phi.grid)
        c = arc_means(phi, w, arcs, "weighted-mean")
        s = phi.samples
        osc = sums.integrate_per_arc(lambda j, i: np.abs(s[j] - c[i]) ** 2 * ws[j])
        vals = np.sqrt(np.maximum(osc, 0.0) / sums.integrate(ws))
    else:
        vals = np.array([inf_c_on_arc(phi, w, a, p)[0] for a in arcs.arcs])
    return _max_report(f"jn_inf_c_p{p:g}", vals, arcs, {"p": float(p)})


def check_telescoping(phi, w, arcs=None, a2=None):
    """Dyadic chain bound ``|c_I - c_{2^k I}| <= 4 k [w]_{A_2} ||phi||_{BMO,w}``.

    Uses the weighted-mean normalization for both ``c_I`` and the norm.  Returns
    a list of ``(arc, k, lhs, rhs)`` rows over all family arcs and all ``k``
    with ``2^k |I| <= 1``.
    """
    from .weights import a2_characteristic

    arcs = arcs or ArcFamily()
    a2 = a2 if a2 is not None else a2_characteristic(w, arcs)
    norm = weighted_bmo_norm(phi, w, arcs, "weighted-mean").value
    c = arc_means(phi, w, arcs, "weighted-mean").reshape(arcs.J + 1, arcs.M)
    rows = []
    for level in range(arcs.J + 1):
        for k in range(1, level + 1):
            diff = np.abs(c[level] - c[level - k])
            for m in range(arcs.M):
                rows.append((arcs.arcs[level * arcs.M + m], k,
                             float(diff[m]), 4 * k * a2 * norm))
    return rows
