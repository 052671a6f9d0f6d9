"""Carleson measures on the disk and their one- and two-weight embedding constants.

Measures are finite sums of point masses.  A weight ``w`` evaluated at an
interior point means its Poisson extension ``w(z)``.  Suprema over the disk
are maxima over a :class:`~hardylab.circle.DiskScan`; for small measures the
atom locations are added to the scan.

Sector constants use ``mu(I_S) = int_{I_S} mu dm`` with the normalized arc
measure, so for ``mu = 1`` a footprint of angular length ``h`` has measure
``h / (2 pi)``.  The unweighted ``tau(S) / h`` form is reported as ``D_h``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .circle import (RADIUS_CAP, DiskScan, _as_fn, harmonic_extend, poisson_kernel,
                     riesz_project, scan_averages, polar_averages)
from .disk import DiskQuadrature, gradient_on_quadrature, grad_norm2
from .hankel import DegenerateWeightError, toeplitz_gram
from .oscillation import garsia_norm
from .weights import TWO_PI, Arc, arc_integral

__all__ = [
    "DegenerateWeightError",
    "PreconditionError",
    "DiskMeasure",
    "Sector",
    "sector_family",
    "EmbeddingCorpus",
    "CarlesonConstants",
    "carleson_constants",
    "check_equivalence_ordering",
    "gradient_measure",
    "weighted_embedding_check",
    "sector_equivalence",
    "poisson_energy_check",
    "random_measure",
]

# Measures up to this many atoms use exactly rounded sums and join the sup set.
EXACT_SUM_LIMIT = 512


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class DiskMeasure:
    """Finite nonnegative atomic measure ``sum m_j delta_{z_j}``.

    ``layout`` is ``(radii, n_angles)`` when the atoms fill a polar grid
    ``radii[i] e^{2 pi i b / n_angles}`` in row-major order; kernel sums then
    run as FFT correlations.
    """

    points: np.ndarray
    masses: np.ndarray
    provenance: str = "custom"
    layout: tuple = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).ravel()
        ms = np.array(self.masses, dtype=float).ravel()
        if pts.shape != ms.shape:
            raise ValueError("points and masses differ in length")
        if np.any(ms < 0) or not np.all(np.isfinite(ms)):
            raise ValueError("masses must be finite and nonnegative")
        if np.any(np.abs(pts) > RADIUS_CAP):
            raise ValueError("atom outside the radius cap")
        pts.setflags(write=False)
        ms.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    def __len__(self):
        return self.points.size

    @property
    def total_mass(self):
        return math.fsum(self.masses)

    @property
    def is_small(self):
        return self.layout is None and len(self) <= EXACT_SUM_LIMIT

    @classmethod
    def zero(cls):
        return cls(np.zeros(0, complex), np.zeros(0), "zero")

    @classmethod
    def atom(cls, z, mass=1.0):
        return cls([z], [mass], "atom")

    @classmethod
    def from_density(cls, quad, density, provenance="density"):
        """Discretize ``density dA`` on a disk quadrature (one atom per node)."""
        density = np.broadcast_to(np.asarray(density, dtype=float), quad.points.shape)
        return cls(quad.points, density * quad.weights, provenance,
                   (quad.radii, quad.n_angular))

    @classmethod
    def area(cls, quad, scale=1.0):
        return cls.from_density(quad, scale, "area")

    def scaled(self, s):
        return replace(self, masses=self.masses * s)

    def with_atom(self, z, mass):
        return DiskMeasure(np.append(self.points, z), np.append(self.masses, mass),
                           self.provenance)

    # one "re im mass" line per atom; repr() keeps floats exact
    def dumps(self):
        lines = [f"# provenance: {self.provenance}"]
        lines += [f"{float(z.real)!r} {float(z.imag)!r} {float(m)!r}"
                  for z, m in zip(self.points, self.masses)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        pts, ms, prov = [], [], "file"
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if line.startswith("# provenance:"):
                prov = line.split(":", 1)[1].strip()
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 're im mass', got {raw!r}")
            try:
                re_, im_, m = (float(p) for p in parts)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            pts.append(complex(re_, im_))
            ms.append(m)
        return cls(np.array(pts, dtype=complex), np.array(ms, dtype=float), prov)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())


def random_measure(rng, n_atoms, kmax=8, mass_scale=1.0):
    """Atoms at radii ``1 - 2^-u`` (``u`` uniform on ``[0.5, kmax]``) with masses ``~ (1 - r)``."""
    u = rng.uniform(0.5, kmax, n_atoms)
    r = 1 - 2.0**-u
    z = r * np.exp(1j * rng.uniform(0, TWO_PI, n_atoms))
    m = mass_scale * (1 - r) * rng.exponential(1.0, n_atoms)
    return DiskMeasure(z, m, "random")


@dataclass(frozen=True)
class Sector:
    """``{r e^{it} : 1 - h <= r < 1, |t - theta0| <= h}`` with footprint of length ``h``."""

    h: float
    theta0: float

    def __post_init__(self):
        if not 0 < self.h <= 1:
            raise ValueError("sector height must lie in (0, 1]")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return self._mask(np.abs(z), np.angle(z))

    def _mask(self, r, ang):
        dt = np.abs((ang - self.theta0 + np.pi) % TWO_PI - np.pi)
        inside = (r >= 1 - self.h) & (r < 1) & (dt <= self.h)
        # the origin has every argument
        return inside | ((r == 0) & (self.h >= 1))

    @property
    def footprint(self):
        return Arc(self.theta0, self.h)

    @property
    def apex(self):
        """The point ``(1 - h/2) e^{i theta0}`` above the footprint."""
        return (1 - self.h / 2) * np.exp(1j * self.theta0)


def sector_family(levels=10, n_centers=64):
    """Sectors with ``h = 2^-j`` (``j = 0..levels``) at ``n_centers`` uniform angles."""
    centers = TWO_PI * np.arange(n_centers) / n_centers
    return [Sector(2.0**-j, c) for j in range(levels + 1) for c in centers]


def _sum(values):
    return math.fsum(values) if values.size <= EXACT_SUM_LIMIT else float(np.sum(values))


def _sector_masses(measure, weighted, sectors):
    """``(lam tau)(S)`` for every sector."""
    r = np.abs(measure.points)
    ang = np.angle(measure.points)
    return np.array([_sum(weighted[s._mask(r, ang)]) for s in sectors])


def _footprint(mu, s):
    foot = s.h / TWO_PI if mu is None else float(np.real(arc_integral(mu.base, s.footprint)))
    if foot <= 0:
        raise DegenerateWeightError(f"mu(I_S) = 0 for sector {s}")
    return foot


# -- weights and kernel sums at the sup points ---------------------------------

def _sup_extra(measure):
    return measure.points if measure.is_small and len(measure) else np.zeros(0, complex)


def _extend_at_atoms(w, measure):
    if w is None:
        return np.ones(len(measure))
    if len(measure) == 0:
        return np.zeros(0)
    if measure.layout is not None:
        radii, n_ang = measure.layout
        (ext,) = polar_averages(w.grid, radii, n_ang, w.samples)
        return ext.ravel()
    return harmonic_extend(w.base, measure.points).real


def _extend_at_sup(w, scan, extra):
    if w is None:
        return np.ones(scan.points.size + extra.size)
    (vals,) = scan_averages(w.grid, scan, w.samples)
    if extra.size:
        vals = np.concatenate([vals, harmonic_extend(w.base, extra).real])
    return vals


def _kernel_sq(z, xi):
    return 1.0 / np.abs(1 - np.conj(z) * xi) ** 2


def _direct_sums(points, atoms, kernel, vec):
    out = np.empty(points.size)
    if atoms.size == 0:
        out[:] = 0.0
        return out
    exact = vec.size <= EXACT_SUM_LIMIT
    chunk = max(1, 2**21 // atoms.size)
    for i in range(0, points.size, chunk):
        block = kernel(points[i:i + chunk, None], atoms[None, :]) * vec[None, :]
        out[i:i + chunk] = [math.fsum(row) for row in block] if exact else block.sum(axis=1)
    return out


def _polar_sums(scan, measure, kernel, vec):
    """Scan-point sums for a polar-layout measure by FFT correlation per ring pair."""
    radii, n_ang = measure.layout
    step = n_ang // scan.n_angles
    W = np.asarray(vec, dtype=float).reshape(radii.size, n_ang)
    Wf = np.fft.fft(W, axis=1)
    ring = radii[:, None] * np.exp(2j * np.pi * np.arange(n_ang) / n_ang)[None, :]
    out = []
    if scan.include_origin:
        out.append(np.array([np.sum(kernel(0j, ring) * W)]))
    for rs in scan.radii:
        kf = np.fft.fft(kernel(rs, ring), axis=1)
        corr = np.fft.ifft(Wf * np.conj(kf), axis=1).real.sum(axis=0)
        out.append(corr[::step])
    return np.concatenate(out)


def _kernel_sums(scan, extra, measure, kernel, vec):
    """``sum_j kernel(z, xi_j) vec_j`` at the scan points followed by ``extra``."""
    if measure.layout is not None and measure.layout[1] % scan.n_angles == 0:
        head = _polar_sums(scan, measure, kernel, vec)
    else:
        head = _direct_sums(scan.points, measure.points, kernel, vec)
    if extra.size:
        return np.concatenate([head, _direct_sums(extra, measure.points, kernel, vec)])
    return head


@dataclass
class EmbeddingCorpus:
    """Random analytic polynomials (rows of ``poly_coefs``) for the embedding test.

    Reproducing kernels at the sup points are always added.
    """

    poly_coefs: np.ndarray

    @classmethod
    def build(cls, rng, n_random=200, degree=64):
        shape = (n_random, degree + 1)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return cls(c / np.sqrt(2))


def _poly_energy(coefs, measure, vec):
    """``sum_j |f(xi_j)|^2 vec_j`` for every corpus polynomial."""
    if len(measure) == 0:
        return np.zeros(coefs.shape[0])
    if measure.layout is not None and coefs.shape[1] <= measure.layout[1]:
        radii, n_ang = measure.layout
        W = np.asarray(vec, dtype=float).reshape(radii.size, n_ang)
        k = np.arange(coefs.shape[1])
        out = np.zeros(coefs.shape[0])
        for i, r in enumerate(radii):
            padded = np.zeros((coefs.shape[0], n_ang), dtype=complex)
            padded[:, :k.size] = coefs * r**k
            vals = np.fft.ifft(padded, axis=1) * n_ang
            out += (np.abs(vals) ** 2) @ W[i]
        return out
    vals = np.zeros((coefs.shape[0], len(measure)), dtype=complex)
    for j in range(coefs.shape[1] - 1, -1, -1):
        vals = vals * measure.points[None, :] + coefs[:, j:j + 1]
    energy = np.abs(vals) ** 2 * vec[None, :]
    if vec.size <= EXACT_SUM_LIMIT:
        return np.array([math.fsum(row) for row in energy])
    return energy.sum(axis=1)


def _embedding_ratios(scan, extra, measure, lam_at, den_w, den_at_sup, corpus):
    """Corpus ratios ``int |f|^2 lam dtau / int |f|^2 den_w dm``: kernels, then polynomials."""
    masses = measure.masses * lam_at
    pts = np.concatenate([scan.points, extra])
    num_k = _kernel_sums(scan, extra, measure, _kernel_sq, masses)
    kernel_ratios = num_k * (1 - np.abs(pts) ** 2) / den_at_sup
    coefs = corpus.poly_coefs
    num_p = _poly_energy(coefs, measure, masses)
    gram = toeplitz_gram(den_w, coefs.shape[1])
    den_p = np.real(np.einsum("ij,jk,ik->i", np.conj(coefs), gram, coefs))
    return kernel_ratios, num_p / den_p


@dataclass
class CarlesonConstants:
    """``B`` (corpus embedding), ``C`` (Poisson test), ``D`` (sector test) with witnesses."""

    B: float
    C: float
    D: float
    D_h: float
    B_kernel: float
    B_poly: float
    witness_B: object
    witness_C: complex
    witness_D: Sector
    C_profile: np.ndarray = field(repr=False, default=None)
    B_kernel_profile: np.ndarray = field(repr=False, default=None)
    points: np.ndarray = field(repr=False, default=None)
    sector_values: np.ndarray = field(repr=False, default=None)
    sectors: list = field(repr=False, default=None)

    def as_dict(self):
        wb = self.witness_B
        wd = self.witness_D
        return {
            "B": self.B, "C": self.C, "D": self.D, "D_h": self.D_h,
            "B_kernel": self.B_kernel, "B_poly": self.B_poly,
            "witness_B": [wb.real, wb.imag] if isinstance(wb, complex) else wb,
            "witness_C": [self.witness_C.real, self.witness_C.imag],
            "witness_D": None if wd is None else {"h": wd.h, "theta0": float(wd.theta0)},
        }


def carleson_constants(measure, lam=None, mu=None, scan=None, corpus=None, rng=None,
                       sectors=None):
    """The three constants of the two-weight Carleson embedding.

    ``B`` is the largest corpus ratio ``int |f|^2 lam dtau / int |f|^2 mu dm``
    (a certified lower bound for the true embedding constant).  ``C`` is
    ``max_z (1/mu(z)) int P_z lam dtau``.  ``D`` is
    ``max_S (lam dtau)(S) / mu(I_S)`` over the sector family.
    """
    scan = scan or DiskScan()
    sectors = sectors if sectors is not None else sector_family()
    if corpus is None:
        corpus = EmbeddingCorpus.build(rng if rng is not None else np.random.default_rng(0))
    extra = _sup_extra(measure)
    points = np.concatenate([scan.points, extra])
    lam_at = _extend_at_atoms(lam, measure)
    weighted = measure.masses * lam_at
    mu_sup = _extend_at_sup(mu, scan, extra)

    c_prof = _kernel_sums(scan, extra, measure, poisson_kernel, weighted) / mu_sup
    ic = int(np.argmax(c_prof))

    kr, pr = _embedding_ratios(scan, extra, measure, lam_at, mu, mu_sup, corpus)
    ik, ip = int(np.argmax(kr)), int(np.argmax(pr))
    b_kernel, b_poly = float(kr[ik]), float(pr[ip])
    if b_kernel >= b_poly:
        B, wit_b = b_kernel, complex(points[ik])
    else:
        B, wit_b = b_poly, f"poly[{ip}]"

    if sectors:
        masses = _sector_masses(measure, weighted, sectors)
        foot = np.array([_footprint(mu, s) for s in sectors])
        hs = np.array([s.h for s in sectors])
        svals = masses / foot
        isec = int(np.argmax(svals))
        D, D_h, wit_d = float(svals[isec]), float(np.max(masses / hs)), sectors[isec]
    else:
        svals, D, D_h, wit_d = np.zeros(0), 0.0, 0.0, None
    return CarlesonConstants(
        B=B, C=float(c_prof[ic]), D=D, D_h=D_h, B_kernel=b_kernel, B_poly=b_poly,
        witness_B=wit_b, witness_C=complex(points[ic]), witness_D=wit_d,
        C_profile=c_prof, B_kernel_profile=kr, points=points,
        sector_values=svals, sectors=sectors,
    )


def check_equivalence_ordering(measure, lam=None, mu=None, consts=None, alarm_ratio=1e4,
                               **kwargs):
    """Numerically provable relations among ``(B, C, D)``.

    * testing on ``K_z`` reproduces the Poisson test at the same point, so the
      kernel part of ``B`` equals ``C`` pointwise and ``B >= C``;
    * every sector satisfies ``D_S <= C(z0) mu(z0) / (mu(I_S) min_{atoms in S} P_z0)``
      with ``z0`` the sector apex;
    * an alarm is raised when ``B`` or ``C`` exceeds ``D`` by more than ``alarm_ratio``.
    """
    consts = consts or carleson_constants(measure, lam, mu, **kwargs)
    weighted = measure.masses * _extend_at_atoms(lam, measure)
    r = np.abs(measure.points)
    ang = np.angle(measure.points)
    worst = 0.0
    for s, d_s in zip(consts.sectors, consts.sector_values):
        mask = s._mask(r, ang)
        if not mask.any():
            continue
        z0 = s.apex
        pk = poisson_kernel(z0, measure.points)
        mu_z0 = 1.0 if mu is None else float(harmonic_extend(mu.base, z0).real)
        c_z0 = _sum(pk * weighted) / mu_z0
        bound = c_z0 * mu_z0 / (_footprint(mu, s) * pk[mask].min())
        if bound > 0:
            worst = max(worst, d_s / bound)
    identity = float(np.max(np.abs(consts.B_kernel_profile - consts.C_profile)
                            / np.maximum(consts.C_profile, 1e-300))) if consts.C > 0 else 0.0
    big = max(consts.B, consts.C)
    alarm = bool(consts.D > 0 and big / consts.D > alarm_ratio)
    ok_bc = consts.B >= consts.C * (1 - 1e-12)
    finite = bool(np.isfinite([consts.B, consts.C, consts.D]).all())
    return {
        "B": consts.B, "C": consts.C, "D": consts.D,
        "B_over_C": consts.B / consts.C if consts.C else 1.0,
        "C_over_D": consts.C / consts.D if consts.D else 0.0,
        "kernel_identity_rel": identity,
        "B_ge_C": bool(ok_bc),
        "sector_bound_worst": worst,
        "sector_bound_ok": bool(worst <= 1 + 1e-12),
        "finite": finite,
        "alarm": alarm,
        "passed": bool(ok_bc and worst <= 1 + 1e-12 and not alarm and finite),
    }


def gradient_measure(phi, quad=None, scan=None):
    """Discretize ``4 |dbar phi|^2 ln(1/|z|) dA`` on a disk quadrature.

    Only the anti-analytic part of ``phi`` enters.  Requires
    ``||phi||_G <= 1`` on the scan.
    """
    quad = quad or DiskQuadrature()
    f = _as_fn(phi)
    g = garsia_norm(f, scan).value
    if g > 1 + 1e-8:
        raise PreconditionError(f"Garsia norm {g:.6g} exceeds 1; rescale the symbol first")
    _, dbar = gradient_on_quadrature(riesz_project(f, "minus"), quad)
    return DiskMeasure.from_density(quad, 4 * np.abs(dbar) ** 2 * quad.log_kernel, "gradient")


def weighted_embedding_check(measure, w=None, scan=None, corpus=None, rng=None, slack=0.1):
    """Hypothesis ``int P_z w(xi)^2 dv(xi) <= B^2 w(z)`` and conclusion
    ``int |f|^2 dv <= 16 B^2 int |f|^2 w^-1 dm`` over the corpus.
    """
    scan = scan or DiskScan()
    if corpus is None:
        corpus = EmbeddingCorpus.build(rng if rng is not None else np.random.default_rng(0))
    extra = _sup_extra(measure)
    points = np.concatenate([scan.points, extra])
    w_at = _extend_at_atoms(w, measure)
    w_sup = _extend_at_sup(w, scan, extra)
    hyp = _kernel_sums(scan, extra, measure, poisson_kernel, measure.masses * w_at**2) / w_sup
    b2 = float(hyp.max())
    w_inv = None if w is None else w.inverse()
    den = _extend_at_sup(w_inv, scan, extra)
    kr, pr = _embedding_ratios(scan, extra, measure, np.ones(len(measure)), w_inv, den, corpus)
    conclusion = float(max(kr.max(), pr.max()))
    finite = bool(np.isfinite(b2))
    bound = 16 * b2 * (1 + slack)
    return {
        "B2": b2, "hypothesis_witness": complex(points[int(np.argmax(hyp))]),
        "conclusion": conclusion, "bound": bound,
        "margin": conclusion / (16 * b2) if b2 > 0 else 0.0,
        "hypothesis_finite": finite,
        "passed": bool(finite and conclusion <= bound),
    }


def _one_sided(phi):
    f = _as_fn(phi)
    c = np.abs(f.fourier)
    half = f.grid.n_points // 2
    tol = 1e-12 * max(c.max(), 1e-300)
    return not (np.any(c[1:half] > tol) and np.any(c[half + 1:] > tol))


def sector_equivalence(phi, lam=None, mu=None, quad=None, sectors=None, slack=0.1):
    """Sector constants of ``|grad phi|^2 ln(1/|z|) dA`` and ``|grad phi|^2 (1 - |z|^2) dA``."""
    if not _one_sided(phi):
        raise PreconditionError("symbol must be analytic or anti-analytic")
    quad = quad or DiskQuadrature()
    sectors = sectors if sectors is not None else sector_family()
    d, dbar = gradient_on_quadrature(_as_fn(phi), quad)
    g2 = grad_norm2(d, dbar)
    v1 = DiskMeasure.from_density(quad, g2 * quad.log_kernel, "dv1")
    v2 = DiskMeasure.from_density(quad, g2 * (1 - np.abs(quad.points) ** 2), "dv2")
    lam_at = _extend_at_atoms(lam, v1)
    foot = np.array([_footprint(mu, s) for s in sectors])
    d1, d2 = (float(np.max(_sector_masses(v, v.masses * lam_at, sectors) / foot)) for v in (v1, v2))
    return {
        "D1": d1, "D2": d2,
        "D2_le_2D1": bool(d2 <= 2 * d1 * (1 + slack)),
        "D1_over_D2": d1 / d2 if d2 > 0 else (1.0 if d1 == 0 else np.inf),
    }


def poisson_energy_check(phi, lam=None, mu=None, scan=None, quad=None):
    """Poisson-smeared gradient energy against both oscillation forms.

    ``lhs(z0) = (1/mu(z0)) int |grad phi|^2 lam(z) (1 - |z|^2) P_z0(z) dA``,
    ``rhs_plain(z0) = (1/mu(z0)) int_T |phi - phi(z0)|^2 lam dm`` (no Poisson
    kernel) and ``rhs_poisson(z0)`` with ``P_z0`` inside (the two-weight
    Garsia quantity).  Returns sups over the scan and their ratios.
    """
    scan = scan or DiskScan()
    quad = quad or DiskQuadrature()
    f = _as_fn(phi)
    d, dbar = gradient_on_quadrature(f, quad)
    m = DiskMeasure.from_density(quad, grad_norm2(d, dbar) * (1 - np.abs(quad.points) ** 2), "poisson_energy")
    masses = m.masses * _extend_at_atoms(lam, m)
    none = np.zeros(0, complex)
    mu_z = _extend_at_sup(mu, scan, none)
    lhs = _kernel_sums(scan, none, m, poisson_kernel, masses) / mu_z

    s = f.samples
    ls = np.ones(f.grid.n_points) if lam is None else lam.samples
    ext, a0, a1, a2 = scan_averages(f.grid, scan, s, ls, ls * s, ls * np.abs(s) ** 2)
    rhs_poisson = np.maximum(a2 - 2 * np.real(np.conj(ext) * a1) + np.abs(ext) ** 2 * a0, 0) / mu_z
    g = f.grid
    p0 = g.integrate(ls).real
    p1 = g.integrate(ls * s)
    p2 = g.integrate(ls * np.abs(s) ** 2).real
    rhs_plain = np.maximum(p2 - 2 * np.real(np.conj(ext) * p1) + np.abs(ext) ** 2 * p0, 0) / mu_z
    L, Rp, Rq = float(lhs.max()), float(rhs_plain.max()), float(rhs_poisson.max())

    def ratio(a, b):
        return a / b if b > 0 else (0.0 if a == 0 else np.inf)

    return {
        "lhs": L, "rhs_plain": Rp, "rhs_poisson": Rq,
        "C_plain": ratio(L, Rp), "C_poisson": ratio(L, Rq),
        "lhs_witness": complex(scan.points[int(np.argmax(lhs))]),
    }
