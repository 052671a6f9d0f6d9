"""Functions on the unit circle: grids, Fourier data, kernels, harmonic extension.

All integrals against the normalized arc length measure ``dm`` are computed
with the equal-weight rule on a uniform grid. Interior values of a circle
function are Poisson averages of its samples; the discrete Poisson weights are
renormalized to sum to one so that every extension is a genuine average
(constants are reproduced exactly and Cauchy-Schwarz type inequalities hold
without quadrature slack).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "RADIUS_CAP",
    "POISSON_LOWER_CONSTANT",
    "CircleGrid",
    "CircleFn",
    "DiskScan",
    "Kernel",
    "as_disk_points",
    "fourier_transform",
    "riesz_project",
    "harmonic_extend",
    "spectral_extend",
    "poisson_kernel",
    "szego_kernel",
    "normalized_kernel",
    "kernel_eval",
    "poisson_weights",
    "scan_averages",
    "polar_averages",
    "polar_series",
]

RADIUS_CAP = 1.0 - 2.0**-24

# Measured lower constant for P_{z_I} >= a 1_I / |I| (|I| = 1 - |z|, arc
# centred at z/|z|, |I| in normalized measure).  The infimum over the disk is
# the boundary-layer limit 2 / (1 + pi^2) = 0.18403...; see
# tests/test_circle.py::test_poisson_lower_bound.
POISSON_LOWER_CONSTANT = 0.18


@dataclass(frozen=True)
class CircleGrid:
    """Uniform grid on the circle.

    Parameters
    ----------
    n_points : int
        Number of nodes, a power of two no smaller than 16.
    offset : bool
        Shift every node by half a spacing so that no node sits at angle 0
        (used for weights and symbols singular at ``zeta = 1``).
    """

    n_points: int = 4096
    offset: bool = False

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")

    @property
    def spacing(self):
        return 2 * np.pi / self.n_points

    @property
    def start(self):
        return 0.5 * self.spacing if self.offset else 0.0

    @cached_property
    def angles(self):
        """Raw node angles in ``[0, 2 pi)``."""
        return self.start + self.spacing * np.arange(self.n_points)

    @cached_property
    def theta(self):
        """Node angles recentred into ``(-pi, pi]``."""
        t = np.angle(np.exp(1j * self.angles))
        t[np.isclose(t, -np.pi, rtol=0, atol=1e-15)] = np.pi
        return t

    @cached_property
    def zeta(self):
        return np.exp(1j * self.angles)

    @cached_property
    def weights(self):
        return np.full(self.n_points, 1.0 / self.n_points)

    @cached_property
    def freqs(self):
        """Integer frequency of each FFT bin, ``-N/2 <= k < N/2``."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    def integrate(self, values):
        """Integral against ``dm`` of sampled values (last axis = nodes)."""
        return np.mean(values, axis=-1)


class CircleFn:
    """Samples of a (complex) function on a :class:`CircleGrid`.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __array_priority__ = 100

    def __init__(self, grid, samples):
        samples = np.array(samples)
        if samples.shape != (grid.n_points,):
            raise ValueError(
                f"expected {grid.n_points} samples, got shape {samples.shape}"
            )
        self.grid = grid
        self.samples = samples
        self.samples.setflags(write=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(theta)`` with ``theta`` the centred node angles."""
        return cls(grid, np.asarray(func(grid.theta)) * np.ones(grid.n_points))

    @classmethod
    def from_zeta(cls, grid, func):
        """Sample ``func(zeta)`` with ``zeta`` the unimodular nodes."""
        return cls(grid, np.asarray(func(grid.zeta)) * np.ones(grid.n_points))

    @classmethod
    def from_coefficients(cls, grid, coefs):
        """Trigonometric polynomial ``sum c_k zeta^k`` from ``{k: c_k}``."""
        n = grid.n_points
        bins = np.zeros(n, dtype=complex)
        extra = np.zeros(n, dtype=complex)
        for k, c in coefs.items():
            if abs(k) < n // 2:
                bins[k % n] += c
            else:
                extra += c * grid.zeta**k
        return cls(grid, cls.from_fourier(grid, bins).samples + extra)

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full(grid.n_points, c))

    # -- Fourier data -----------------------------------------------------
    @cached_property
    def fourier(self):
        """Coefficients in FFT bin order (see ``grid.freqs``)."""
        g = self.grid
        c = np.fft.fft(self.samples) / g.n_points
        if g.offset:
            c = c * np.exp(-1j * g.freqs * g.start)
        c.setflags(write=False)
        return c

    def coef(self, k):
        """Fourier coefficient(s) at integer frequency ``k``.

        Frequencies outside ``-N/2 <= k < N/2`` are zero (band limit).
        """
        k = np.asarray(k)
        n = self.grid.n_points
        inband = (k >= -n // 2) & (k < n // 2)
        out = np.where(inband, self.fourier[np.mod(k, n)], 0.0)
        return out if out.ndim else out[()]

    @classmethod
    def from_fourier(cls, grid, fourier):
        c = np.asarray(fourier, dtype=complex)
        if grid.offset:
            c = c * np.exp(1j * grid.freqs * grid.start)
        return cls(grid, np.fft.ifft(c) * grid.n_points)

    @property
    def is_real(self):
        return not np.iscomplexobj(self.samples) or not np.any(self.samples.imag)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other):
        if isinstance(other, CircleFn):
            if other.grid != self.grid:
                raise ValueError("circle functions live on different grids")
            return other.samples
        return other

    def __add__(self, other):
        return CircleFn(self.grid, self.samples + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CircleFn(self.grid, self.samples - self._other(other))

    def __rsub__(self, other):
        return CircleFn(self.grid, self._other(other) - self.samples)

    def __mul__(self, other):
        return CircleFn(self.grid, self.samples * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return CircleFn(self.grid, self.samples / self._other(other))

    def __neg__(self):
        return CircleFn(self.grid, -self.samples)

    def conj(self):
        return CircleFn(self.grid, np.conj(self.samples))

    def abs2(self):
        return CircleFn(self.grid, np.abs(self.samples) ** 2)

    def rotate(self, steps):
        """Rotate by ``steps`` grid spacings (exact relabelling of nodes)."""
        return CircleFn(self.grid, np.roll(self.samples, steps))

    def mean(self):
        return self.grid.integrate(self.samples)

    def l2_norm(self, weight=None):
        vals = np.abs(self.samples) ** 2
        if weight is not None:
            vals = vals * _samples(weight)
        return float(np.sqrt(self.grid.integrate(vals)))

    def __repr__(self):
        return f"CircleFn(n_points={self.grid.n_points})"


def _as_fn(f):
    """Accept a CircleFn or anything carrying one as ``.base`` (weights)."""
    if isinstance(f, CircleFn):
        return f
    base = getattr(f, "base", None)
    if isinstance(base, CircleFn):
        return base
    raise TypeError(f"expected a circle function, got {type(f).__name__}")


def _samples(f):
    if isinstance(f, np.ndarray):
        return f
    return _as_fn(f).samples


def as_disk_points(z):
    """Validate disk points against the radius cap and return an array."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > RADIUS_CAP):
        raise ValueError("disk points must satisfy |z| <= 1 - 2**-24")
    return z


def fourier_transform(f):
    """Two-sided coefficient array of ``f`` ordered from ``-N/2`` to ``N/2-1``."""
    return np.fft.fftshift(f.fourier)


def riesz_project(f, sign):
    """Analytic (``"plus"``, k >= 0) or anti-analytic (``"minus"``, k <= -1) part."""
    k = f.grid.freqs
    if sign == "plus":
        mask = k >= 0
    elif sign == "minus":
        mask = k <= -1
    else:
        raise ValueError("sign must be 'plus' or 'minus'")
    return CircleFn.from_fourier(f.grid, np.where(mask, f.fourier, 0.0))


# -- kernels ----------------------------------------------------------------
def poisson_kernel(z, zeta):
    """``(1 - |z|^2) / |1 - conj(z) zeta|^2`` (broadcasts).

    ``zeta`` may lie on the circle or inside the disk.
    """
    z = np.asarray(z)
    r = np.abs(z)
    return (1 - r) * (1 + r) / np.abs(1.0 - np.conj(z) * zeta) ** 2


def szego_kernel(z, zeta):
    """Reproducing kernel ``K_z(zeta) = 1 / (1 - conj(z) zeta)``."""
    return 1.0 / (1.0 - np.conj(z) * zeta)


def normalized_kernel(z, zeta):
    """``k_z = sqrt(1 - |z|^2) K_z``; unit norm in ``L^2(dm)``."""
    r = np.abs(z)
    return np.sqrt((1 - r) * (1 + r)) * szego_kernel(z, zeta)


_KERNELS = {
    "poisson": poisson_kernel,
    "szego": szego_kernel,
    "normalized": normalized_kernel,
}


@dataclass(frozen=True)
class Kernel:
    """A kernel attached to a disk point; call it on circle points."""

    z: complex
    kind: str = "poisson"

    def __post_init__(self):
        as_disk_points(self.z)
        if self.kind not in _KERNELS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    def __call__(self, zeta):
        return _KERNELS[self.kind](self.z, zeta)


def kernel_eval(kernel, zeta):
    return kernel(zeta)


# -- harmonic extension -----------------------------------------------------
def poisson_weights(grid, z):
    """Normalized discrete Poisson weights, shape ``z.shape + (N,)``."""
    z = as_disk_points(z)
    p = poisson_kernel(z[..., None], grid.zeta)
    return p / p.sum(axis=-1, keepdims=True)


def harmonic_extend(f, z, chunk=256):
    """Poisson average of ``f`` at the disk point(s) ``z``."""
    f = _as_fn(f)
    vals, grid = f.samples, f.grid
    z = as_disk_points(z)
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=np.result_type(vals, float))
    for s in range(0, flat.size, chunk):
        w = poisson_weights(grid, flat[s : s + chunk])
        out[s : s + chunk] = w @ vals
    return out.reshape(z.shape) if z.ndim else out[0]


def spectral_extend(f, z):
    """Evaluate ``sum_{k>=0} c_k z^k + sum_{k>=1} c_{-k} conj(z)^k``.

    Uses the in-band coefficients ``|k| < N/2`` (the Nyquist bin is dropped).
    """
    f = _as_fn(f)
    z = as_disk_points(z)
    n = f.grid.n_points
    k = np.arange(n // 2)
    pos = f.coef(k)
    neg = f.coef(-k[1:])
    out = np.polynomial.polynomial.polyval(z, pos)
    out = out + np.polynomial.polynomial.polyval(np.conj(z), np.concatenate([[0], neg]))
    return out


@dataclass(frozen=True)
class DiskScan:
    """Radial-angular scan approximating ``sup`` over the disk.

    Points are the origin (optional) and ``r e^{i psi}`` with
    ``r = 1 - 2^{-i}``, ``i = 1..kmax`` and ``n_angles`` uniform angles.
    """

    kmax: int = 8
    n_angles: int = 128
    include_origin: bool = True

    def __post_init__(self):
        if not 1 <= self.kmax <= 24:
            raise ValueError("kmax must lie in 1..24")
        if self.n_angles < 1:
            raise ValueError("n_angles must be positive")

    @cached_property
    def radii(self):
        return 1.0 - 2.0 ** -np.arange(1, self.kmax + 1, dtype=float)

    @cached_property
    def angles(self):
        return 2 * np.pi * np.arange(self.n_angles) / self.n_angles

    @cached_property
    def points(self):
        ring = (self.radii[:, None] * np.exp(1j * self.angles)[None, :]).ravel()
        if self.include_origin:
            ring = np.concatenate([[0j], ring])
        return ring

    def ring_index(self):
        """Radial level (0 for the origin) of every scan point."""
        lev = np.repeat(np.arange(1, self.kmax + 1), self.n_angles)
        if self.include_origin:
            lev = np.concatenate([[0], lev])
        return lev


def polar_averages(grid, radii, n_angles, *samples):
    """Normalized Poisson averages on a polar grid ``r_i e^{2 pi i m / M}``.

    Returns one ``(len(radii), n_angles)`` array per input sample vector.
    When ``n_angles`` divides the grid size the averages are circular
    convolutions evaluated by FFT; otherwise they fall back to direct sums.
    """
    radii = np.asarray(radii, dtype=float)
    n = grid.n_points
    if n % n_angles:
        psi = 2 * np.pi * np.arange(n_angles) / n_angles
        pts = radii[:, None] * np.exp(1j * psi)[None, :]
        return [harmonic_extend(CircleFn(grid, s), pts) for s in samples]
    step = n // n_angles
    d = np.arange(n)
    offsets = 2 * np.pi * d / n - grid.start
    zeta_d = np.exp(1j * offsets)
    spectra = [np.fft.fft(np.asarray(s)) for s in samples]
    outs = [np.empty((radii.size, n_angles), dtype=np.result_type(s, float)) for s in samples]
    for i, r in enumerate(radii):
        if r == 0.0:
            for o, s in zip(outs, samples):
                o[i] = np.mean(s)
            continue
        # kernel value at psi_m - theta_j depends only on (step*m - j) mod n
        ker = poisson_kernel(r, zeta_d)
        kf = np.fft.fft(ker)
        total = ker.sum()
        for o, s, sf in zip(outs, samples, spectra):
            conv = np.fft.ifft(sf * kf)[::step]
            o[i] = (conv if np.iscomplexobj(s) else conv.real) / total
    return outs


def scan_averages(grid, scan, *samples):
    """Normalized Poisson averages of each sample vector at every scan point."""
    outs = polar_averages(grid, scan.radii, scan.n_angles, *samples)
    res = []
    for s, o in zip(samples, outs):
        flat = o.ravel()
        if scan.include_origin:
            flat = np.concatenate([[np.mean(s)], flat])
        res.append(flat)
    return res


def polar_series(pos, neg, radii, n_angles):
    """Evaluate ``sum_k pos[k] z^k + sum_k neg[k] conj(z)^k`` on a polar grid.

    ``pos[k]`` and ``neg[k]`` are indexed from ``k = 0``.  Folding the
    coefficients modulo ``n_angles`` makes each ring a single inverse FFT.
    """
    radii = np.asarray(radii, dtype=float)
    pos = np.asarray(pos, dtype=complex)
    neg = np.asarray(neg, dtype=complex)
    out = np.empty((radii.size, n_angles), dtype=complex)
    kp = np.arange(pos.size)
    kn = np.arange(neg.size)
    for i, r in enumerate(radii):
        folded = np.zeros(n_angles, dtype=complex)
        np.add.at(folded, kp % n_angles, pos * r**kp)
        np.add.at(folded, (-kn) % n_angles, neg * r**kn)
        out[i] = np.fft.ifft(folded) * n_angles
    return out
