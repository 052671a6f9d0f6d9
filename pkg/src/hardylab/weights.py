"""Muckenhoupt weights on the circle and their A_p diagnostics."""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .circle import CircleFn, CircleGrid, DiskScan, scan_averages

__all__ = [
    "Arc",
    "ArcFamily",
    "DomainError",
    "InequalityCheck",
    "WeightFn",
    "arc_integral",
    "arc_matrix",
    "a2_characteristic",
    "ap_characteristic",
    "pa2",
    "check_ap_inverse_inequality",
    "check_doubling",
    "sweep_inequalities",
    "find_eta",
    "shipped_weights",
    "default_grid",
    "weight_pairs",
]

TWO_PI = 2 * np.pi


class DomainError(ValueError):
    """Arguments outside the domain of a check (e.g. E not inside I)."""


@dataclass(frozen=True)
class Arc:
    """Closed arc with centre angle and length, both in radians."""

    center: float
    length: float

    def __post_init__(self):
        if not 0 < self.length <= TWO_PI + 1e-12:
            raise DomainError(f"arc length must lie in (0, 2 pi], got {self.length}")

    @property
    def measure(self):
        """Normalized length ``|I|`` (total circle = 1)."""
        return self.length / TWO_PI

    def contains(self, other, tol=1e-12):
        """True when ``other`` is a sub-arc of this arc."""
        if self.length >= TWO_PI - tol:
            return True
        d = np.angle(np.exp(1j * (other.center - self.center)))
        return abs(d) + other.length / 2 <= self.length / 2 + tol

    def dilate(self, factor):
        return Arc(self.center, self.length * factor)


@dataclass(frozen=True)
class ArcFamily:
    """Dyadic arcs of length ``2 pi 2^-j`` (j = 0..J) at M uniform centres."""

    J: int = 10
    M: int = 64

    @cached_property
    def centers(self):
        return TWO_PI * np.arange(self.M) / self.M

    @cached_property
    def lengths(self):
        return TWO_PI * 2.0 ** -np.arange(self.J + 1, dtype=float)

    @cached_property
    def arcs(self):
        return [Arc(c, L) for L in self.lengths for c in self.centers]

    @property
    def level(self):
        return np.repeat(np.arange(self.J + 1), self.M)

    def validate(self, grid):
        if self.lengths[-1] < 4 * grid.spacing - 1e-12:
            raise DomainError(
                f"arcs of length 2 pi 2^-{self.J} span fewer than 4 nodes of an "
                f"N={grid.n_points} grid"
            )

    def __len__(self):
        return (self.J + 1) * self.M


def _arc_row(grid, arc):
    """Node indices and dm-weights of a single arc (cell-overlap rule)."""
    n = grid.n_points
    h = grid.spacing
    if arc.length >= TWO_PI - 1e-12:
        return np.arange(n), np.full(n, 1.0 / n)
    # node j owns the cell [j, j+1) in these units
    u = ((arc.center - arc.length / 2 - grid.start) / h + 0.5) % n
    v = u + arc.length / h
    js = np.arange(int(np.floor(u)), int(np.ceil(v)))
    cover = np.minimum(js + 1, v) - np.maximum(js, u)
    keep = cover > 0
    return js[keep] % n, cover[keep] / n


def arc_matrix(grid, arcs):
    """Sparse matrix whose rows integrate sampled values over each arc."""
    key = arcs if isinstance(arcs, ArcFamily) else tuple(arcs)
    return _arc_matrix_cached(grid, key)


@lru_cache(maxsize=16)
def _arc_matrix_cached(grid, arcs):
    if isinstance(arcs, ArcFamily):
        arcs = arcs.arcs
    rows, cols, vals = [], [], []
    for i, arc in enumerate(arcs):
        j, w = _arc_row(grid, arc)
        rows.append(np.full(j.size, i))
        cols.append(j)
        vals.append(w)
    mat = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(arcs), grid.n_points),
    )
    mat.sum_duplicates()
    return mat


def arc_integral(f, arc):
    """``int_I f dm`` for a single arc."""
    fn = f.base if isinstance(f, WeightFn) else f
    j, w = _arc_row(fn.grid, arc)
    return np.dot(w, fn.samples[j])


class WeightFn:
    """Strictly positive weight sampled on a circle grid.

    ``a2_char`` and ``pa2`` are computed on first access with the default
    arc family and disk scan and cached afterwards.
    """

    def __init__(self, base, family="custom", params=None):
        if not isinstance(base, CircleFn):
            raise TypeError("base must be a CircleFn")
        s = base.samples
        if np.iscomplexobj(s):
            if np.any(s.imag):
                raise ValueError("weights must be real")
            base = CircleFn(base.grid, s.real)
            s = base.samples
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise ValueError("weight samples must be finite and strictly positive")
        self.base = base
        self.family = family
        self.params = dict(params or {})

    @property
    def grid(self):
        return self.base.grid

    @property
    def samples(self):
        return self.base.samples

    def inverse(self):
        return WeightFn(CircleFn(self.grid, 1.0 / self.samples),
                        family=f"inverse({self.family})", params=self.params)

    def scaled(self, c):
        return WeightFn(self.base * float(c), family=self.family, params=self.params)

    @cached_property
    def a2_char(self):
        return a2_characteristic(self)

    @cached_property
    def pa2(self):
        return pa2(self)

    @property
    def is_unit(self):
        return bool(np.all(self.samples == 1.0))

    def __repr__(self):
        return f"WeightFn({self.family}, {self.params})"

    # -- families ---------------------------------------------------------
    @classmethod
    def constant(cls, grid, c=1.0):
        return cls(CircleFn.constant(grid, float(c)), "constant", {"c": float(c)})

    @classmethod
    def power(cls, grid, alpha, center=0.0):
        """``|theta - center|^alpha`` with the wrapped angular distance."""
        d = _angular_distance(grid, center)
        return cls(CircleFn(grid, d**alpha), "power",
                   {"alpha": float(alpha), "center": float(center)})

    @classmethod
    def product_of_powers(cls, grid, factors):
        """Product of at most three power factors ``[(alpha, center), ...]``."""
        if not 1 <= len(factors) <= 3:
            raise ValueError("between one and three power factors are supported")
        centers = [c for _, c in factors]
        if len(set(np.round(np.mod(centers, TWO_PI), 12))) != len(centers):
            raise ValueError("power singularities must be distinct")
        vals = np.ones(grid.n_points)
        for alpha, c in factors:
            vals = vals * _angular_distance(grid, c) ** alpha
        return cls(CircleFn(grid, vals), "product",
                   {"factors": [(float(a), float(c)) for a, c in factors]})

    @classmethod
    def piecewise(cls, grid, breakpoints, values):
        """Piecewise constant in the centred angle; values in ``[1/10, 10]``.

        ``breakpoints`` are increasing angles in ``(-pi, pi)`` splitting the
        circle into ``len(breakpoints) + 1`` pieces.
        """
        values = np.asarray(values, dtype=float)
        if len(values) != len(breakpoints) + 1:
            raise ValueError("need one more value than breakpoints")
        if np.any(values < 0.1) or np.any(values > 10):
            raise ValueError("piecewise values must lie in [1/10, 10]")
        idx = np.searchsorted(np.asarray(breakpoints, dtype=float), grid.theta)
        return cls(CircleFn(grid, values[idx]), "piecewise",
                   {"breakpoints": list(map(float, breakpoints)),
                    "values": values.tolist()})

    @classmethod
    def log_smooth(cls, grid, s):
        """``exp(s cos theta)`` with ``|s| <= 2``."""
        if abs(s) > 2:
            raise ValueError("log-smooth weights require |s| <= 2")
        return cls(CircleFn(grid, np.exp(s * np.cos(grid.angles))), "log-smooth",
                   {"s": float(s)})


def _angular_distance(grid, center):
    return np.abs(np.angle(np.exp(1j * (grid.angles - center))))


def shipped_weights(grid):
    """The seven weights of the test matrix, keyed by a short name."""
    return {
        "unit": WeightFn.constant(grid, 1.0),
        "pow+0.5": WeightFn.power(grid, 0.5),
        "pow-0.5": WeightFn.power(grid, -0.5),
        "pow+0.75": WeightFn.power(grid, 0.75),
        "product": WeightFn.product_of_powers(grid, [(0.4, 0.0), (-0.3, 2.0), (0.25, -2.0)]),
        "piecewise": WeightFn.piecewise(grid, [-2.0, -0.5, 1.0], [0.2, 4.0, 1.0, 8.0]),
        "log-smooth": WeightFn.log_smooth(grid, 1.5),
    }


def weight_pairs(grid):
    """Two-weight test pairs ``{name: (mu, lam)}``.

    Every pair keeps ``lam / mu`` bounded; otherwise two-weight oscillation
    norms of unbounded symbols are infinite.
    """
    ws = shipped_weights(grid)
    return {
        "unit/unit": (ws["unit"], ws["unit"]),
        "pow+0.5/pow+0.5": (ws["pow+0.5"], ws["pow+0.5"]),
        "pow-0.5/pow-0.5": (ws["pow-0.5"], ws["pow-0.5"]),
        "pow-0.3/pow+0.3": (WeightFn.power(grid, -0.3), WeightFn.power(grid, 0.3)),
        "log-smooth/piecewise": (ws["log-smooth"], ws["piecewise"]),
        "pow+0.75/pow+0.75": (ws["pow+0.75"], ws["pow+0.75"]),
    }


# -- characteristics ----------------------------------------------------------
def _family_averages(w, arcs, values):
    arcs.validate(w.grid)
    mat = arc_matrix(w.grid, arcs)
    meas = np.repeat(arcs.lengths / TWO_PI, arcs.M)
    return (mat @ values) / meas


def ap_characteristic(w, p=2.0, arcs=None, return_witness=False):
    """Sup over the arc family of ``avg(w) * avg(w^{-1/(p-1)})^{p-1}``.

    The inverse average is evaluated in log space so that exponents near
    ``p = 1`` do not overflow.
    """
    arcs = arcs or ArcFamily()
    if p <= 1:
        raise ValueError("p must exceed 1")
    avg_w = _family_averages(w, arcs, w.samples)
    if p == 2:
        inv = _family_averages(w, arcs, 1.0 / w.samples)
        vals = avg_w * inv
    else:
        vals = avg_w * _inverse_power_mean(w, arcs, p)
    i = int(np.argmax(vals))
    if return_witness:
        return float(vals[i]), arcs.arcs[i]
    return float(vals[i])


def _inverse_power_mean(w, arcs, p):
    s = 1.0 / (p - 1.0)
    arcs.validate(w.grid)
    mat = arc_matrix(w.grid, arcs).tocsr()
    logw = np.log(w.samples)
    meas = np.repeat(arcs.lengths / TWO_PI, arcs.M)
    out = np.empty(mat.shape[0])
    for i in range(mat.shape[0]):
        lo, hi = mat.indptr[i], mat.indptr[i + 1]
        j, b = mat.indices[lo:hi], mat.data[lo:hi] / meas[i]
        out[i] = np.exp((p - 1.0) * logsumexp(-s * logw[j], b=b))
    return out


def _single_arc_ap(w, arc, p):
    j, b = _arc_row(w.grid, arc)
    b = b / arc.measure
    avg = np.dot(b, w.samples[j])
    s = 1.0 / (p - 1.0)
    return float(avg * np.exp((p - 1.0) * logsumexp(-s * np.log(w.samples[j]), b=b)))


def a2_characteristic(w, arcs=None):
    """``[w]_{A_2}`` approximated on a dyadic arc family."""
    return ap_characteristic(w, 2.0, arcs)


def pa2(w, scan=None, return_witness=False):
    """``sup_z w(z) (1/w)(z)`` over a disk scan (Poisson averages)."""
    scan = scan or DiskScan()
    a, b = scan_averages(w.grid, scan, w.samples, 1.0 / w.samples)
    vals = a * b
    i = int(np.argmax(vals))
    if return_witness:
        return float(vals[i]), complex(scan.points[i])
    return float(vals[i])


@dataclass
class InequalityCheck:
    """Both sides of an asserted ``lhs <= rhs`` and its verdict."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    tol: float = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "lhs": float(self.lhs), "rhs": float(self.rhs),
                "relation": "<=", "tol": self.tol, "passed": bool(self.passed),
                **self.details}


def _leq(lhs, rhs, rtol):
    return lhs <= rhs * (1 + rtol) + 1e-300


def check_ap_inverse_inequality(w, I, E, p=2.0, arcs=None, rtol=1e-9, ap=None):
    """``(|E|/|I|)^p <= [w]_{A_p} w(E) / w(I)`` for a sub-arc ``E`` of ``I``.

    ``[w]_{A_p}`` is the family characteristic (or ``ap`` when given)
    enlarged by the value on ``I`` itself, so the check is meaningful for
    arcs outside the family.
    """
    if not I.contains(E):
        raise DomainError("E must be a sub-arc of I")
    if ap is None:
        ap = ap_characteristic(w, p, arcs or ArcFamily())
    ap = max(ap, _single_arc_ap(w, I, p))
    lhs = (E.measure / I.measure) ** p
    rhs = ap * arc_integral(w, E) / arc_integral(w, I)
    return InequalityCheck("ap-inverse", lhs, rhs, _leq(lhs, rhs, rtol), rtol,
                           {"p": float(p), "ap": ap})


def check_doubling(w, I, arcs=None, rtol=1e-9, a2=None):
    """``1/w(I) <= 4 [w]_{A_2} / w(J)`` with ``J`` the concentric double of ``I``."""
    if 2 * I.length > TWO_PI + 1e-12:
        raise DomainError("the doubled arc exceeds the circle")
    J = I.dilate(2.0)
    if a2 is None:
        a2 = a2_characteristic(w, arcs or ArcFamily())
    a2 = max(a2, _single_arc_ap(w, J, 2.0))
    lhs = 1.0 / arc_integral(w, I)
    rhs = 4 * a2 / arc_integral(w, J)
    return InequalityCheck("doubling", lhs, rhs, _leq(lhs, rhs, rtol), rtol, {"a2": a2})


def sweep_inequalities(w, arcs=None, depth=3, rtol=1e-9):
    """Both arc inequalities over a whole family.

    The A_p-inverse inequality is checked for every family arc ``I`` and its
    concentric sub-arcs ``2^-k I`` (``k = 1..depth``, p = 2); doubling for
    every arc whose double fits on the circle.  Returns a list of checks.
    """
    arcs = arcs or ArcFamily()
    a2 = a2_characteristic(w, arcs)
    out = []
    for I in arcs.arcs:
        for k in range(1, depth + 1):
            E = Arc(I.center, I.length * 2.0**-k)
            out.append(check_ap_inverse_inequality(w, I, E, 2.0, rtol=rtol, ap=a2))
        if 2 * I.length <= TWO_PI + 1e-12:
            out.append(check_doubling(w, I, rtol=rtol, a2=a2))
    return out


def find_eta(w, arcs=None, factor=10.0, resolution=1.0 / 256):
    """Smallest ``eta`` in ``(1, 2]`` with ``[w]_{A_eta} <= factor [w]_{A_2}``.

    Bisection on the (nonincreasing in eta) family characteristic; the
    result is resolved to ``resolution`` and never exceeds 2.
    """
    arcs = arcs or ArcFamily()
    target = factor * ap_characteristic(w, 2.0, arcs)

    def ok(eta):
        return ap_characteristic(w, eta, arcs) <= target

    lo = 1.0 + resolution
    if ok(lo):
        return lo
    hi = 2.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def default_grid():
    return CircleGrid(4096, offset=True)
