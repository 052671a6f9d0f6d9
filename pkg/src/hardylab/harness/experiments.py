"""The experiment matrix behind each CLI subcommand.

Every experiment draws its randomness from its own child of the config seed,
so running one subcommand alone reproduces the numbers it gives inside ``all``.
Internal-consistency errors abort the affected record (marked failed), never
the whole run.
"""

import math
from functools import cached_property

import numpy as np

from .. import __version__
from ..carleson import (DiskMeasure, EmbeddingCorpus, PreconditionError, carleson_constants,
                        check_equivalence_ordering, poisson_energy_check, sector_equivalence,
                        random_measure, weighted_embedding_check, gradient_measure)
from ..circle import CircleGrid, DiskScan
from ..disk import DiskQuadrature, finite_difference_gradient, gradient_of_extension, \
    green_corpus, greens_identity_check
from ..hankel import ConsistencyError, DegenerateWeightError, bandwidth, fluctuation_ok, \
    rkt_experiment, rkt_sup
from ..intop import AnalyticPoly, lp_pairing_check, tg_matrix, tg_norm_experiment, \
    tg_section_norm
from ..oscillation import NumericalConsistencyError, bmo_norm, check_telescoping, \
    garsia_norm, two_weight_garsia, weighted_garsia_norm
from ..symbols import make_symbol
from ..weights import ArcFamily, DomainError, WeightFn, a2_characteristic, pa2, \
    shipped_weights, sweep_inequalities, weight_pairs
from .report import Record, Report

__all__ = ["EXPERIMENTS", "Context", "run_experiment", "run_all"]

# failures that abort a record but not the run
RECORD_ERRORS = (NumericalConsistencyError, ConsistencyError, DegenerateWeightError,
                 PreconditionError, DomainError, ArithmeticError)

# weight pairs (mu, lam) used for the Carleson sweep
CARLESON_PAIRS = ("unit/unit", "pow+0.5/pow+0.5", "log-smooth/piecewise")

# stream index of each experiment under the run seed
_STREAMS = {"weights": 0, "norms": 1, "carleson": 2, "rkt": 3, "intop": 4, "disk": 5}


class Context:
    """Shared, lazily built objects for one configuration."""

    def __init__(self, config):
        self.config = config

    def rng(self, experiment):
        seq = np.random.SeedSequence(self.config.seed, spawn_key=(_STREAMS[experiment],))
        return np.random.default_rng(seq)

    @cached_property
    def grid(self):
        return CircleGrid(self.config.grid_n, offset=self.config.grid_offset)

    @cached_property
    def scan(self):
        return DiskScan(self.config.kmax, self.config.n_angles)

    @cached_property
    def scan_doubled(self):
        return DiskScan(2 * self.config.kmax, self.config.n_angles)

    @cached_property
    def arcs(self):
        return ArcFamily(self.config.arcs_J, self.config.arcs_M)

    @cached_property
    def quad(self):
        return DiskQuadrature(self.config.n_radial, self.config.n_angular)

    @cached_property
    def weights(self):
        return shipped_weights(self.grid)

    @cached_property
    def pairs(self):
        return weight_pairs(self.grid)

    def symbols(self, rng):
        return {name: make_symbol(name, self.grid, rng) for name in self.config.symbols}

    def report(self, name):
        return Report(name, __version__, self.config.digest(), self.config.seed)


def _guarded(report, name, inputs, body):
    """Run ``body(record)``; consistency errors are stored on the record."""
    rec = Record(name, dict(inputs))
    try:
        body(rec)
    except RECORD_ERRORS as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    return report.add(rec)


def _pair_weights(mu, lam):
    return (None if mu.is_unit else mu), (None if lam.is_unit else lam)


# -- weights ------------------------------------------------------------------

def run_weights(ctx):
    rep = ctx.report("weights")
    tol = ctx.config.tol_identity
    arcs, scan = ctx.arcs, ctx.scan
    rows = []

    def unit(rec):
        one = WeightFn.constant(ctx.grid, 1.0)
        rec.values = {"a2": a2_characteristic(one, arcs), "pa2": pa2(one, scan)}
        rec.check("a2_of_unit", rec.values["a2"], 1.0, "==", 1e-10)
        rec.check("pa2_of_unit", rec.values["pa2"], 1.0, "==", 1e-10)

    _guarded(rep, "unit_weight", {}, unit)

    for name, w in ctx.weights.items():
        def body(rec, w=w, name=name):
            a2 = a2_characteristic(w, arcs)
            p, wit = pa2(w, scan, return_witness=True)
            scaled = a2_characteristic(w.scaled(3.0), arcs)
            inverted = a2_characteristic(w.inverse(), arcs)
            sweep = sweep_inequalities(w, arcs, rtol=tol)
            worst = max(c.lhs / c.rhs for c in sweep)
            bad = sum(not c.passed for c in sweep)
            rec.values = {"a2": a2, "pa2": p, "pa2_witness": wit, "a2_scaled": scaled,
                          "a2_inverse": inverted, "n_arc_checks": len(sweep),
                          "worst_lhs_over_rhs": worst}
            rec.check("a2_at_least_one", a2, 1.0, ">=", 1e-12)
            rec.check("scale_invariance", scaled, a2, "==", 1e-12 * a2)
            rec.check("inversion_invariance", inverted, a2, "==", 1e-12 * a2)
            rec.check("arc_inequality_violations", bad, 0, "==")
            rows.append([name, a2, p, worst])

        _guarded(rep, f"weight:{name}", {"weight": repr(w)}, body)

    def ladder(rec):
        alphas = sorted(ctx.config.alphas, key=abs)
        vals = {a: a2_characteristic(WeightFn.power(ctx.grid, a), arcs) for a in alphas}
        rec.values = {"alphas": alphas, "a2": [vals[a] for a in alphas]}
        for a, b in zip(alphas, alphas[1:]):
            if abs(b) > abs(a):
                rec.check(f"monotone_|{a:g}|_to_|{b:g}|", vals[a], vals[b], "<=", 1e-12 * vals[b])
        for a in alphas:
            if -a in vals and a > 0:
                rec.check(f"symmetric_{a:g}", vals[a], vals[-a], "==", 1e-12 * vals[a])

    _guarded(rep, "power_ladder", {"alphas": list(ctx.config.alphas)}, ladder)
    rep.add_table("a2", ["weight", "a2", "pa2", "worst_arc_ratio"], rows)
    return rep


# -- norms --------------------------------------------------------------------

def run_norms(ctx):
    rep = ctx.report("norms")
    cfg = ctx.config
    symbols = ctx.symbols(ctx.rng("norms"))
    rows = []
    for sname, phi in symbols.items():
        def body(rec, phi=phi, sname=sname):
            g = garsia_norm(phi, ctx.scan)
            g2 = garsia_norm(phi, ctx.scan_doubled)
            rec.values = {"garsia": g.value, "garsia_witness": g.witness,
                          "garsia_doubled_scan": g2.value, "bmo": bmo_norm(phi, ctx.arcs).value}
            for wname, w in ctx.weights.items():
                wg = weighted_garsia_norm(phi, w, ctx.scan).value
                wg2 = weighted_garsia_norm(phi, w, ctx.scan_doubled).value
                r1, r2 = wg / g.value, wg2 / g2.value
                drift = abs(r2 / r1 - 1)
                rec.values[f"ratio:{wname}"] = r1
                rec.values[f"ratio_doubled:{wname}"] = r2
                if w.is_unit:
                    rec.check(f"unit_ratio:{wname}", r1, 1.0, "==", cfg.tol_identity)
                rec.check(f"ratio_finite:{wname}", math.isfinite(r1), True, "is")
                rec.check(f"kmax_stability:{wname}", drift, cfg.tol_stability, "<=")
                rows.append([sname, wname, g.value, wg, r1, r2, drift])

        _guarded(rep, f"symbol:{sname}", {"symbol": sname}, body)

    if "log" in symbols:
        for wname, w in ctx.weights.items():
            def tele(rec, w=w):
                out = check_telescoping(symbols["log"], w, ctx.arcs)
                worst = max(lhs / rhs for _, _, lhs, rhs in out)
                bad = sum(lhs > rhs * (1 + 1e-9) for _, _, lhs, rhs in out)
                rec.values = {"n_rows": len(out), "worst_lhs_over_rhs": worst}
                rec.check("telescoping_violations", bad, 0, "==")

            _guarded(rep, f"telescoping:log:{wname}", {"weight": wname}, tele)

    rep.add_table("norm_matrix", ["symbol", "weight", "garsia", "weighted_garsia", "ratio",
                                  "ratio_doubled_kmax", "drift"], rows)
    return rep


# -- disk ---------------------------------------------------------------------

def run_disk(ctx, rep):
    """Green identity and gradient oracle records (part of ``carleson``)."""
    quad = ctx.quad
    for field_ in green_corpus():
        def green(rec, f=field_):
            res, lhs, rhs = greens_identity_check(f, quad)
            rec.values = {"lhs": lhs, "rhs": rhs, "residual": res}
            rec.check("green_residual", res, 1e-6, "<=")

        _guarded(rep, f"green:{field_.name}", {"field": field_.name}, green)

    rng = ctx.rng("disk")

    def grad(rec):
        phi = make_symbol("random16", ctx.grid, rng)
        r = np.sqrt(rng.uniform(0, 0.81, 50))
        z = r * np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
        d, db = gradient_of_extension(phi, z)
        fd, fdb = finite_difference_gradient(phi, z)
        scale = np.maximum(np.abs(d) + np.abs(db), 1e-300)
        err = float(np.max((np.abs(d - fd) + np.abs(db - fdb)) / scale))
        rec.values = {"max_relative_error": err, "n_points": 50}
        rec.check("gradient_vs_finite_difference", err, 1e-6, "<=")

    _guarded(rep, "gradient_oracle", {"symbol": "random16"}, grad)


# -- carleson -----------------------------------------------------------------

def _constants_values(c):
    return {k: v for k, v in c.as_dict().items()}


def run_carleson(ctx):
    rep = ctx.report("carleson")
    cfg = ctx.config
    rng = ctx.rng("carleson")
    corpus = EmbeddingCorpus.build(rng, cfg.corpus_size, cfg.corpus_degree)
    scan, quad = ctx.scan, ctx.quad
    kw = {"scan": scan, "corpus": corpus}
    run_disk(ctx, rep)

    def atom(rec):
        c = carleson_constants(DiskMeasure.atom(0j), **kw)
        rec.values = _constants_values(c)
        rec.check("B_atom_at_zero", c.B, 1.0, "==", 1e-12)
        rec.check("C_atom_at_zero", c.C, 1.0, "==", 1e-12)
        rec.check("D_h_atom_at_zero", c.D_h, 1.0, "==", 1e-12)
        rec.check("ordering", check_equivalence_ordering(DiskMeasure.atom(0j), consts=c)["passed"],
                  True, "is")

    _guarded(rep, "fixture:atom_at_zero", {"measure": "atom 0 mass 1"}, atom)

    def zero(rec):
        c = carleson_constants(DiskMeasure.zero(), **kw)
        rec.values = _constants_values(c)
        for k in ("B", "C", "D"):
            rec.check(f"{k}_zero_measure", getattr(c, k), 0.0, "==")

    _guarded(rep, "fixture:zero", {}, zero)

    def area(rec):
        m = DiskMeasure.area(quad)
        c = carleson_constants(m, **kw)
        rec.values = _constants_values(c)
        rec.check("finite", bool(np.isfinite([c.B, c.C, c.D]).all()), True, "is")
        rec.check("sector_D_h_bound", c.D_h, 2 / np.pi * (1 + cfg.slack), "<=")
        rec.check("B_ge_C", c.B, c.C, ">=", 1e-12 * c.C)

    _guarded(rep, "fixture:area", {"quadrature": [cfg.n_radial, cfg.n_angular]}, area)

    if cfg.measure_file:
        def from_file(rec):
            m = DiskMeasure.load(cfg.measure_file)
            c = carleson_constants(m, **kw)
            rec.values = _constants_values(c)
            rec.values["provenance"] = m.provenance
            rec.check("finite", bool(np.isfinite([c.B, c.C, c.D]).all()), True, "is")

        _guarded(rep, "fixture:measure_file", {"path": cfg.measure_file}, from_file)

    symbols = ctx.symbols(rng)
    for sname, phi in symbols.items():
        def uch(rec, phi=phi):
            g = garsia_norm(phi, scan).value
            scale = 1.0 if g <= 1 else 1.0 / g
            m = gradient_measure(phi * scale, quad, scan)
            c = carleson_constants(m, **kw)
            rec.values = {"garsia": g, "scale": scale, **_constants_values(c)}
            rec.check("gradient_measure_B", c.B, math.e * (1 + cfg.slack), "<=")

        _guarded(rep, f"gradient_measure:{sname}", {"symbol": sname}, uch)

    shipped = list(ctx.weights.values())
    for i in range(cfg.embedding_pairs):
        m = random_measure(rng, cfg.n_atoms)
        w = shipped[i % len(shipped)]

        def embed(rec, m=m, w=w):
            r = weighted_embedding_check(m, None if w.is_unit else w, scan, corpus, slack=cfg.slack)
            rec.values = r
            if r["hypothesis_finite"]:
                rec.check("weighted_embedding", r["conclusion"], r["bound"], "<=")

        _guarded(rep, f"weighted_embedding:{i}", {"weight": repr(w), "atoms": len(m)}, embed)

    def embed_area(rec):
        r = weighted_embedding_check(DiskMeasure.area(quad, 0.1), None, scan, corpus, slack=cfg.slack)
        rec.values = r
        rec.check("hypothesis_at_origin", r["B2"], 0.05, "==", 1e-12)
        rec.check("weighted_embedding", r["conclusion"], r["bound"], "<=")

    _guarded(rep, "weighted_embedding:area", {"scale": 0.1}, embed_area)

    rows = []
    for i in range(cfg.n_measures):
        m = random_measure(rng, cfg.n_atoms)
        extra_z = complex(0.9 * np.exp(2j * np.pi * rng.uniform()))
        for pname in CARLESON_PAIRS:
            mu, lam = _pair_weights(*ctx.pairs[pname])

            def thm(rec, m=m, mu=mu, lam=lam, pname=pname, extra_z=extra_z):
                c = carleson_constants(m, lam, mu, **kw)
                c2 = carleson_constants(m.scaled(2.0), lam, mu, **kw)
                c3 = carleson_constants(m.with_atom(extra_z, 0.05), lam, mu, **kw)
                order = check_equivalence_ordering(m, lam, mu, consts=c,
                                                   alarm_ratio=cfg.alarm_ratio)
                rec.values = {**_constants_values(c), "ordering": order}
                rec.check("finite", order["finite"], True, "is")
                for k in ("B", "C", "D"):
                    rec.check(f"homogeneous_{k}", getattr(c2, k), 2 * getattr(c, k), "==")
                    rec.check(f"monotone_{k}", getattr(c3, k), getattr(c, k), ">=")
                rec.check("B_ge_C", order["B_ge_C"], True, "is")
                rec.check("sector_apex_bound", order["sector_bound_worst"], 1 + 1e-12, "<=")
                rec.check("no_alarm", order["alarm"], False, "is")
                rows.append([i, pname, c.B, c.C, c.D, c.B / c.C, c.C / c.D])

            _guarded(rep, f"two_weight:{i}:{pname}", {"pair": pname, "atoms": len(m)}, thm)

    sector_pairs = [("unit/unit", None, None),
               ("pow+0.3", WeightFn.power(ctx.grid, 0.3), WeightFn.power(ctx.grid, 0.3))]
    for sname, phi in symbols.items():
        for pname, mu, lam in sector_pairs:
            def sector_eq(rec, phi=phi, mu=mu, lam=lam):
                r = sector_equivalence(phi, lam, mu, quad, slack=cfg.slack)
                rec.values = r
                rec.check("D2_le_2D1", r["D2"], 2 * r["D1"] * (1 + cfg.slack), "<=")
                rec.check("D1_over_D2_finite", math.isfinite(r["D1_over_D2"]), True, "is")

            _guarded(rep, f"sector_equivalence:{sname}:{pname}", {"symbol": sname, "pair": pname},
                     sector_eq)

    for sname, phi in symbols.items():
        for pname in CARLESON_PAIRS:
            mu, lam = _pair_weights(*ctx.pairs[pname])

            def energy(rec, phi=phi, mu=mu, lam=lam):
                r = poisson_energy_check(phi, lam, mu, scan, quad)
                rec.values = r
                rec.check("C_plain_finite", math.isfinite(r["C_plain"]), True, "is")
                rec.check("C_poisson_finite", math.isfinite(r["C_poisson"]), True, "is")

            _guarded(rep, f"poisson_energy:{sname}:{pname}", {"symbol": sname, "pair": pname}, energy)

    rep.add_table("two_weight", ["measure", "pair", "B", "C", "D", "B_over_C", "C_over_D"], rows)
    return rep


# -- rkt ----------------------------------------------------------------------

def run_rkt(ctx):
    rep = ctx.report("rkt")
    cfg = ctx.config
    symbols = ctx.symbols(ctx.rng("rkt"))
    rows = []
    for sname, phi in symbols.items():
        for pname, (mu_w, lam_w) in ctx.pairs.items():
            mu, lam = _pair_weights(mu_w, lam_w)

            def body(rec, phi=phi, mu=mu, lam=lam, sname=sname, pname=pname):
                g1, g2 = two_weight_garsia(phi, lam, mu, ctx.scan)
                direct, wit = rkt_sup(phi, mu, lam, ctx.scan)
                rec.check("rkt_identity", direct, g1.value, "==", 1e-8)
                ex = rkt_experiment(phi, mu, lam, cfg.ladder, ctx.scan, (g1.value, g2.value))
                for r in ex["rows"]:
                    rec.check(f"testing_le_norm_n{r['n']}", r["kernel_testing"], r["norm"], "<=",
                              1e-8)
                    rec.check(f"C_ratio_finite_n{r['n']}", math.isfinite(r["C_ratio"]), True, "is")
                    rows.append([sname, pname, r["n"], r["norm"], r["norm_dual"],
                                 r["kernel_testing"], g1.value, g2.value, r["C_ratio"]])
                norms = [r["norm"] for r in ex["rows"]]
                for a, b, n in zip(norms, norms[1:], cfg.ladder[1:]):
                    rec.check(f"monotone_n{n}", b, a, ">=", 1e-12 * a)
                rec.check("C_ratio_fluctuation",
                          fluctuation_ok(ex["C_ratio_increments"], cfg.fluctuation), True, "is")
                if sname == "zbar" and mu is None and lam is None:
                    rec.check("zbar_norm", norms[-1], 1.0, "==", cfg.tol_identity)
                    rec.check("zbar_garsia", g1.value, 1.0, "==", cfg.tol_identity)
                rec.values = {"garsia": [g1.value, g2.value], "rkt_sup": direct,
                              "rkt_witness": wit, **ex}

            _guarded(rep, f"hankel:{sname}:{pname}", {"symbol": sname, "pair": pname}, body)
    rep.add_table("rkt_matrix", ["symbol", "pair", "n", "norm", "norm_dual", "kernel_testing",
                                 "garsia", "garsia_dual", "C_ratio"], rows)
    return rep


# -- intop --------------------------------------------------------------------

def _analytic_symbols(ctx, rng):
    out = {"z": AnalyticPoly.monomial(1), "z2": AnalyticPoly.monomial(2)}
    for name in ("log", "random16"):
        if name in ctx.config.symbols:
            sym = make_symbol(name, ctx.grid, rng).conj()
            out[name] = AnalyticPoly.from_circle(sym, bandwidth(sym))
    return out


def _random_poly(rng, degree):
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return AnalyticPoly(c / np.sqrt(2 * (degree + 1)))


def run_intop(ctx):
    rep = ctx.report("intop")
    cfg = ctx.config
    rng = ctx.rng("intop")
    z = AnalyticPoly.monomial(1)

    def monomial(rec):
        norms = {n: tg_section_norm(z, n) for n in cfg.ladder}
        diag_err = max(float(np.max(np.abs(np.diag(tg_matrix(z, n)) - 1 / np.arange(1, n + 2))))
                       for n in cfg.ladder)
        rec.values = {"norms": norms, "diagonal_error": diag_err}
        for n, v in norms.items():
            rec.check(f"norm_n{n}", v, 1.0, "==", 1e-12)
        rec.check("diagonal", diag_err, 0.0, "==", 1e-15)

    _guarded(rep, "g=z", {"g": "z"}, monomial)

    gs = _analytic_symbols(ctx, rng)
    for gname, g in gs.items():
        def lp(rec, g=g):
            f, h = _random_poly(rng, 8), _random_poly(rng, 8 + g.degree)
            circle, disk = lp_pairing_check(g, f, h, ctx.quad)
            err = abs(circle - disk)
            rec.values = {"circle": circle, "disk": disk, "abs_error": err}
            rec.check("pairing", err, 1e-6 * max(1.0, abs(circle)), "<=")

        _guarded(rep, f"pairing:{gname}", {"g": gname}, lp)

    rows = []
    for gname, g in gs.items():
        for pname, (mu_w, lam_w) in ctx.pairs.items():
            mu, lam = _pair_weights(mu_w, lam_w)

            def body(rec, g=g, mu=mu, lam=lam, gname=gname, pname=pname):
                ex = tg_norm_experiment(g, mu, lam, ctx.grid, cfg.ladder, ctx.scan)
                rec.values = ex
                for r in ex["rows"]:
                    rec.check(f"C_ratio_finite_n{r['n']}", math.isfinite(r["C_ratio"]), True, "is")
                    rec.check(f"C_ratio_dual_finite_n{r['n']}", math.isfinite(r["C_ratio_dual"]),
                              True, "is")
                    rows.append([gname, pname, r["n"], r["T_norm"], r["P_norm"], r["T_norm_dual"],
                                 ex["garsia"][0], ex["garsia"][1], r["C_ratio"]])

            _guarded(rep, f"pair_ratios:{gname}:{pname}", {"g": gname, "pair": pname}, body)
    rep.add_table("intop_matrix", ["g", "pair", "n", "T_norm", "P_norm", "T_norm_dual",
                                   "garsia", "garsia_dual", "C_ratio"], rows)
    return rep


EXPERIMENTS = {
    "weights": run_weights,
    "norms": run_norms,
    "carleson": run_carleson,
    "rkt": run_rkt,
    "intop": run_intop,
}


def run_experiment(name, config, ctx=None):
    ctx = ctx or Context(config)
    return EXPERIMENTS[name](ctx)


def run_all(config):
    ctx = Context(config)
    return [EXPERIMENTS[name](ctx) for name in EXPERIMENTS]
