"""Command line front end.

Subcommands
-----------
classify            print the linearisation class of an integer matrix
verify-cone         grid test of an unstable cone family
incoherent-report   checks on the incoherent example plus figure1.svg
coherent-suite      centre foliation, semiconjugacy and leaf conjugacy pipeline
render              redraw figure1.svg (and atlas.svg from an existing leaves.csv)

Exit codes: 0 all checks pass, 1 some check failed, 2 bad input.

Settings come from an optional ``--config`` file of ``key = value`` lines
(``#`` starts a comment); command line flags override the file.  The JSON
report holds no timings, so a fixed configuration reproduces it byte for
byte; wall-clock times go to ``timing.json``.
"""
import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import conjugacy as cj
from . import foliation as fol
from . import geometry as geo
from . import incoherent as inc
from . import svg
from .errors import PhendoError
from .models import (ConeFamily, IncoherentModel, MobiusCircleMap, PerturbedLinearModel,
                     cone_invariance_check)
from .semiconjugacy import SemiconjugacyApprox, deck_defect, semiconjugacy_residual

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class ExperimentConfig:
    model: str = "perturbed"                  # perturbed | incoherent
    matrix: tuple = (3, 1, 1, 1)
    eps: float = 0.05
    c: float = 0.6
    depth_K: int = 40
    depth_N: int = 30
    grid: int = 512
    window: float = 2.5
    seed: int = 0
    out: str = "out"
    svg_only: bool = False
    # sample sizes
    n_residual: int = 10_000
    n_points: int = 1000
    n_leaves: int = 20
    per_leaf: int = 50
    n_crossing: int = 100
    product_n: int = 20
    # tolerances
    cone_half_angle: float = 0.3
    incoherent_cone_half_angle: float = 0.1
    leaf_tol: float = 1e-4
    conj_leaf_tol: float = 1e-5
    series_slack: float = 1e-9
    truncation_tol: float = 1e-6
    splitting_tol: float = 1e-6
    uniqueness_tol: float = 1e-4
    semiconj_tol: float = 1e-6
    deck_tol: float = 1e-9
    collapse_tol: float = 1e-4
    equiv_tol: float = 1e-4
    contraction_max: float = 0.9
    T_stability: float = 0.05
    contact_angle_max: float = 0.05
    timing: dict = field(default_factory=dict, repr=False, compare=False)

    def validate(self):
        if self.model not in ("perturbed", "incoherent"):
            raise ValueError(f"unknown model {self.model!r}")
        if len(self.matrix) != 4:
            raise ValueError("matrix needs four entries")
        if self.grid < 2:
            raise ValueError("grid must be at least 2")
        for f in fields(self):
            if f.name.endswith(("_tol", "_max", "_slack")) and not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")
        if min(self.depth_K, self.depth_N, self.n_leaves, self.per_leaf) < 1:
            raise ValueError("depths and sample sizes must be positive")
        return self

    def echo(self):
        d = asdict(self)
        # where the files go is not part of the experiment
        d.pop("timing")
        d.pop("out")
        d["matrix"] = list(self.matrix)
        return d

    def build_model(self):
        if self.model == "incoherent":
            return IncoherentModel(MobiusCircleMap(self.c))
        return PerturbedLinearModel(np.array(self.matrix, dtype=float).reshape(2, 2), self.eps)


def _coerce(name, raw):
    kind = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    if name == "matrix":
        vals = raw.replace(",", " ").split() if isinstance(raw, str) else raw
        return tuple(int(v) for v in vals)
    if kind in (bool, "bool"):
        return raw if isinstance(raw, bool) else str(raw).strip().lower() in ("1", "true", "yes", "on")
    caster = {"int": int, "float": float, "str": str}.get(getattr(kind, "__name__", kind), str)
    return caster(raw)


def read_config(path):
    """Parse ``key = value`` lines; keys may use dashes or underscores."""
    out = {}
    names = {f.name for f in fields(ExperimentConfig)} - {"timing"}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in names:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def make_config(args, **defaults):
    values = dict(defaults)
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    flag_map = {"m": "matrix", "eps": "eps", "c": "c", "depth_K": "depth_K", "depth_N": "depth_N",
                "grid": "grid", "window": "window", "out": "out", "seed": "seed", "svg_only": "svg_only",
                "model": "model"}
    for attr, key in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None and v is not False:
            values[key] = _coerce(key, v)
    return ExperimentConfig(**values).validate()


# --------------------------------------------------------------------------- reports

class Report:
    """Ordered list of named checks; the first fatal stage stops the run."""

    def __init__(self, name, cfg):
        self.name, self.cfg = name, cfg
        self.checks, self.info = [], {}
        self.stopped_at = None
        self.errors = []

    def check(self, name, value, tolerance, passed, tail_bound=None, **extra):
        entry = {"name": name, "passed": bool(passed), "value": _jsonable(value), "tolerance": tolerance}
        if tail_bound is not None:
            entry["tail_bound"] = _jsonable(tail_bound)
        entry.update({k: _jsonable(v) for k, v in extra.items()})
        self.checks.append(entry)
        return bool(passed)

    def error(self, stage, exc):
        self.errors.append({"stage": stage, "error": type(exc).__name__, "message": str(exc)})
        self.checks.append({"name": stage, "passed": False, "value": None, "tolerance": None,
                            "error": f"{type(exc).__name__}: {exc}"})

    @property
    def passed(self):
        return self.stopped_at is None and all(c["passed"] for c in self.checks)

    def as_dict(self):
        return {"experiment": self.name, "config": self.cfg.echo(), "passed": self.passed,
                "stopped_at": self.stopped_at, "checks": self.checks, "errors": self.errors,
                "info": _jsonable(self.info)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else str(v)
    return v


def _write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


class _Stage:
    """Context manager timing a pipeline stage and recording its exceptions."""

    def __init__(self, report, name, fatal=True):
        self.report, self.name, self.fatal = report, name, fatal

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, et, exc, tb):
        self.report.cfg.timing[self.name] = round(time.perf_counter() - self.t0, 4)
        if exc is not None and isinstance(exc, (PhendoError, ValueError, FloatingPointError)):
            self.report.error(self.name, exc)
            if self.fatal:
                self.report.stopped_at = self.name
                raise _Stop()
            return True
        return False


class _Stop(Exception):
    pass


# --------------------------------------------------------------------------- incoherent

def regular_points(model, rng, n, margin=2 * inc.DEFAULT_DELTA):
    """``n`` uniform torus points with p and f(p) away from both invariant circles."""
    out = np.empty((0, 2))
    while len(out) < n:
        pts = rng.random((2 * n, 2))
        ok = np.ones(len(pts), dtype=bool)
        for q in (pts, model.apply_torus(pts)):
            y = q[:, 1]
            ok &= (np.abs(y - 0.5) > margin) & (np.minimum(y, 1 - y) > margin)
        out = np.concatenate([out, pts[ok]])
    return out[:n]


def run_incoherent(cfg):
    """Checks on the incoherent model; returns (report, figure curves)."""
    rep = Report("incoherent-report", cfg)
    model = IncoherentModel(MobiusCircleMap(cfg.c))
    psi, K = model.psi, cfg.depth_K
    rng = np.random.default_rng(cfg.seed)

    with _Stage(rep, "figure", fatal=False):
        curves = svg.figure1_curves(8, K, psi)
        angles = [svg.contact_angle(c["curve"]) for c in curves]
        rep.check("figure_contact_tangent", max(angles), cfg.contact_angle_max,
                  max(angles) <= cfg.contact_angle_max, n_curves=len(curves))
    if cfg.svg_only:
        return rep, curves

    try:
        with _Stage(rep, "cohomology_gamma", fatal=False):
            y = rng.random(cfg.n_residual)
            r, b = inc.cohomology_residual("gamma", y, K, psi)
            excess = float(np.max(r - b))
            rep.check("cohomology_gamma", float(r.max()), cfg.series_slack,
                      excess <= cfg.series_slack and b.max() <= cfg.truncation_tol,
                      tail_bound=float(b.max()), truncation_tol=cfg.truncation_tol)
        with _Stage(rep, "cohomology_beta", fatal=False):
            y = rng.uniform(inc.DEFAULT_DELTA, 1 - inc.DEFAULT_DELTA, cfg.n_residual)
            y = y[np.abs(y - 0.5) > 0]
            r, b = inc.cohomology_residual("beta", y, K, psi)
            excess = float(np.max(r - b))
            rep.check("cohomology_beta", float(r.max()), cfg.series_slack,
                      excess <= cfg.series_slack and b.max() <= cfg.truncation_tol,
                      tail_bound=float(b.max()), truncation_tol=cfg.truncation_tol)
        with _Stage(rep, "anchors", fatal=False):
            g0 = inc.gamma_series(0.0, K, psi)
            vals = {"gamma(1/2)": float(inc.gamma(0.5, K, psi)), "beta(1/2)": float(inc.beta(0.5, K, psi)),
                    "gamma(0)+2": float(g0.value + 2.0)}
            ok = abs(vals["gamma(1/2)"]) <= 1e-14 and abs(vals["beta(1/2)"]) <= 1e-14 \
                and abs(vals["gamma(0)+2"]) <= float(g0.tail_bound) + 1e-14
            rep.check("anchor_values", vals, 1e-14, ok, tail_bound=float(g0.tail_bound))
        with _Stage(rep, "transversality", fatal=False):
            m = inc.transversality_margin(cfg.grid, K, psi)
            rep.check("transversality_margin", m, 0.0, m > 0, grid=cfg.grid)
        with _Stage(rep, "splitting_invariance", fatal=False):
            pts = regular_points(model, rng, cfg.n_points)
            res = float(np.max(inc.splitting_invariance_residual(pts, K, model)))
            rep.check("splitting_invariance", res, cfg.splitting_tol, res <= cfg.splitting_tol)
        with _Stage(rep, "partial_hyperbolicity", fatal=False):
            ph = inc.ph_inequality_report(model, K, cfg.grid)
            c0, c1 = ph["circles"]["y=0"], ph["circles"]["y=1/2"]
            # y = 0: E^u horizontal (stretch 2), E^c vertical (stretch Psi'(0));
            # y = 1/2: the roles swap, E^u vertical with stretch Psi'(1/2)
            d0, dh = psi.derivative(0.0), psi.derivative(0.5)
            anchors_ok = (abs(c0["unstable_stretch"] - 2.0) <= 1e-6 and abs(c0["ratio"] - d0 / 2.0) <= 1e-6
                          and abs(c1["unstable_stretch"] - dh) <= 1e-6
                          and abs(c1["ratio"] - 2.0 / dh) <= 1e-6)
            rep.check("ph_circles", ph["circles"], 1e-6, anchors_ok)
            rep.check("ph_grid", {"min_unstable_stretch": ph["min_unstable_stretch"],
                                  "max_ratio": ph["max_ratio"]}, 0.0, ph["passed_grid"], grid=cfg.grid)
        with _Stage(rep, "cone", fatal=False):
            cone = ConeFamily(lambda p: inc.unstable_direction(p, K, psi)[0], cfg.incoherent_cone_half_angle)
            cr = cone_invariance_check(model, cone, min(cfg.grid, 128))
            rep.check("unstable_cone", cr["worst_margin_angle"], 0.0, cr["passed"],
                      worst_expansion=cr["worst_expansion"])
        with _Stage(rep, "branching", fatal=False):
            cert = inc.branching_certificate(model, K)
            rep.check("branching_certificate", cert.separation, 0.1, cert.separation > 0.1,
                      tangency_error=cert.max_tangency_error)
        with _Stage(rep, "uniqueness", fatal=False):
            u = inc.uniqueness_check(cfg.n_points, K, psi, seed=cfg.seed)
            rep.check("off_circle_uniqueness", u["max_error"], cfg.uniqueness_tol,
                      u["max_error"] <= cfg.uniqueness_tol, n_points=u["n_points"])
    except _Stop:
        pass
    return rep, curves


def cmd_incoherent_report(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rep, curves = run_incoherent(cfg)
    (out / "figure1.svg").write_text(svg.figure1_svg(curves), encoding="utf-8")
    _write_json(out / "report.json", rep.as_dict())
    _write_json(out / "timing.json", cfg.timing)
    _summary(rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


# --------------------------------------------------------------------------- coherent

def _centre_points(rng, n):
    return rng.random((n, 2))


def run_coherent(cfg):
    """Foliation, semiconjugacy and conjugacy pipeline; returns (report, artefacts)."""
    rep = Report("coherent-suite", cfg)
    art = {"centers": [], "unstables": [], "samples": []}
    rng = np.random.default_rng(cfg.seed)
    model = cfg.build_model()
    try:
        with _Stage(rep, "linearisation"):
            lin = model.linearisation()
            rep.info["linearisation"] = lin.as_dict()
            if lin.kind != geo.HYPERBOLIC:
                raise ValueError(f"coherent suite needs a hyperbolic linearisation, got {lin.kind}")
        with _Stage(rep, "cone"):
            cone = fol.default_cone(model, cfg.cone_half_angle)
            cr = cone_invariance_check(model, cone, min(cfg.grid, 128))
            rep.check("unstable_cone", cr["worst_margin_angle"], 0.0, cr["passed"],
                      worst_expansion=cr["worst_expansion"], worst_point=cr["worst_margin_point"])
            if not cr["passed"]:
                rep.stopped_at = "cone"
                raise _Stop()
        with _Stage(rep, "seed"):
            seed_line = fol.seed_foliation(model, cone, grid_n=32)
            rep.info["seed_slope"] = [int(v) for v in seed_line.slope]
        with _Stage(rep, "tangent_convergence", fatal=False):
            tc = fol.tangent_convergence(model, rng.random(2), seed=seed_line)
            rep.check("tangent_contraction", tc["mean_ratio"], cfg.contraction_max,
                      tc["mean_ratio"] < cfg.contraction_max)
        with _Stage(rep, "no_crossing"):
            pts = _centre_points(rng, cfg.n_crossing)
            many = fol.center_leaves(model, pts, 1.0, cfg.leaf_tol, seed_line)
            nc = fol.no_crossing_check(many, model, seed_line)
            rep.check("no_crossings", nc["crossings"], 0, nc["passed"], n_leaves=nc["n_leaves"],
                      refined_pairs=nc["refined_pairs"])
        with _Stage(rep, "invariance"):
            gap = fol.invariance_gap(model, many[0], 1.0, cfg.leaf_tol, seed_line)
            rep.check("centre_invariance", gap, 2 * cfg.leaf_tol, gap <= 2 * cfg.leaf_tol)
        with _Stage(rep, "product_structure"):
            base = rng.random(2)
            step = 1.0 / cfg.product_n
            mid = 0.5 * (1.0 - step)
            C = [base + i * step * lin.v_u + mid * lin.v_s for i in range(cfg.product_n)]
            U = [base + mid * lin.v_u + j * step * lin.v_s for j in range(cfg.product_n)]
            cl = fol.center_leaves(model, np.array(C), 0.8, cfg.leaf_tol, seed_line)
            ul = fol.unstable_leaves(model, np.array(U), 0.8)
            ps = fol.product_structure_check(cl, ul)
            rep.check("product_structure", [ps["min_count"], ps["max_count"]], 1, ps["passed"])
            art["centers"], art["unstables"] = cl, ul
        with _Stage(rep, "growth", fatal=False):
            g = fol.growth_diagnostics(model, cl, ul, n_max=10, seed=cfg.seed)
            g5 = fol.growth_diagnostics(model, cl[:5], ul[:1], n_max=5, seed=cfg.seed)
            stable = abs(g.C_estimate - g5.C_estimate) <= 0.1 * max(g.C_estimate, 1e-12) or g.C_estimate < 1e-8
            rep.info["growth"] = g.as_dict()
            rep.check("growth_C_bounded", g.C_estimate, "stable as n_max doubles",
                      bool(np.isfinite(g.C_estimate)) and stable and g.unstable_gap_monotone)
        with _Stage(rep, "semiconjugacy"):
            approx = SemiconjugacyApprox(model, cfg.depth_N)
            pts = rng.random((cfg.n_points, 2))
            res = float(np.max(semiconjugacy_residual(approx, pts)))
            tail = float(approx.tail_norm())
            rep.check("semiconjugacy_residual", res, cfg.semiconj_tol, res <= cfg.semiconj_tol, tail_bound=tail)
            v = rng.integers(-2, 3, size=(cfg.n_points, 2))
            du = float(np.max(deck_defect(approx, pts, v, component="u")))
            rep.check("deck_equivariance_H_u", du, cfg.deck_tol, du <= cfg.deck_tol, tail_bound=tail)
            rep.info["deck_defect_full_H"] = float(np.max(deck_defect(approx, pts, v)))
            hs = [np.ptp(approx.H_s(u.vertices)) for u in ul]
            rep.check("H_s_constant_on_unstable_leaves", float(max(hs)), cfg.collapse_tol,
                      max(hs) <= cfg.collapse_tol, tail_bound=tail)
        with _Stage(rep, "estimate_T"):
            pts = _centre_points(rng, cfg.n_leaves)
            leaves = fol.center_leaves(model, pts, cfg.window, min(cfg.leaf_tol, 1e-5), seed_line)
            wide = fol.center_leaves(model, pts, 2 * cfg.window, min(cfg.leaf_tol, 1e-5), seed_line)
            AL = [cj.ArclengthLeaf(L, approx.projections, i) for i, L in enumerate(leaves)]
            AW = [cj.ArclengthLeaf(L, approx.projections, i) for i, L in enumerate(wide)]
            te, tw = cj.estimate_T(AL), cj.estimate_T(AW)
            rel = abs(te.T - tw.T) / te.T
            rep.check("T_window_stability", rel, cfg.T_stability, rel <= cfg.T_stability,
                      T=te.T, T_wide=tw.T, threshold=te.threshold)
        with _Stage(rep, "conjugacy"):
            samples = cj.conjugacy_samples(approx, AL, te.T, cfg.per_leaf)
            chk = cj.conjugacy_checks(approx, AL, samples, cfg.conj_leaf_tol, cfg.equiv_tol)
            rep.check("leaf_to_leaf", chk["leaf_to_leaf"]["max_deviation"], cfg.conj_leaf_tol,
                      chk["leaf_to_leaf"]["passed"], worst_sample=chk["leaf_to_leaf"]["worst_sample"],
                      tail_bound=tail)
            rep.check("leaf_equivariance", chk["equivariance"]["max_deviation"], cfg.equiv_tol,
                      chk["equivariance"]["passed"], tail_bound=tail)
            rep.check("monotonicity", chk["monotonicity"]["min_derivative"], chk["monotonicity"]["bound"],
                      chk["monotonicity"]["passed"])
            rep.check("injectivity", chk["injectivity"]["min_image_separation"], 1e-12,
                      chk["injectivity"]["passed"])
            art["samples"] = samples
            art["conj_leaves"] = leaves
    except _Stop:
        pass
    return rep, art


def cmd_coherent_suite(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rep, art = run_coherent(cfg)
    _write_json(out / "report.json", rep.as_dict())
    leaves = list(art.get("conj_leaves", [])) or list(art["centers"])
    _write_csv(out / "leaves.csv", ["leaf_id", "t", "x", "y"], fol.leaves_to_rows(leaves))
    _write_csv(out / "h_samples.csv", ["leaf_id", "s", "x", "y", "hx", "hy"], cj.samples_to_rows(art["samples"]))
    if art["centers"]:
        (out / "atlas.svg").write_text(svg.atlas_svg(art["centers"], art["unstables"]), encoding="utf-8")
    _write_json(out / "timing.json", cfg.timing)
    _summary(rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


# --------------------------------------------------------------------------- small commands

def cmd_classify(args):
    try:
        vals = [float(v) for v in args.m]
        lin = geo.classify_linearisation(np.array(vals).reshape(2, 2))
    except (PhendoError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(_jsonable(lin.as_dict()), sort_keys=True))
    return EXIT_OK


def cmd_verify_cone(cfg, half_angle=None):
    model = cfg.build_model()
    if cfg.model == "incoherent":
        h = half_angle or cfg.incoherent_cone_half_angle
        cone = ConeFamily(lambda p: inc.unstable_direction(p, cfg.depth_K, model.psi)[0], h)
    else:
        cone = fol.default_cone(model, half_angle or cfg.cone_half_angle)
    rep = cone_invariance_check(model, cone, min(cfg.grid, 256))
    rep["half_angle"] = cone.half_angle
    print(json.dumps(_jsonable(rep), sort_keys=True))
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def _read_leaves(path):
    rows = {}
    with open(path, encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            rows.setdefault(int(r["leaf_id"]), []).append((float(r["x"]), float(r["y"])))
    return [fol.LeafPolyline(np.array(v), 0, {}) for _, v in sorted(rows.items())]


def cmd_render(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    curves = svg.figure1_curves(8, cfg.depth_K, MobiusCircleMap(cfg.c))
    (out / "figure1.svg").write_text(svg.figure1_svg(curves), encoding="utf-8")
    written = ["figure1.svg"]
    if (out / "leaves.csv").exists():
        (out / "atlas.svg").write_text(svg.atlas_svg(_read_leaves(out / "leaves.csv")), encoding="utf-8")
        written.append("atlas.svg")
    print(json.dumps({"written": written, "out": str(out)}))
    return EXIT_OK


def _summary(rep):
    for c in rep.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['value']!r} (tol {c['tolerance']!r})")
    if rep.stopped_at:
        print(f"stopped at stage: {rep.stopped_at}")


# --------------------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="phendo", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model_default):
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--model", choices=["perturbed", "incoherent"], help=f"default {model_default}")
        sp.add_argument("-m", nargs=4, metavar=("a", "b", "c", "d"), help="integer matrix, row major")
        sp.add_argument("--eps", type=float, help="perturbation size")
        sp.add_argument("--c", type=float, help="Moebius parameter")
        sp.add_argument("--depth-K", dest="depth_K", type=int, help="series truncation")
        sp.add_argument("--depth-N", dest="depth_N", type=int, help="semiconjugacy truncation")
        sp.add_argument("--grid", type=int, help="grid size per axis")
        sp.add_argument("--window", type=float, help="centre leaf half-length")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--svg-only", dest="svg_only", action="store_true", help="figure only")

    sp = sub.add_parser("classify", help="linearisation class of a matrix")
    sp.add_argument("-m", nargs=4, required=True, metavar=("a", "b", "c", "d"))
    sp = sub.add_parser("verify-cone", help="grid test of an unstable cone family")
    common(sp, "perturbed")
    sp.add_argument("--half-angle", dest="half_angle", type=float)
    common(sub.add_parser("incoherent-report", help="incoherent example checks and figure"), "incoherent")
    common(sub.add_parser("coherent-suite", help="centre foliation and leaf conjugacy pipeline"), "perturbed")
    common(sub.add_parser("render", help="redraw SVG figures"), "incoherent")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "classify":
        return cmd_classify(args)
    try:
        default_model = "incoherent" if args.command in ("incoherent-report", "render") else "perturbed"
        cfg = make_config(args, model=default_model)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify-cone":
        return cmd_verify_cone(cfg, args.half_angle)
    if args.command == "incoherent-report":
        return cmd_incoherent_report(cfg)
    if args.command == "coherent-suite":
        return cmd_coherent_suite(cfg)
    return cmd_render(cfg)


if __name__ == "__main__":
    sys.exit(main())
