"""Command-line interface: develop, sweep, render, kv, coxeter-check, classify-ends, hilbert-dist.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error, 3 guard tripped.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import coxeter, devmap, invariants
from .complexes import DevelopedComplex
from .convex import ConvexBody, Cone, Verdict, chart_basis, max_chord_length, properly_convex_check
from .errors import (
    BadChart,
    GeometryError,
    GuardError,
    InputError,
    SpecParseError,
    UnknownParameter,
)
from .hilbert import HilbertSpaceCtx, hilbert_distance, klein_distance
from .kv import KvContext, hessian_positivity_check, kv_log_hessian, kv_value, thread_count

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3
KINDS = ("reflection_polytope", "doubled_reflection", "triangulated")
RELATOR_TOL = 1e-8
ORBIT_RELATOR_TOL = 1e-10


# specs -----------------------------------------------------------------------

@dataclass
class OrbifoldSpec:
    name: str
    kind: str
    orders: np.ndarray
    parameters: dict
    run: dict
    polytope: dict = field(default_factory=dict)
    gluing: dict = field(default_factory=dict)

    def with_param(self, name: str, value: float) -> "OrbifoldSpec":
        check_param_name(self, name)
        params = dict(self.parameters)
        params[name] = float(value)
        return OrbifoldSpec(self.name, self.kind, self.orders, params, self.run, self.polytope, self.gluing)


def _require(data, key, where="spec"):
    if key not in data:
        raise SpecParseError(f"{where}: missing field {key!r}")
    return data[key]


def _orders_matrix(raw, m):
    a = np.asarray(raw)
    if a.ndim == 2:
        if a.shape != (m, m):
            raise SpecParseError(f"field 'orders': expected a {m}x{m} matrix, got shape {a.shape}")
        return a.astype(int)
    if a.ndim != 1 or a.size != m * (m - 1) // 2:
        raise SpecParseError(f"field 'orders': expected {m * (m - 1) // 2} pair orders (01, 02, ...) or a matrix")
    out = np.eye(m, dtype=int)
    for (i, j), n in zip([(i, j) for i in range(m) for j in range(i + 1, m)], a):
        out[i, j] = out[j, i] = int(n)
    return out


def parse_spec(text: str, source: str = "spec") -> OrbifoldSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise SpecParseError(f"{source}: top level must be an object")
    kind = _require(data, "kind", source)
    if kind not in KINDS:
        raise SpecParseError(f"{source}: field 'kind' must be one of {KINDS}, got {kind!r}")
    raw_orders = _require(data, "orders", source)
    polytope, gluing = {}, {}
    if kind == "reflection_polytope":
        polytope = _require(data, "polytope", source)
        m = int(polytope["simplex"]) + 1 if "simplex" in polytope else len(_require(polytope, "halfspaces", "polytope"))
    else:
        m = 4
        if kind == "triangulated":
            gluing = _require(data, "gluing", source)
    try:
        orders = _orders_matrix(raw_orders, m)
    except (TypeError, ValueError):
        raise SpecParseError(f"{source}: field 'orders' is not a list of integers") from None
    params = data.get("parameters", {})
    if not isinstance(params, dict):
        raise SpecParseError(f"{source}: field 'parameters' must be an object")
    spec = OrbifoldSpec(data.get("name", Path(source).stem), kind, orders,
                        {k: float(v) for k, v in params.items()}, dict(data.get("run", {})), polytope, gluing)
    for name in spec.parameters:
        check_param_name(spec, name)
    return spec


def load_spec(path) -> OrbifoldSpec:
    return parse_spec(Path(path).read_text(), str(path))


def _pair_names(m):
    return [f"lambda{i}{j}" for i in range(m) for j in range(i + 1, m)]


def param_names(spec: OrbifoldSpec) -> list:
    if spec.kind == "reflection_polytope":
        return _pair_names(len(spec.orders))
    names = [f"deform_{k}" for k in range(4)] + ["s", "t0", "t1", "t2", "t3"]
    if spec.kind == "doubled_reflection":
        return _pair_names(4) + names
    return names


HOLONOMY_PREFIXES = ("lambda", "deform_")


def check_param_name(spec: OrbifoldSpec, name: str):
    if name not in param_names(spec):
        raise UnknownParameter(f"unknown parameter {name!r} for kind {spec.kind}; known: {', '.join(param_names(spec))}")


def _lambdas(spec: OrbifoldSpec):
    m = len(spec.orders)
    lam = {}
    for i in range(m):
        for j in range(i + 1, m):
            key = f"lambda{i}{j}"
            if key in spec.parameters:
                lam[(i, j)] = spec.parameters[key]
    return coxeter.DeformationParams(lam)


def build_polytope(spec: OrbifoldSpec) -> ConvexBody:
    p = spec.polytope
    if "simplex" in p:
        return ConvexBody.simplex(int(p["simplex"]))
    h = np.asarray(_require(p, "halfspaces", "polytope"), dtype=float)
    v = np.asarray(_require(p, "vertices", "polytope"), dtype=float)
    return ConvexBody(h.shape[1] - 1, h, v, v.mean(axis=0), vertices=v)


def build_coxeter(spec: OrbifoldSpec) -> coxeter.CoxeterSystem:
    return coxeter.cartan_from_orders(build_polytope(spec), spec.orders, _lambdas(spec))


def build_gluing(spec: OrbifoldSpec) -> devmap.GluingData:
    if spec.kind == "doubled_reflection":
        data = devmap.doubled_reflection_gluing(coxeter.cartan_matrix(spec.orders, _lambdas(spec)))
    elif spec.kind == "triangulated":
        try:
            data = devmap.GluingData.from_json(spec.gluing)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"field 'gluing': {exc}") from None
    else:
        raise SpecParseError(f"kind {spec.kind!r} has no pasting data")
    coeffs = [spec.parameters.get(f"deform_{k}", 0.0) for k in range(4)]
    if any(coeffs):
        data = devmap.deform(data, coeffs)
    return data


def end_parameters(spec: OrbifoldSpec):
    """Four end orbifolds, or None when some cone point is not of order 3.

    t3 closes the product constraint unless given explicitly.
    """
    if spec.kind == "reflection_polytope":
        return None
    if np.any(spec.orders[~np.eye(4, dtype=bool)] != 3):
        return None
    p = spec.parameters
    if spec.kind == "doubled_reflection":
        base = [e.t for e in invariants.reflection_end_params(coxeter.cartan_matrix(spec.orders, _lambdas(spec)))]
    else:
        base = [1.0] * 4
    s = p.get("s", 1.0)
    ts = [p.get(f"t{k}", base[k]) for k in range(3)]
    if "t3" in p:
        t3 = p["t3"]
    else:
        t3 = invariants.product_constant(s) / float(np.prod(ts))
    return [invariants.EndOrbifoldParams((3, 3, 3), s, t) for t in (*ts, t3)]


def run_option(spec: OrbifoldSpec, key, default, override=None):
    if override is not None:
        return override
    return type(default)(spec.run.get(key, default))


# reports ---------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    value: object
    tolerance: str


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, value, tolerance):
        self.checks.append(Check(name, bool(passed), value, tolerance))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "info": self.info,
            "timings": self.timings,
        }

    def render(self) -> str:
        lines = [f"report {self.name}"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            val = f"{c.value:.6g}" if isinstance(c.value, float) else str(c.value)
            lines.append(f"  [{mark}] {c.name}: {val} (tolerance {c.tolerance})")
        for k, v in self.info.items():
            lines.append(f"  {k}: {v}")
        lines.append("  overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def complex_checks(cx: DevelopedComplex, report: Report, eps0: float = 0.1, n_chords: int = 2000, seed: int = 0):
    """Checks computable from a complex alone, so a reloaded complex gives the same results."""
    res = devmap.holonomy_residuals(cx)
    worst = max(res.values()) if res else 0.0
    if cx.kind == "orbit":
        report.add("relators", worst <= ORBIT_RELATOR_TOL, float(worst), f"<= {ORBIT_RELATOR_TOL:g}")
        body = cx.to_body()
        verdict = properly_convex_check(body)
        report.add("hull", verdict is Verdict.PROPERLY_CONVEX, verdict.value, "ProperlyConvex")
        chord = max_chord_length(body)
        report.add("max_chord", chord <= np.pi - eps0, float(chord), f"<= pi - {eps0:g}")
    else:
        report.add("relators", worst <= RELATOR_TOL, float(worst), f"<= {RELATOR_TOL:g}")
        conf = devmap.confinement_check(cx, eps0)
        report.add("confinement", conf.max_violation <= 1e-8, float(conf.max_violation), "<= 1e-08")
        report.add("max_chord", conf.max_chord <= np.pi - eps0, float(conf.max_chord), f"<= pi - {eps0:g}")
        verdict = devmap.convexity_verdict(cx, n_chords=n_chords, seed=seed)
        report.add("convexity", verdict is not devmap.ConvexityVerdict.NOT_CONVEX, verdict.value, "not NotConvex")
    report.info["cells"] = len(cx)
    return report


def feasibility_check(spec: OrbifoldSpec, report: Report):
    ends = end_parameters(spec)
    if ends is None:
        return report
    out = invariants.solve_doubled_tetrahedron_constraints(ends)
    value = f"Feasible C={out.c_value:.6g}" if out.feasible else f"Infeasible ({out.reason})"
    report.add("invariants", out.feasible, value, "Feasible")
    return report


def develop_spec(spec: OrbifoldSpec, depth: int, cap: int = coxeter.DEFAULT_CAP) -> DevelopedComplex:
    if spec.kind == "reflection_polytope":
        return coxeter.fundamental_orbit(build_coxeter(spec), depth, cap=cap)
    return devmap.develop(build_gluing(spec), depth, cap=cap)


# output formats ----------------------------------------------------------------

def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def chart_from_option(cx: DevelopedComplex, option: str) -> np.ndarray:
    if option == "auto":
        return cx.chart()
    if option == "standard":
        return np.ones(cx.ambient)
    try:
        ell = np.array([float(t) for t in option.split(",")])
    except ValueError:
        raise BadChart(f"chart must be 'auto', 'standard' or comma-separated numbers, got {option!r}") from None
    if ell.size != cx.ambient:
        raise BadChart(f"chart functional needs {cx.ambient} entries, got {ell.size}")
    return ell


def _polygon(points2d):
    if len(points2d) == 3:
        return points2d
    try:
        hull = ConvexHull(points2d)
        return points2d[hull.vertices]
    except QhullError:
        return points2d


def render_svg(cx: DevelopedComplex, ell, size: int = 800) -> str:
    """Polygon outline per cell in the chart ell . x = 1; deterministic output."""
    vals = np.einsum("kij,j->ki", cx.cells, ell)
    if np.any(np.abs(vals) < 1e-12) or (np.any(vals > 0) and np.any(vals < 0)):
        raise BadChart("chart hyperplane meets the complex")
    coords = cx.chart_coordinates(ell)[:, :, :2]
    lo = coords.reshape(-1, 2).min(axis=0)
    hi = coords.reshape(-1, 2).max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (size - 20) / span
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
              f'viewBox="0 0 {size} {size}">\n')
    out.write(f'<rect width="{size}" height="{size}" fill="white"/>\n')
    for k, cell in enumerate(coords):
        poly = _polygon(cell)
        pts = " ".join(f"{_fmt(10 + (x - lo[0]) * scale)},{_fmt(size - 10 - (y - lo[1]) * scale)}" for x, y in poly)
        out.write(f'<polygon id="cell{k}" points="{pts}" fill="none" stroke="black" stroke-width="0.5"/>\n')
    out.write("</svg>\n")
    return out.getvalue()


def plot_svg(xs, series: dict, xlabel: str, size=(640, 400)) -> str:
    """Line plot of each series against xs (values as given, NaN skipped)."""
    w, h = size
    pad = 50
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n')
    out.write(f'<rect width="{w}" height="{h}" fill="white"/>\n')
    out.write(f'<text x="{w // 2}" y="{h - 10}" text-anchor="middle" font-size="12">{xlabel}</text>\n')
    colors = ["black", "firebrick", "steelblue", "darkgreen"]
    xs = np.asarray(xs, dtype=float)
    if xs.size:
        x0, x1 = float(xs.min()), float(xs.max())
        x1 = x1 if x1 > x0 else x0 + 1.0
        for c, (label, ys) in enumerate(series.items()):
            ys = np.asarray(ys, dtype=float)
            ok = np.isfinite(ys)
            if not ok.any():
                continue
            y0, y1 = float(ys[ok].min()), float(ys[ok].max())
            y1 = y1 if y1 > y0 else y0 + 1.0
            px = pad + (xs[ok] - x0) / (x1 - x0) * (w - 2 * pad)
            py = h - pad - (ys[ok] - y0) / (y1 - y0) * (h - 2 * pad)
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
            color = colors[c % len(colors)]
            out.write(f'<polyline points="{pts}" fill="none" stroke="{color}"/>\n')
            out.write(f'<text x="{pad}" y="{20 + 14 * c}" font-size="12" fill="{color}">'
                      f'{label} [{y0:.3g}, {y1:.3g}]</text>\n')
    out.write("</svg>\n")
    return out.getvalue()


# sweep -------------------------------------------------------------------------

SWEEP_COLUMNS = ["index", "param", "value", "feasibility", "verdict", "max_chord",
                 "residual", "min_hessian_eig", "error"]


def _kv_min_eig(cx: DevelopedComplex, n_samples: int, seed: int) -> float:
    cone = Cone.from_body(cx.to_body())
    ctx = KvContext(cone, n_samples=n_samples, seed=seed)
    return float(np.linalg.eigvalsh(kv_log_hessian(ctx, ctx.x0))[0])


def sweep_point(spec: OrbifoldSpec, name: str, value: float, depth: int, eps0: float,
                kv: bool = False, kv_samples: int = 20000, seed: int = 0) -> dict:
    row = {"param": name, "value": value, "feasibility": "", "verdict": "", "max_chord": "",
           "residual": "", "min_hessian_eig": "", "error": ""}
    s = spec.with_param(name, value)
    try:
        if spec.kind == "reflection_polytope":
            system = build_coxeter(s)
            rel = coxeter.relation_check(system)
            row["feasibility"] = "Feasible" if rel.passed else "Infeasible"
            row["residual"] = rel.max_residual
            cx = coxeter.fundamental_orbit(system, depth)
            body = cx.to_body()
            row["verdict"] = properly_convex_check(body).value
            row["max_chord"] = max_chord_length(body)
        else:
            ends = end_parameters(s)
            if ends is not None:
                out = invariants.solve_doubled_tetrahedron_constraints(ends)
                row["feasibility"] = "Feasible" if out.feasible else "Infeasible"
                row["residual"] = float(np.max(np.abs(invariants.constraint_residuals(invariants.flatten(ends)))))
            if name.startswith(HOLONOMY_PREFIXES):
                data = build_gluing(s)
                row["residual"] = max(devmap.relator_residuals(data).values())
                cx = devmap.develop(data, depth)
                conf = devmap.confinement_check(cx, eps0)
                row["max_chord"] = conf.max_chord
                row["verdict"] = devmap.convexity_verdict(cx, seed=seed).value
                if conf.max_violation > 1e-8:
                    row["verdict"] = devmap.ConvexityVerdict.NOT_CONVEX.value
        if kv and row["verdict"]:
            row["min_hessian_eig"] = _kv_min_eig(cx, kv_samples, seed)
    except (GeometryError, GuardError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _row_ok(row) -> bool:
    if row["error"] or row["feasibility"] == "Infeasible":
        return False
    return row["verdict"] not in ("NotConvex", "ConvexNotProper")


def run_sweep(spec: OrbifoldSpec, name: str, lo: float, hi: float, steps: int, depth: int,
              eps0: float = 0.1, kv: bool = False, seed: int = 0) -> list:
    check_param_name(spec, name)
    values = np.linspace(lo, hi, steps) if steps > 0 else np.array([])
    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        rows = list(ex.map(lambda v: sweep_point(spec, name, float(v), depth, eps0, kv, seed=seed), values))
    for i, row in enumerate(rows):
        row["index"] = i
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# commands ----------------------------------------------------------------------

def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def cmd_develop(args) -> int:
    spec = load_spec(args.spec)
    depth = run_option(spec, "depth", 3, args.depth)
    eps0 = run_option(spec, "eps0", 0.1, args.eps0)
    seed = run_option(spec, "seed", 0, args.seed)
    cap = run_option(spec, "cap", coxeter.DEFAULT_CAP, args.cap)
    t = time.perf_counter()
    cx = develop_spec(spec, depth, cap)
    t_dev = time.perf_counter() - t
    report = Report(spec.name)
    complex_checks(cx, report, eps0, args.chords, seed)
    feasibility_check(spec, report)
    report.info["depth"] = depth
    report.timings = {"develop_s": round(t_dev, 3), "checks_s": round(time.perf_counter() - t - t_dev, 3)}
    out = Path(args.out)
    _write(out.with_suffix(".obj"), cx.to_obj())
    _write(out.with_suffix(".json"), json.dumps(cx.to_json()))
    _write(out.with_suffix(".report.json"), json.dumps(report.to_json(), indent=2))
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    depth = run_option(spec, "depth", 3, args.depth)
    eps0 = run_option(spec, "eps0", 0.1, args.eps0)
    seed = run_option(spec, "seed", 0, args.seed)
    rows = run_sweep(spec, args.param, args.range[0], args.range[1], args.steps, depth, eps0, args.kv, seed)
    out = Path(args.out)
    _write(out.with_suffix(".csv"), rows_to_csv(rows))
    xs = [r["value"] for r in rows]
    res = [math.log10(max(float(r["residual"]), 1e-17)) if r["residual"] != "" else float("nan") for r in rows]
    chord = [float(r["max_chord"]) if r["max_chord"] != "" else float("nan") for r in rows]
    _write(out.with_suffix(".svg"), plot_svg(xs, {"log10 residual": res, "max chord": chord}, args.param))
    for r in rows:
        print(f"{r['index']:3d} {args.param}={r['value']:.6g} {r['feasibility'] or '-'} {r['verdict'] or '-'} {r['error']}")
    return EXIT_OK if all(_row_ok(r) for r in rows) else EXIT_FAIL


def cmd_render(args) -> int:
    cx = DevelopedComplex.from_json(Path(args.complex).read_text())
    ell = chart_from_option(cx, args.chart)
    _write(args.out, render_svg(cx, ell))
    print(f"wrote {args.out} ({len(cx)} polygons)")
    return EXIT_OK


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def lorentz_kv(x) -> float:
    """Closed form n! vol(B_n) (x_0^2 - |x'|^2)^(-(n+1)/2) on the Lorentz cone of R^(n+1)."""
    x = np.asarray(x, dtype=float)
    n = x.size - 1
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return math.factorial(n) * ball * (x[0] ** 2 - x[1:] @ x[1:]) ** (-(n + 1) / 2)


def cmd_kv(args) -> int:
    x = _vector(args.point)
    if args.cone == "orthant":
        cone = Cone.orthant(x.size)
        oracle = float(np.prod(1.0 / x))
    else:
        cone = Cone.lorentz(x.size)
        oracle = lorentz_kv(x)
    ctx = KvContext(cone, n_samples=args.samples, seed=args.seed)
    value = kv_value(ctx, x)
    hess = kv_log_hessian(ctx, x)
    eig = np.linalg.eigvalsh(hess)
    report = Report(f"kv-{args.cone}")
    report.add("hessian_positive", eig[0] > 0, float(eig[0]), "> 0")
    report.info["value"] = f"{value:.8g}"
    report.info["closed_form"] = f"{oracle:.8g} (relative error {abs(value / oracle - 1):.3g})"
    report.info["hessian_eigenvalues"] = " ".join(f"{e:.6g}" for e in eig)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_coxeter_check(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind != "reflection_polytope":
        raise SpecParseError(f"coxeter-check needs kind 'reflection_polytope', got {spec.kind!r}")
    depth = run_option(spec, "depth", 8, args.depth)
    eps0 = run_option(spec, "eps0", 0.1, args.eps0)
    system = build_coxeter(spec)
    rel = coxeter.relation_check(system)
    report = Report(spec.name)
    report.add("relations", rel.max_residual <= ORBIT_RELATOR_TOL, float(rel.max_residual), f"<= {ORBIT_RELATOR_TOL:g}")
    report.add("minimal_orders", rel.minimal, str(rel.non_minimal_pairs or "none"), "no shorter power is Id")
    cx = coxeter.fundamental_orbit(system, depth)
    body = cx.to_body()
    verdict = properly_convex_check(body)
    report.add("hull", verdict is Verdict.PROPERLY_CONVEX, verdict.value, "ProperlyConvex")
    chord = max_chord_length(body)
    report.add("max_chord", chord <= np.pi - eps0, float(chord), f"<= pi - {eps0:g}")
    if args.ellipse_tol is not None:
        dist, _ = coxeter.orbit_ellipse_distance(cx)
        report.add("ellipse", dist <= args.ellipse_tol, float(dist), f"<= {args.ellipse_tol:g}")
    report.info["elements"] = len(cx)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_classify_ends(args) -> int:
    spec = load_spec(args.spec)
    data = build_gluing(spec)
    report = Report(spec.name)
    for k, end in enumerate(devmap.end_descriptors(data)):
        cls = devmap.classify_end(end, totally_geodesic=args.totally_geodesic)
        report.add(f"end{k}", cls is not devmap.EndClass.UNCLASSIFIED, cls.value, "classified")
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def _homogeneous(v: np.ndarray, dim: int) -> np.ndarray:
    if v.size == dim:
        return np.r_[1.0, v]
    if v.size == dim + 1:
        return v
    raise InputError(f"point needs {dim} affine or {dim + 1} homogeneous coordinates")


def cmd_hilbert_dist(args) -> int:
    if args.domain == "disk":
        body = ConvexBody.klein_ball(args.dim)
    elif args.domain == "simplex":
        body = ConvexBody.simplex(args.dim)
    else:
        body = ConvexBody.from_json(Path(args.domain).read_text())
    ctx = HilbertSpaceCtx.from_body(body)
    p = _homogeneous(_vector(args.p), body.dim)
    q = _homogeneous(_vector(args.q), body.dim)
    d = hilbert_distance(ctx, p, q)
    print(f"hilbert distance {d:.15g}")
    if args.domain == "disk":
        k = klein_distance(p[1:] / p[0], q[1:] / q[0])
        print(f"2 x klein distance {2 * k:.15g} (difference {abs(d - 2 * k):.3g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projconvex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("develop", help="develop a spec and check the result")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", required=True, help="output prefix; writes .obj, .json, .report.json")
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--chords", type=int, default=2000)
    p.add_argument("--cap", type=int, default=None, help="maximum number of group elements")
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    p.add_argument("spec")
    p.add_argument("--param", required=True)
    p.add_argument("--range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--steps", type=int, default=9)
    p.add_argument("--out", required=True, help="output prefix; writes .csv and .svg")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--kv", action="store_true", help="also report the min log-Hessian eigenvalue")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="draw a developed complex as SVG")
    p.add_argument("complex")
    p.add_argument("--chart", default="auto", help="auto, standard or comma-separated functional")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("kv", help="characteristic function of a cone")
    p.add_argument("--cone", choices=["orthant", "lorentz"], default="orthant")
    p.add_argument("--point", required=True, help="comma-separated interior point")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_kv)

    p = sub.add_parser("coxeter-check", help="relations and orbit convexity of a reflection group")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--ellipse-tol", type=float, default=None)
    p.set_defaults(func=cmd_coxeter_check)

    p = sub.add_parser("classify-ends", help="eigenvalue classification of the ends")
    p.add_argument("spec")
    p.add_argument("--totally-geodesic", action="store_true")
    p.set_defaults(func=cmd_classify_ends)

    p = sub.add_parser("hilbert-dist", help="Hilbert distance between two points")
    p.add_argument("--domain", default="disk", help="disk, simplex or a body JSON file")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.set_defaults(func=cmd_hilbert_dist)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GuardError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
