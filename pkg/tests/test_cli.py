import csv
import io
import json
import re

import numpy as np
import pytest

from projconvex import cli
from projconvex.complexes import DevelopedComplex
from projconvex.coxeter import minimum_volume_ellipse
from projconvex.errors import SpecParseError, UnknownParameter

DOUBLED = {"name": "doubled-333", "kind": "doubled_reflection", "orders": [3, 3, 3, 3, 3, 3]}
TRIANGLE = {"name": "tri-333", "kind": "reflection_polytope", "orders": [3, 3, 3], "polytope": {"simplex": 2}}


def write_spec(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)


def polygons(svg):
    out = []
    for pts in re.findall(r'points="([^"]*)"', svg):
        out.append(np.array([[float(v) for v in p.split(",")] for p in pts.split()]))
    return out


# spec parsing ------------------------------------------------------------------

def test_parse_spec_orders_forms():
    a = cli.parse_spec(json.dumps(DOUBLED))
    full = dict(DOUBLED, orders=np.where(np.eye(4, dtype=bool), 1, 3).tolist())
    b = cli.parse_spec(json.dumps(full))
    np.testing.assert_array_equal(a.orders, b.orders)


def test_parse_spec_missing_field():
    bad = {k: v for k, v in DOUBLED.items() if k != "orders"}
    with pytest.raises(SpecParseError, match="orders"):
        cli.parse_spec(json.dumps(bad))


def test_parse_spec_bad_json_position():
    with pytest.raises(SpecParseError, match="line 2 column"):
        cli.parse_spec('{"kind": "doubled_reflection",\n "orders": [3,,3]}')


def test_parse_spec_unknown_parameter():
    with pytest.raises(UnknownParameter):
        cli.parse_spec(json.dumps(dict(DOUBLED, parameters={"mu": 1.0})))
    with pytest.raises(UnknownParameter):
        cli.parse_spec(json.dumps(dict(TRIANGLE, parameters={"s": 1.0})))


def test_end_parameters_close_product():
    spec = cli.parse_spec(json.dumps(dict(DOUBLED, parameters={"s": 1.3, "t0": 0.7})))
    ends = cli.end_parameters(spec)
    from projconvex.invariants import product_constant
    assert np.prod([e.t for e in ends]) == pytest.approx(product_constant(1.3))


# develop ---------------------------------------------------------------------------

def test_develop_depth_zero_obj(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    code = cli.main(["develop", spec, "--depth", "0", "--out", str(tmp_path / "d0")])
    assert code == 0
    obj = (tmp_path / "d0.obj").read_text().splitlines()
    assert sum(line.startswith("o ") for line in obj) == 2
    assert sum(line.startswith("f ") for line in obj) == 8


def test_develop_depth_five_hyperbolic(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    code = cli.main(["develop", spec, "--depth", "5", "--out", str(tmp_path / "d5")])
    assert code == 0
    report = json.loads((tmp_path / "d5.report.json").read_text())
    checks = {c["name"]: c for c in report["checks"]}
    assert checks["convexity"]["value"] == "StrictlyConvexSoFar"
    assert report["passed"]
    assert all("tolerance" in c and "value" in c for c in report["checks"])


def test_develop_malformed_spec_exit_2(tmp_path, capsys):
    bad = {k: v for k, v in DOUBLED.items() if k != "orders"}
    code = cli.main(["develop", write_spec(tmp_path, bad), "--out", str(tmp_path / "x")])
    assert code == 2
    assert "SpecParseError" in capsys.readouterr().err


def test_develop_missing_file_exit_2(tmp_path, capsys):
    assert cli.main(["develop", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x")]) == 2


def test_develop_guard_exit_3(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    assert cli.main(["develop", spec, "--depth", "4", "--cap", "50", "--out", str(tmp_path / "g")]) == 3


def test_develop_nonrealizable_exit_2(tmp_path, capsys):
    spec = write_spec(tmp_path, dict(DOUBLED, parameters={"lambda01": -1.0}))
    assert cli.main(["develop", spec, "--out", str(tmp_path / "n")]) == 2


def test_develop_infeasible_invariants_exit_1(tmp_path, capsys):
    spec = write_spec(tmp_path, dict(DOUBLED, parameters={"t0": 1.0, "t1": 1.0, "t2": 1.0, "t3": 2.0}))
    assert cli.main(["develop", spec, "--depth", "1", "--out", str(tmp_path / "f")]) == 1


def test_report_round_trip(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    assert cli.main(["develop", spec, "--depth", "3", "--out", str(tmp_path / "r")]) == 0
    saved = json.loads((tmp_path / "r.report.json").read_text())
    cx = DevelopedComplex.from_json((tmp_path / "r.json").read_text())
    again = cli.complex_checks(cx, cli.Report(saved["name"])).to_json()
    complex_only = [c for c in saved["checks"] if c["name"] != "invariants"]
    assert again["checks"] == complex_only
    assert again["info"]["cells"] == saved["info"]["cells"]


def test_orbit_report_round_trip(tmp_path, capsys):
    spec = write_spec(tmp_path, TRIANGLE)
    assert cli.main(["develop", spec, "--depth", "5", "--out", str(tmp_path / "t")]) == 0
    saved = json.loads((tmp_path / "t.report.json").read_text())
    cx = DevelopedComplex.from_json((tmp_path / "t.json").read_text())
    assert cx.kind == "orbit"
    assert cli.complex_checks(cx, cli.Report(saved["name"])).to_json()["checks"] == saved["checks"]


# sweep -------------------------------------------------------------------------------

def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_sweep_s_feasible(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    code = cli.main(["sweep", spec, "--param", "s", "--range", "0.8", "1.2", "--steps", "9",
                     "--depth", "1", "--out", str(tmp_path / "s")])
    rows = read_csv(tmp_path / "s.csv")
    assert len(rows) == 9
    assert all(r["feasibility"] == "Feasible" for r in rows)
    assert [float(r["value"]) for r in rows] == pytest.approx(np.linspace(0.8, 1.2, 9))
    assert code == 0
    assert (tmp_path / "s.svg").read_text().startswith("<svg")


def test_sweep_lambda_triangle(tmp_path, capsys):
    spec = write_spec(tmp_path, TRIANGLE)
    code = cli.main(["sweep", spec, "--param", "lambda01", "--range", "0.5", "2", "--steps", "4",
                     "--depth", "6", "--out", str(tmp_path / "l")])
    rows = read_csv(tmp_path / "l.csv")
    assert [r["verdict"] for r in rows] == ["ProperlyConvex"] * 4
    assert code == 0


def test_sweep_zero_steps(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    code = cli.main(["sweep", spec, "--param", "s", "--range", "0.8", "1.2", "--steps", "0",
                     "--out", str(tmp_path / "z")])
    assert code == 0
    assert (tmp_path / "z.csv").read_text().strip() == ",".join(cli.SWEEP_COLUMNS)


def test_sweep_unknown_parameter(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    code = cli.main(["sweep", spec, "--param", "mu", "--range", "0", "1", "--out", str(tmp_path / "u")])
    assert code == 2
    assert "UnknownParameter" in capsys.readouterr().err


# render ----------------------------------------------------------------------------------

def test_render_seeds(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    cli.main(["develop", spec, "--depth", "0", "--out", str(tmp_path / "d0")])
    out1, out2 = tmp_path / "a.svg", tmp_path / "b.svg"
    assert cli.main(["render", str(tmp_path / "d0.json"), "--chart", "standard", "--out", str(out1)]) == 0
    assert cli.main(["render", str(tmp_path / "d0.json"), "--chart", "standard", "--out", str(out2)]) == 0
    assert len(polygons(out1.read_text())) == 2
    assert out1.read_bytes() == out2.read_bytes()


def test_render_triangle_tiling_inside_conic(tmp_path, capsys):
    spec = write_spec(tmp_path, TRIANGLE)
    cli.main(["develop", spec, "--depth", "8", "--out", str(tmp_path / "t8")])
    svg = tmp_path / "t8.svg"
    assert cli.main(["render", str(tmp_path / "t8.json"), "--out", str(svg)]) == 0
    polys = polygons(svg.read_text())
    pts = np.unique(np.vstack(polys).round(4), axis=0)
    assert len(polys) == 1 + 3 + 6 + 9 + 12 + 15 + 18 + 21 + 24
    c, e = minimum_volume_ellipse(pts)
    d = pts - c
    assert np.max(np.einsum("ki,ij,kj->k", d, e, d)) <= 1 + 1e-3


def test_render_bad_chart_and_missing(tmp_path, capsys):
    spec = write_spec(tmp_path, DOUBLED)
    cli.main(["develop", spec, "--depth", "0", "--out", str(tmp_path / "d0")])
    assert cli.main(["render", str(tmp_path / "d0.json"), "--chart", "1,-1,0,0", "--out", str(tmp_path / "x.svg")]) == 2
    assert cli.main(["render", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x.svg")]) == 2


# other commands -------------------------------------------------------------------------------

def test_coxeter_check(tmp_path, capsys):
    spec = write_spec(tmp_path, TRIANGLE)
    assert cli.main(["coxeter-check", spec, "--ellipse-tol", "0.05"]) == 0
    assert "[PASS] relations" in capsys.readouterr().out


def test_coxeter_check_wrong_kind(tmp_path, capsys):
    assert cli.main(["coxeter-check", write_spec(tmp_path, DOUBLED)]) == 2


def test_classify_ends(tmp_path, capsys):
    assert cli.main(["classify-ends", write_spec(tmp_path, DOUBLED)]) == 0
    assert capsys.readouterr().out.count("Horospherical") == 4


def test_kv_command(capsys):
    assert cli.main(["kv", "--cone", "orthant", "--point", "1,2", "--samples", "200000"]) == 0
    assert "relative error" in capsys.readouterr().out


def test_lorentz_closed_form():
    assert cli.lorentz_kv([1.0, 0.0, 0.0]) == pytest.approx(2 * np.pi)


def test_hilbert_dist_command(capsys):
    assert cli.main(["hilbert-dist", "--p", "0,0", "--q=-0.5,0.1"]) == 0
    out = capsys.readouterr().out
    diff = float(re.search(r"difference ([0-9.e+-]+)", out).group(1))
    assert diff <= 1e-9


def test_hilbert_dist_bad_point(capsys):
    assert cli.main(["hilbert-dist", "--p", "0,0,0,0", "--q", "0,0"]) == 2
