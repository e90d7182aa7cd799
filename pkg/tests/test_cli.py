import json
import math

import numpy as np
import pytest

from conftest import line_projection
from projgeom.cli import main
from projgeom.io import save_matrix
from projgeom.paths import geodesic


@pytest.fixture
def files(tmp_path):
    p, q, r = tmp_path / "p.json", tmp_path / "q.json", tmp_path / "r.json"
    save_matrix(p, np.diag([1.0, 0.0]))
    save_matrix(q, line_projection(math.pi / 6))
    save_matrix(r, np.diag([0.0, 1.0]))
    return tmp_path, str(p), str(q), str(r)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_angle(capsys, files):
    _, p, q, r = files
    code, out, _ = run(capsys, "angle", p, q)
    data = json.loads(out)
    assert code == 0
    assert data["distance"] == pytest.approx(0.5)
    assert data["theta_norm"] == pytest.approx(math.pi / 6)
    assert data["x_norm"] == pytest.approx(math.tan(math.pi / 6))


def test_angle_identical(capsys, files):
    _, p, _, _ = files
    code, out, _ = run(capsys, "angle", p, p)
    data = json.loads(out)
    assert code == 0 and data["distance"] == 0 and data["theta_norm"] == 0 and data["x_norm"] == 0


def test_angle_orthogonal_exit_3(capsys, files):
    _, p, _, r = files
    code, out, err = run(capsys, "angle", p, r)
    assert code == 3 and "not < 1" in err and out == ""


def test_input_errors_exit_2(capsys, files, tmp_path):
    _, p, _, _ = files
    assert run(capsys, "angle", p, str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "re": [[1, 0]]}')
    assert run(capsys, "angle", p, str(bad))[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["angle", "--bogus"])
    assert info.value.code == 2


def test_geodesic(capsys, files):
    _, p, q, _ = files
    code, out, _ = run(capsys, "geodesic", p, q, "--samples", "101")
    data = json.loads(out)
    assert code == 0
    assert data["length"]["riemannian"] == pytest.approx(math.pi / 6, abs=1e-6)
    assert abs(data["length"]["riemannian"] - data["length"]["endpoints_arcsin"]) <= 1e-5
    assert len(data["path"]) == 101


def test_geodesic_constant(capsys, files):
    _, p, _, _ = files
    code, out, _ = run(capsys, "geodesic", p, p, "--no-path")
    data = json.loads(out)
    assert code == 0 and data["samples"] == 1 and data["length"]["polygonal"] == 0


def test_geodesic_csv(capsys, files):
    _, p, q, _ = files
    code, out, _ = run(capsys, "geodesic", p, q, "--samples", "3", "--csv")
    lines = out.strip().splitlines()
    assert lines[0] == "t,distance_from_p" and len(lines) == 4


def test_length(capsys, files):
    tmp, p, q, _ = files
    path = geodesic(np.diag([1.0, 0.0]), line_projection(0.5), samples=2000)
    f = tmp / "path.json"
    f.write_text(json.dumps(path.to_list()))
    code, out, _ = run(capsys, "length", str(f))
    data = json.loads(out)
    assert code == 0 and data["holds"]
    assert data["polygonal"] == pytest.approx(0.5, abs=1e-6)


def test_length_violation_exit_4(capsys, files):
    tmp, _, _, _ = files
    path = geodesic(np.diag([1.0, 0.0]), line_projection(0.5), samples=3)
    f = tmp / "path.json"
    f.write_text(json.dumps(path.to_list()))
    assert run(capsys, "length", str(f))[0] == 4
    assert run(capsys, "length", str(f), "--tol", "1e-2")[0] == 0


def test_bound_zero(capsys):
    code, out, _ = run(capsys, "bound", "--kind", "diag", "--ratio", "0")
    data = json.loads(out)
    assert code == 0 and data["bound"] == 0


def test_bound_table_monotone(capsys):
    code, out, _ = run(capsys, "bound", "--kind", "diag", "--csv", "--grid", "15")
    rows = out.strip().splitlines()[1:]
    vals = [float(r.split(",")[1]) for r in rows]
    assert code == 0 and all(b > a for a, b in zip(vals, vals[1:]))


def test_bound_trials(capsys):
    code, out, _ = run(capsys, "bound", "--kind", "offdiag", "--trials", "30", "--seed", "3")
    data = json.loads(out)
    assert code == 0 and data["all_consistent"] and data["trials"] == 30


def test_bound_integral_geodesic(capsys, tmp_path):
    # B_t = A + tV through a subordinated split
    A = np.diag([0.0, 0.0, 1.0, 1.0])
    save_matrix(tmp_path / "a.json", A)
    rng = np.random.default_rng(0)
    V = rng.standard_normal((4, 4))
    V = 0.2 * (V + V.T) / np.linalg.norm(V + V.T, 2)
    save_matrix(tmp_path / "v.json", V)
    code, out, _ = run(capsys, "bound", "--kind", "integral", "--a", str(tmp_path / "a.json"),
                       "--v", str(tmp_path / "v.json"), "--gap", "0.5")
    data = json.loads(out)
    assert code == 0 and data["valid"] and data["margin"] >= 0


def test_bound_gap_closed(capsys, tmp_path):
    save_matrix(tmp_path / "a.json", np.diag([0.0, 1.0]))
    save_matrix(tmp_path / "v.json", np.diag([1.2, -1.2]))
    code, out, _ = run(capsys, "bound", "--kind", "integral", "--a", str(tmp_path / "a.json"),
                       "--v", str(tmp_path / "v.json"), "--gap", "0.5")
    assert code == 3
    assert json.loads(out)["error"] == "GapClosedError"


def test_constants(capsys):
    code, out, _ = run(capsys, "constants")
    data = json.loads(out)
    assert code == 0
    assert 0.67598931 < data["c_star"]["value"] < 0.67598932
    assert set(data["c_star"]) >= {"name", "value", "bracket", "method"}


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--grid", "2000")
    data = json.loads(out)
    assert code == 0 and data["ok"]
    assert data["appendix_a"]["min_slack"] > 0 and data["appendix_b"]["min_slack"] > 0


def test_hilbert(capsys):
    code, out, _ = run(capsys, "hilbert", "--t", "0.7853981633974483", "--n", "512")
    data = json.loads(out)
    assert code == 0 and abs(data["actual"] - math.sqrt(2) / 2) <= 1e-10
    assert set(data) >= {"actual", "predicted", "defect"}


def test_hilbert_norm(capsys):
    code, out, _ = run(capsys, "hilbert", "--p", "0.5", "--m", "50", "--method", "svd")
    data = json.loads(out)
    assert code == 0 and set(data) >= {"norm", "limit", "gap"}


def test_hilbert_input_error(capsys):
    assert run(capsys, "hilbert", "--p", "1.5", "--m", "5")[0] == 2


def test_out_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "bound", "--kind", "diag", "--trials", "20", "--seed", "7", "--out", str(a))[0] == 0
    assert run(capsys, "bound", "--kind", "diag", "--trials", "20", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["trials"] == 20
