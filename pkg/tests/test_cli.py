import json
import math

import numpy as np
import pytest

from treeharm import VertexFunction, build_tree, delta, phi_profile, tau
from treeharm import io as tio
from treeharm.cli import golden_config_path, main, parse_symbol_spec
from treeharm.errors import ConfigError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_print_defaults(capsys):
    code, out, _ = run_cli(capsys, "--print-defaults")
    assert code == 0
    doc = json.loads(out)
    assert doc["q"] == 2 and "synthesis_tol" in doc


def test_phi_csv_values(capsys):
    code, out, _ = run_cli(capsys, "phi", "--q", "2", "--z", "0", "--n-max", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,re,im"
    assert len(lines) == 1 + 3  # header + n_max+1 rows
    last = lines[-1].split(",")
    assert abs(float(last[1]) - 5 / 6) < 1e-12


def test_phi_constant_at_minus_half_i(capsys):
    code, out, _ = run_cli(capsys, "phi", "--q", "3", "--z=-0.5j",
                           "--n-max", "5")
    assert code == 0
    for line in out.strip().splitlines()[1:]:
        _, re, im = line.split(",")
        assert abs(float(re) - 1.0) < 1e-12 and abs(float(im)) < 1e-12


def test_phi_plot_data(capsys):
    code, out, _ = run_cli(capsys, "phi", "--q", "2", "--z", "0.3",
                           "--n-max", "4", "--plot-data")
    assert code == 0
    assert out.splitlines()[0] == "x,y"


def test_extrema_laplacian(capsys):
    code, out, _ = run_cli(capsys, "extrema", "--q", "2",
                           "--symbol", "laplacian", "--p", "1.0")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["max_mod"] - 2.0) < 1e-12
    assert abs(abs(doc["argmax"][0]) - tau(2) / 2) < 1e-6


def test_extrema_heat_value(capsys):
    from treeharm import phi_cap

    code, out, _ = run_cli(capsys, "extrema", "--q", "2",
                           "--symbol", "heat:1", "--p", "1.0")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["max_mod"] - math.exp(1 + phi_cap(2, 1.0, 1.0))) < 1e-8


def test_malformed_symbol_spec(capsys):
    code, _, err = run_cli(capsys, "extrema", "--q", "2",
                           "--symbol", "mystery:7", "--p", "1.0")
    assert code == 2
    assert "symbol spec" in err
    with pytest.raises(ConfigError):
        parse_symbol_spec(2, "sphere:x")


def test_kernel_synthesis_cli(capsys):
    code, out, _ = run_cli(capsys, "kernel", "--q", "2", "--symbol",
                           "laplacian", "--support", "1", "--p", "1.0")
    assert code == 0
    doc = json.loads(out)
    vals = doc["kernel"]["values"]
    assert abs(vals[0][0] - 1.0) < 1e-10
    assert abs(vals[1][0] + 1 / 3) < 1e-10
    assert doc["synthesis"]["max_residual"] < 1e-10


def test_decompose_cli(tmp_path, capsys):
    g = build_tree(2, 10)
    p = 1.5
    t = tau(2)
    z1 = t / 8 - 1j * delta(3.0)
    z2 = -t / 8 - 1j * delta(3.0)
    f = VertexFunction(g, 2 * phi_profile(2, z1, g.R)[g.levels]
                       + 3 * phi_profile(2, z2, g.R)[g.levels])
    path = tmp_path / "f.json"
    path.write_text(json.dumps(tio.vertex_to_json_dict(f)))
    from treeharm import gamma

    a1, a2 = complex(gamma(2, z1)), complex(gamma(2, z2))
    spec = f"{a1.real}{a1.imag:+}j,{a2.real}{a2.imag:+}j"
    code, out, _ = run_cli(capsys, "decompose", "--input", str(path),
                           "--multiplier", "laplacian", "--A", spec, "--N", "1")
    assert code == 0
    doc = json.loads(out)
    roots = doc["components_at_root"]
    assert abs(roots[0][0] - 2.0) < 1e-8
    assert abs(roots[1][0] - 3.0) < 1e-8


def test_decompose_duplicate_eigenvalues_named(tmp_path, capsys):
    g = build_tree(2, 6)
    f = VertexFunction(g, np.ones(g.n_vertices, dtype=complex))
    path = tmp_path / "f.json"
    path.write_text(json.dumps(tio.vertex_to_json_dict(f)))
    code, _, err = run_cli(capsys, "decompose", "--input", str(path),
                           "--multiplier", "laplacian", "--A", "1,1", "--N", "1")
    assert code == 1
    assert "distinct" in err.lower()


def test_decompose_bad_order(tmp_path, capsys):
    g = build_tree(2, 6)
    f = VertexFunction(g, np.ones(g.n_vertices, dtype=complex))
    path = tmp_path / "f.json"
    path.write_text(json.dumps(tio.vertex_to_json_dict(f)))
    code, _, err = run_cli(capsys, "decompose", "--input", str(path),
                           "--multiplier", "laplacian", "--A", "1,2", "--N", "0")
    assert code == 2
    assert "order" in err


def test_norms_cli(tmp_path, capsys):
    g = build_tree(2, 8)
    f = VertexFunction(g, np.zeros(g.n_vertices, dtype=complex))
    f.values[0] = 1.0
    path = tmp_path / "f.json"
    path.write_text(json.dumps(tio.vertex_to_json_dict(f)))
    code, out, _ = run_cli(capsys, "norms", "--input", str(path),
                           "--kind", "weak", "--p", "3.0")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == 1.0


def test_strichartz_golden_exit0(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "strichartz",
                           "--config", str(golden_config_path("golden")),
                           "--out", str(tmp_path))
    assert code == 0
    assert "verdict=consistent" in out
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert all(s["matches"] for s in summary["scenarios"])
    # per-scenario reports and norm tables were written
    assert (tmp_path / "laplacian_sup_max.json").exists()
    assert (tmp_path / "laplacian_sup_max_norms.csv").exists()


def test_strichartz_regime_b_exit0(capsys):
    code, out, _ = run_cli(capsys, "strichartz",
                           "--config", str(golden_config_path("regime_b")))
    assert code == 0  # predictions matched, including hypothesis-violated
    assert "verdict=hypothesis-violated" in out


def test_strichartz_missing_config(capsys):
    code, _, err = run_cli(capsys, "strichartz", "--config", "/nonexistent.json")
    assert code == 2
    assert "not found" in err


def test_strichartz_verdict_mismatch_exit3(tmp_path, capsys):
    doc = {
        "q": 2, "R": 12, "p": 1.0, "seed": 1,
        "scenarios": [{
            "name": "wrong_expectation",
            "multiplier": {"kind": "laplacian"},
            "regime": "above_max", "amplitude_factor": 1.1,
            "direction": "backward", "iterates": 6,
            "planted": [{"alpha_over_tau": 0.5, "coeff": [1.0, 0.0]}],
            "expected_verdict": "consistent"}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "strichartz", "--config", str(path))
    assert code == 3


def test_strichartz_reports_reproducible(tmp_path, capsys):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    for out in (out1, out2):
        code, _, _ = run_cli(capsys, "strichartz",
                             "--config", str(golden_config_path("regime_b")),
                             "--out", str(out))
        assert code == 0
    for name in ("above_max_planted_seed", "above_max_zero_seed", "summary"):
        a = tio.strip_metadata((out1 / f"{name}.json").read_text())
        b = tio.strip_metadata((out2 / f"{name}.json").read_text())
        assert a == b


def test_seed_env_override(tmp_path, capsys, monkeypatch):
    doc = json.loads(golden_config_path("regime_b").read_text())
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    monkeypatch.setenv("TREEHARM_SEED", "777")
    code, _, _ = run_cli(capsys, "strichartz", "--config", str(path),
                         "--out", str(tmp_path / "o"))
    assert code == 0
    rep = json.loads((tmp_path / "o" / "above_max_zero_seed.json").read_text())
    assert rep["seed"] == 777
