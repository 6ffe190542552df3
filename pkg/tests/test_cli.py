import json
import subprocess
import sys

import numpy as np
import pytest

from photonkit import default_grid
from photonkit.cli import bundled_scene_path, dumps, main, outer_leakage
from photonkit.fields import GaussianPacket, pseudo_inner

SCENE = str(bundled_scene_path())
PACKET = {"type": "packet", "eps": [1, 0, 0], "center": [0, 0, 2], "sigma": 0.6}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


@pytest.fixture
def write_scene(tmp_path):
    def write(raw, name="scene.json"):
        path = tmp_path / name
        path.write_text(json.dumps(raw))
        return str(path)
    return write


def test_empty_scene_state_axioms(capsys):
    code, report, _ = run(capsys, "check", "state-axioms")
    assert code == 0 and report["pass"]
    first = report["checks"][0]
    assert first["name"] == "normalization" and first["pass"] and first["residual"] == 0.0
    assert report["suite"] == "state-axioms" and report["grid"]["resolution"] == [32, 16, 32]
    assert all(c["pass"] == (c["residual"] < c["tolerance"]) for c in report["checks"])


def test_report_header(capsys):
    code, report, _ = run(capsys, "check", "state-axioms", "--scene", SCENE)
    assert code == 0
    assert report["tool"] == "photonkit" and report["command"] == "check"
    assert report["seed"] == 7 and len(report["scene_hash"]) == 64
    assert "wall_time" not in report["checks"][0]
    assert report["conventions"]["metric"].startswith("diag(+1,-1,-1,-1)")


def test_scene_errors_exit_2(capsys, write_scene, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "check", "--scene", str(bad))[0] == 2
    assert run(capsys, "check", "--scene", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "check", "--scene", write_scene({"fields": {"p": {"type": "?"}}}))[0] == 2
    assert run(capsys, "correlate", "nope", "vacuum", "--scene", SCENE)[0] == 2
    assert run(capsys, "photon", "nope", "--scene", SCENE)[0] == 2
    assert run(capsys, "check", "--kmin", "-1")[0] == 2
    code, _, err = run(capsys, "check", "--tol-scale", "0")
    assert code == 2 and "tol-scale" in err


def test_usage_errors_exit_2(capsys):
    for argv in (["check", "nosuchsuite"], ["check", "--grid", "4,4"], [], ["gram"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_non_lorenz_scene_fails_positivity(capsys, write_scene):
    bad = dict(PACKET, type="unconstrained_packet", eps=[0.2, 0, 0], amp=3.0, time_eps=2.0)
    path = write_scene({"fields": {"bad": bad}, "labels": {"x": {"a": "bad"}, "y": {"a": {"type": "sum", "terms": [[2, "bad"]]}}}})
    code, report, _ = run(capsys, "check", "state-axioms", "--scene", path)
    assert code == 1 and not report["pass"]
    pos = next(c for c in report["checks"] if c["name"] == "positivity_scene")
    assert not pos["pass"] and pos["detail"]["message"] == "positivity violated"
    code, report, _ = run(capsys, "gram", "vacuum", "x", "y", "--scene", path)
    assert code == 1 and report["checks"][0]["detail"]["message"].startswith("positivity violated")


def test_correlate(capsys):
    code, report, _ = run(capsys, "correlate", "mixed", "mixed", "--scene", SCENE)
    assert code == 0 and complex(*report["value"]) == pytest.approx(1.0, abs=1e-15)
    code, report, _ = run(capsys, "correlate", "vacuum", "photon", "--scene", SCENE)
    assert code == 0
    psi = GaussianPacket(np.array([1, -1j, 0]) / np.sqrt(2), [0, 0, 2], 0.6)
    expected = np.exp(-0.5 * pseudo_inner(psi, psi, default_grid()).real)
    assert complex(*report["value"]) == pytest.approx(expected, rel=1e-12)
    assert all(c["pass"] for c in report["checks"])


def test_gram(capsys):
    code, report, _ = run(capsys, "gram", "vacuum", "photon", "coherent", "mixed", "--scene", SCENE)
    assert code == 0
    G = np.array([[complex(*v) for v in row] for row in report["matrix"]])
    assert G.shape == (4, 4)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-12)


def test_photon_reports(capsys):
    code, report, _ = run(capsys, "photon", "circular", "--scene", SCENE)
    assert code == 0
    assert 0.95 < report["spin_parts"]["plus_fraction"] <= 1.0
    assert report["spin_parts_gauge"] == "radiation"
    assert report["polarization"]["classification"] == "H+"
    assert report["expectations"]["norm_sq"] == pytest.approx(report["norm_sq"])
    code, boosted, _ = run(capsys, "photon", "circular", "--scene", SCENE, "--boost", "0.3", "--shift", "0.5,0,0,1")
    assert code == 0 and boosted["applied"] == {"shift": [0.5, 0.0, 0.0, 1.0], "boost": 0.3}
    # the norm is invariant and (K0, K3) transforms as a four-vector
    assert boosted["norm_sq"] == pytest.approx(report["norm_sq"], rel=1e-6)
    ch, sh = np.cosh(0.3), np.sinh(0.3)
    k0, k3 = report["expectations"]["K0"], report["expectations"]["K3"]
    assert boosted["expectations"]["K0"] == pytest.approx(ch * k0 - sh * k3, rel=1e-5)
    assert boosted["expectations"]["K3"] == pytest.approx(ch * k3 - sh * k0, rel=1e-5)


def test_photon_degenerate_state(capsys):
    code, report, err = run(capsys, "photon", "zero_norm", "--scene", SCENE)
    assert code == 1 and report["error"] == "DegenerateStateError"
    assert "degenerate one-photon state" in err


def test_photon_narrow_packet(capsys, write_scene):
    path = write_scene({"fields": {"narrow": dict(PACKET, sigma=0.15)}})
    code, report, _ = run(capsys, "photon", "narrow", "--scene", path, "--kmin", "0.95", "--kmax", "3.05",
                          "--grid", "48,64,64")
    assert code == 0
    assert 1.99 <= report["expectations"]["K0"] <= 2.01
    assert 1.99 <= report["expectations"]["K3"] <= 2.01
    fractions = report["spin_parts"]
    assert fractions["plus_fraction"] == pytest.approx(fractions["minus_fraction"], abs=1e-10)


def test_photon_narrow_circular_packet(capsys, write_scene):
    circular = dict(PACKET, eps=[[0.7071067811865476, 0], [0, -0.7071067811865476], 0], sigma=0.2)
    path = write_scene({"fields": {"circ": circular}})
    code, report, _ = run(capsys, "photon", "circ", "--scene", path, "--kmin", "0.5", "--kmax", "3.5",
                          "--grid", "48,64,64")
    assert code == 0
    assert report["spin_parts"]["plus_fraction"] > 0.99
    assert report["polarization"]["classification"] == "H+"


def test_gauge_command(capsys):
    code, report, _ = run(capsys, "gauge", "oblique", "--scene", SCENE)
    assert code == 0 and all(c["pass"] for c in report["checks"])
    code, report, _ = run(capsys, "gauge", "zero_norm", "--scene", SCENE)
    assert code == 0
    assert report["representative"]["relative_norm"] < 1e-14


def test_out_and_timing(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, printed, _ = run(capsys, "correlate", "vacuum", "vacuum", "--out", str(out), "--timing")
    assert code == 0 and printed is None
    report = json.loads(out.read_text())
    assert "wall_time" in report and "wall_time" in report["checks"][0]


def test_tol_scale_tightens_checks(capsys):
    code, report, _ = run(capsys, "check", "weyl-algebra", "--tol-scale", "1e-30")
    assert code == 1 and report["tol_scale"] == 1e-30


def test_cutoff_warning(capsys, write_scene):
    path = write_scene({"fields": {"far": dict(PACKET, center=[0, 0, 8], sigma=1.0)}})
    code, _, err = run(capsys, "check", "state-axioms", "--scene", path)
    assert code == 0 and "warning: field 'far'" in err
    assert outer_leakage(GaussianPacket([1, 0, 0], [0, 0, 2], 0.6), default_grid()) < 1e-12


def test_seed_and_thread_determinism(capsys, monkeypatch):
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("PHOTONKIT_THREADS", threads)
        main(["check", "gauge", "--scene", SCENE])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    main(["check", "gauge", "--scene", SCENE, "--seed", "8"])
    assert capsys.readouterr().out != outputs[0]


def test_json_formatting():
    text = dumps({"a": float("inf"), "b": 0.1, "c": 1 + 2j, "d": np.float64(1e-300), "e": np.arange(2)})
    assert json.loads(text) == {"a": "inf", "b": 0.1, "c": [1.0, 2.0], "d": 1e-300, "e": [0, 1]}


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "photonkit.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("photonkit ")
