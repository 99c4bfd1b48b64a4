from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from cartierlab import families as fam
from cartierlab.cli import main, run_checks
from cartierlab.serialization import bundle_from_json, bundle_to_json, dumps, report_to_json, tensor_to_json
from cartierlab.tensor_algebra import TensorElement

E2 = ["--n", "2", "--a", "[[1,2],[0,\"1/2\"]]", "--b", "[[0,1],[-1,0]]"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def e2_file(tmp_path, capsys):
    path = tmp_path / "e2t.json"
    assert run(capsys, "construct", "en-twisted", *E2, "--out", str(path))[0] == 0
    return path


def test_construct_en(capsys):
    code, out, _ = run(capsys, "construct", "en", "--n", "1", "--a", "[[0]]", "--b", "[[0]]")
    data = json.loads(out)
    assert code == 0 and len(data["algebra"]["labels"]) == 4 and data["kind"] == "precartier"


def test_construct_h2_reassociator(capsys):
    code, out, _ = run(capsys, "construct", "h2", "--sign", "+")
    B = bundle_from_json(json.loads(out))
    assert code == 0
    p = fam.h2_projector(B.algebra)
    assert B.base.reassociator - B.algebra.one(3) == TensorElement.outer(p, p, p).scale(-2)


def test_construct_twisted_reassociator(e2_file):
    P = bundle_from_json(json.loads(e2_file.read_text()))
    one, g = P.algebra.one(), P.algebra.element("g")
    assert P.base.reassociator == TensorElement.outer(one, one, g)


@pytest.mark.parametrize("argv", [
    ["construct", "en", "--n", "2", "--a", "[[1]]"],
    ["construct", "en", "--n", "1", "--a", "[[1.5]]"],
    ["construct", "en", "--n", "1", "--a", "nope"],
    ["construct", "h2"],
    ["construct", "en"],
])
def test_construct_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_verify_all_twisted(capsys, e2_file):
    code, out, _ = run(capsys, "verify", str(e2_file), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    tags = {c["tag"] for c in rep["checks"]}
    assert {"qtqb1", "pC2", "chi13-quasi", "QYBE", "QQYBE", "infbraid1"} <= tags


def test_verify_corrupted_chi(capsys, tmp_path):
    P = fam.build_en(fam.EnSpec(1, [[1]], [[0]]))
    g = P.algebra.element("g")
    path = tmp_path / "bad.json"
    path.write_text(dumps(bundle_to_json(P.with_chi(TensorElement.outer(g, g)))))
    code, out, _ = run(capsys, "verify", str(path), "--checks", "precartier", "--json")
    rep = json.loads(out)
    assert code == 1
    failed = [c for c in rep["checks"] if not c["passed"]]
    assert "pC2" in {c["tag"] for c in failed}
    assert all(c["witness"] for c in failed)


def test_verify_empty_checks(capsys, e2_file):
    code, out, _ = run(capsys, "verify", str(e2_file), "--checks", "", "--json")
    assert code == 0 and json.loads(out) == {"passed": True, "checks": []}


def test_verify_round_trip_equals_in_memory(capsys, e2_file):
    spec = fam.EnSpec(2, [[1, 2], [0, "1/2"]], [[0, 1], [-1, 0]])
    direct = report_to_json(run_checks(fam.build_en_twisted(spec), ["all"]))
    code, out, _ = run(capsys, "verify", str(e2_file), "--json")
    assert json.loads(out) == json.loads(dumps(direct))


def test_verify_stdin_and_inline(capsys, monkeypatch, e2_file):
    text = e2_file.read_text()
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    assert run(capsys, "verify", "-", "--checks", "qybe")[0] == 0
    assert run(capsys, "verify", text, "--checks", "qybe,cartier")[0] == 0


@pytest.mark.parametrize("argv", [
    ["verify", "/nonexistent.json"],
    ["verify", "{not json"],
    ["verify", "{\"algebra\": {}}"],
])
def test_verify_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_unknown_or_inapplicable_check(capsys, tmp_path, e2_file):
    assert run(capsys, "verify", str(e2_file), "--checks", "bogus")[0] == 2
    h2 = tmp_path / "h2.json"
    h2.write_text(dumps(bundle_to_json(fam.build_h2("-"))))
    assert run(capsys, "verify", str(h2), "--checks", "precartier")[0] == 2
    assert run(capsys, "verify", str(h2))[0] == 0


def test_quantize_paths(capsys, tmp_path, monkeypatch):
    src = tmp_path / "e2.json"
    run(capsys, "construct", "en", *E2, "--out", str(src))
    code, out, _ = run(capsys, "quantize", str(src), "--scale", "half", "--order", "2")
    Q = bundle_from_json(json.loads(out))
    assert code == 0 and Q.metadata["scale"] == "1/2" and Q.metadata["truncation_order"] == 2
    monkeypatch.setenv("CARTIERLAB_ORDER", "3")
    code, out, _ = run(capsys, "quantize", str(src), "--scale", "1")
    assert code == 0 and bundle_from_json(json.loads(out)).order == 3
    monkeypatch.delenv("CARTIERLAB_ORDER")
    assert run(capsys, "quantize", str(src), "--scale", "1")[0] == 2


def test_quantize_zero_chi(capsys, tmp_path):
    P = fam.build_en(fam.EnSpec(2, [[1, 2], [0, 1]], [[0, 0], [0, 0]]))
    src = tmp_path / "z.json"
    src.write_text(dumps(bundle_to_json(P)))
    code, out, _ = run(capsys, "quantize", str(src), "--scale", "1", "--order", "2")
    assert code == 0 and bundle_from_json(json.loads(out)).rmatrix == P.qt.rmatrix.with_order(2)


def test_quantize_obstruction(capsys, tmp_path):
    P = fam.build_en(fam.EnSpec.zero(1))
    alg = P.algebra
    x = alg.element("x1")
    chi = TensorElement.outer(alg.one(), x) + TensorElement.outer(x, alg.element("g"))
    src = tmp_path / "obs.json"
    src.write_text(dumps(bundle_to_json(P.with_chi(chi))))
    code, out, _ = run(capsys, "quantize", str(src), "--scale", "1", "--order", "1", "--json")
    data = json.loads(out)
    assert code == 1 and data["error"] == "quantization-obstruction"
    assert len(data["failing"]) == 3


def test_twist(capsys, tmp_path):
    src = tmp_path / "e2.json"
    run(capsys, "construct", "en", *E2, "--out", str(src))
    code, out, _ = run(capsys, "twist", str(src), "--preset", "1g", "--keep-chi", "--verify")
    twisted = bundle_from_json(json.loads(out))
    spec = fam.EnSpec(2, [[1, 2], [0, "1/2"]], [[0, 1], [-1, 0]])
    assert code == 0 and twisted == fam.build_en_twisted(spec)
    alg = twisted.algebra
    F = tensor_to_json(TensorElement.outer(alg.one(), alg.element("g")))
    code, out, _ = run(capsys, "twist", str(src), "--gauge", json.dumps(F))
    assert code == 0
    singular = tensor_to_json(TensorElement.outer(alg.one() + alg.element("g"), alg.one()))
    assert run(capsys, "twist", str(src), "--gauge", json.dumps(singular))[0] == 1
    assert run(capsys, "twist", str(src))[0] == 2


def test_cartier_rep(capsys, tmp_path):
    src = tmp_path / "e1.json"
    run(capsys, "construct", "en", "--n", "1", "--a", "[[1]]", "--b", "[[2]]", "--out", str(src))
    code, out, _ = run(capsys, "cartier-rep", str(src), "--strands", "4", "--presentations",
                       "--word", "b1 g2 B1", "--dump", "--json")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["operator_dim"] == 256
    assert {"b1", "B3", "g2"} <= set(data["generators"])
    assert data["word"]["operator"]["dim"] == 256
    assert run(capsys, "cartier-rep", str(src), "--strands", "3", "--word", "b3")[0] == 2
    twisted = tmp_path / "t.json"
    run(capsys, "construct", "en-twisted", "--n", "1", "--out", str(twisted))
    assert run(capsys, "cartier-rep", str(twisted), "--strands", "3")[0] == 2


@pytest.mark.parametrize("name", ["rmatrix-power", "en-normal-form", "h2-inverse", "twist-closed-forms"])
def test_oracles(capsys, name):
    code, out, _ = run(capsys, "oracle", name, "--n", "2", "--a", "[[1,2],[3,4]]", "--json")
    assert code == 0 and json.loads(out)["agree"]


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


@pytest.mark.skipif(shutil.which("cartierlab") is None, reason="console script not installed")
def test_console_script_exit_codes(tmp_path):
    out = subprocess.run(["cartierlab", "construct", "h2", "--sign", "+"], capture_output=True, text=True)
    assert out.returncode == 0
    res = subprocess.run(["cartierlab", "verify", "-", "--checks", "quasitriangular"],
                         input=out.stdout, capture_output=True, text=True)
    assert res.returncode == 0 and "qtqb3" in res.stdout
    assert subprocess.run(["cartierlab", "verify", "missing.json"], capture_output=True).returncode == 2
