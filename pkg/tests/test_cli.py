import csv
import io
import json
import math
from pathlib import Path

import pytest

from sisext.cli import build_parser, main, run_sweep, sigma_grid
from sisext.classify import EXTREME_NOT_EXPOSED, NOT_EXTREME

ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ROOT / "samples"
EXAMPLES = ROOT / "examples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_classify_gauss_sigma_i(capsys):
    code, out, _ = run(capsys, "classify", EXAMPLES / "gauss_sigma_i.json")
    assert code == 0
    assert json.loads(out)["overall"] == EXTREME_NOT_EXPOSED


def test_classify_sech_single(capsys):
    code, out, _ = run(capsys, "classify", EXAMPLES / "sech_single.json")
    assert code == 0
    assert json.loads(out)["overall"] == "Exposed"


def test_garbage_input(capsys, tmp_path):
    bad = tmp_path / "garbage.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "classify", bad)
    assert code == 1
    assert err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "classify", tmp_path / "absent.json")
    assert code == 1


def test_invalid_spec(capsys, tmp_path):
    doc = json.loads((SAMPLES / "gauss_single.json").read_text())
    doc["generator"]["a"] = -1.0
    p = tmp_path / "neg.json"
    p.write_text(json.dumps(doc))
    code, _, _ = run(capsys, "classify", p)
    assert code == 1


def test_svg_rejected_for_classify(capsys):
    code, _, _ = run(capsys, "classify", EXAMPLES / "sech_single.json", "--format", "svg")
    assert code == 1


def test_nonpositive_tolerance_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["classify", "x.json", "--tol-quad", "0"])


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO((EXAMPLES / "sech_single.json").read_text()))
    code, out, _ = run(capsys, "classify", "-")
    assert code == 0
    assert json.loads(out)["overall"] == "Exposed"


def test_out_path(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "classify", EXAMPLES / "sech_single.json", "--out", dest)
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["overall"] == "Exposed"


def test_deterministic_json(capsys):
    outs = [run(capsys, "classify", SAMPLES / "gauss_sigma_2.json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "witness", SAMPLES / "gauss_sigma_2.json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_zeros_sigma_minus1(capsys):
    code, out, _ = run(capsys, "zeros", SAMPLES / "gauss_sigma_minus1.json", "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    assert list(rows[0]) == ["re_lambda", "im_lambda", "multiplicity", "w_re", "w_im",
                             "paired_with_row"]
    ims = sorted(float(r["im_lambda"]) for r in rows)
    assert ims == pytest.approx([math.pi / 4, 3 * math.pi / 4], abs=1e-10)
    assert all(r["paired_with_row"] != "" for r in rows)
    assert {int(r["paired_with_row"]) for r in rows} == {0, 1}


def test_zeros_sigma_i(capsys):
    code, out, _ = run(capsys, "zeros", SAMPLES / "gauss_sigma_i.json", "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    ims = sorted(float(r["im_lambda"]) for r in rows)
    assert ims == pytest.approx([math.pi / 8, 5 * math.pi / 8], abs=1e-10)
    assert all(r["paired_with_row"] == "" for r in rows)


def test_zeros_single_gaussian_empty(capsys):
    code, out, _ = run(capsys, "zeros", SAMPLES / "gauss_single.json", "--format", "csv")
    assert code == 0
    assert csv_rows(out) == []
    code, out, _ = run(capsys, "zeros", SAMPLES / "gauss_single.json")
    assert json.loads(out)["zeros"] == []


def test_zeros_svg(capsys):
    code, out, _ = run(capsys, "zeros", SAMPLES / "gauss_sigma_minus1.json", "--format", "svg")
    assert code == 0
    assert out.startswith("<svg") and out.rstrip().endswith("</svg>")


def test_norm_single_secant(capsys, oracle):
    code, out, _ = run(capsys, "norm", SAMPLES / "sech_single.json")
    assert code == 0
    d = json.loads(out)
    assert d["l1"] == pytest.approx(oracle("half_pi"), abs=1e-10)
    assert d["weighted_plus"] == "divergent"
    assert d["weighted_minus"] == "divergent"


def test_norm_single_gaussian(capsys, oracle):
    code, out, _ = run(capsys, "norm", SAMPLES / "gauss_single.json")
    d = json.loads(out)
    assert d["l1"] == pytest.approx(oracle("sqrt_pi"), abs=1e-10)
    assert d["weighted_plus"] == pytest.approx(oracle("e_sqrt_pi"), abs=1e-9)
    assert d["weighted_minus"] == pytest.approx(oracle("e_sqrt_pi"), abs=1e-9)


def test_norm_moment_zero_secant(capsys, oracle):
    code, out, _ = run(capsys, "norm", SAMPLES / "sech_moment_zero.json")
    d = json.loads(out)
    assert d["l1"] == pytest.approx(oracle("sech_e_m1_l1"), abs=1e-8)
    assert d["weighted_plus"] == pytest.approx(oracle("sech_e_m1_weighted_plus"), abs=1e-8)
    assert d["weighted_minus"] == "divergent"


def test_witness_command(capsys):
    code, out, _ = run(capsys, "witness", SAMPLES / "gauss_sigma_2.json")
    assert code == 0
    d = json.loads(out)
    assert d["overall"] == NOT_EXTREME
    assert d["witnesses"] and all(w["passed"] for w in d["witnesses"])


def test_recover_gauss(capsys):
    code, out, _ = run(capsys, "recover", SAMPLES / "gauss_sigma_i.json", "--format", "csv")
    assert code == 0
    got = {float(r["node"]): complex(float(r["re"]), float(r["im"])) for r in csv_rows(out)}
    big = {n: c for n, c in got.items() if abs(c) > 1e-8}
    assert set(big) == {-1.0, 1.0}
    assert big[-1.0] / big[1.0] == pytest.approx(-1j, abs=1e-9)


def test_recover_secant(capsys):
    code, out, _ = run(capsys, "recover", SAMPLES / "sech_moment_zero.json")
    d = json.loads(out)
    got = {c["node"]: complex(c["re"], c["im"]) for c in d["coefficients"]}
    assert got[0] == pytest.approx(math.e, abs=1e-9)
    assert got[1] == pytest.approx(-1, abs=1e-9)


def test_sigma_grid_hits_axes():
    grid = sigma_grid((-2, 2), (-2, 2), 11, 11)
    assert len(grid) == 121
    assert sum(1 for s in grid if s.imag == 0) == 11
    assert 0j in grid


def test_sweep_11x11():
    cells = run_sweep((-2, 2), (-2, 2), 11, 11)
    for c in cells:
        s = c["sigma"]
        if s == 0:
            assert c["overall"] == EXTREME_NOT_EXPOSED
            assert c["note"] == "single translate"
        elif s.imag == 0:
            assert c["overall"] == NOT_EXTREME and c["witnesses_verified"]
        else:
            assert c["overall"] == EXTREME_NOT_EXPOSED
    assert sum(c["overall"] == NOT_EXTREME for c in cells) == 10


def test_sweep_without_real_sigma(capsys):
    code, out, _ = run(capsys, "example-sigma", "--re-min", -1, "--re-max", 1, "--im-min", 0.5,
                       "--im-max", 1.5, "--nx", 3, "--ny", 3, "--format", "csv")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 9
    assert not any(r["overall"] == NOT_EXTREME for r in rows)


def test_sweep_svg_and_resolution_limit(capsys):
    code, out, _ = run(capsys, "example-sigma", "--nx", 3, "--ny", 3, "--format", "svg")
    assert code == 0 and out.startswith("<svg")
    code, _, _ = run(capsys, "example-sigma", "--nx", 513, "--ny", 2)
    assert code == 1


def test_sweep_concurrent_matches_serial():
    a = run_sweep((-1, 1), (-1, 1), 3, 3, jobs=1)
    b = run_sweep((-1, 1), (-1, 1), 3, 3, jobs=4)
    assert a == b
