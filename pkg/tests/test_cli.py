import pathlib

import pytest

from cssldpc.cli import main


def run(argv):
    return main([str(a) for a in argv])


def test_full_pipeline_on_degenerate_base(tmp_path: pathlib.Path, capsys):
    coeffs = tmp_path / "base.coeffs"
    code = tmp_path / "base.code"
    labels = tmp_path / "lift.labels"

    # J=1, m=1: a two-branch base with no 6-cycles at all; the whole
    # pipeline runs in milliseconds
    assert run(["search-base", "--field", "7", "--m", "1", "--J", "1", "--out", coeffs]) == 0
    assert coeffs.exists()

    assert run(["certify-base", "--coeffs", coeffs]) == 0
    out = capsys.readouterr().out
    assert "orthogonality certificate: pass" in out
    assert "4-cycle certificate: pass" in out

    assert run(["build-base", "--coeffs", coeffs, "--out", code]) == 0
    assert code.exists() and (str(code) + ".map",)

    assert run(["lift", "--base", coeffs, "--P", "4", "--seed", "1", "--out", labels]) == 0
    out = capsys.readouterr().out
    assert "label search: solved" in out
    assert labels.exists()
    lifted_code = pathlib.Path(str(labels) + ".code")
    assert lifted_code.exists()

    assert run(["certify-lift", "--base", coeffs, "--labels", labels]) == 0

    assert run(["distance", "--code", lifted_code, "--target", "2", "--budget", "30"]) == 0
    out = capsys.readouterr().out
    assert "verdict accepted" in out

    assert run(["decode", "--code", lifted_code, "--p", "0.01", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "status" in out

    # the degenerate J=1 code has k=0, so no hashing reference is emitted
    plot = tmp_path / "fer.dat"
    assert run(["fer", "--code", lifted_code, "--p-list", "0.0,0.02",
                "--trials", "50", "--seed", "2", "--out", plot]) == 0
    text = plot.read_text()
    assert text.startswith("# p fer")
    assert len([ln for ln in text.splitlines() if not ln.startswith("#")]) == 2


def test_witness_command(tmp_path: pathlib.Path, f7_pair, capsys):
    from cssldpc.binmat import to_alist
    from cssldpc.certify import certify_lower_bound, code_params, witness_to_text

    code_obj = code_params(f7_pair)
    rej = certify_lower_bound(code_obj, 5)
    code_file = tmp_path / "f7.code"
    code_file.write_text("#X\n" + to_alist(f7_pair.hx) + "\n#Z\n" + to_alist(f7_pair.hz))
    wit_file = tmp_path / "w.txt"
    wit_file.write_text(witness_to_text(rej.side, (), [(c, 0) for c in rej.counterexample]))
    assert run(["witness", "--code", code_file, "--witness", wit_file]) == 0
    out = capsys.readouterr().out
    assert "valid witness: True" in out


def test_search_exhaustive_multiple_outputs(tmp_path: pathlib.Path):
    out = tmp_path / "cands"
    assert run(["search-base", "--field", "7", "--m", "3", "--J", "2",
                "--exhaustive", "--out", out]) == 0
    assert (tmp_path / "cands.0").exists()
