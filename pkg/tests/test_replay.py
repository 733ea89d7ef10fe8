import ast
import pathlib

import numpy as np
import pytest

import cssldpc
from cssldpc.certify import certify_lower_bound, code_params
from cssldpc.decode import DepolarizingPrior, sample_error, syndromes
from cssldpc.replay import FailureDump, ReplayFinding, SyndromeInvalidDump, extract_logical


@pytest.fixture(scope="module")
def code(f7_pair):
    return code_params(f7_pair)


def _dump(code, ex, ez, exh, ezh):
    sx, sz = syndromes(code, ex, ez)
    return FailureDump(
        trial=0, seed_key=(0, 0, 0),
        e_x=tuple(np.nonzero(ex)[0].tolist()), e_z=tuple(np.nonzero(ez)[0].tolist()),
        s_x=tuple(np.nonzero(sx)[0].tolist()), s_z=tuple(np.nonzero(sz)[0].tolist()),
        ex_hat=tuple(np.nonzero(exh)[0].tolist()), ez_hat=tuple(np.nonzero(ezh)[0].tolist()),
        status="syndrome-failure",
    )


def test_degenerate_residual(code, f7_pair):
    n = code.n
    ex, ez = sample_error(DepolarizingPrior(0.05), n, np.random.default_rng(3))
    row = np.zeros(n, dtype=np.uint8)
    row[list(f7_pair.hx.rows[2])] = 1
    findings = extract_logical(code, _dump(code, ex, ez, ex ^ row, ez.copy()))
    assert all(f.kind == "degenerate" for f in findings)


def test_witness_extraction(code):
    n = code.n
    rej = certify_lower_bound(code, 5)
    assert rej.status == "rejected"
    witness = np.zeros(n, dtype=np.uint8)
    witness[list(rej.counterexample)] = 1
    ex, ez = sample_error(DepolarizingPrior(0.05), n, np.random.default_rng(4))
    if rej.side == "Z":
        dump = _dump(code, ex, ez, ex.copy(), ez ^ witness)
    else:
        dump = _dump(code, ex, ez, ex ^ witness, ez.copy())
    findings = extract_logical(code, dump)
    hits = [f for f in findings if f.kind == "witness"]
    assert len(hits) == 1
    assert hits[0].side == rej.side
    assert hits[0].report.valid
    assert hits[0].report.weight == 4


def test_exact_output_no_findings(code):
    ex, ez = sample_error(DepolarizingPrior(0.05), code.n, np.random.default_rng(5))
    findings = extract_logical(code, _dump(code, ex, ez, ex.copy(), ez.copy()))
    assert findings == [ReplayFinding("degenerate")]


def test_syndrome_invalid_dump_raises(code):
    n = code.n
    ex, ez = sample_error(DepolarizingPrior(0.05), n, np.random.default_rng(6))
    bad = ez.copy()
    bad[0] ^= 1
    with pytest.raises(SyndromeInvalidDump):
        extract_logical(code, _dump(code, ex, ez, ex.copy(), bad))


def test_replay_is_isolated_from_decoding_path():
    """No module on the decode/measurement path imports replay."""
    package_dir = pathlib.Path(cssldpc.__file__).parent
    for name in ("decode", "harness", "certify", "lift", "base", "binmat", "gf", "zmod"):
        tree = ast.parse((package_dir / f"{name}.py").read_text())
        imported = set()
        for node in ast.walk(tree):
            if isinstance(node, ast.Import):
                imported |= {a.name for a in node.names}
            elif isinstance(node, ast.ImportFrom) and node.module:
                imported.add(node.module)
            elif isinstance(node, ast.ImportFrom) and node.level:
                imported |= {a.name for a in node.names}
        assert "replay" not in imported, f"{name} imports replay"
