import numpy as np
import pytest

from cssldpc.certify import certify_lower_bound, code_params
from cssldpc.decode import (
    BPState,
    DecoderConfig,
    DepolarizingPrior,
    JointBPDecoder,
    _check_update,
    _graphs,
    classify_outcome,
    failure_dump_text,
    post_process,
    sample_error,
    syndromes,
)


@pytest.fixture(scope="module")
def code(f7_pair):
    return code_params(f7_pair)


def test_prior_validation_and_probs():
    prior = DepolarizingPrior(0.06)
    assert abs(sum(prior.probs) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        DepolarizingPrior(1.0)


def test_sample_error_zero_p(code):
    ex, ez = sample_error(DepolarizingPrior(0.0), code.n, np.random.default_rng(0))
    assert not ex.any() and not ez.any()


def test_sample_error_component_rates():
    # e_X flags X or Y (rate 2p/3); e_Z flags Z or Y; Y sets both
    p = 0.058
    n = 1_000_000
    rng = np.random.default_rng(123)
    ex, ez = sample_error(DepolarizingPrior(p), n, rng)
    for observed, expect in (
        (ex.mean(), 2 * p / 3),
        (ez.mean(), 2 * p / 3),
        ((ex & ez).mean(), p / 3),
        ((ex | ez).mean(), p),
    ):
        sigma = (expect * (1 - expect) / n) ** 0.5
        assert abs(observed - expect) < 4 * sigma


def test_syndromes_conventions(code, f7_pair):
    n = code.n
    zero = np.zeros(n, dtype=np.uint8)
    sx, sz = syndromes(code, zero, zero)
    assert not sx.any() and not sz.any()
    # single Z error on qubit v: s_X = column v of H_X
    v = 17
    ez = zero.copy()
    ez[v] = 1
    sx, sz = syndromes(code, zero, ez)
    assert sorted(np.nonzero(sx)[0]) == f7_pair.hx.col_support()[v]
    assert not sz.any()
    with pytest.raises(ValueError):
        syndromes(code, zero[:-1], zero)


def test_zero_noise_identity(code):
    decoder = JointBPDecoder(code, DepolarizingPrior(0.0))
    m = code.hx.nrows
    out = decoder.decode(np.zeros(m, dtype=np.uint8), np.zeros(m, dtype=np.uint8))
    assert out.status == "bp-converged"
    assert out.iterations == 0
    assert not out.ex_hat.any() and not out.ez_hat.any()


def test_single_error_completeness(code):
    decoder = JointBPDecoder(code, DepolarizingPrior(0.01))
    for qubit in range(code.n):
        for component in ("x", "z"):
            ex = np.zeros(code.n, dtype=np.uint8)
            ez = np.zeros(code.n, dtype=np.uint8)
            (ex if component == "x" else ez)[qubit] = 1
            sx, sz = syndromes(code, ex, ez)
            out = decoder.decode(sx, sz)
            assert classify_outcome(code, ex, ez, out.ex_hat, out.ez_hat) == "success"


def test_determinism(code):
    prior = DepolarizingPrior(0.08)
    outs = []
    for _ in range(2):
        decoder = JointBPDecoder(code, prior)
        ex, ez = sample_error(prior, code.n, np.random.default_rng([5, 77]))
        sx, sz = syndromes(code, ex, ez)
        out = decoder.decode(sx, sz)
        outs.append(out)
    a, b = outs
    assert np.array_equal(a.ex_hat, b.ex_hat) and np.array_equal(a.ez_hat, b.ez_hat)
    assert a.status == b.status and a.iterations == b.iterations
    assert a.rules_fired == b.rules_fired


def test_damping_neutrality_at_fixed_point(code):
    # drive BP to a numerical fixed point on the zero syndrome, then one
    # more damped iteration must coincide with the undamped one
    prior = DepolarizingPrior(0.01)
    decoder = JointBPDecoder(code, prior, DecoderConfig(max_iterations=400, damping=0.0,
                                                        fallback_zero_damping=False))
    gx = decoder.gx
    n = code.n
    w_i, w_x, w_z, w_y = prior.log_weights()
    mu = np.full(len(gx.edge_var), float(np.logaddexp(w_i, w_x) - np.logaddexp(w_z, w_y)))
    sx = np.zeros(gx.m, dtype=np.uint8)
    for _ in range(200):
        lam = _check_update(mu, gx, sx, 30.0)
        a_tot = np.bincount(gx.edge_var, weights=lam, minlength=n)
        mu = np.clip((a_tot[gx.edge_var] - lam) + float(np.logaddexp(w_i, w_x) - np.logaddexp(w_z, w_y)), -30, 30)
    lam = _check_update(mu, gx, sx, 30.0)
    a_tot = np.bincount(gx.edge_var, weights=lam, minlength=n)
    computed = np.clip((a_tot[gx.edge_var] - lam) + float(np.logaddexp(w_i, w_x) - np.logaddexp(w_z, w_y)), -30, 30)
    damped = 0.7 * computed + 0.3 * mu
    assert np.max(np.abs(damped - computed)) < 1e-10


def test_syndrome_soundness_random_batch(code):
    prior = DepolarizingPrior(0.06)
    decoder = JointBPDecoder(code, prior)
    for trial in range(400):
        ex, ez = sample_error(prior, code.n, np.random.default_rng([3, trial]))
        sx, sz = syndromes(code, ex, ez)
        out = decoder.decode(sx, sz)
        if out.syndrome_resolved:
            sxh, szh = syndromes(code, out.ex_hat, out.ez_hat)
            assert np.array_equal(sxh, sx) and np.array_equal(szh, sz)
        else:
            # ladder exhaustion must leave the BP estimate untouched
            assert out.status == "syndrome-failure"


def _state_for(code, sx, sz, rng_seed=0):
    """Synthetic non-converged BP state with neutral reliabilities."""
    n = code.n
    gx, gz = _graphs(code)
    return BPState(
        converged=False, iterations=1,
        ex_hat=np.zeros(n, dtype=np.uint8), ez_hat=np.zeros(n, dtype=np.uint8),
        margin_x=np.ones(n), margin_z=np.ones(n),
        flipped_x=np.zeros(n, dtype=bool), flipped_z=np.zeros(n, dtype=bool),
        unsat_x=int(sx.sum()), unsat_z=int(sz.sum()), damping=0.3,
    )


def _residual_for_error(code, ez_support):
    ez = np.zeros(code.n, dtype=np.uint8)
    for c in ez_support:
        ez[c] = 1
    sx, _ = syndromes(code, np.zeros(code.n, dtype=np.uint8), ez)
    return sx


@pytest.mark.parametrize("rule,support", [
    (1, [4, 30]), (2, [4, 30]), (4, [4, 30]), (5, [4, 30]), (8, [4]),
])
def test_individual_rules_cancel_small_residuals(code, rule, support):
    # rule 8 only engages residuals with at most four unsatisfied checks,
    # so it gets a single-qubit injection; the others take two qubits
    sx = _residual_for_error(code, support)
    sz = np.zeros(code.hz.nrows, dtype=np.uint8)
    cfg = DecoderConfig(rule_mask=(rule,))
    decoder = JointBPDecoder(code, DepolarizingPrior(0.05), cfg)
    state = _state_for(code, sx, sz)
    out = post_process(decoder, sx, sz, state)
    assert out.status == "pp-corrected"
    assert out.rules_fired == (("X", rule),)
    sxh, _ = syndromes(code, out.ex_hat, out.ez_hat)
    assert np.array_equal(sxh, sx)


def test_rule6_common_column(code):
    # residual equal to one column's support: exactly the three unsatisfied
    # checks incident to that column
    sx = _residual_for_error(code, [11])
    assert sx.sum() == 3
    cfg = DecoderConfig(rule_mask=(6,))
    decoder = JointBPDecoder(code, DepolarizingPrior(0.05), cfg)
    out = post_process(decoder, sx, np.zeros(code.hz.nrows, dtype=np.uint8), _state_for(code, sx, np.zeros(code.hz.nrows, dtype=np.uint8)))
    assert out.status == "pp-corrected"
    assert out.pp_rule == 6
    assert list(np.nonzero(out.ez_hat)[0]) == [11]


def _cycle_code(P=8):
    """Column-weight-2 circulant: qubit c checks (c, c+1 mod P); a single
    qubit error leaves exactly two unsatisfied checks (a weight-1 core)."""
    from cssldpc.binmat import SparseBinMatrix
    from cssldpc.certify import CssCode

    hx = SparseBinMatrix.from_cols(P, P, [[c, (c + 1) % P] for c in range(P)])
    hz = SparseBinMatrix.from_rows(1, P, [list(range(P))])
    return CssCode(hx=hx, hz=hz, check_orthogonality=True, lift_order=P)


def test_rule7_core_template_and_circulant_transfer():
    code = _cycle_code(8)
    cfg = DecoderConfig(rule_mask=(7,), core_wmax=2)
    decoder = JointBPDecoder(code, DepolarizingPrior(0.05), cfg)
    zero_sz = np.zeros(code.hz.nrows, dtype=np.uint8)
    for qubit in (3, 5):
        sx = _residual_for_error(code, [qubit])
        assert sx.sum() == 2
        out = post_process(decoder, sx, zero_sz, _state_for(code, sx, zero_sz))
        assert out.status == "pp-corrected"
        assert out.pp_rule == 7
        assert list(np.nonzero(out.ez_hat)[0]) == [qubit]
    # both residuals share one canonical key: the template bank stores a
    # single lifted core and transfers it by the circulant shift
    assert len(decoder._template_cache) == 1


def test_ladder_failure_keeps_bp_estimate(code):
    # an empty rule mask cannot cancel anything
    sx = _residual_for_error(code, [4, 30])
    zero_sz = np.zeros(code.hz.nrows, dtype=np.uint8)
    cfg = DecoderConfig(rule_mask=())
    decoder = JointBPDecoder(code, DepolarizingPrior(0.05), cfg)
    state = _state_for(code, sx, zero_sz)
    out = post_process(decoder, sx, zero_sz, state)
    assert out.status == "syndrome-failure"
    assert not out.ez_hat.any()


def test_classify_outcome_degeneracy_and_logical(code, f7_pair):
    n = code.n
    rng = np.random.default_rng(5)
    ex, ez = sample_error(DepolarizingPrior(0.05), n, rng)
    # exact estimate
    assert classify_outcome(code, ex, ez, ex.copy(), ez.copy()) == "success"
    # adding a stabilizer row is degenerate
    row = np.zeros(n, dtype=np.uint8)
    row[list(f7_pair.hx.rows[0])] = 1
    assert classify_outcome(code, ex, ez, ex ^ row, ez.copy()) == "success"
    # adding a verified logical witness is a logical failure
    rej = certify_lower_bound(code, 5)
    witness = np.zeros(n, dtype=np.uint8)
    witness[list(rej.counterexample)] = 1
    if rej.side == "Z":
        assert classify_outcome(code, ex, ez, ex.copy(), ez ^ witness) == "logical-failure"
    else:
        assert classify_outcome(code, ex, ez, ex ^ witness, ez.copy()) == "logical-failure"
    # syndrome mismatch
    bad = ez.copy()
    bad[0] ^= 1
    assert classify_outcome(code, ex, ez, ex.copy(), bad) in ("syndrome-failure",)


def test_fallback_is_cold_restart(code):
    cfg = DecoderConfig(max_iterations=4, damping=0.3, fallback_zero_damping=True)
    decoder = JointBPDecoder(code, DepolarizingPrior(0.10), cfg)
    prior = DepolarizingPrior(0.10)
    fallback_seen = False
    for trial in range(200):
        ex, ez = sample_error(prior, code.n, np.random.default_rng([9, trial]))
        sx, sz = syndromes(code, ex, ez)
        state = decoder.bp_decode(sx, sz)
        if state.damping == 0.0:
            fallback_seen = True
            break
    assert fallback_seen


def test_config_round_trip():
    cfg = DecoderConfig(max_iterations=500, damping=0.25, rule_mask=(1, 6, 8), beam_width=32)
    again = DecoderConfig.from_text(cfg.to_text())
    assert again == cfg
    with pytest.raises(ValueError):
        DecoderConfig(damping=1.0)


def test_failure_dump_round_trip(code):
    from cssldpc.replay import FailureDump

    prior = DepolarizingPrior(0.05)
    ex, ez = sample_error(prior, code.n, np.random.default_rng([1, 2]))
    sx, sz = syndromes(code, ex, ez)
    decoder = JointBPDecoder(code, prior)
    out = decoder.decode(sx, sz)
    text = failure_dump_text(7, (0, 0, 7), ex, ez, sx, sz, out)
    dump = FailureDump.from_json(text)
    assert dump.trial == 7
    assert set(dump.e_x) == set(np.nonzero(ex)[0].tolist())
    assert dump.status == out.status
