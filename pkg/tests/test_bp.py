"""Tests for the min-sum belief propagation baseline and its OSD fallback."""

import math

import numpy as np
import pytest

from lposd import (
    BinaryMatrix,
    BpConfig,
    CssCode,
    InvalidParameter,
    OsdConfig,
    bp_osd_decode,
    min_sum_bp,
)

_CLAMP = 50.0


def reference_min_sum(code, s, channel_p, max_iterations):
    """Loop-based re-implementation of the scaled min-sum schedule."""
    n = code.n
    m = code.hx.n_rows
    s_arr = np.asarray(s, dtype=np.uint8) & 1
    prior = math.log((1.0 - channel_p) / channel_p)
    edges = [(q, j) for j in range(m) for q in code.hx.row_support(j)]
    by_check = {j: [e for e in edges if e[1] == j] for j in range(m)}
    by_qubit = {q: [e for e in edges if e[0] == q] for q in range(n)}
    c2v = {e: 0.0 for e in edges}
    posterior = np.full(n, prior)
    hard = np.zeros(n, dtype=np.uint8)
    for t in range(1, max_iterations + 1):
        alpha = 1.0 - 2.0 ** (-t)
        v2c = {}
        for (q, j) in edges:
            total = prior + sum(c2v[e] for e in by_qubit[q] if e != (q, j))
            v2c[(q, j)] = min(max(total, -_CLAMP), _CLAMP)
        new = {}
        for (q, j) in edges:
            others = [v2c[e] for e in by_check[j] if e != (q, j)]
            sign = 1.0
            for v in others:
                sign *= -1.0 if v < 0.0 else 1.0
            mag = min(abs(v) for v in others) if others else 0.0
            msg = alpha * (1.0 - 2.0 * s_arr[j]) * sign * mag
            new[(q, j)] = min(max(msg, -_CLAMP), _CLAMP)
        c2v = new
        posterior = np.array(
            [prior + sum(c2v[e] for e in by_qubit[q]) for q in range(n)]
        )
        hard = (posterior < 0.0).astype(np.uint8)
        if np.array_equal(code.syndrome(hard), s_arr):
            return hard, posterior, True, t
    return hard, posterior, False, max_iterations


def twin_qubit_code():
    """Two qubits behind one check: BP cannot split the symmetric pair."""
    hx = BinaryMatrix.from_entries(1, 2, [(0, 0), (0, 1)])
    return CssCode(hx, BinaryMatrix([], 2), name="twin")


def test_config_validation():
    with pytest.raises(InvalidParameter):
        BpConfig(channel_p=0.0)
    with pytest.raises(InvalidParameter):
        BpConfig(channel_p=0.5)
    with pytest.raises(InvalidParameter):
        BpConfig(max_iterations=0)
    cfg = BpConfig()
    assert cfg.channel_p == 0.05
    assert cfg.max_iterations is None


def test_zero_syndrome_converges_immediately(surface3):
    code = surface3
    res = min_sum_bp(code, np.zeros(code.hx.n_rows, dtype=np.uint8), BpConfig())
    assert res.converged
    assert res.iterations == 1
    assert not res.hard.any()


def test_single_error_recovered_when_unambiguous(surface3):
    # Two weight-1 errors with the same syndrome (twin boundary qubits
    # hanging off one check) stall symmetric message passing; every other
    # single error must converge.  The fallback pipeline must fix the twins.
    code = surface3
    syndromes = [tuple(code.syndrome(np.eye(code.n, dtype=np.uint8)[q]))
                 for q in range(code.n)]
    ambiguous = 0
    for q in range(code.n):
        e = np.zeros(code.n, dtype=np.uint8)
        e[q] = 1
        s = code.syndrome(e)
        res = min_sum_bp(code, s, BpConfig())
        if syndromes.count(tuple(s)) == 1:
            assert res.converged
            assert np.array_equal(code.syndrome(res.hard), s)
        elif not res.converged:
            ambiguous += 1
            rescued = bp_osd_decode(code, s)
            assert np.array_equal(code.syndrome(rescued.correction), s)
    assert ambiguous >= 1


def test_convergence_flag_means_syndrome_match(surface5):
    code = surface5
    rng = np.random.default_rng(41)
    converged_seen = 0
    for _ in range(30):
        e = (rng.random(code.n) < 0.04).astype(np.uint8)
        s = code.syndrome(e)
        res = min_sum_bp(code, s, BpConfig())
        assert res.iterations <= code.n
        if res.converged:
            converged_seen += 1
            assert np.array_equal(code.syndrome(res.hard), s)
    assert converged_seen >= 20


def test_soft_output_tracks_hard_decision(surface3):
    code = surface3
    rng = np.random.default_rng(43)
    e = (rng.random(code.n) < 0.2).astype(np.uint8)
    res = min_sum_bp(code, code.syndrome(e), BpConfig())
    assert np.all(res.soft > 0.0)
    assert np.all(res.soft < 1.0)
    assert np.array_equal(res.hard, (res.soft > 0.5).astype(np.uint8))


def test_matches_reference_implementation(surface3):
    code = surface3
    rng = np.random.default_rng(47)
    for trial in range(10):
        e = (rng.random(code.n) < 0.25).astype(np.uint8)
        s = code.syndrome(e)
        cfg = BpConfig(channel_p=0.08, max_iterations=8)
        res = min_sum_bp(code, s, cfg)
        hard, posterior, converged, iterations = reference_min_sum(
            code, s, 0.08, 8
        )
        assert res.converged == converged
        assert res.iterations == iterations
        assert np.array_equal(res.hard, hard)
        np.testing.assert_allclose(
            res.soft, 1.0 / (1.0 + np.exp(posterior)), atol=1e-12
        )


def test_symmetric_pair_stalls_and_osd_rescues():
    code = twin_qubit_code()
    s = np.array([1], dtype=np.uint8)
    res = min_sum_bp(code, s, BpConfig(max_iterations=32))
    assert not res.converged
    assert res.iterations == 32
    decoded = bp_osd_decode(code, s, BpConfig(max_iterations=32))
    assert decoded.stage in ("osd-0", "osd-cs")
    assert decoded.diagnostics["bp_converged"] is False
    assert np.array_equal(code.syndrome(decoded.correction), s)
    assert decoded.correction.sum() == 1


def test_bp_osd_converged_path(surface3):
    code = surface3
    e = np.zeros(code.n, dtype=np.uint8)
    e[2] = 1
    s = code.syndrome(e)
    res = bp_osd_decode(code, s)
    assert res.stage == "bp-converged"
    assert res.diagnostics["bp_converged"] is True
    assert np.array_equal(code.syndrome(res.correction), s)


def test_bp_osd_deterministic_with_seeded_rng(surface5):
    code = surface5
    rng = np.random.default_rng(53)
    e = (rng.random(code.n) < 0.12).astype(np.uint8)
    s = code.syndrome(e)
    cfg = BpConfig(max_iterations=4)
    osd_cfg = OsdConfig(tie_break="random", seed=7)
    a = bp_osd_decode(code, s, cfg, osd_cfg)
    b = bp_osd_decode(code, s, cfg, osd_cfg)
    assert np.array_equal(a.correction, b.correction)
    assert a.stage == b.stage
    c = bp_osd_decode(code, s, cfg, OsdConfig(tie_break="random"),
                      rng=np.random.default_rng(11))
    d = bp_osd_decode(code, s, cfg, OsdConfig(tie_break="random"),
                      rng=np.random.default_rng(11))
    assert np.array_equal(c.correction, d.correction)


def test_iteration_budget_respected(surface5):
    code = surface5
    rng = np.random.default_rng(59)
    e = (rng.random(code.n) < 0.3).astype(np.uint8)
    s = code.syndrome(e)
    res = min_sum_bp(code, s, BpConfig(max_iterations=1))
    assert res.iterations == 1
